#include "oactl/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

#include "oactl/errors.hpp"

namespace oactl {

namespace {

enum class TokType { Num, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  TokType type;
  double num = 0.0;
  std::string text;
  std::size_t pos = 0;
};

std::vector<Token> tokenize(const std::string& s) {
  std::vector<Token> toks;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      // Scan a decimal literal by hand so that strtod never sees signs,
      // hex prefixes, or "inf"/"nan" spellings.
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      if (j < s.size() && s[j] == '.') {
        ++j;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      }
      if (j == i || (j == i + 1 && s[i] == '.'))
        throw ParseError("malformed number", i);
      if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
        if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
          ++k;
          while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
          j = k;
        }
      }
      const std::string span = s.substr(i, j - i);
      toks.push_back({TokType::Num, std::strtod(span.c_str(), nullptr), span, i});
      i = j;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
        ++j;
      toks.push_back({TokType::Ident, 0.0, s.substr(i, j - i), i});
      i = j;
      continue;
    }
    TokType t;
    switch (c) {
      case '+': t = TokType::Plus; break;
      case '-': t = TokType::Minus; break;
      case '*': t = TokType::Star; break;
      case '/': t = TokType::Slash; break;
      case '^': t = TokType::Caret; break;
      case '(': t = TokType::LParen; break;
      case ')': t = TokType::RParen; break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", i);
    }
    toks.push_back({t, 0.0, std::string(1, c), i});
    ++i;
  }
  toks.push_back({TokType::End, 0.0, "", s.size()});
  return toks;
}

double powi(double base, int exp) {
  double result = 1.0, b = base;
  for (int e = exp; e > 0; e >>= 1) {
    if (e & 1) result *= b;
    b *= b;
  }
  return result;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

class ExprParser {
 public:
  ExprParser(const std::string& text, int n_x, int n_u)
      : toks_(tokenize(text)), n_x_(n_x), n_u_(n_u) {}

  ExprAst run() {
    ExprAst ast;
    ast.n_x_ = n_x_;
    ast.n_u_ = n_u_;
    nodes_ = &ast.nodes_;
    ast.root_ = parse_expr();
    if (peek().type != TokType::End)
      throw ParseError("unexpected trailing input", peek().pos);
    return ast;
  }

 private:
  using Node = ExprAst::Node;

  const Token& peek() const { return toks_[cursor_]; }
  Token take() { return toks_[cursor_++]; }
  bool eat(TokType t) {
    if (peek().type != t) return false;
    ++cursor_;
    return true;
  }

  int add(Node n) {
    nodes_->push_back(n);
    return static_cast<int>(nodes_->size()) - 1;
  }

  int parse_expr() {
    int lhs = parse_term();
    while (peek().type == TokType::Plus || peek().type == TokType::Minus) {
      const Token op = take();
      const int rhs = parse_term();
      Node n;
      n.kind = ExprAst::Kind::Bin;
      n.op = op.type == TokType::Plus ? ExprAst::Op::Add : ExprAst::Op::Sub;
      n.lhs = lhs;
      n.rhs = rhs;
      n.pos = op.pos;
      lhs = add(n);
    }
    return lhs;
  }

  int parse_term() {
    int lhs = parse_factor();
    while (peek().type == TokType::Star || peek().type == TokType::Slash) {
      const Token op = take();
      const int rhs = parse_factor();
      Node n;
      n.kind = ExprAst::Kind::Bin;
      n.op = op.type == TokType::Star ? ExprAst::Op::Mul : ExprAst::Op::Div;
      n.lhs = lhs;
      n.rhs = rhs;
      n.pos = op.pos;
      lhs = add(n);
    }
    return lhs;
  }

  int parse_factor() {
    if (peek().type == TokType::Minus) {
      const Token op = take();
      const int child = parse_factor();
      Node n;
      n.kind = ExprAst::Kind::Neg;
      n.lhs = child;
      n.pos = op.pos;
      return add(n);
    }
    return parse_power();
  }

  int parse_power() {
    int base = parse_atom();
    if (peek().type == TokType::Caret) {
      const Token op = take();
      const Token e = take();
      if (e.type != TokType::Num)
        throw ParseError("expected integer exponent after '^'", e.pos);
      const double ev = e.num;
      if (ev != std::floor(ev) || ev < 0 || ev > 64)
        throw ParseError("exponent must be an integer in [0, 64]", e.pos);
      Node n;
      n.kind = ExprAst::Kind::Pow;
      n.lhs = base;
      n.exponent = static_cast<int>(ev);
      n.pos = op.pos;
      base = add(n);
    }
    return base;
  }

  int parse_atom() {
    const Token t = take();
    switch (t.type) {
      case TokType::Num: {
        Node n;
        n.kind = ExprAst::Kind::Const;
        n.value = t.num;
        n.pos = t.pos;
        return add(n);
      }
      case TokType::LParen: {
        const int inner = parse_expr();
        if (!eat(TokType::RParen))
          throw ParseError("expected ')'", peek().pos);
        return inner;
      }
      case TokType::Ident:
        return parse_ident(t);
      default:
        throw ParseError("expected expression", t.pos);
    }
  }

  int parse_ident(const Token& t) {
    Node n;
    n.pos = t.pos;
    if (t.text == "pi") {
      n.kind = ExprAst::Kind::Const;
      n.value = std::numbers::pi;
      return add(n);
    }
    if (t.text == "sin" || t.text == "cos" || t.text == "abs") {
      if (!eat(TokType::LParen))
        throw ParseError("expected '(' after '" + t.text + "'", peek().pos);
      const int arg = parse_expr();
      if (!eat(TokType::RParen))
        throw ParseError("expected ')'", peek().pos);
      n.kind = ExprAst::Kind::Call;
      n.fn = t.text == "sin"   ? ExprAst::Fn::Sin
             : t.text == "cos" ? ExprAst::Fn::Cos
                               : ExprAst::Fn::Abs;
      n.lhs = arg;
      return add(n);
    }
    if ((t.text[0] == 'x' || t.text[0] == 'u') && t.text.size() > 1) {
      bool all_digits = true;
      for (std::size_t i = 1; i < t.text.size(); ++i)
        all_digits = all_digits && std::isdigit(static_cast<unsigned char>(t.text[i]));
      if (all_digits) {
        const long idx = std::strtol(t.text.c_str() + 1, nullptr, 10);
        const bool is_input = t.text[0] == 'u';
        const long limit = is_input ? n_u_ : n_x_;
        if (idx < 1 || idx > limit)
          throw ParseError("variable '" + t.text + "' out of range (" +
                               (is_input ? "n_u = " : "n_x = ") +
                               std::to_string(limit) + ")",
                           t.pos);
        n.kind = ExprAst::Kind::Var;
        n.is_input = is_input;
        n.index = static_cast<int>(idx) - 1;
        return add(n);
      }
    }
    throw ParseError("unknown identifier '" + t.text + "'", t.pos);
  }

  std::vector<Token> toks_;
  std::size_t cursor_ = 0;
  std::vector<Node>* nodes_ = nullptr;
  int n_x_, n_u_;
};

ExprAst ExprAst::parse(const std::string& text, int n_x, int n_u) {
  if (n_x < 0 || n_u < 0) throw InputError("negative variable counts");
  return ExprParser(text, n_x, n_u).run();
}

double ExprAst::eval(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const {
  if (x.size() != n_x_ || u.size() != n_u_)
    throw InputError("expression evaluated with mismatched vector sizes");
  const double v = eval_node(root_, x, u);
  if (!std::isfinite(v))
    throw EvalError("expression evaluated to a non-finite value");
  return v;
}

double ExprAst::eval_node(int idx, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& u) const {
  const Node& n = nodes_[idx];
  switch (n.kind) {
    case Kind::Const:
      return n.value;
    case Kind::Var:
      return n.is_input ? u[n.index] : x[n.index];
    case Kind::Neg:
      return -eval_node(n.lhs, x, u);
    case Kind::Call: {
      const double a = eval_node(n.lhs, x, u);
      switch (n.fn) {
        case Fn::Sin: return std::sin(a);
        case Fn::Cos: return std::cos(a);
        case Fn::Abs: return std::abs(a);
      }
      return 0.0;
    }
    case Kind::Bin: {
      const double a = eval_node(n.lhs, x, u);
      const double b = eval_node(n.rhs, x, u);
      switch (n.op) {
        case Op::Add: return a + b;
        case Op::Sub: return a - b;
        case Op::Mul: return a * b;
        case Op::Div:
          if (b == 0.0)
            throw EvalError("division by zero at byte " + std::to_string(n.pos));
          return a / b;
      }
      return 0.0;
    }
    case Kind::Pow:
      return powi(eval_node(n.lhs, x, u), n.exponent);
  }
  return 0.0;
}

void ExprAst::print_node(int idx, std::string& out) const {
  // Printing precedence: additive = 1, multiplicative = 2, unary minus = 3,
  // power/atom = 4.
  const auto node_prec = [](Kind kind, Op op) {
    switch (kind) {
      case Kind::Bin: return (op == Op::Add || op == Op::Sub) ? 1 : 2;
      case Kind::Neg: return 3;
      default: return 4;
    }
  };
  const Node& n = nodes_[idx];
  switch (n.kind) {
    case Kind::Const:
      out += format_double(n.value);
      return;
    case Kind::Var:
      out += n.is_input ? 'u' : 'x';
      out += std::to_string(n.index + 1);
      return;
    case Kind::Neg: {
      out += '-';
      const Node& c = nodes_[n.lhs];
      const bool parens = node_prec(c.kind, c.op) < 3;
      if (parens) out += '(';
      print_node(n.lhs, out);
      if (parens) out += ')';
      return;
    }
    case Kind::Call:
      out += n.fn == Fn::Sin ? "sin" : n.fn == Fn::Cos ? "cos" : "abs";
      out += '(';
      print_node(n.lhs, out);
      out += ')';
      return;
    case Kind::Bin: {
      const int p = node_prec(n.kind, n.op);
      const Node& l = nodes_[n.lhs];
      const Node& r = nodes_[n.rhs];
      const bool lp = node_prec(l.kind, l.op) < p;
      // Right operands at equal precedence need parentheses to preserve the
      // tree under left-associative re-parsing.
      const bool rp = node_prec(r.kind, r.op) <= p;
      if (lp) out += '(';
      print_node(n.lhs, out);
      if (lp) out += ')';
      switch (n.op) {
        case Op::Add: out += " + "; break;
        case Op::Sub: out += " - "; break;
        case Op::Mul: out += " * "; break;
        case Op::Div: out += " / "; break;
      }
      if (rp) out += '(';
      print_node(n.rhs, out);
      if (rp) out += ')';
      return;
    }
    case Kind::Pow: {
      const Node& b = nodes_[n.lhs];
      const bool parens = b.kind == Kind::Bin || b.kind == Kind::Neg || b.kind == Kind::Pow;
      if (parens) out += '(';
      print_node(n.lhs, out);
      if (parens) out += ')';
      out += '^';
      out += std::to_string(n.exponent);
      return;
    }
  }
}

std::string ExprAst::str() const {
  std::string out;
  print_node(root_, out);
  return out;
}

bool ExprAst::identical(const ExprAst& other) const {
  if (n_x_ != other.n_x_ || n_u_ != other.n_u_) return false;
  return identical_node(root_, other, other.root_);
}

bool ExprAst::identical_node(int a, const ExprAst& other, int b) const {
  const Node& na = nodes_[a];
  const Node& nb = other.nodes_[b];
  if (na.kind != nb.kind) return false;
  switch (na.kind) {
    case Kind::Const:
      return na.value == nb.value;
    case Kind::Var:
      return na.is_input == nb.is_input && na.index == nb.index;
    case Kind::Neg:
      return identical_node(na.lhs, other, nb.lhs);
    case Kind::Call:
      return na.fn == nb.fn && identical_node(na.lhs, other, nb.lhs);
    case Kind::Bin:
      return na.op == nb.op && identical_node(na.lhs, other, nb.lhs) &&
             identical_node(na.rhs, other, nb.rhs);
    case Kind::Pow:
      return na.exponent == nb.exponent && identical_node(na.lhs, other, nb.lhs);
  }
  return false;
}

bool ExprAst::uses_input() const {
  for (const Node& n : nodes_)
    if (n.kind == Kind::Var && n.is_input) return true;
  return false;
}

ExprAst parse_expression(const std::string& text, int n_x, int n_u) {
  return ExprAst::parse(text, n_x, n_u);
}

double eval_ast(const ExprAst& ast, const Eigen::VectorXd& x,
                const Eigen::VectorXd& u) {
  return ast.eval(x, u);
}

double eval_constant(const std::string& text) {
  const ExprAst ast = ExprAst::parse(text, 0, 0);
  return ast.eval(Eigen::VectorXd(), Eigen::VectorXd());
}

}  // namespace oactl
