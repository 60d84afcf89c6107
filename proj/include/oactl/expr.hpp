#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace oactl {

// Parsed arithmetic expression over state variables x1..x{n_x} and input
// variables u1..u{n_u}.  Supported grammar:
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | power
//   power  := atom ('^' integer)?
//   atom   := number | 'pi' | var | 'sin(' expr ')' | 'cos(' expr ')'
//           | 'abs(' expr ')' | '(' expr ')'
//
// Exponents are integer literals; x^3 is evaluated by repeated squaring.
class ExprAst {
 public:
  // Parses `text`; throws ParseError (with byte offset) on malformed input
  // and on references to variables outside x1..x{n_x}, u1..u{n_u}.
  static ExprAst parse(const std::string& text, int n_x, int n_u);

  double eval(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const;

  // Pretty-prints with minimal parentheses; parsing the result yields a
  // structurally identical tree.
  std::string str() const;

  bool identical(const ExprAst& other) const;

  int n_x() const { return n_x_; }
  int n_u() const { return n_u_; }
  bool uses_input() const;

 private:
  friend class ExprParser;

  enum class Kind { Const, Var, Neg, Call, Bin, Pow };
  enum class Fn { Sin, Cos, Abs };
  enum class Op { Add, Sub, Mul, Div };

  struct Node {
    Kind kind;
    double value = 0.0;   // Const
    bool is_input = false;
    int index = 0;        // Var: 0-based into x or u
    Fn fn = Fn::Sin;      // Call
    Op op = Op::Add;      // Bin
    int lhs = -1, rhs = -1;
    int exponent = 0;     // Pow
    std::size_t pos = 0;  // byte offset, for evaluation diagnostics
  };

  double eval_node(int idx, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& u) const;
  void print_node(int idx, std::string& out) const;
  bool identical_node(int a, const ExprAst& other, int b) const;

  std::vector<Node> nodes_;
  int root_ = -1;
  int n_x_ = 0, n_u_ = 0;
};

// Free-function aliases matching the library's verb-style API.
ExprAst parse_expression(const std::string& text, int n_x, int n_u);
double eval_ast(const ExprAst& ast, const Eigen::VectorXd& x,
                const Eigen::VectorXd& u);

// Parses and evaluates a constant expression (no variables allowed).
double eval_constant(const std::string& text);

}  // namespace oactl
