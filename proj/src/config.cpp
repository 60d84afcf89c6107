#include "oactl/config.hpp"

#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <vector>

#include "oactl/errors.hpp"
#include "oactl/expr.hpp"

namespace oactl {

namespace {

struct RawEntry {
  std::string value;
  int line = 0;
  bool quoted = false;
  mutable bool used = false;
};

// section -> key -> entry
using RawConfig = std::map<std::string, std::map<std::string, RawEntry>>;

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

RawConfig parse_raw(const std::string& text, const std::string& origin) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    // Strip comments, but not inside quoted values.
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_quotes = !in_quotes;
      if (line[i] == '#' && !in_quotes) {
        line.resize(i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw InputError(origin + ":" + std::to_string(line_no) +
                         ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "system" && section != "constraints" && section != "experiment")
        throw InputError(origin + ":" + std::to_string(line_no) +
                         ": unknown section [" + section + "]");
      raw[section];
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw InputError(origin + ":" + std::to_string(line_no) +
                       ": expected 'key = value'");
    if (section.empty())
      throw InputError(origin + ":" + std::to_string(line_no) +
                       ": key outside of any section");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    bool quoted = false;
    if (!value.empty() && value.front() == '"') {
      if (value.size() < 2 || value.back() != '"')
        throw InputError(origin + ":" + std::to_string(line_no) +
                         ": unterminated quoted value for key '" + key + "'");
      value = value.substr(1, value.size() - 2);
      quoted = true;
    }
    if (key.empty())
      throw InputError(origin + ":" + std::to_string(line_no) + ": empty key");
    auto [it, inserted] = raw[section].emplace(key, RawEntry{value, line_no, quoted});
    (void)it;
    if (!inserted)
      throw InputError(origin + ":" + std::to_string(line_no) +
                       ": duplicate key '" + key + "'");
  }
  return raw;
}

class ConfigReader {
 public:
  ConfigReader(RawConfig raw, std::string origin)
      : raw_(std::move(raw)), origin_(std::move(origin)) {}

  bool has(const std::string& section, const std::string& key) const {
    auto s = raw_.find(section);
    return s != raw_.end() && s->second.count(key) > 0;
  }

  const RawEntry& entry(const std::string& section, const std::string& key) const {
    auto s = raw_.find(section);
    if (s == raw_.end())
      throw InputError(origin_ + ": missing section [" + section + "]");
    auto k = s->second.find(key);
    if (k == s->second.end())
      throw InputError(origin_ + ": missing key '" + key + "' in [" + section + "]");
    k->second.used = true;
    return k->second;
  }

  std::string str(const std::string& section, const std::string& key) const {
    return entry(section, key).value;
  }

  double scalar(const std::string& section, const std::string& key) const {
    const RawEntry& e = entry(section, key);
    try {
      return eval_constant(e.value);
    } catch (const std::exception& ex) {
      throw InputError(context(section, key, e) + ": " + ex.what());
    }
  }

  long integer(const std::string& section, const std::string& key) const {
    const double v = scalar(section, key);
    if (v != std::floor(v))
      throw InputError(origin_ + ": key '" + key + "' must be an integer");
    return static_cast<long>(v);
  }

  Eigen::VectorXd vector(const std::string& section, const std::string& key,
                         int expected_dim) const {
    const RawEntry& e = entry(section, key);
    std::vector<double> vals;
    std::size_t start = 0;
    const std::string& v = e.value;
    while (true) {
      const std::size_t comma = v.find(',', start);
      const std::string piece =
          comma == std::string::npos ? v.substr(start) : v.substr(start, comma - start);
      try {
        vals.push_back(eval_constant(piece));
      } catch (const std::exception& ex) {
        throw InputError(context(section, key, e) + ": " + ex.what());
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (static_cast<int>(vals.size()) != expected_dim)
      throw InputError(context(section, key, e) + ": expected " +
                       std::to_string(expected_dim) + " entries, got " +
                       std::to_string(vals.size()));
    return Eigen::Map<Eigen::VectorXd>(vals.data(), vals.size());
  }

  ExprAst expr(const std::string& section, const std::string& key, int n_x,
               int n_u) const {
    const RawEntry& e = entry(section, key);
    if (!e.quoted)
      throw InputError(context(section, key, e) +
                       ": expression values must be double-quoted");
    try {
      return parse_expression(e.value, n_x, n_u);
    } catch (const std::exception& ex) {
      throw InputError(context(section, key, e) + ": " + ex.what());
    }
  }

  void check_all_used() const {
    for (const auto& [section, entries] : raw_)
      for (const auto& [key, e] : entries)
        if (!e.used)
          throw InputError(origin_ + ":" + std::to_string(e.line) +
                           ": unknown key '" + key + "' in [" + section + "]");
  }

 private:
  std::string context(const std::string& section, const std::string& key,
                      const RawEntry& e) const {
    return origin_ + ":" + std::to_string(e.line) + ": key '" + key + "' in [" +
           section + "]";
  }

  RawConfig raw_;
  std::string origin_;
};

}  // namespace

SystemConfig parse_system_config(const std::string& text, const std::string& origin) {
  ConfigReader cfg(parse_raw(text, origin), origin);
  SystemConfig out;
  DynamicalSystem& sys = out.system;

  sys.n_x = static_cast<int>(cfg.integer("system", "n_x"));
  sys.n_u = static_cast<int>(cfg.integer("system", "n_u"));
  if (sys.n_x < 1) throw InputError(origin + ": n_x must be >= 1");
  if (sys.n_u < 0) throw InputError(origin + ": n_u must be >= 0");
  sys.kappa = cfg.scalar("system", "kappa");
  if (cfg.has("system", "name")) sys.name = cfg.str("system", "name");

  sys.structure = SystemStructure::General;
  if (cfg.has("system", "structure")) {
    const std::string s = cfg.str("system", "structure");
    if (s == "shared")
      sys.structure = SystemStructure::SharedInput;
    else if (s == "affine")
      sys.structure = SystemStructure::InputAffine;
    else if (s == "general")
      sys.structure = SystemStructure::General;
    else
      throw InputError(origin + ": structure must be shared, affine or general");
  }

  auto f_asts = std::make_shared<std::vector<ExprAst>>();
  for (int i = 0; i < sys.n_x; ++i)
    f_asts->push_back(
        cfg.expr("system", "f_cont_" + std::to_string(i + 1), sys.n_x, sys.n_u));
  const int n_x = sys.n_x;
  sys.f_cont = [f_asts, n_x](const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
    Eigen::VectorXd dx(n_x);
    for (int i = 0; i < n_x; ++i) dx[i] = (*f_asts)[i].eval(x, u);
    return dx;
  };

  if (sys.structure == SystemStructure::InputAffine) {
    // The split is declared over x only; parsing with n_u = 0 rejects any
    // stray input references.
    auto fx_asts = std::make_shared<std::vector<ExprAst>>();
    auto fu_asts = std::make_shared<std::vector<ExprAst>>();
    for (int i = 0; i < sys.n_x; ++i)
      fx_asts->push_back(cfg.expr("system", "fx_" + std::to_string(i + 1), sys.n_x, 0));
    for (int i = 0; i < sys.n_x; ++i)
      for (int j = 0; j < sys.n_u; ++j)
        fu_asts->push_back(cfg.expr(
            "system", "fu_" + std::to_string(i + 1) + "_" + std::to_string(j + 1),
            sys.n_x, 0));
    const int n_u = sys.n_u;
    const Eigen::VectorXd no_input;
    sys.fx_cont = [fx_asts, n_x, no_input](const Eigen::VectorXd& x) {
      Eigen::VectorXd v(n_x);
      for (int i = 0; i < n_x; ++i) v[i] = (*fx_asts)[i].eval(x, no_input);
      return v;
    };
    sys.fu_cont = [fu_asts, n_x, n_u, no_input](const Eigen::VectorXd& x) {
      Eigen::MatrixXd m(n_x, n_u);
      for (int i = 0; i < n_x; ++i)
        for (int j = 0; j < n_u; ++j)
          m(i, j) = (*fu_asts)[i * n_u + j].eval(x, no_input);
      return m;
    };
  }

  sys.X = Box(cfg.vector("constraints", "x_lo", sys.n_x),
              cfg.vector("constraints", "x_hi", sys.n_x));
  sys.U = Box(cfg.vector("constraints", "u_lo", sys.n_u),
              cfg.vector("constraints", "u_hi", sys.n_u));
  sys.lip_cont = cfg.vector("system", "lip_cont", sys.n_x);
  sys.lip_u = cfg.scalar("system", "lip_u");

  ExperimentSettings& exp = out.experiment;
  exp.horizon = static_cast<int>(cfg.integer("experiment", "horizon"));
  if (exp.horizon < 0) throw InputError(origin + ": horizon must be >= 0");
  exp.delta = cfg.scalar("experiment", "delta");
  if (!(exp.delta > 0)) throw InputError(origin + ": delta must be > 0");
  exp.x0 = cfg.vector("experiment", "x0", sys.n_x);
  exp.objective_component =
      static_cast<int>(cfg.integer("experiment", "objective_component"));
  if (exp.objective_component < 1 || exp.objective_component > sys.n_x)
    throw InputError(origin + ": objective_component out of range");

  cfg.check_all_used();
  sys.validate();
  if (!sys.X.contains(exp.x0))
    throw InputError(origin + ": x0 lies outside the state box X");
  return out;
}

SystemConfig load_system_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_system_config(buf.str(), path);
}

}  // namespace oactl
