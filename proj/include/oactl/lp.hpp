#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace oactl {

enum class RowSense { LE, EQ };

// One sparse constraint row: sum_k val[k] * x[idx[k]]  (<=|=)  rhs.
struct LpRow {
  std::vector<int> idx;
  std::vector<double> val;
  RowSense sense = RowSense::LE;
  double rhs = 0.0;
};

// Sparse linear program: min c.x subject to rows and variable bounds.
// Variables are free by default; bounds are optional.
class LinearProgram {
 public:
  explicit LinearProgram(int n_vars, std::string name = "lp");

  int num_vars() const { return n_vars_; }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  const std::string& name() const { return name_; }

  // Appends a free variable with the given objective coefficient.
  int add_variable(double obj_coef = 0.0);

  void set_objective(int var, double coef);
  double objective_coef(int var) const { return obj_[var]; }
  const std::vector<double>& objective() const { return obj_; }

  void set_bounds(int var, double lo, double hi);
  double lower_bound(int var) const { return lo_[var]; }
  double upper_bound(int var) const { return hi_[var]; }

  int add_row(LpRow row);  // returns the row index
  int add_le_row(std::vector<int> idx, std::vector<double> val, double rhs);
  int add_eq_row(std::vector<int> idx, std::vector<double> val, double rhs);
  const LpRow& row(int i) const { return rows_[i]; }
  const std::vector<LpRow>& rows() const { return rows_; }

  // Optional names used by MPS export and diagnostics.
  void name_var(int var, std::string name);
  void name_row(int row, std::string name);
  std::string var_name(int var) const;   // falls back to X0000001-style
  std::string row_name(int row) const;   // falls back to R0000001-style

  void validate() const;  // throws InputError on NaN/bad indices

 private:
  int n_vars_;
  std::string name_;
  std::vector<double> obj_, lo_, hi_;
  std::vector<LpRow> rows_;
  std::vector<std::string> var_names_, row_names_;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterLimit };
const char* to_string(LpStatus s);

struct LpSolution {
  LpStatus status = LpStatus::IterLimit;
  Eigen::VectorXd x;
  // One dual per declared row (bound rows are internal).  Sign convention:
  // c + A_eq' y_eq + A_le' y_le = 0 with y_le >= 0, so the dual objective is
  // -b_eq.y_eq - b_le.y_le.
  Eigen::VectorXd row_duals;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double dual_objective = std::numeric_limits<double>::quiet_NaN();
  // Relative certificates at the returned point.
  double primal_residual = std::numeric_limits<double>::infinity();
  double dual_residual = std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();
  int iterations = 0;
  // Farkas certificate (over declared rows then bound rows) when Infeasible:
  // A' ray = 0, ray >= 0 on inequality rows, b.ray < 0.
  Eigen::VectorXd farkas_ray;
  // Primal ray (c.ray < 0, A_eq ray = 0, A_le ray <= 0) when Unbounded.
  Eigen::VectorXd primal_ray;
  std::string message;
};

struct SolveOptions {
  double feas_tol = 1e-8;
  double gap_tol = 1e-8;
  int max_iter = 200;
  bool verbose = false;
};

// Mehrotra predictor-corrector primal-dual interior-point method on the
// sparse augmented KKT system (no crossover; reported optima are interior).
LpSolution solve_lp(const LinearProgram& lp, const SolveOptions& opts = {});

// Row generation for LPs whose constraint set is too large to materialize.
// `source(x, tol, max_rows)` returns rows of the full set violated at x by
// more than tol (strongest first), or an empty vector when none are.
using RowSource =
    std::function<std::vector<LpRow>(const Eigen::VectorXd&, double, int)>;

struct RowGenOptions {
  SolveOptions lp;
  double violation_tol = -1.0;  // < 0: use lp.feas_tol
  int max_rows_per_round = 64;
  int max_rounds = 10000;
};

struct RowGenStats {
  int rounds = 0;
  int rows_added = 0;
};

LpSolution solve_lp_row_generation(LinearProgram seed, const RowSource& source,
                                   const RowGenOptions& opts = {},
                                   RowGenStats* stats = nullptr);

// Independent audits of the returned certificates.  Both return the largest
// violation of the defining conditions (0 means the certificate is exact).
//
// Farkas ray (layout of LpSolution::farkas_ray): aggregating the rows with
// these multipliers must cancel every variable, keep nonnegative weights on
// inequality rows, and produce rhs -1.
double farkas_violation(const LinearProgram& lp, const Eigen::VectorXd& ray);
// Primal ray: A_eq ray = 0, A_le ray <= 0 (bounds included), c.ray <= -1e-10.
double unbounded_violation(const LinearProgram& lp, const Eigen::VectorXd& ray);

// Fixed-format MPS export/import for cross-checking against external solvers.
// Values are written with 17 significant digits (they may overflow the
// nominal fixed-format field width; whitespace-delimited readers accept
// this), so export -> import round-trips coefficients exactly.
void export_mps(const LinearProgram& lp, const std::string& path);
LinearProgram import_mps(const std::string& path);

}  // namespace oactl
