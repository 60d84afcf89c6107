#include "oactl/lp.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <cstdio>

#include "oactl/errors.hpp"

namespace oactl {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------------------
// LinearProgram

LinearProgram::LinearProgram(int n_vars, std::string name)
    : n_vars_(n_vars),
      name_(std::move(name)),
      obj_(n_vars, 0.0),
      lo_(n_vars, -kInf),
      hi_(n_vars, kInf),
      var_names_(n_vars),
      row_names_() {
  if (n_vars < 1) throw InputError("LP needs at least one variable");
}

int LinearProgram::add_variable(double obj_coef) {
  if (!std::isfinite(obj_coef))
    throw InputError("objective coefficient must be finite");
  obj_.push_back(obj_coef);
  lo_.push_back(-kInf);
  hi_.push_back(kInf);
  var_names_.emplace_back();
  return n_vars_++;
}

void LinearProgram::set_objective(int var, double coef) {
  if (var < 0 || var >= n_vars_) throw InputError("objective index out of range");
  if (!std::isfinite(coef)) throw InputError("objective coefficient must be finite");
  obj_[var] = coef;
}

void LinearProgram::set_bounds(int var, double lo, double hi) {
  if (var < 0 || var >= n_vars_) throw InputError("bound index out of range");
  if (std::isnan(lo) || std::isnan(hi) || lo > hi)
    throw InputError("invalid bounds on variable " + std::to_string(var));
  lo_[var] = lo;
  hi_[var] = hi;
}

int LinearProgram::add_row(LpRow row) {
  if (row.idx.size() != row.val.size())
    throw InputError("row has mismatched index/value arrays");
  if (!std::isfinite(row.rhs)) throw InputError("row rhs must be finite");
  for (std::size_t k = 0; k < row.idx.size(); ++k) {
    if (row.idx[k] < 0 || row.idx[k] >= n_vars_)
      throw InputError("row references variable out of range");
    if (!std::isfinite(row.val[k]))
      throw InputError("row coefficient must be finite");
  }
  rows_.push_back(std::move(row));
  row_names_.emplace_back();
  return static_cast<int>(rows_.size()) - 1;
}

int LinearProgram::add_le_row(std::vector<int> idx, std::vector<double> val,
                              double rhs) {
  return add_row(LpRow{std::move(idx), std::move(val), RowSense::LE, rhs});
}

int LinearProgram::add_eq_row(std::vector<int> idx, std::vector<double> val,
                              double rhs) {
  return add_row(LpRow{std::move(idx), std::move(val), RowSense::EQ, rhs});
}

void LinearProgram::name_var(int var, std::string name) {
  if (var < 0 || var >= n_vars_) throw InputError("variable index out of range");
  var_names_[var] = std::move(name);
}

void LinearProgram::name_row(int row, std::string name) {
  if (row < 0 || row >= num_rows()) throw InputError("row index out of range");
  row_names_[row] = std::move(name);
}

std::string LinearProgram::var_name(int var) const {
  if (!var_names_[var].empty()) return var_names_[var];
  char buf[16];
  std::snprintf(buf, sizeof(buf), "X%07d", var + 1);
  return buf;
}

std::string LinearProgram::row_name(int row) const {
  if (!row_names_[row].empty()) return row_names_[row];
  char buf[16];
  std::snprintf(buf, sizeof(buf), "R%07d", row + 1);
  return buf;
}

void LinearProgram::validate() const {
  for (int i = 0; i < n_vars_; ++i)
    if (std::isnan(obj_[i]) || std::isnan(lo_[i]) || std::isnan(hi_[i]) ||
        lo_[i] > hi_[i])
      throw InputError("invalid objective/bounds on variable " + std::to_string(i));
}

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterLimit: return "iteration-limit";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Interior-point solver.
//
// Internal standard form:  min c.x  s.t.  Ae x = be,  Ai x + s = bi,  s >= 0.
// Declared EQ rows populate Ae; declared LE rows and finite variable bounds
// populate Ai (a fixed bound lo == hi becomes an extra equality row).
//
// Newton systems are solved through the symmetric quasi-definite matrix
//
//      [ dp*I   Ae'    Ai'          ]   [ dx ]   [ -rd           ]
//      [ Ae    -dd*I   0            ] * [ dy ] = [ -re           ]
//      [ Ai     0     -(S/M + dd*I) ]   [ dm ]   [ rc/mu_v - ri  ]
//
// factorized once per iteration by SimplicialLDLT (the sparsity pattern is
// fixed, so the symbolic analysis is done a single time).  Static
// regularization dp, dd keeps the factorization stable; each solve is
// iteratively refined against the unregularized system.

namespace {

struct InternalForm {
  Eigen::SparseMatrix<double> Ae, Ai;  // column-major
  Eigen::VectorXd be, bi;
  Eigen::VectorXd c;
  // Mapping from declared rows to internal rows: sense + position.
  std::vector<std::pair<RowSense, int>> declared;
  int n = 0, me = 0, mi = 0;
  double max_abs_coef = 1.0;
};

InternalForm build_internal(const LinearProgram& lp) {
  InternalForm F;
  F.n = lp.num_vars();
  F.c = Eigen::Map<const Eigen::VectorXd>(lp.objective().data(), F.n);

  std::vector<Eigen::Triplet<double>> te, ti;
  std::vector<double> be, bi;
  F.declared.reserve(lp.num_rows());

  for (int r = 0; r < lp.num_rows(); ++r) {
    const LpRow& row = lp.row(r);
    if (row.sense == RowSense::EQ) {
      const int out = static_cast<int>(be.size());
      for (std::size_t k = 0; k < row.idx.size(); ++k)
        te.emplace_back(out, row.idx[k], row.val[k]);
      be.push_back(row.rhs);
      F.declared.emplace_back(RowSense::EQ, out);
    } else {
      const int out = static_cast<int>(bi.size());
      for (std::size_t k = 0; k < row.idx.size(); ++k)
        ti.emplace_back(out, row.idx[k], row.val[k]);
      bi.push_back(row.rhs);
      F.declared.emplace_back(RowSense::LE, out);
    }
    for (double v : row.val) F.max_abs_coef = std::max(F.max_abs_coef, std::abs(v));
  }

  for (int j = 0; j < F.n; ++j) {
    const double lo = lp.lower_bound(j), hi = lp.upper_bound(j);
    if (std::isfinite(lo) && lo == hi) {
      const int out = static_cast<int>(be.size());
      te.emplace_back(out, j, 1.0);
      be.push_back(lo);
      continue;
    }
    if (std::isfinite(hi)) {
      const int out = static_cast<int>(bi.size());
      ti.emplace_back(out, j, 1.0);
      bi.push_back(hi);
    }
    if (std::isfinite(lo)) {
      const int out = static_cast<int>(bi.size());
      ti.emplace_back(out, j, -1.0);
      bi.push_back(-lo);
    }
  }

  F.me = static_cast<int>(be.size());
  F.mi = static_cast<int>(bi.size());
  F.Ae.resize(F.me, F.n);
  F.Ae.setFromTriplets(te.begin(), te.end());
  F.Ai.resize(F.mi, F.n);
  F.Ai.setFromTriplets(ti.begin(), ti.end());
  F.be = Eigen::Map<const Eigen::VectorXd>(be.data(), F.me);
  F.bi = Eigen::Map<const Eigen::VectorXd>(bi.data(), F.mi);
  return F;
}

class KktSolver {
 public:
  KktSolver(const InternalForm& F, double dp, double dd)
      : F_(F), dp_(dp), dd_(dd), N_(F.n + F.me + F.mi) {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(F.n + F.me + F.mi + F.Ae.nonZeros() + F.Ai.nonZeros());
    for (int j = 0; j < F.n; ++j) trips.emplace_back(j, j, dp_);
    for (int k = 0; k < F.Ae.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(F.Ae, k); it; ++it)
        trips.emplace_back(F.n + static_cast<int>(it.row()), static_cast<int>(it.col()),
                           it.value());
    for (int j = 0; j < F.me; ++j) trips.emplace_back(F.n + j, F.n + j, -dd_);
    for (int k = 0; k < F.Ai.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(F.Ai, k); it; ++it)
        trips.emplace_back(F.n + F.me + static_cast<int>(it.row()),
                           static_cast<int>(it.col()), it.value());
    for (int j = 0; j < F.mi; ++j)
      trips.emplace_back(F.n + F.me + j, F.n + F.me + j, -(1.0 + dd_));
    K_.resize(N_, N_);
    K_.setFromTriplets(trips.begin(), trips.end());
    K_.makeCompressed();

    diag_pos_.assign(N_, -1);
    for (int col = 0; col < N_; ++col)
      for (int p = K_.outerIndexPtr()[col]; p < K_.outerIndexPtr()[col + 1]; ++p)
        if (K_.innerIndexPtr()[p] == col) {
          diag_pos_[col] = p;
          break;
        }

    ldlt_.analyzePattern(K_);
  }

  // d holds s_i / mu_i for each inequality row.
  bool factorize(const Eigen::VectorXd& d) {
    d_ = d;
    double* vals = K_.valuePtr();
    for (int j = 0; j < F_.mi; ++j)
      vals[diag_pos_[F_.n + F_.me + j]] = -(d[j] + dd_);
    ldlt_.factorize(K_);
    return ldlt_.info() == Eigen::Success;
  }

  void bump_regularization() {
    dp_ *= 10.0;
    dd_ *= 10.0;
    double* vals = K_.valuePtr();
    for (int j = 0; j < F_.n; ++j) vals[diag_pos_[j]] = dp_;
    for (int j = 0; j < F_.me; ++j) vals[diag_pos_[F_.n + j]] = -dd_;
  }

  // Solve the unregularized system with iterative refinement.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
    Eigen::VectorXd v = ldlt_.solve(rhs);
    const double scale = 1.0 + rhs.lpNorm<Eigen::Infinity>();
    for (int round = 0; round < 3; ++round) {
      Eigen::VectorXd r = rhs - apply_unregularized(v);
      if (r.lpNorm<Eigen::Infinity>() <= 1e-12 * scale) break;
      v += ldlt_.solve(r);
    }
    return v;
  }

 private:
  Eigen::VectorXd apply_unregularized(const Eigen::VectorXd& v) const {
    const auto vx = v.head(F_.n);
    const auto vy = v.segment(F_.n, F_.me);
    const auto vm = v.tail(F_.mi);
    Eigen::VectorXd out(N_);
    out.head(F_.n) = F_.Ae.transpose() * vy + F_.Ai.transpose() * vm;
    out.segment(F_.n, F_.me) = F_.Ae * vx;
    out.tail(F_.mi) = F_.Ai * vx - d_.cwiseProduct(vm);
    return out;
  }

  const InternalForm& F_;
  double dp_, dd_;
  int N_;
  Eigen::SparseMatrix<double> K_;
  std::vector<int> diag_pos_;
  Eigen::VectorXd d_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

double max_step(const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
  double alpha = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (dv[i] < 0.0) alpha = std::min(alpha, -v[i] / dv[i]);
  return alpha;
}

struct Iterate {
  Eigen::VectorXd x, y, mu, s;
  double merit = kInf;
  double pobj = 0, dobj = 0, rel_p = kInf, rel_d = kInf, rel_g = kInf;
  int iterations = 0;
};

void map_back_duals(const InternalForm& F, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& mu, int declared_rows,
                    Eigen::VectorXd* out) {
  out->resize(declared_rows);
  for (int r = 0; r < declared_rows; ++r) {
    const auto& [sense, pos] = F.declared[r];
    (*out)[r] = sense == RowSense::EQ ? y[pos] : mu[pos];
  }
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const SolveOptions& opts) {
  lp.validate();
  const InternalForm F = build_internal(lp);
  const int n = F.n, me = F.me, mi = F.mi;

  LpSolution sol;
  sol.x = Eigen::VectorXd::Zero(n);

  const double bnorm = std::max(
      me > 0 ? F.be.lpNorm<Eigen::Infinity>() : 0.0,
      mi > 0 ? F.bi.lpNorm<Eigen::Infinity>() : 0.0);
  const double cnorm = F.c.lpNorm<Eigen::Infinity>();

  if (me == 0 && mi == 0) {
    if (cnorm == 0.0) {
      sol.status = LpStatus::Optimal;
      sol.objective = sol.dual_objective = 0.0;
      sol.primal_residual = sol.dual_residual = sol.gap = 0.0;
      return sol;
    }
    sol.status = LpStatus::Unbounded;
    sol.primal_ray = -F.c / cnorm;
    sol.message = "no constraints and a nonzero objective";
    return sol;
  }

  KktSolver kkt(F, 1e-8, 1e-8);

  auto factorize_robust = [&](const Eigen::VectorXd& d) {
    for (int attempt = 0; attempt < 5; ++attempt) {
      if (kkt.factorize(d)) return;
      kkt.bump_regularization();
    }
    throw NumericalError("interior-point KKT factorization failed");
  };

  // Least-squares starting point (Mehrotra).
  Eigen::VectorXd x, y, mu, s;
  {
    factorize_robust(Eigen::VectorXd::Ones(mi));
    Eigen::VectorXd rhs_p(n + me + mi);
    rhs_p.setZero();
    rhs_p.segment(n, me) = F.be;
    rhs_p.tail(mi) = F.bi;
    const Eigen::VectorXd vp = kkt.solve(rhs_p);
    x = vp.head(n);

    Eigen::VectorXd rhs_d(n + me + mi);
    rhs_d.setZero();
    rhs_d.head(n) = -F.c;
    const Eigen::VectorXd vd = kkt.solve(rhs_d);
    y = vd.segment(n, me);
    mu = vd.tail(mi);

    Eigen::VectorXd s_tilde = F.bi - F.Ai * x;
    const double ds = mi > 0 ? std::max(-1.5 * s_tilde.minCoeff(), 0.0) : 0.0;
    const double dm = mi > 0 ? std::max(-1.5 * mu.minCoeff(), 0.0) : 0.0;
    s = s_tilde.array() + ds;
    mu = mu.array() + dm;
    if (mi > 0) {
      const double dot = s.dot(mu);
      if (dot > 0.0 && s.minCoeff() >= 0.0 && mu.minCoeff() >= 0.0) {
        const double ds2 = 0.5 * dot / mu.sum();
        const double dm2 = 0.5 * dot / s.sum();
        s.array() += ds2;
        mu.array() += dm2;
      } else {
        s.setOnes();
        mu.setOnes();
      }
      const double floor = 1e-4 * (1.0 + bnorm);
      s = s.cwiseMax(floor);
      mu = mu.cwiseMax(1e-4);
    }
  }

  Iterate best;
  Eigen::VectorXd r_d(n), r_e(me), r_i(mi);

  for (int iter = 0; iter <= opts.max_iter; ++iter) {
    r_d = F.c + F.Ae.transpose() * y + F.Ai.transpose() * mu;
    r_e = F.Ae * x - F.be;
    r_i = F.Ai * x + s - F.bi;

    const double pobj = F.c.dot(x);
    const double dobj = -F.be.dot(y) - F.bi.dot(mu);
    const double rel_p =
        std::max(me > 0 ? r_e.lpNorm<Eigen::Infinity>() : 0.0,
                 mi > 0 ? r_i.lpNorm<Eigen::Infinity>() : 0.0) /
        (1.0 + bnorm);
    const double rel_d = r_d.lpNorm<Eigen::Infinity>() / (1.0 + cnorm);
    const double rel_g =
        std::abs(pobj - dobj) / (1.0 + std::max(std::abs(pobj), std::abs(dobj)));

    const double merit = std::max({rel_p, rel_d, rel_g});
    if (merit < best.merit) {
      best = Iterate{x, y, mu, s, merit, pobj, dobj, rel_p, rel_d, rel_g, iter};
    }

    if (opts.verbose)
      std::fprintf(stderr, "ipm %3d: pobj=%+.9e dobj=%+.9e rp=%.2e rd=%.2e gap=%.2e\n",
                   iter, pobj, dobj, rel_p, rel_d, rel_g);

    if (rel_p <= opts.feas_tol && rel_d <= opts.feas_tol && rel_g <= opts.gap_tol) {
      sol.status = LpStatus::Optimal;
      sol.x = x;
      map_back_duals(F, y, mu, lp.num_rows(), &sol.row_duals);
      sol.objective = pobj;
      sol.dual_objective = dobj;
      sol.primal_residual = rel_p;
      sol.dual_residual = rel_d;
      sol.gap = rel_g;
      sol.iterations = iter;
      return sol;
    }

    // Farkas infeasibility certificate: A' ray ~ 0, ray >= 0 on inequalities,
    // b.ray = -1 after normalization.
    {
      const double dval = -F.be.dot(y) - F.bi.dot(mu);
      if (dval > 1e-2 * (1.0 + bnorm)) {
        const Eigen::VectorXd cert = (r_d - F.c) / dval;  // A' (y, mu) / dval
        const double ray_norm =
            std::max(me > 0 ? (y / dval).lpNorm<Eigen::Infinity>() : 0.0,
                     mi > 0 ? (mu / dval).lpNorm<Eigen::Infinity>() : 0.0);
        const bool mu_ok = mi == 0 || mu.minCoeff() >= -1e-12 * mu.cwiseAbs().maxCoeff();
        if (mu_ok && cert.lpNorm<Eigen::Infinity>() <=
                         1e-8 * std::max(1.0, F.max_abs_coef * ray_norm)) {
          sol.status = LpStatus::Infeasible;
          sol.x = x;
          sol.iterations = iter;
          Eigen::VectorXd ray_full(me + mi);
          ray_full.head(me) = y / dval;
          ray_full.tail(mi) = mu / dval;
          sol.farkas_ray.resize(lp.num_rows() + (me + mi - lp.num_rows()));
          // Declared rows first, then internal bound rows in construction order.
          Eigen::VectorXd declared_part;
          map_back_duals(F, ray_full.head(me), ray_full.tail(mi), lp.num_rows(),
                         &declared_part);
          sol.farkas_ray.head(lp.num_rows()) = declared_part;
          int extra = 0;
          std::vector<bool> used_eq(me, false), used_le(mi, false);
          for (const auto& [sense, pos] : F.declared)
            (sense == RowSense::EQ ? used_eq[pos] : used_le[pos]) = true;
          for (int j = 0; j < me; ++j)
            if (!used_eq[j]) sol.farkas_ray[lp.num_rows() + extra++] = ray_full[j];
          for (int j = 0; j < mi; ++j)
            if (!used_le[j]) sol.farkas_ray[lp.num_rows() + extra++] = ray_full[me + j];
          sol.message = "dual ray certifies primal infeasibility";
          return sol;
        }
      }
    }

    if (iter == opts.max_iter) break;

    const double mu_bar = mi > 0 ? s.dot(mu) / mi : 0.0;

    factorize_robust(mi > 0 ? (s.array() / mu.array()).matrix().eval()
                            : Eigen::VectorXd());

    Eigen::VectorXd rhs(n + me + mi);
    rhs.head(n) = -r_d;
    rhs.segment(n, me) = -r_e;
    rhs.tail(mi) = s - r_i;  // rc/mu - ri with affine rc = s.*mu

    const Eigen::VectorXd d_aff = kkt.solve(rhs);
    const Eigen::VectorXd dx_aff = d_aff.head(n);
    const Eigen::VectorXd dmu_aff = d_aff.tail(mi);
    const Eigen::VectorXd ds_aff = -r_i - F.Ai * dx_aff;

    // Primal unboundedness: a descent direction that stays feasible.
    if (F.c.dot(dx_aff) < 0) {
      const double dxn = dx_aff.lpNorm<Eigen::Infinity>();
      if (dxn > 0) {
        const Eigen::VectorXd ray = dx_aff / dxn;
        const double tol_ray = 1e-10 * F.max_abs_coef;
        const bool eq_ok =
            me == 0 || (F.Ae * ray).lpNorm<Eigen::Infinity>() <= tol_ray;
        const bool le_ok = mi == 0 || (F.Ai * ray).maxCoeff() <= tol_ray;
        if (eq_ok && le_ok && F.c.dot(ray) < -1e-10 * (1.0 + cnorm) &&
            pobj < -1e8 * (1.0 + bnorm) * (1.0 + cnorm)) {
          sol.status = LpStatus::Unbounded;
          sol.x = x;
          sol.primal_ray = ray;
          sol.iterations = iter;
          sol.message = "primal ray certifies unboundedness";
          return sol;
        }
      }
    }

    double sigma = 0.0;
    Eigen::VectorXd dx, dy, dmu, ds;
    if (mi > 0) {
      const double a_p = max_step(s, ds_aff);
      const double a_d = max_step(mu, dmu_aff);
      const double mu_aff =
          (s + a_p * ds_aff).dot(mu + a_d * dmu_aff) / mi;
      sigma = std::clamp(std::pow(mu_aff / mu_bar, 3.0), 0.0, 1.0);

      // Corrector with Mehrotra's second-order term.
      rhs.tail(mi) =
          (s.array() - sigma * mu_bar / mu.array() +
           ds_aff.array() * dmu_aff.array() / mu.array() - r_i.array())
              .matrix();
      const Eigen::VectorXd d_cor = kkt.solve(rhs);
      dx = d_cor.head(n);
      dy = d_cor.segment(n, me);
      dmu = d_cor.tail(mi);
      ds = -r_i - F.Ai * dx;
    } else {
      dx = dx_aff;
      dy = d_aff.segment(n, me);
      dmu.resize(0);
      ds.resize(0);
    }

    const double mu_rel = mu_bar / (1.0 + std::abs(pobj));
    const double eta = mu_rel < 1e-6 ? 0.99995 : 0.995;
    const double a_p = mi > 0 ? std::min(1.0, eta * max_step(s, ds)) : 1.0;
    const double a_d = mi > 0 ? std::min(1.0, eta * max_step(mu, dmu)) : 1.0;

    x += a_p * dx;
    s += a_p * ds;
    y += a_d * dy;
    mu += a_d * dmu;

    if (mi > 0 && a_p < 1e-12 && a_d < 1e-12) break;  // stalled
  }

  sol.status = LpStatus::IterLimit;
  sol.x = best.x;
  map_back_duals(F, best.y, best.mu, lp.num_rows(), &sol.row_duals);
  sol.objective = best.pobj;
  sol.dual_objective = best.dobj;
  sol.primal_residual = best.rel_p;
  sol.dual_residual = best.rel_d;
  sol.gap = best.rel_g;
  sol.iterations = best.iterations;
  sol.message = "iteration limit reached before tolerances were met";
  return sol;
}

LpSolution solve_lp_row_generation(LinearProgram seed, const RowSource& source,
                                   const RowGenOptions& opts, RowGenStats* stats) {
  const double vtol = opts.violation_tol >= 0 ? opts.violation_tol : opts.lp.feas_tol;
  RowGenStats local;
  LpSolution sol;
  for (local.rounds = 1; local.rounds <= opts.max_rounds; ++local.rounds) {
    sol = solve_lp(seed, opts.lp);
    if (sol.status != LpStatus::Optimal) {
      if (stats) *stats = local;
      return sol;  // infeasible/unbounded verdicts carry over to the full LP
    }
    std::vector<LpRow> cuts = source(sol.x, vtol, opts.max_rows_per_round);
    if (cuts.empty()) {
      if (stats) *stats = local;
      return sol;
    }
    for (LpRow& r : cuts) {
      seed.add_row(std::move(r));
      ++local.rows_added;
    }
  }
  throw NumericalError("row generation failed to converge after " +
                       std::to_string(opts.max_rounds) + " rounds");
}

// Rebuilds the internal multiplier vector from the certificate layout
// (declared rows first, then internal bound rows in construction order).
namespace {
std::pair<Eigen::VectorXd, Eigen::VectorXd> split_certificate(
    const InternalForm& F, const LinearProgram& lp, const Eigen::VectorXd& ray) {
  if (ray.size() != F.me + F.mi)
    throw InputError("certificate has " + std::to_string(ray.size()) +
                     " entries, expected " + std::to_string(F.me + F.mi));
  Eigen::VectorXd y = Eigen::VectorXd::Zero(F.me);
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(F.mi);
  std::vector<bool> used_eq(F.me, false), used_le(F.mi, false);
  for (int r = 0; r < lp.num_rows(); ++r) {
    const auto& [sense, pos] = F.declared[r];
    (sense == RowSense::EQ ? y[pos] : mu[pos]) = ray[r];
    (sense == RowSense::EQ ? used_eq[pos] : used_le[pos]) = true;
  }
  int extra = lp.num_rows();
  for (int j = 0; j < F.me; ++j)
    if (!used_eq[j]) y[j] = ray[extra++];
  for (int j = 0; j < F.mi; ++j)
    if (!used_le[j]) mu[j] = ray[extra++];
  return {std::move(y), std::move(mu)};
}
}  // namespace

double farkas_violation(const LinearProgram& lp, const Eigen::VectorXd& ray) {
  const InternalForm F = build_internal(lp);
  const auto [y, mu] = split_certificate(F, lp, ray);
  double v = (F.Ae.transpose() * y + F.Ai.transpose() * mu).lpNorm<Eigen::Infinity>();
  if (F.mi > 0) v = std::max(v, -mu.minCoeff());
  v = std::max(v, std::abs(F.be.dot(y) + F.bi.dot(mu) + 1.0));
  return v;
}

double unbounded_violation(const LinearProgram& lp, const Eigen::VectorXd& ray) {
  const InternalForm F = build_internal(lp);
  if (ray.size() != F.n)
    throw InputError("primal ray has " + std::to_string(ray.size()) +
                     " entries, expected " + std::to_string(F.n));
  double v = F.me > 0 ? (F.Ae * ray).lpNorm<Eigen::Infinity>() : 0.0;
  if (F.mi > 0) v = std::max(v, std::max(0.0, (F.Ai * ray).maxCoeff()));
  const Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(
      lp.objective().data(), lp.num_vars());
  v = std::max(v, std::max(0.0, c.dot(ray) + 1e-10));
  return v;
}

}  // namespace oactl
