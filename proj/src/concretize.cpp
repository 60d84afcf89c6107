#include "oactl/concretize.hpp"

#include <cmath>
#include <sstream>

#include "kv_util.hpp"
#include "oactl/errors.hpp"

namespace oactl {

namespace {

// One application of the fixed-point map F_x(u) = m + Ke (f(x,u) - Ax - Bu).
Eigen::VectorXd apply_map(const StepAffinePolicy& p, const Eigen::VectorXd& x,
                          const DynamicalSystem& sys, const LinearOverApprox& oa,
                          const Eigen::VectorXd& u) {
  return p.m + p.Ke * eval_error(sys, oa, x, u);
}

void check_dims(const StepAffinePolicy& p, const Eigen::VectorXd& x,
                const DynamicalSystem& sys) {
  if (x.size() != sys.n_x) throw InputError("concretize: state dimension mismatch");
  if (p.m.size() != sys.n_u || p.Ke.rows() != sys.n_u || p.Ke.cols() != sys.n_x)
    throw InputError("concretize: policy dimension mismatch");
}

std::string format_point(const Eigen::VectorXd& u) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < u.size(); ++i)
    os << (i ? ", " : "") << detail::format_double(u[i]);
  os << ")";
  return os.str();
}

}  // namespace

std::string to_string(ConcretizeMethod method) {
  switch (method) {
    case ConcretizeMethod::SharedClosedForm: return "shared_closed_form";
    case ConcretizeMethod::AffineLinearSolve: return "affine_linear_solve";
    case ConcretizeMethod::AffineFeasibilityLP: return "affine_feasibility_lp";
    case ConcretizeMethod::BanachIteration: return "banach_iteration";
  }
  return "unknown";
}

double fixed_point_residual(const StepAffinePolicy& p, const Eigen::VectorXd& x,
                            const DynamicalSystem& sys, const LinearOverApprox& oa,
                            const Eigen::VectorXd& u) {
  if (u.size() == 0) return 0.0;
  return (u - apply_map(p, x, sys, oa, u)).cwiseAbs().maxCoeff();
}

ConcretizationResult concretize_shared(const StepAffinePolicy& p,
                                       const Eigen::VectorXd& x,
                                       const DynamicalSystem& sys,
                                       const LinearOverApprox& oa,
                                       const ConcretizeOptions& opts) {
  check_dims(p, x, sys);
  ConcretizationResult res;
  res.method = ConcretizeMethod::SharedClosedForm;
  res.iterations = 1;
  const Eigen::VectorXd fx0 = euler_step(sys, x, Eigen::VectorXd::Zero(sys.n_u));
  res.u = p.m + p.Ke * (fx0 - oa.A * x);
  res.residual = fixed_point_residual(p, x, sys, oa, res.u);
  res.in_U = sys.U.contains(res.u, opts.membership_tol);
  if (!res.in_U && opts.throw_on_violation)
    throw InfeasibleError("closed-form input " + format_point(res.u) +
                          " leaves U; the policy does not map into the input box");
  return res;
}

ConcretizationResult concretize_affine(const StepAffinePolicy& p,
                                       const Eigen::VectorXd& x,
                                       const DynamicalSystem& sys,
                                       const LinearOverApprox& oa,
                                       const ConcretizeOptions& opts) {
  check_dims(p, x, sys);
  if (sys.structure != SystemStructure::InputAffine || !sys.fx_cont || !sys.fu_cont)
    throw InputError("concretize_affine requires an input-affine system");

  // Discrete-time split f(x, u) = [x + kappa fx(x)] + [kappa fu(x)] u.
  const Eigen::VectorXd dfx = x + sys.kappa * sys.fx_cont(x) - oa.A * x;
  const Eigen::MatrixXd dfu = sys.kappa * sys.fu_cont(x) - oa.B;
  const Eigen::MatrixXd M =
      Eigen::MatrixXd::Identity(sys.n_u, sys.n_u) - p.Ke * dfu;
  const Eigen::VectorXd rhs = p.m + p.Ke * dfx;

  ConcretizationResult res;
  res.iterations = 1;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  if (lu.isInvertible()) {
    res.u = lu.solve(rhs);
    res.method = ConcretizeMethod::AffineLinearSolve;
    res.in_U = sys.U.contains(res.u, opts.membership_tol);
    if (res.in_U || !opts.throw_on_violation) {
      res.residual = fixed_point_residual(p, x, sys, oa, res.u);
      return res;
    }
  }

  // Singular map or solution outside U: pose the fixed point as equality rows
  // of a feasibility program over the input box.
  LinearProgram lp(sys.n_u, "concretize");
  for (int i = 0; i < sys.n_u; ++i) {
    lp.set_bounds(i, sys.U.lo()[i], sys.U.hi()[i]);
    std::vector<int> idx;
    std::vector<double> val;
    for (int j = 0; j < sys.n_u; ++j)
      if (M(i, j) != 0.0) {
        idx.push_back(j);
        val.push_back(M(i, j));
      }
    lp.add_eq_row(std::move(idx), std::move(val), rhs[i]);
  }
  const LpSolution sol = solve_lp(lp, opts.lp);
  if (sol.status != LpStatus::Optimal)
    throw InfeasibleError(
        "fixed-point equation has no solution inside U (linear solve " +
        std::string(lu.isInvertible() ? "left the box" : "was singular") +
        ", feasibility program " + to_string(sol.status) +
        "); the policy likely fails its admissibility or contraction assumptions");
  res.u = sol.x;
  res.method = ConcretizeMethod::AffineFeasibilityLP;
  res.residual = fixed_point_residual(p, x, sys, oa, res.u);
  res.in_U = sys.U.contains(res.u, opts.membership_tol);
  return res;
}

ConcretizationResult concretize_banach(const StepAffinePolicy& p,
                                       const Eigen::VectorXd& x,
                                       const DynamicalSystem& sys,
                                       const LinearOverApprox& oa,
                                       const Eigen::VectorXd& u0,
                                       const ConcretizeOptions& opts) {
  check_dims(p, x, sys);
  if (u0.size() != sys.n_u) throw InputError("concretize_banach: bad initial guess");

  Eigen::VectorXd u = u0;
  double step = std::numeric_limits<double>::infinity();
  std::vector<double> trace;
  for (int it = 1; it <= opts.max_iter; ++it) {
    const Eigen::VectorXd next = apply_map(p, x, sys, oa, u);
    step = sys.n_u == 0 ? 0.0 : (next - u).cwiseAbs().maxCoeff();
    trace.push_back(step);
    u = next;
    if (step <= opts.tol) {
      ConcretizationResult res;
      res.u = std::move(u);
      res.method = ConcretizeMethod::BanachIteration;
      res.iterations = it;
      res.residual = fixed_point_residual(p, x, sys, oa, res.u);
      res.in_U = sys.U.contains(res.u, opts.membership_tol);
      return res;
    }
  }
  std::ostringstream os;
  os << "fixed-point iteration did not converge in " << opts.max_iter
     << " steps (last increments:";
  const std::size_t from = trace.size() > 5 ? trace.size() - 5 : 0;
  for (std::size_t i = from; i < trace.size(); ++i)
    os << " " << detail::format_double(trace[i]);
  os << "); the error-feedback gain likely violates the contraction bound";
  throw NumericalError(os.str());
}

ContractionCheck check_contraction(const StepAffinePolicy& p,
                                   const DynamicalSystem& sys,
                                   const LinearOverApprox& oa) {
  ContractionCheck chk;
  chk.norm_ke = p.Ke.size() == 0 ? 0.0 : p.Ke.cwiseAbs().rowwise().sum().maxCoeff();
  const double norm_b =
      oa.B.size() == 0 ? 0.0 : oa.B.cwiseAbs().rowwise().sum().maxCoeff();
  const double denom = sys.lip_u + norm_b;
  chk.bound = denom > 0.0 ? 1.0 / denom : std::numeric_limits<double>::infinity();
  chk.margin = chk.bound - chk.norm_ke;
  chk.ok = chk.norm_ke < chk.bound;
  return chk;
}

StepAffinePolicy step_policy(const InformedPolicy& policy, int t,
                             const std::vector<Eigen::VectorXd>& xs,
                             const std::vector<Eigen::VectorXd>& es,
                             const Eigen::VectorXd& x) {
  if (t < 0 || t > policy.T) throw InputError("step_policy: t out of range");
  if (static_cast<int>(xs.size()) < t ||
      (policy.informed && static_cast<int>(es.size()) < t))
    throw InputError("step_policy: history shorter than t");
  StepAffinePolicy p;
  p.m = Eigen::VectorXd::Zero(policy.n_u);
  for (int tau = 0; tau < t; ++tau) {
    p.m += policy.Kx(t, tau) * xs[tau];
    if (policy.informed) p.m += policy.Ke(t, tau) * es[tau];
  }
  p.m += policy.Kx(t, t) * x;
  p.Ke = policy.Ke(t, t);
  return p;
}

ConcretizationResult dispatch_concretize(const InformedPolicy& policy, int t,
                                         const std::vector<Eigen::VectorXd>& xs,
                                         const std::vector<Eigen::VectorXd>& us,
                                         const std::vector<Eigen::VectorXd>& es,
                                         const Eigen::VectorXd& x,
                                         const DynamicalSystem& sys,
                                         const LinearOverApprox& oa,
                                         const ConcretizeOptions& opts) {
  const StepAffinePolicy p = step_policy(policy, t, xs, es, x);

  const bool zero_gain = p.Ke.size() == 0 || p.Ke.cwiseAbs().maxCoeff() == 0.0;
  if (zero_gain) {
    ConcretizationResult res;
    res.u = p.m;
    res.method = ConcretizeMethod::SharedClosedForm;
    res.iterations = 1;
    res.residual = 0.0;
    res.in_U = sys.U.contains(res.u, opts.membership_tol);
    if (!res.in_U && opts.throw_on_violation)
      throw InfeasibleError("policy input " + format_point(res.u) +
                            " leaves U; the policy does not map into the input box");
    return res;
  }

  switch (sys.structure) {
    case SystemStructure::SharedInput:
      return concretize_shared(p, x, sys, oa, opts);
    case SystemStructure::InputAffine:
      return concretize_affine(p, x, sys, oa, opts);
    case SystemStructure::General:
    default: {
      Eigen::VectorXd u0 = t > 0 && static_cast<int>(us.size()) >= t
                               ? us[t - 1]
                               : Eigen::VectorXd::Zero(sys.n_u);
      u0 = u0.cwiseMax(sys.U.lo()).cwiseMin(sys.U.hi());
      return concretize_banach(p, x, sys, oa, u0, opts);
    }
  }
}

}  // namespace oactl
