#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "oactl/lp.hpp"
#include "oactl/sls.hpp"
#include "oactl/system.hpp"

namespace oactl {

// Per-step affine prescription u = m + Ke * e, where e is the realized
// over-approximation error at the current step.  All history terms and the
// current state-feedback term are folded into m.
struct StepAffinePolicy {
  Eigen::VectorXd m;   // n_u
  Eigen::MatrixXd Ke;  // n_u x n_x
};

enum class ConcretizeMethod {
  SharedClosedForm,
  AffineLinearSolve,
  AffineFeasibilityLP,
  BanachIteration,
};

std::string to_string(ConcretizeMethod method);

struct ConcretizationResult {
  Eigen::VectorXd u;
  ConcretizeMethod method = ConcretizeMethod::SharedClosedForm;
  int iterations = 0;
  double residual = 0.0;  // ||u - F_x(u)||_inf for F_x(u) = m + Ke (f(x,u) - Ax - Bu)
  bool in_U = true;
};

struct ConcretizeOptions {
  double tol = 1e-10;           // fixed-point increment tolerance (Banach)
  int max_iter = 100;
  double membership_tol = 1e-9; // slack when testing u against U
  // When false, out-of-box solutions are returned with in_U = false instead
  // of raising (used by audit evaluations of never-applied inputs).
  bool throw_on_violation = true;
  SolveOptions lp;              // feasibility fallback of the affine path
};

// ||u - F_x(u)||_inf, the defining equation of the concretization problem.
double fixed_point_residual(const StepAffinePolicy& p, const Eigen::VectorXd& x,
                            const DynamicalSystem& sys, const LinearOverApprox& oa,
                            const Eigen::VectorXd& u);

// Closed form for shared-input systems, where f(x, u) = f(x, 0) + B u makes
// the error independent of u: u = m + Ke (f(x, 0) - A x).  Throws
// InfeasibleError when the unique solution leaves U beyond membership_tol.
ConcretizationResult concretize_shared(const StepAffinePolicy& p,
                                       const Eigen::VectorXd& x,
                                       const DynamicalSystem& sys,
                                       const LinearOverApprox& oa,
                                       const ConcretizeOptions& opts = {});

// Input-affine systems: solve (I - Ke Dfu) u = m + Ke Dfx with
// Dfx = f_x(x) - A x and Dfu = f_u(x) - B (discrete-time split).  Falls back
// to a feasibility LP over U when the solve is singular or lands outside U.
ConcretizationResult concretize_affine(const StepAffinePolicy& p,
                                       const Eigen::VectorXd& x,
                                       const DynamicalSystem& sys,
                                       const LinearOverApprox& oa,
                                       const ConcretizeOptions& opts = {});

// General systems: Banach iteration u <- m + Ke (f(x,u) - A x - B u) from u0.
// Iterates are left unclamped; membership in U is reported on the result.
// Throws NumericalError with the iteration trace when max_iter is exhausted.
ConcretizationResult concretize_banach(const StepAffinePolicy& p,
                                       const Eigen::VectorXd& x,
                                       const DynamicalSystem& sys,
                                       const LinearOverApprox& oa,
                                       const Eigen::VectorXd& u0,
                                       const ConcretizeOptions& opts = {});

// Small-gain check ||Ke||_{inf->inf} < 1 / (lip_u + ||B||_{inf->inf}); the
// error map u -> f(x,u) - A x - B u is Lipschitz in u with constant at most
// lip_u + ||B|| (lip_u bounds the discrete map f(x,.)), so a positive margin
// certifies Banach convergence from any initial guess.
struct ContractionCheck {
  bool ok = false;
  double norm_ke = 0.0;
  double bound = 0.0;   // 1 / (lip_u + ||B||)
  double margin = 0.0;  // bound - norm_ke
};

ContractionCheck check_contraction(const StepAffinePolicy& p,
                                   const DynamicalSystem& sys,
                                   const LinearOverApprox& oa);

// Folds the policy history into a StepAffinePolicy for step t:
// m = sum_{tau<t} (Kx_(t,tau) x_tau + Ke_(t,tau) e_tau) + Kx_(t,t) x_t.
StepAffinePolicy step_policy(const InformedPolicy& policy, int t,
                             const std::vector<Eigen::VectorXd>& xs,
                             const std::vector<Eigen::VectorXd>& es,
                             const Eigen::VectorXd& x);

// Routes to the closed form / linear solve / Banach iteration according to
// sys.structure.  us holds the applied inputs for tau < t (Banach warm start
// is the previous input, clamped to U; zero at t = 0).  Policies with a zero
// error gain short-circuit to the closed form.
ConcretizationResult dispatch_concretize(const InformedPolicy& policy, int t,
                                         const std::vector<Eigen::VectorXd>& xs,
                                         const std::vector<Eigen::VectorXd>& us,
                                         const std::vector<Eigen::VectorXd>& es,
                                         const Eigen::VectorXd& x,
                                         const DynamicalSystem& sys,
                                         const LinearOverApprox& oa,
                                         const ConcretizeOptions& opts = {});

}  // namespace oactl
