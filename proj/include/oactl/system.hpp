#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

#include "oactl/box.hpp"

namespace oactl {

// How the continuous-time right-hand side depends on the input.  The runtime
// picks a closed-form, a linear-solve, or an iterative concretization method
// based on this tag.
enum class SystemStructure { SharedInput, InputAffine, General };

using DynamicsFn =
    std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>;
using StateTermFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using InputMatrixFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

// Discrete-time system x+ = x + kappa * f_cont(x, u) constrained to X x U.
struct DynamicalSystem {
  int n_x = 0;
  int n_u = 0;
  double kappa = 0.0;
  DynamicsFn f_cont;

  SystemStructure structure = SystemStructure::General;
  // For structure == InputAffine: f_cont(x, u) = fx_cont(x) + fu_cont(x) * u.
  StateTermFn fx_cont;
  InputMatrixFn fu_cont;

  // Per-component Lipschitz constants of f_cont over X x U (inf-norm in the
  // argument), and a Lipschitz constant of u -> f(x, u) for the small-gain
  // bound.  Stating the continuous-time constant here is sound for any
  // kappa <= 1 since the discrete map scales it by kappa.
  Eigen::VectorXd lip_cont;
  double lip_u = 0.0;

  Box X;
  Box U;
  std::string name;

  void validate() const;  // throws InputError on inconsistent dimensions
};

// One explicit-Euler step of the discrete dynamics.  Throws EvalError when
// the result is non-finite.
Eigen::VectorXd euler_step(const DynamicalSystem& sys, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& u);

// Linear over-approximation f_hat(x, u) = A x + B u with additive error box:
// f(x, u) - f_hat(x, u) is guaranteed to lie in err_box over X x U.
struct LinearOverApprox {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Box err_box;
  double delta = 0.0;        // sample dispersion used during fitting
  Eigen::VectorXd lip_err;   // per-component Lipschitz bound on the error map
};

// Realized over-approximation error e(x, u) = f(x, u) - A x - B u.
Eigen::VectorXd eval_error(const DynamicalSystem& sys, const LinearOverApprox& oa,
                           const Eigen::VectorXd& x, const Eigen::VectorXd& u);

}  // namespace oactl
