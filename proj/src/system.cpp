#include "oactl/system.hpp"

#include <cmath>

#include "oactl/errors.hpp"

namespace oactl {

void DynamicalSystem::validate() const {
  if (n_x < 1) throw InputError("system needs n_x >= 1");
  if (n_u < 0) throw InputError("system needs n_u >= 0");
  if (!(kappa > 0) || !std::isfinite(kappa))
    throw InputError("system needs a positive finite kappa");
  if (!f_cont) throw InputError("system is missing its dynamics function");
  if (X.dim() != n_x) throw InputError("state box dimension does not match n_x");
  if (U.dim() != n_u) throw InputError("input box dimension does not match n_u");
  if (lip_cont.size() != n_x)
    throw InputError("lip_cont must have one entry per state component");
  if ((lip_cont.array() < 0).any() || !lip_cont.allFinite())
    throw InputError("lip_cont entries must be finite and nonnegative");
  if (lip_u < 0 || !std::isfinite(lip_u))
    throw InputError("lip_u must be finite and nonnegative");
  if (structure == SystemStructure::InputAffine && (!fx_cont || !fu_cont))
    throw InputError("input-affine systems need fx_cont and fu_cont");
}

Eigen::VectorXd euler_step(const DynamicalSystem& sys, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& u) {
  if (x.size() != sys.n_x || u.size() != sys.n_u)
    throw InputError("euler_step called with mismatched dimensions");
  const Eigen::VectorXd dx = sys.f_cont(x, u);
  if (dx.size() != sys.n_x)
    throw EvalError("dynamics returned a vector of wrong dimension");
  Eigen::VectorXd next = x + sys.kappa * dx;
  if (!next.allFinite())
    throw EvalError("euler_step produced a non-finite state");
  return next;
}

Eigen::VectorXd eval_error(const DynamicalSystem& sys, const LinearOverApprox& oa,
                           const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
  return euler_step(sys, x, u) - oa.A * x - oa.B * u;
}

}  // namespace oactl
