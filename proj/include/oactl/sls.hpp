#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "oactl/box.hpp"
#include "oactl/lp.hpp"
#include "oactl/system.hpp"

namespace oactl {

// Augmented linear model for synthesis.  Informed policies act on
// z = (x, e_bar): the over-approximation error doubles as an input-dependent
// preview disturbance, giving
//
//   A_til = [A I; 0 0],  B_til = [B; 0],  D_til = [0; I],
//
// with disturbance stack w = (z_0, e_1, .., e_T).  Uninformed policies keep
// z = x with A_til = A, B_til = B, D_til = I and w = (x_0, e_0, .., e_{T-1}).
struct AugmentedSystem {
  Eigen::MatrixXd A_til, B_til, D_til;
  bool informed = true;
  int n_x = 0, n_u = 0;
  Eigen::MatrixXd A, B;  // underlying over-approximation
  Box err_box;

  int n_z() const { return static_cast<int>(A_til.rows()); }
  int n_e() const { return static_cast<int>(D_til.cols()); }
};

AugmentedSystem build_augmented(const LinearOverApprox& oa, bool informed);

struct SynthesisSpec {
  AugmentedSystem aug;
  Box X, U;
  Eigen::VectorXd x0;
  int T = 0;
  int objective_component = 1;  // 1-based state index maximized at time T
  std::optional<double> gamma;  // diagonal K^e contraction bound, absent = off
  // Inward shrink applied to the X/U face rows so that closed-loop
  // trajectories satisfy the boxes strictly even after solver tolerances.
  double margin = 1e-7;
  // The contraction condition is strict; enforce <= gamma - gamma_slack
  // (clamped at zero from below).
  double gamma_slack = 1e-5;

  void validate() const;
};

// Center/halfwidth description of the stacked disturbance set
// {w : |w - center| <= halfwidth}; x0 coordinates have halfwidth 0.
struct DisturbanceStack {
  int T = 0, n_z = 0, n_e = 0;
  Eigen::VectorXd center, halfwidth;

  int dim() const { return static_cast<int>(center.size()); }
};

DisturbanceStack disturbance_stack(const SynthesisSpec& spec);

// Lower block-triangular system responses z = Phi_z w, u = Phi_u w over
// blocks (t, tau), tau <= t <= T.
class SystemResponses {
 public:
  SystemResponses() = default;
  SystemResponses(int T, int n_z, int n_u);

  int T() const { return T_; }
  int n_z() const { return n_z_; }
  int n_u() const { return n_u_; }
  bool empty() const { return T_ < 0; }

  static int block_index(int t, int tau) { return t * (t + 1) / 2 + tau; }

  Eigen::MatrixXd& phi_z(int t, int tau);
  const Eigen::MatrixXd& phi_z(int t, int tau) const;
  Eigen::MatrixXd& phi_u(int t, int tau);
  const Eigen::MatrixXd& phi_u(int t, int tau) const;

 private:
  int T_ = -1, n_z_ = 0, n_u_ = 0;
  std::vector<Eigen::MatrixXd> phi_z_, phi_u_;
};

// Max-abs residual of the achievability identity
//   Phi_z(t,tau) - A_til Phi_z(t-1,tau) - B_til Phi_u(t-1,tau) = I{t==tau},
// including the unit-diagonal blocks.
double verify_responses(const SystemResponses& resp, const AugmentedSystem& aug);

// Time-varying linear policy with memory: u_t = sum_{tau<=t} K_(t,tau) z_tau.
// For informed policies each gain splits as K = [K^x | K^e].
struct InformedPolicy {
  int T = 0, n_x = 0, n_u = 0;
  bool informed = true;
  double alpha = 0.0;
  std::optional<double> gamma;
  // Largest deviation of the LP's diagonal response blocks from identity
  // before they are pinned exactly (a solver-quality witness).
  double diag_deviation = 0.0;
  std::vector<Eigen::MatrixXd> K;  // block_index(t, tau) -> n_u x n_z
  SystemResponses responses;       // may be empty when loaded without audit data

  const Eigen::MatrixXd& gain(int t, int tau) const {
    return K[SystemResponses::block_index(t, tau)];
  }
  Eigen::MatrixXd Kx(int t, int tau) const;  // n_u x n_x
  Eigen::MatrixXd Ke(int t, int tau) const;  // n_u x n_x (zero when uninformed)
  int n_z() const { return informed ? 2 * n_x : n_x; }
};

// Variable layout of the synthesis LP, exposed for tests and extraction.
struct SlsLayout {
  int T = 0, n_z = 0, n_u = 0, n_e = 0, n_w = 0;
  int n_blocks = 0;
  int phi_z_offset = 0, phi_u_offset = 0, alpha_var = 0;
  int num_vars = 0;

  int phi_z_var(int t, int tau, int r, int c) const {
    return phi_z_offset + (SystemResponses::block_index(t, tau) * n_z + r) * n_z + c;
  }
  int phi_u_var(int t, int tau, int r, int c) const {
    return phi_u_offset + (SystemResponses::block_index(t, tau) * n_u + r) * n_z + c;
  }
};

// Builds the robust synthesis LP: achievability equalities, box-constraint
// rows reduced by the support function of the disturbance stack (shared
// absolute-value epigraph auxiliaries per output row), optional gamma rows on
// the diagonal K^e blocks, objective max alpha.
LinearProgram build_sls_lp(const SynthesisSpec& spec, SlsLayout* layout_out = nullptr);

// Solves the LP and extracts gains by block back-substitution through the
// unit-diagonal Phi_z.  Throws InfeasibleError with a certificate summary
// when the LP is infeasible, NumericalError on solver breakdown.
InformedPolicy synthesize(const SynthesisSpec& spec, const SolveOptions& opts = {});

// Error sequence minimizing the terminal objective on the linear model:
// e_bar blocks of the worst vertex of the disturbance stack (T+1 vectors for
// informed policies, T for uninformed).
std::vector<Eigen::VectorXd> worst_case_error_sequence(const InformedPolicy& policy,
                                                       const SynthesisSpec& spec);

void save_policy(const InformedPolicy& policy, const std::string& path,
                 bool include_responses = false);
InformedPolicy load_policy(const std::string& path);

}  // namespace oactl
