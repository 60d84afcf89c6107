#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "oactl/kernels.hpp"
#include "oactl/lp.hpp"
#include "oactl/system.hpp"

namespace oactl {

// Cell-centered uniform sampling of X x U with dispersion at most delta:
// axis a of width w_a is split into ceil(w_a / (2 delta)) cells and sampled
// at cell centers, so every point of X x U is within delta (inf-norm) of a
// sample.
struct SampleGrid {
  Eigen::MatrixXd points;       // one sample per row: (x, u)
  int n_x = 0, n_u = 0;
  double delta = 0.0;           // certified dispersion of the grid
  std::vector<long long> axis_cells;
};

SampleGrid uniform_grid(const Box& X, const Box& U, double delta,
                        long long max_points = 5'000'000);

struct FitOptions {
  SolveOptions lp;
  // Above this sample count the minimax LP is solved by row generation.
  long long rowgen_threshold = 10000;
  int seed_rows = 512;
  int rows_per_round = 64;
  double violation_tol = -1.0;  // < 0: lp.feas_tol
  long long soundness_samples = 100000;
  std::uint64_t soundness_seed = 20260814u;
  ExecPolicy exec;
};

// Minimax fit of one error component: min eps_hi - eps_lo subject to
// eps_lo <= f_i(sample) - a.x - b.u <= eps_hi over all samples.
struct ComponentFit {
  Eigen::VectorXd a_row, b_row;
  double eps_lo = 0.0, eps_hi = 0.0;
  int lp_iterations = 0;
  int rowgen_rounds = 0;    // 0 when the LP was solved directly
  long long rows_used = 0;  // constraint rows in the final LP
};

ComponentFit fit_affine_component(int i, const SampleGrid& grid,
                                  const Eigen::VectorXd& f_values_i,
                                  const FitOptions& opts = {});
// Convenience overload evaluating f over the grid first.
ComponentFit fit_affine_component(int i, const SampleGrid& grid,
                                  const DynamicalSystem& sys,
                                  const FitOptions& opts = {});

// Lipschitz bound on the error component e_i(x,u) = f_i(x,u) - A_i x - B_i u:
// L_i <= kappa * lip_cont_i + ||[A - I, B]_i||_1.
double lipschitz_error_bound(int i, const DynamicalSystem& sys,
                             const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

struct FitReport {
  long long sample_count = 0;
  double requested_delta = 0.0;
  double grid_dispersion = 0.0;
  Eigen::VectorXd eps_lo_sampled, eps_hi_sampled;  // before inflation
  Eigen::VectorXd lip_err;
  std::vector<ComponentFit> components;
  SoundnessReport soundness;
};

// Full pipeline: grid -> per-component minimax fit -> Lipschitz inflation ->
// randomized soundness validation.  Throws NumericalError if validation finds
// a violation (which would indicate a broken Lipschitz constant in the
// config).
std::pair<LinearOverApprox, FitReport> compute_overapprox(
    const DynamicalSystem& sys, double delta, const FitOptions& opts = {});

// Plain-text artifact IO.
void save_overapprox(const LinearOverApprox& oa, const FitReport* report,
                     const std::string& path);
LinearOverApprox load_overapprox(const std::string& path);

}  // namespace oactl
