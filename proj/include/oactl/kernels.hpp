#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "oactl/box.hpp"
#include "oactl/system.hpp"

namespace oactl {

// Execution policy for the data-parallel kernels.  Every kernel has a serial
// reference path (parallel = false) and an OpenMP path; both produce
// bit-identical results because reductions are chunked deterministically.
struct ExecPolicy {
  bool parallel = true;
  int threads = 0;  // 0 = OpenMP default

  static ExecPolicy serial() { return ExecPolicy{false, 1}; }
};

// ---------------------------------------------------------------------------
// Counter-based RNG.  The k-th draw of stream `stream` is a pure function of
// (seed, stream, k), so sampling is reproducible under any parallel schedule.

std::uint64_t splitmix64(std::uint64_t z);
double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint32_t slot);

// Uniform sample from `box`, axis a drawn from slot slot0 + a of `stream`.
Eigen::VectorXd sample_box(const Box& box, std::uint64_t seed,
                           std::uint64_t stream, std::uint32_t slot0 = 0);

// ---------------------------------------------------------------------------
// Deterministic chunked parallel-for: [0, n) is split into fixed-size chunks;
// body(chunk, begin, end) runs once per chunk.  Per-chunk partial results
// merged in chunk order give schedule-independent reductions.

long long kernel_num_chunks(long long n);
void parallel_chunks(long long n, const ExecPolicy& exec,
                     const std::function<void(long long, long long, long long)>& body);

// ---------------------------------------------------------------------------
// Kernels.

// Row i of the result is euler_step(sys, x_i, u_i) for points.row(i) = (x, u).
Eigen::MatrixXd eval_dynamics_batch(const DynamicalSystem& sys,
                                    const Eigen::MatrixXd& points,
                                    const ExecPolicy& exec = {});

// Extrema of the fit residual r_i = f_values[i] - points.row(i).dot(coef),
// ties broken toward the smaller index.
struct ResidualExtrema {
  double lo = 0.0, hi = 0.0;
  Eigen::Index arg_lo = -1, arg_hi = -1;
};
ResidualExtrema residual_extrema(const Eigen::VectorXd& f_values,
                                 const Eigen::MatrixXd& points,
                                 const Eigen::VectorXd& coef,
                                 const ExecPolicy& exec = {});

// Samples whose residual exceeds [eps_lo - tol, eps_hi + tol], strongest
// violations first (ties toward lower index, upper face first); at most
// max_records entries.
struct FitViolation {
  Eigen::Index index = -1;
  bool upper = true;  // true: residual > eps_hi, false: residual < eps_lo
  double amount = 0.0;
};
std::vector<FitViolation> scan_fit_violations(const Eigen::VectorXd& f_values,
                                              const Eigen::MatrixXd& points,
                                              const Eigen::VectorXd& coef,
                                              double eps_lo, double eps_hi,
                                              double tol, int max_records,
                                              const ExecPolicy& exec = {});

// Draws n_samples random points of X x U and checks the realized error
// against oa.err_box.  Reports the count of violations, the first violating
// sample, and the largest excess.
struct SoundnessReport {
  long long samples = 0;
  long long violations = 0;
  long long first_violation = -1;
  double worst_excess = 0.0;
  Eigen::VectorXd witness;  // (x, u) of the first violation, empty when none
  std::uint64_t seed = 0;
};
SoundnessReport soundness_scan(const DynamicalSystem& sys,
                               const LinearOverApprox& oa, long long n_samples,
                               std::uint64_t seed, const ExecPolicy& exec = {});

}  // namespace oactl
