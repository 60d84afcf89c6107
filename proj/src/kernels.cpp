#include "oactl/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <exception>

#include "oactl/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace oactl {

namespace {
constexpr long long kChunk = 8192;
}

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint32_t slot) {
  std::uint64_t h = splitmix64(seed + 0x9e3779b97f4a7c15ULL * (stream + 1));
  h = splitmix64(h + slot);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

Eigen::VectorXd sample_box(const Box& box, std::uint64_t seed,
                           std::uint64_t stream, std::uint32_t slot0) {
  Eigen::VectorXd p(box.dim());
  for (int a = 0; a < box.dim(); ++a) {
    const double t = uniform01(seed, stream, slot0 + static_cast<std::uint32_t>(a));
    p[a] = box.lo()[a] + (box.hi()[a] - box.lo()[a]) * t;
  }
  return p;
}

long long kernel_num_chunks(long long n) { return (n + kChunk - 1) / kChunk; }

void parallel_chunks(long long n, const ExecPolicy& exec,
                     const std::function<void(long long, long long, long long)>& body) {
  const long long chunks = kernel_num_chunks(n);
  if (chunks == 0) return;

  std::atomic<bool> failed{false};
  std::exception_ptr error;

  auto run_chunk = [&](long long c) {
    if (failed.load(std::memory_order_relaxed)) return;
    const long long begin = c * kChunk;
    const long long end = std::min(n, begin + kChunk);
    try {
      body(c, begin, end);
    } catch (...) {
      bool expect = false;
      if (failed.compare_exchange_strong(expect, true))
        error = std::current_exception();
    }
  };

#ifdef _OPENMP
  if (exec.parallel) {
    const int nt = exec.threads > 0 ? exec.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt)
    for (long long c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    for (long long c = 0; c < chunks; ++c) run_chunk(c);
  }
#else
  (void)exec;
  for (long long c = 0; c < chunks; ++c) run_chunk(c);
#endif

  if (error) std::rethrow_exception(error);
}

Eigen::MatrixXd eval_dynamics_batch(const DynamicalSystem& sys,
                                    const Eigen::MatrixXd& points,
                                    const ExecPolicy& exec) {
  if (points.cols() != sys.n_x + sys.n_u)
    throw InputError("eval_dynamics_batch: points must have n_x + n_u columns");
  const long long n = points.rows();
  Eigen::MatrixXd out(n, sys.n_x);
  parallel_chunks(n, exec, [&](long long, long long begin, long long end) {
    Eigen::VectorXd x(sys.n_x), u(sys.n_u);
    for (long long i = begin; i < end; ++i) {
      x = points.row(i).head(sys.n_x).transpose();
      u = points.row(i).tail(sys.n_u).transpose();
      out.row(i) = euler_step(sys, x, u).transpose();
    }
  });
  return out;
}

ResidualExtrema residual_extrema(const Eigen::VectorXd& f_values,
                                 const Eigen::MatrixXd& points,
                                 const Eigen::VectorXd& coef,
                                 const ExecPolicy& exec) {
  const long long n = f_values.size();
  if (points.rows() != n || points.cols() != coef.size())
    throw InputError("residual_extrema: inconsistent dimensions");
  if (n == 0) throw InputError("residual_extrema: empty sample set");

  const long long chunks = kernel_num_chunks(n);
  std::vector<ResidualExtrema> part(chunks);
  parallel_chunks(n, exec, [&](long long c, long long begin, long long end) {
    ResidualExtrema e;
    for (long long i = begin; i < end; ++i) {
      const double r = f_values[i] - points.row(i).dot(coef);
      if (e.arg_lo < 0 || r < e.lo) {
        e.lo = r;
        e.arg_lo = i;
      }
      if (e.arg_hi < 0 || r > e.hi) {
        e.hi = r;
        e.arg_hi = i;
      }
    }
    part[c] = e;
  });

  ResidualExtrema total = part[0];
  for (long long c = 1; c < chunks; ++c) {
    if (part[c].arg_lo >= 0 && part[c].lo < total.lo) {
      total.lo = part[c].lo;
      total.arg_lo = part[c].arg_lo;
    }
    if (part[c].arg_hi >= 0 && part[c].hi > total.hi) {
      total.hi = part[c].hi;
      total.arg_hi = part[c].arg_hi;
    }
  }
  return total;
}

namespace {
bool violation_less(const FitViolation& a, const FitViolation& b) {
  if (a.amount != b.amount) return a.amount > b.amount;
  if (a.index != b.index) return a.index < b.index;
  return a.upper && !b.upper;
}
}  // namespace

std::vector<FitViolation> scan_fit_violations(const Eigen::VectorXd& f_values,
                                              const Eigen::MatrixXd& points,
                                              const Eigen::VectorXd& coef,
                                              double eps_lo, double eps_hi,
                                              double tol, int max_records,
                                              const ExecPolicy& exec) {
  const long long n = f_values.size();
  if (points.rows() != n || points.cols() != coef.size())
    throw InputError("scan_fit_violations: inconsistent dimensions");

  const long long chunks = kernel_num_chunks(n);
  std::vector<std::vector<FitViolation>> part(chunks);
  parallel_chunks(n, exec, [&](long long c, long long begin, long long end) {
    std::vector<FitViolation>& local = part[c];
    for (long long i = begin; i < end; ++i) {
      const double r = f_values[i] - points.row(i).dot(coef);
      if (r > eps_hi + tol) local.push_back({i, true, r - eps_hi});
      if (r < eps_lo - tol) local.push_back({i, false, eps_lo - r});
    }
    // Keep only the strongest candidates per chunk to bound the merge.
    if (static_cast<int>(local.size()) > max_records) {
      std::partial_sort(local.begin(), local.begin() + max_records, local.end(),
                        violation_less);
      local.resize(max_records);
    }
  });

  std::vector<FitViolation> merged;
  for (const auto& p : part) merged.insert(merged.end(), p.begin(), p.end());
  std::sort(merged.begin(), merged.end(), violation_less);
  if (static_cast<int>(merged.size()) > max_records) merged.resize(max_records);
  return merged;
}

SoundnessReport soundness_scan(const DynamicalSystem& sys,
                               const LinearOverApprox& oa, long long n_samples,
                               std::uint64_t seed, const ExecPolicy& exec) {
  struct Partial {
    long long violations = 0;
    long long first = -1;
    double worst = 0.0;
    long long worst_index = -1;
  };
  const long long chunks = kernel_num_chunks(n_samples);
  std::vector<Partial> part(chunks);

  parallel_chunks(n_samples, exec, [&](long long c, long long begin, long long end) {
    Partial p;
    Eigen::VectorXd x, u, e;
    for (long long i = begin; i < end; ++i) {
      x = sample_box(sys.X, seed, static_cast<std::uint64_t>(i), 0);
      u = sample_box(sys.U, seed, static_cast<std::uint64_t>(i),
                     static_cast<std::uint32_t>(sys.n_x));
      e = eval_error(sys, oa, x, u);
      const double excess = oa.err_box.violation(e);
      if (excess > 0.0) {
        ++p.violations;
        if (p.first < 0) p.first = i;
        if (excess > p.worst || (excess == p.worst && i < p.worst_index)) {
          p.worst = excess;
          p.worst_index = i;
        }
      }
    }
    part[c] = p;
  });

  SoundnessReport report;
  report.samples = n_samples;
  report.seed = seed;
  long long worst_index = -1;
  for (const Partial& p : part) {
    report.violations += p.violations;
    if (p.first >= 0 && (report.first_violation < 0 || p.first < report.first_violation))
      report.first_violation = p.first;
    if (p.worst_index >= 0 &&
        (p.worst > report.worst_excess ||
         (p.worst == report.worst_excess && p.worst_index < worst_index))) {
      report.worst_excess = p.worst;
      worst_index = p.worst_index;
    }
  }
  if (report.first_violation >= 0) {
    const auto i = static_cast<std::uint64_t>(report.first_violation);
    Eigen::VectorXd w(sys.n_x + sys.n_u);
    w.head(sys.n_x) = sample_box(sys.X, seed, i, 0);
    w.tail(sys.n_u) = sample_box(sys.U, seed, i, static_cast<std::uint32_t>(sys.n_x));
    report.witness = w;
  }
  return report;
}

}  // namespace oactl
