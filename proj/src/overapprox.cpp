#include "oactl/overapprox.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "kv_util.hpp"
#include "oactl/errors.hpp"

namespace oactl {

SampleGrid uniform_grid(const Box& X, const Box& U, double delta,
                        long long max_points) {
  if (!(delta > 0) || !std::isfinite(delta))
    throw InputError("grid dispersion delta must be positive and finite");

  const int n_x = X.dim(), n_u = U.dim();
  const int dims = n_x + n_u;
  Eigen::VectorXd lo(dims), width(dims);
  lo << X.lo(), U.lo();
  width << X.width(), U.width();

  SampleGrid grid;
  grid.n_x = n_x;
  grid.n_u = n_u;
  grid.axis_cells.resize(dims);

  double total = 1.0;
  double dispersion = 0.0;
  for (int a = 0; a < dims; ++a) {
    const long long cells =
        std::max(1LL, static_cast<long long>(std::ceil(width[a] / (2.0 * delta))));
    grid.axis_cells[a] = cells;
    total *= static_cast<double>(cells);
    dispersion = std::max(dispersion, width[a] / (2.0 * static_cast<double>(cells)));
    if (total > static_cast<double>(max_points))
      throw InputError(
          "sample grid would exceed " + std::to_string(max_points) +
          " points; increase delta or tighten the domain");
  }
  grid.delta = dispersion;

  const long long n_pts = static_cast<long long>(total);
  grid.points.resize(n_pts, dims);
  // Mixed-radix enumeration, last axis fastest.
  std::vector<long long> stride(dims, 1);
  for (int a = dims - 2; a >= 0; --a) stride[a] = stride[a + 1] * grid.axis_cells[a + 1];
  for (int a = 0; a < dims; ++a) {
    const double step = width[a] / static_cast<double>(grid.axis_cells[a]);
    for (long long i = 0; i < n_pts; ++i) {
      const long long cell = (i / stride[a]) % grid.axis_cells[a];
      grid.points(i, a) = lo[a] + (static_cast<double>(cell) + 0.5) * step;
    }
  }
  return grid;
}

namespace {

// Variable layout of the per-component fit LP: a (n_x), b (n_u), eps_lo,
// eps_hi.
LpRow make_fit_row(const SampleGrid& grid, const Eigen::VectorXd& f_values,
                   long long j, bool upper) {
  const int dims = grid.n_x + grid.n_u;
  LpRow row;
  row.idx.reserve(dims + 1);
  row.val.reserve(dims + 1);
  const double sgn = upper ? -1.0 : 1.0;
  for (int a = 0; a < dims; ++a) {
    row.idx.push_back(a);
    row.val.push_back(sgn * grid.points(j, a));
  }
  row.idx.push_back(dims + (upper ? 1 : 0));
  row.val.push_back(sgn);
  row.rhs = sgn * f_values[j];
  return row;
}

}  // namespace

ComponentFit fit_affine_component(int i, const SampleGrid& grid,
                                  const Eigen::VectorXd& f_values_i,
                                  const FitOptions& opts) {
  const long long n = grid.points.rows();
  if (f_values_i.size() != n)
    throw InputError("fit_affine_component: value vector does not match grid");
  if (n == 0) throw InputError("fit_affine_component: empty grid");
  if (i < 0 || i >= grid.n_x)
    throw InputError("fit_affine_component: component index out of range");

  const int dims = grid.n_x + grid.n_u;
  LinearProgram lp(dims + 2, "fit");
  lp.set_objective(dims + 0, -1.0);  // -eps_lo
  lp.set_objective(dims + 1, 1.0);   // +eps_hi

  ComponentFit fit;
  LpSolution sol;

  if (n <= opts.rowgen_threshold) {
    for (long long j = 0; j < n; ++j) {
      lp.add_row(make_fit_row(grid, f_values_i, j, true));
      lp.add_row(make_fit_row(grid, f_values_i, j, false));
    }
    sol = solve_lp(lp, opts.lp);
    fit.rows_used = lp.num_rows();
  } else {
    // Seed with a deterministic pseudo-random subset, then cut.
    std::set<long long> seed_set;
    const std::uint64_t seed = 0x0ac7150ull;
    for (std::uint64_t k = 0; seed_set.size() < static_cast<std::size_t>(
                                  std::min<long long>(opts.seed_rows, n));
         ++k)
      seed_set.insert(static_cast<long long>(
          uniform01(seed, k, static_cast<std::uint32_t>(i)) * static_cast<double>(n)));
    for (long long j : seed_set) {
      lp.add_row(make_fit_row(grid, f_values_i, j, true));
      lp.add_row(make_fit_row(grid, f_values_i, j, false));
    }

    RowGenOptions rg;
    rg.lp = opts.lp;
    rg.violation_tol = opts.violation_tol;
    rg.max_rows_per_round = opts.rows_per_round;
    const double vtol = rg.violation_tol >= 0 ? rg.violation_tol : rg.lp.feas_tol;

    RowSource source = [&](const Eigen::VectorXd& x, double tol, int max_rows) {
      const Eigen::VectorXd coef = x.head(dims);
      const std::vector<FitViolation> violations = scan_fit_violations(
          f_values_i, grid.points, coef, x[dims], x[dims + 1], tol, max_rows,
          opts.exec);
      std::vector<LpRow> rows;
      rows.reserve(violations.size());
      for (const FitViolation& v : violations)
        rows.push_back(make_fit_row(grid, f_values_i, v.index, v.upper));
      return rows;
    };
    (void)vtol;

    RowGenStats stats;
    LinearProgram seed_lp = lp;
    sol = solve_lp_row_generation(std::move(seed_lp), source, rg, &stats);
    fit.rowgen_rounds = stats.rounds;
    fit.rows_used = lp.num_rows() + stats.rows_added;
  }

  if (sol.status != LpStatus::Optimal)
    throw NumericalError("minimax fit LP did not reach optimality: " +
                         std::string(to_string(sol.status)));

  fit.a_row = sol.x.head(grid.n_x);
  fit.b_row = sol.x.segment(grid.n_x, grid.n_u);
  fit.eps_lo = sol.x[dims + 0];
  fit.eps_hi = sol.x[dims + 1];
  fit.lp_iterations = sol.iterations;
  return fit;
}

ComponentFit fit_affine_component(int i, const SampleGrid& grid,
                                  const DynamicalSystem& sys,
                                  const FitOptions& opts) {
  const Eigen::MatrixXd values = eval_dynamics_batch(sys, grid.points, opts.exec);
  return fit_affine_component(i, grid, values.col(i), opts);
}

double lipschitz_error_bound(int i, const DynamicalSystem& sys,
                             const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  if (i < 0 || i >= sys.n_x) throw InputError("component index out of range");
  double row_norm = 0.0;
  for (int j = 0; j < sys.n_x; ++j)
    row_norm += std::abs(A(i, j) - (i == j ? 1.0 : 0.0));
  for (int j = 0; j < sys.n_u; ++j) row_norm += std::abs(B(i, j));
  return sys.kappa * sys.lip_cont[i] + row_norm;
}

std::pair<LinearOverApprox, FitReport> compute_overapprox(
    const DynamicalSystem& sys, double delta, const FitOptions& opts) {
  sys.validate();
  const SampleGrid grid = uniform_grid(sys.X, sys.U, delta);
  const Eigen::MatrixXd values = eval_dynamics_batch(sys, grid.points, opts.exec);

  LinearOverApprox oa;
  oa.A.resize(sys.n_x, sys.n_x);
  oa.B.resize(sys.n_x, sys.n_u);
  oa.lip_err.resize(sys.n_x);
  oa.delta = grid.delta;

  FitReport report;
  report.sample_count = grid.points.rows();
  report.requested_delta = delta;
  report.grid_dispersion = grid.delta;
  report.eps_lo_sampled.resize(sys.n_x);
  report.eps_hi_sampled.resize(sys.n_x);
  report.lip_err.resize(sys.n_x);

  Eigen::VectorXd lo(sys.n_x), hi(sys.n_x);
  for (int i = 0; i < sys.n_x; ++i) {
    ComponentFit fit = fit_affine_component(i, grid, values.col(i), opts);
    oa.A.row(i) = fit.a_row.transpose();
    oa.B.row(i) = fit.b_row.transpose();
    const double lip = lipschitz_error_bound(i, sys, oa.A, oa.B);
    oa.lip_err[i] = lip;
    report.eps_lo_sampled[i] = fit.eps_lo;
    report.eps_hi_sampled[i] = fit.eps_hi;
    report.lip_err[i] = lip;
    lo[i] = fit.eps_lo - lip * grid.delta;
    hi[i] = fit.eps_hi + lip * grid.delta;
    report.components.push_back(std::move(fit));
  }
  oa.err_box = Box(lo, hi);

  report.soundness = soundness_scan(sys, oa, opts.soundness_samples,
                                    opts.soundness_seed, opts.exec);
  if (report.soundness.violations > 0) {
    std::string msg =
        "over-approximation failed randomized soundness validation (" +
        std::to_string(report.soundness.violations) + " of " +
        std::to_string(report.soundness.samples) +
        " samples outside the error box; worst excess " +
        detail::format_double(report.soundness.worst_excess) +
        "); check the declared Lipschitz constants";
    throw NumericalError(msg);
  }
  return {oa, report};
}

void save_overapprox(const LinearOverApprox& oa, const FitReport* report,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  using detail::format_double;
  using detail::format_matrix_row_major;
  using detail::format_vector;

  out << "[overapprox]\n";
  out << "n_x = " << oa.A.rows() << "\n";
  out << "n_u = " << oa.B.cols() << "\n";
  out << "delta = " << format_double(oa.delta) << "\n";
  out << "A = " << format_matrix_row_major(oa.A) << "\n";
  out << "B = " << format_matrix_row_major(oa.B) << "\n";
  out << "eps_lo = " << format_vector(oa.err_box.lo()) << "\n";
  out << "eps_hi = " << format_vector(oa.err_box.hi()) << "\n";
  out << "lip_err = " << format_vector(oa.lip_err) << "\n";

  if (report) {
    out << "\n[fit_report]\n";
    out << "sample_count = " << report->sample_count << "\n";
    out << "requested_delta = " << format_double(report->requested_delta) << "\n";
    out << "grid_dispersion = " << format_double(report->grid_dispersion) << "\n";
    out << "eps_lo_sampled = " << format_vector(report->eps_lo_sampled) << "\n";
    out << "eps_hi_sampled = " << format_vector(report->eps_hi_sampled) << "\n";
    out << "soundness_samples = " << report->soundness.samples << "\n";
    out << "soundness_violations = " << report->soundness.violations << "\n";
    out << "soundness_seed = " << report->soundness.seed << "\n";
  }
  if (!out) throw InputError("failed while writing '" + path + "'");
}

LinearOverApprox load_overapprox(const std::string& path) {
  const detail::KvFile kv = detail::read_kv_file(path);
  const long n_x = kv.get_int("overapprox", "n_x");
  const long n_u = kv.get_int("overapprox", "n_u");
  if (n_x < 1 || n_u < 0) throw InputError(path + ": invalid dimensions");

  LinearOverApprox oa;
  oa.delta = kv.get_scalar("overapprox", "delta");
  const Eigen::VectorXd a = kv.get_vector("overapprox", "A", n_x * n_x);
  const Eigen::VectorXd b = kv.get_vector("overapprox", "B", n_x * n_u);
  oa.A = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                        Eigen::RowMajor>>(a.data(), n_x, n_x);
  oa.B = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                        Eigen::RowMajor>>(b.data(), n_x, n_u);
  oa.err_box = Box(kv.get_vector("overapprox", "eps_lo", n_x),
                   kv.get_vector("overapprox", "eps_hi", n_x));
  oa.lip_err = kv.get_vector("overapprox", "lip_err", n_x);
  return oa;
}

}  // namespace oactl
