// Times the OpenMP kernels against their serial reference paths and checks
// that both produce bit-identical results.
//
//   bench_kernels [delta] [soundness_samples]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>

#include "oactl/kernels.hpp"
#include "oactl/overapprox.hpp"
#include "oactl/system.hpp"

using namespace oactl;
using Clock = std::chrono::steady_clock;

namespace {

DynamicalSystem bench_system() {
  DynamicalSystem sys;
  sys.n_x = 2;
  sys.n_u = 1;
  sys.kappa = 0.1;
  sys.f_cont = [](const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
    Eigen::VectorXd f(2);
    f[0] = x[1] + 0.5 * x[0] * x[0];
    f[1] = 0.75 * x[0] * x[0] + 2.0 * std::pow(x[1], 3) + std::cos(x[1]) * u[0];
    return f;
  };
  sys.structure = SystemStructure::General;
  sys.lip_cont = Eigen::Vector2d(2.0, 5.0);
  sys.lip_u = 1.0;
  sys.X = Box(Eigen::Vector2d(0.0, -0.5), Eigen::Vector2d(1.0, 0.5));
  sys.U = Box(Eigen::VectorXd::Constant(1, -1.0), Eigen::VectorXd::Constant(1, 1.0));
  sys.name = "bench";
  return sys;
}

double time_ms(const std::function<void()>& fn) {
  const auto start = Clock::now();
  fn();
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void report(const char* name, double serial_ms, double parallel_ms, bool identical) {
  std::printf("%-22s serial %9.2f ms   parallel %9.2f ms   speedup %5.2fx   %s\n",
              name, serial_ms, parallel_ms,
              parallel_ms > 0 ? serial_ms / parallel_ms : 0.0,
              identical ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const double delta = argc > 1 ? std::atof(argv[1]) : 0.004;
  const long long soundness_n = argc > 2 ? std::atoll(argv[2]) : 500000;

  const DynamicalSystem sys = bench_system();
  const SampleGrid grid = uniform_grid(sys.X, sys.U, delta);
  std::printf("grid: %lld samples (delta %.4g)\n",
              static_cast<long long>(grid.points.rows()), grid.delta);

  const ExecPolicy serial = ExecPolicy::serial();
  const ExecPolicy parallel;

  bool all_identical = true;

  Eigen::MatrixXd f_serial, f_parallel;
  const double t1s =
      time_ms([&] { f_serial = eval_dynamics_batch(sys, grid.points, serial); });
  const double t1p =
      time_ms([&] { f_parallel = eval_dynamics_batch(sys, grid.points, parallel); });
  bool same = (f_serial.array() == f_parallel.array()).all();
  all_identical = all_identical && same;
  report("eval_dynamics_batch", t1s, t1p, same);

  Eigen::VectorXd coef(grid.points.cols());
  coef << 1.0, 0.1, 0.05;
  ResidualExtrema ex_serial, ex_parallel;
  const Eigen::VectorXd f0 = f_serial.col(0);
  const double t2s =
      time_ms([&] { ex_serial = residual_extrema(f0, grid.points, coef, serial); });
  const double t2p =
      time_ms([&] { ex_parallel = residual_extrema(f0, grid.points, coef, parallel); });
  same = ex_serial.lo == ex_parallel.lo && ex_serial.hi == ex_parallel.hi &&
         ex_serial.arg_lo == ex_parallel.arg_lo &&
         ex_serial.arg_hi == ex_parallel.arg_hi;
  all_identical = all_identical && same;
  report("residual_extrema", t2s, t2p, same);

  LinearOverApprox oa;
  oa.A = Eigen::MatrixXd::Identity(2, 2);
  oa.B = Eigen::MatrixXd::Zero(2, 1);
  oa.B(1, 0) = 0.1;
  oa.err_box = Box(Eigen::Vector2d(-0.2, -0.5), Eigen::Vector2d(0.2, 0.5));
  oa.delta = delta;
  oa.lip_err = Eigen::Vector2d(1.0, 1.0);
  SoundnessReport sc_serial, sc_parallel;
  const double t3s = time_ms(
      [&] { sc_serial = soundness_scan(sys, oa, soundness_n, 7u, serial); });
  const double t3p = time_ms(
      [&] { sc_parallel = soundness_scan(sys, oa, soundness_n, 7u, parallel); });
  same = sc_serial.violations == sc_parallel.violations &&
         sc_serial.first_violation == sc_parallel.first_violation &&
         sc_serial.worst_excess == sc_parallel.worst_excess;
  all_identical = all_identical && same;
  report("soundness_scan", t3s, t3p, same);

  return all_identical ? 0 : 1;
}
