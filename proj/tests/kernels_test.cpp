#include <cstdint>
#include <limits>
#include <set>
#include <vector>

#include "doctest.h"
#include "oactl/errors.hpp"
#include "oactl/kernels.hpp"
#include "toys.hpp"

using namespace oactl;
using toys::vec;

TEST_CASE("counter-based uniforms are pure functions of their coordinates") {
  CHECK(uniform01(1, 2, 3) == uniform01(1, 2, 3));
  CHECK(uniform01(1, 2, 3) != uniform01(1, 2, 4));
  CHECK(uniform01(1, 2, 3) != uniform01(1, 3, 3));
  CHECK(uniform01(2, 2, 3) != uniform01(1, 2, 3));
  for (std::uint32_t k = 0; k < 1000; ++k) {
    const double v = uniform01(42, 7, k);
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
  // Rough uniformity: mean of many draws near 1/2.
  double acc = 0.0;
  const int n = 20000;
  for (int k = 0; k < n; ++k) acc += uniform01(9, 0, k);
  CHECK(acc / n == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("box sampling lands inside and is reproducible") {
  const Box b(vec({-1.0, 3.0}), vec({1.0, 3.0}));  // second axis degenerate
  std::set<double> firsts;
  for (int s = 0; s < 200; ++s) {
    const Eigen::VectorXd p = sample_box(b, 11, s);
    REQUIRE(p.size() == 2);
    CHECK(b.contains(p));
    CHECK(p[1] == 3.0);
    firsts.insert(p[0]);
  }
  CHECK(firsts.size() > 190);  // distinct streams give distinct draws
  CHECK(sample_box(b, 11, 5).isApprox(sample_box(b, 11, 5)));
}

TEST_CASE("chunked parallel-for covers the index range exactly once") {
  const long long n = 20000;
  std::vector<int> hits(n, 0);
  parallel_chunks(n, ExecPolicy::serial(), [&](long long, long long b, long long e) {
    for (long long i = b; i < e; ++i) hits[i]++;
  });
  for (long long i = 0; i < n; ++i) REQUIRE(hits[i] == 1);

  // Chunk count covers the range with the fixed chunk size.
  CHECK(kernel_num_chunks(0) == 0);
  CHECK(kernel_num_chunks(1) == 1);
  CHECK(kernel_num_chunks(8192) == 1);
  CHECK(kernel_num_chunks(8193) == 2);
}

TEST_CASE("batched dynamics evaluation: serial and parallel bit-identical") {
  const DynamicalSystem sys = toys::load_config("exp1").system;
  const int n = 5000;
  Eigen::MatrixXd pts(n, 3);
  for (int i = 0; i < n; ++i) {
    pts(i, 0) = uniform01(3, 0, i);
    pts(i, 1) = uniform01(3, 1, i) - 0.5;
    pts(i, 2) = 2 * uniform01(3, 2, i) - 1;
  }
  const Eigen::MatrixXd serial = eval_dynamics_batch(sys, pts, ExecPolicy::serial());
  const Eigen::MatrixXd parallel = eval_dynamics_batch(sys, pts, ExecPolicy{});
  REQUIRE(serial.rows() == n);
  CHECK((serial - parallel).cwiseAbs().maxCoeff() == 0.0);

  // Spot-check one row against a direct call.
  const Eigen::VectorXd row = euler_step(sys, pts.row(17).head(2).transpose(),
                                         pts.row(17).tail(1).transpose());
  CHECK((serial.row(17).transpose() - row).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dynamics exceptions propagate out of the parallel region") {
  DynamicalSystem sys = toys::sin_input();
  sys.f_cont = [](const Eigen::VectorXd&, const Eigen::VectorXd&) -> Eigen::VectorXd {
    throw EvalError("boom");
  };
  Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(10000, 2);
  CHECK_THROWS_AS(eval_dynamics_batch(sys, pts, ExecPolicy{}), EvalError);
  CHECK_THROWS_AS(eval_dynamics_batch(sys, pts, ExecPolicy::serial()), EvalError);
}

TEST_CASE("residual extrema match a brute-force scan") {
  const int n = 30000;
  Eigen::MatrixXd pts(n, 2);
  Eigen::VectorXd f(n);
  for (int i = 0; i < n; ++i) {
    pts(i, 0) = uniform01(5, 0, i);
    pts(i, 1) = uniform01(5, 1, i);
    f[i] = uniform01(5, 2, i);
  }
  const Eigen::VectorXd coef = vec({0.25, -0.75});

  const ResidualExtrema ser = residual_extrema(f, pts, coef, ExecPolicy::serial());
  const ResidualExtrema par = residual_extrema(f, pts, coef, ExecPolicy{});
  CHECK(ser.lo == par.lo);
  CHECK(ser.hi == par.hi);
  CHECK(ser.arg_lo == par.arg_lo);
  CHECK(ser.arg_hi == par.arg_hi);

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  Eigen::Index alo = -1, ahi = -1;
  for (int i = 0; i < n; ++i) {
    const double r = f[i] - pts.row(i).dot(coef);
    if (r < lo) lo = r, alo = i;
    if (r > hi) hi = r, ahi = i;
  }
  CHECK(ser.lo == lo);
  CHECK(ser.hi == hi);
  CHECK(ser.arg_lo == alo);
  CHECK(ser.arg_hi == ahi);
}

TEST_CASE("residual extrema tie-breaking prefers the smaller index") {
  Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(4, 1);
  Eigen::VectorXd f = vec({1.0, 2.0, 2.0, 1.0});
  const ResidualExtrema r = residual_extrema(f, pts, vec({0.0}));
  CHECK(r.arg_hi == 1);
  CHECK(r.arg_lo == 0);
}

TEST_CASE("violation scan orders by excess and caps records") {
  Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(6, 1);
  Eigen::VectorXd f = vec({0.0, 2.0, -3.0, 0.5, 2.0, -0.5});
  // Band [-1, 1] with tol 0: violations are 2.0 (+1), -3.0 (-2), 2.0 (+1).
  auto v = scan_fit_violations(f, pts, vec({0.0}), -1.0, 1.0, 0.0, 10);
  REQUIRE(v.size() == 3);
  CHECK(v[0].index == 2);
  CHECK_FALSE(v[0].upper);
  CHECK(v[0].amount == doctest::Approx(2.0));
  CHECK(v[1].index == 1);
  CHECK(v[1].upper);
  CHECK(v[2].index == 4);

  auto capped = scan_fit_violations(f, pts, vec({0.0}), -1.0, 1.0, 0.0, 2);
  REQUIRE(capped.size() == 2);
  CHECK(capped[0].index == 2);
  CHECK(capped[1].index == 1);

  // Serial/parallel agreement on a larger random instance.
  const int n = 40000;
  Eigen::MatrixXd rp(n, 1);
  Eigen::VectorXd rf(n);
  for (int i = 0; i < n; ++i) {
    rp(i, 0) = uniform01(8, 0, i);
    rf[i] = 2.0 * uniform01(8, 1, i) - 1.0;
  }
  auto a = scan_fit_violations(rf, rp, vec({0.1}), -0.5, 0.5, 1e-3, 64,
                               ExecPolicy::serial());
  auto b = scan_fit_violations(rf, rp, vec({0.1}), -0.5, 0.5, 1e-3, 64, ExecPolicy{});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].index == b[i].index);
    CHECK(a[i].upper == b[i].upper);
    CHECK(a[i].amount == b[i].amount);
  }
}

TEST_CASE("soundness scan flags a shrunken error box deterministically") {
  const DynamicalSystem sys = toys::sin_input();
  LinearOverApprox oa = toys::sin_input_oa();

  // The honest box [-1, 1] has no violations.
  SoundnessReport clean = soundness_scan(sys, oa, 20000, 99);
  CHECK(clean.samples == 20000);
  CHECK(clean.violations == 0);
  CHECK(clean.first_violation == -1);
  CHECK(clean.witness.size() == 0);

  // Shrinking it must produce violations, identically in serial and parallel.
  oa.err_box = Box(vec({-0.5}), vec({0.5}));
  SoundnessReport ser = soundness_scan(sys, oa, 20000, 99, ExecPolicy::serial());
  SoundnessReport par = soundness_scan(sys, oa, 20000, 99, ExecPolicy{});
  CHECK(ser.violations > 0);
  CHECK(ser.violations == par.violations);
  CHECK(ser.first_violation == par.first_violation);
  CHECK(ser.worst_excess == par.worst_excess);
  REQUIRE(ser.witness.size() == 2);
  CHECK(ser.witness.isApprox(par.witness));

  // The witness reproduces its own violation.
  const Eigen::VectorXd e =
      eval_error(sys, oa, ser.witness.head(1), ser.witness.tail(1));
  CHECK(oa.err_box.violation(e) > 0.0);
}
