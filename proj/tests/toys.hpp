#pragma once

// Small hand-checkable systems, over-approximations and synthesis problems
// shared across the test suites.

#include <Eigen/Dense>
#include <cmath>
#include <initializer_list>
#include <string>

#include "oactl/box.hpp"
#include "oactl/config.hpp"
#include "oactl/sls.hpp"
#include "oactl/system.hpp"

namespace toys {

inline Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

inline oactl::SystemConfig load_config(const std::string& stem) {
  return oactl::load_system_config(std::string(OACTL_CONFIG_DIR) + "/" + stem +
                                   ".cfg");
}

// x+ = x^2 on [0, 1], written in Euler form (kappa = 1, f_cont = x^2 - x).
// The range-optimal linear model is A = 1 with residual x^2 - x in
// [-1/4, 0]; |d/dx (x^2 - x)| <= 1 on [0, 1].
inline oactl::DynamicalSystem square_map() {
  oactl::DynamicalSystem sys;
  sys.n_x = 1;
  sys.n_u = 0;
  sys.kappa = 1.0;
  sys.structure = oactl::SystemStructure::General;
  sys.f_cont = [](const Eigen::VectorXd& x, const Eigen::VectorXd&) {
    return vec({x[0] * x[0] - x[0]});
  };
  sys.lip_cont = vec({1.0});
  sys.lip_u = 0.0;
  sys.X = oactl::Box(vec({0.0}), vec({1.0}));
  sys.name = "square_map";
  return sys;
}

// x+ = x + sin(u) with the trivial model A = 1, B = 0, so the realized error
// is exactly sin(u) and the fixed point is u = m + Ke sin(u).
inline oactl::DynamicalSystem sin_input() {
  oactl::DynamicalSystem sys;
  sys.n_x = 1;
  sys.n_u = 1;
  sys.kappa = 1.0;
  sys.structure = oactl::SystemStructure::General;
  sys.f_cont = [](const Eigen::VectorXd&, const Eigen::VectorXd& u) {
    return vec({std::sin(u[0])});
  };
  sys.lip_cont = vec({1.0});
  sys.lip_u = 1.0;
  sys.X = oactl::Box(vec({-4.0}), vec({4.0}));
  sys.U = oactl::Box(vec({-2.0}), vec({2.0}));
  sys.name = "sin_input";
  return sys;
}

inline oactl::LinearOverApprox sin_input_oa() {
  oactl::LinearOverApprox oa;
  oa.A = Eigen::MatrixXd::Constant(1, 1, 1.0);
  oa.B = Eigen::MatrixXd::Zero(1, 1);
  oa.err_box = oactl::Box(vec({-1.0}), vec({1.0}));
  oa.lip_err = vec({1.0});
  return oa;
}

// x+ = x + 1.5 u with the deliberately loose model A = 1, B = 1: the
// realized error is 0.5 u, so the affine fixed point has Dfx = 0, Dfu = 0.5.
inline oactl::DynamicalSystem affine_gain() {
  oactl::DynamicalSystem sys;
  sys.n_x = 1;
  sys.n_u = 1;
  sys.kappa = 1.0;
  sys.structure = oactl::SystemStructure::InputAffine;
  sys.f_cont = [](const Eigen::VectorXd&, const Eigen::VectorXd& u) {
    return vec({1.5 * u[0]});
  };
  sys.fx_cont = [](const Eigen::VectorXd&) { return vec({0.0}); };
  sys.fu_cont = [](const Eigen::VectorXd&) {
    return Eigen::MatrixXd::Constant(1, 1, 1.5);
  };
  sys.lip_cont = vec({1.5});
  sys.lip_u = 1.5;
  sys.X = oactl::Box(vec({-10.0}), vec({10.0}));
  sys.U = oactl::Box(vec({-10.0}), vec({10.0}));
  sys.name = "affine_gain";
  return sys;
}

inline oactl::LinearOverApprox affine_gain_oa() {
  oactl::LinearOverApprox oa;
  oa.A = Eigen::MatrixXd::Constant(1, 1, 1.0);
  oa.B = Eigen::MatrixXd::Constant(1, 1, 1.0);
  oa.err_box = oactl::Box(vec({-5.0}), vec({5.0}));
  oa.lip_err = vec({0.5});
  return oa;
}

// Scalar integrator model x+ = a x + b u + e for synthesis tests.
inline oactl::LinearOverApprox scalar_oa(double a, double b, double e_lo,
                                         double e_hi) {
  oactl::LinearOverApprox oa;
  oa.A = Eigen::MatrixXd::Constant(1, 1, a);
  oa.B = Eigen::MatrixXd::Constant(1, 1, b);
  oa.err_box = oactl::Box(vec({e_lo}), vec({e_hi}));
  oa.lip_err = vec({0.0});
  return oa;
}

inline oactl::SynthesisSpec scalar_spec(const oactl::LinearOverApprox& oa,
                                        bool informed, int T, double x_lo,
                                        double x_hi, double u_lo, double u_hi,
                                        double x0) {
  oactl::SynthesisSpec spec;
  spec.aug = oactl::build_augmented(oa, informed);
  spec.X = oactl::Box(vec({x_lo}), vec({x_hi}));
  spec.U = oactl::Box(vec({u_lo}), vec({u_hi}));
  spec.x0 = vec({x0});
  spec.T = T;
  spec.objective_component = 1;
  return spec;
}

}  // namespace toys
