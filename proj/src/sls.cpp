#include "oactl/sls.hpp"

#include <cmath>
#include <fstream>

#include "kv_util.hpp"
#include "oactl/errors.hpp"

namespace oactl {

AugmentedSystem build_augmented(const LinearOverApprox& oa, bool informed) {
  const int n_x = static_cast<int>(oa.A.rows());
  const int n_u = static_cast<int>(oa.B.cols());
  if (oa.A.cols() != n_x || oa.B.rows() != n_x || oa.err_box.dim() != n_x)
    throw InputError("over-approximation has inconsistent dimensions");

  AugmentedSystem aug;
  aug.informed = informed;
  aug.n_x = n_x;
  aug.n_u = n_u;
  aug.A = oa.A;
  aug.B = oa.B;
  aug.err_box = oa.err_box;

  if (informed) {
    aug.A_til = Eigen::MatrixXd::Zero(2 * n_x, 2 * n_x);
    aug.A_til.topLeftCorner(n_x, n_x) = oa.A;
    aug.A_til.topRightCorner(n_x, n_x) = Eigen::MatrixXd::Identity(n_x, n_x);
    aug.B_til = Eigen::MatrixXd::Zero(2 * n_x, n_u);
    aug.B_til.topRows(n_x) = oa.B;
    aug.D_til = Eigen::MatrixXd::Zero(2 * n_x, n_x);
    aug.D_til.bottomRows(n_x) = Eigen::MatrixXd::Identity(n_x, n_x);
  } else {
    aug.A_til = oa.A;
    aug.B_til = oa.B;
    aug.D_til = Eigen::MatrixXd::Identity(n_x, n_x);
  }
  return aug;
}

void SynthesisSpec::validate() const {
  if (aug.n_x < 1 || aug.n_z() < aug.n_x)
    throw InputError("synthesis spec has an invalid augmented system");
  if (X.dim() != aug.n_x) throw InputError("X dimension does not match the system");
  if (U.dim() != aug.n_u) throw InputError("U dimension does not match the system");
  if (x0.size() != aug.n_x) throw InputError("x0 dimension does not match the system");
  if (!X.contains(x0)) throw InputError("x0 lies outside the state box X");
  if (T < 0) throw InputError("horizon must be >= 0");
  if (objective_component < 1 || objective_component > aug.n_x)
    throw InputError("objective_component out of range");
  if (gamma && (!(*gamma >= 0) || !std::isfinite(*gamma)))
    throw InputError("gamma must be finite and nonnegative");
  if (margin < 0 || gamma_slack < 0)
    throw InputError("margin and gamma_slack must be nonnegative");
}

DisturbanceStack disturbance_stack(const SynthesisSpec& spec) {
  const int n_z = spec.aug.n_z();
  const int n_e = spec.aug.n_e();
  const int n_x = spec.aug.n_x;
  DisturbanceStack stack;
  stack.T = spec.T;
  stack.n_z = n_z;
  stack.n_e = n_e;
  const int n_w = n_z + spec.T * n_e;
  stack.center.resize(n_w);
  stack.halfwidth.resize(n_w);

  const Eigen::VectorXd ec = spec.aug.err_box.center();
  const Eigen::VectorXd eh = spec.aug.err_box.halfwidth();

  stack.center.head(n_x) = spec.x0;
  stack.halfwidth.head(n_x).setZero();
  if (spec.aug.informed) {
    stack.center.segment(n_x, n_x) = ec;
    stack.halfwidth.segment(n_x, n_x) = eh;
  }
  for (int k = 0; k < spec.T; ++k) {
    stack.center.segment(n_z + k * n_e, n_e) = ec;
    stack.halfwidth.segment(n_z + k * n_e, n_e) = eh;
  }
  return stack;
}

SystemResponses::SystemResponses(int T, int n_z, int n_u)
    : T_(T), n_z_(n_z), n_u_(n_u) {
  if (T < 0 || n_z < 1 || n_u < 0) throw InputError("invalid response dimensions");
  const int blocks = (T + 1) * (T + 2) / 2;
  phi_z_.assign(blocks, Eigen::MatrixXd::Zero(n_z, n_z));
  phi_u_.assign(blocks, Eigen::MatrixXd::Zero(n_u, n_z));
}

Eigen::MatrixXd& SystemResponses::phi_z(int t, int tau) {
  return phi_z_[block_index(t, tau)];
}
const Eigen::MatrixXd& SystemResponses::phi_z(int t, int tau) const {
  return phi_z_[block_index(t, tau)];
}
Eigen::MatrixXd& SystemResponses::phi_u(int t, int tau) {
  return phi_u_[block_index(t, tau)];
}
const Eigen::MatrixXd& SystemResponses::phi_u(int t, int tau) const {
  return phi_u_[block_index(t, tau)];
}

double verify_responses(const SystemResponses& resp, const AugmentedSystem& aug) {
  if (resp.empty()) throw InputError("verify_responses: empty responses");
  if (resp.n_z() != aug.n_z() || resp.n_u() != aug.n_u)
    throw InputError("verify_responses: dimension mismatch");
  const int n_z = resp.n_z();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n_z, n_z);
  double residual = 0.0;
  for (int t = 0; t <= resp.T(); ++t) {
    for (int tau = 0; tau <= t; ++tau) {
      Eigen::MatrixXd R = resp.phi_z(t, tau);
      if (t > 0 && tau <= t - 1) {
        R -= aug.A_til * resp.phi_z(t - 1, tau);
        R -= aug.B_til * resp.phi_u(t - 1, tau);
      }
      if (tau == t) R -= I;
      residual = std::max(residual, R.cwiseAbs().maxCoeff());
    }
  }
  return residual;
}

// ---------------------------------------------------------------------------
// LP construction

namespace {

// Coordinate q of the disturbance stack lives in block k(q) with local index
// l(q); block 0 is z_0, block k >= 1 is e_bar.  For a response row (t, i) the
// coefficient multiplying w_q is a single Phi variable because D_til has unit
// columns.
struct WCoord {
  int block = 0;
  int local = 0;
  double center = 0.0;
  double halfwidth = 0.0;
};

std::vector<WCoord> enumerate_coords(const DisturbanceStack& stack) {
  std::vector<WCoord> coords(stack.dim());
  for (int q = 0; q < stack.dim(); ++q) {
    WCoord c;
    if (q < stack.n_z) {
      c.block = 0;
      c.local = q;
    } else {
      c.block = 1 + (q - stack.n_z) / stack.n_e;
      c.local = (q - stack.n_z) % stack.n_e;
    }
    c.center = stack.center[q];
    c.halfwidth = stack.halfwidth[q];
    coords[q] = c;
  }
  return coords;
}

}  // namespace

LinearProgram build_sls_lp(const SynthesisSpec& spec, SlsLayout* layout_out) {
  spec.validate();
  const AugmentedSystem& aug = spec.aug;
  const int T = spec.T;
  const int n_z = aug.n_z();
  const int n_u = aug.n_u;
  const int n_x = aug.n_x;
  const bool informed = aug.informed;

  SlsLayout lay;
  lay.T = T;
  lay.n_z = n_z;
  lay.n_u = n_u;
  lay.n_e = aug.n_e();
  lay.n_blocks = (T + 1) * (T + 2) / 2;
  lay.n_w = n_z + T * lay.n_e;
  lay.phi_z_offset = 0;
  lay.phi_u_offset = lay.n_blocks * n_z * n_z;
  lay.alpha_var = lay.phi_u_offset + lay.n_blocks * n_u * n_z;
  lay.num_vars = lay.alpha_var + 1;

  LinearProgram lp(lay.num_vars, "sls");
  lp.set_objective(lay.alpha_var, -1.0);  // maximize alpha
  lp.name_var(lay.alpha_var, "ALPHA");

  // Achievability equalities (one scalar row per matrix entry).
  for (int t = 0; t <= T; ++t) {
    for (int tau = 0; tau <= t; ++tau) {
      for (int r = 0; r < n_z; ++r) {
        for (int c = 0; c < n_z; ++c) {
          LpRow row;
          row.sense = RowSense::EQ;
          row.idx.push_back(lay.phi_z_var(t, tau, r, c));
          row.val.push_back(1.0);
          if (t > 0 && tau <= t - 1) {
            for (int k = 0; k < n_z; ++k) {
              const double a = aug.A_til(r, k);
              if (a != 0.0) {
                row.idx.push_back(lay.phi_z_var(t - 1, tau, k, c));
                row.val.push_back(-a);
              }
            }
            for (int k = 0; k < n_u; ++k) {
              const double b = aug.B_til(r, k);
              if (b != 0.0) {
                row.idx.push_back(lay.phi_u_var(t - 1, tau, k, c));
                row.val.push_back(-b);
              }
            }
          }
          row.rhs = (tau == t && r == c) ? 1.0 : 0.0;
          lp.add_row(std::move(row));
        }
      }
    }
  }

  const DisturbanceStack stack = disturbance_stack(spec);
  const std::vector<WCoord> coords = enumerate_coords(stack);

  // The Phi variable carrying w_q into output row (t, i) of Phi_z or Phi_u.
  auto coord_var = [&](bool state_output, int t, int i, const WCoord& c) {
    const int col = c.block == 0 ? c.local : (informed ? n_x + c.local : c.local);
    return state_output ? lay.phi_z_var(t, c.block, i, col)
                        : lay.phi_u_var(t, c.block, i, col);
  };

  // Adds the shared epigraph auxiliaries and (optionally) the two face rows
  // of output row (t, i) against [lo, hi]; returns the s-variables (parallel
  // to visible coords with halfwidth > 0) for reuse by the alpha row.
  struct GroupAux {
    std::vector<int> s_var;     // aligned with s_coord
    std::vector<int> s_coord;   // coordinate indices
  };
  auto add_group = [&](bool state_output, int t, int i, double lo, double hi,
                       bool add_faces) {
    GroupAux aux;
    std::vector<int> idx_u, idx_l;
    std::vector<double> val_u, val_l;
    for (int q = 0; q < lay.n_w; ++q) {
      const WCoord& c = coords[q];
      if (c.block > t) break;  // later disturbances cannot reach time t
      const int v = coord_var(state_output, t, i, c);
      if (c.halfwidth > 0.0) {
        const int s = lp.add_variable();
        aux.s_var.push_back(s);
        aux.s_coord.push_back(q);
        lp.add_le_row({v, s}, {1.0, -1.0}, 0.0);
        lp.add_le_row({v, s}, {-1.0, -1.0}, 0.0);
        idx_u.push_back(s);
        val_u.push_back(c.halfwidth);
        idx_l.push_back(s);
        val_l.push_back(c.halfwidth);
      }
      if (c.center != 0.0) {
        idx_u.push_back(v);
        val_u.push_back(c.center);
        idx_l.push_back(v);
        val_l.push_back(-c.center);
      }
    }
    if (add_faces) {
      lp.add_le_row(std::move(idx_u), std::move(val_u), hi - spec.margin);
      lp.add_le_row(std::move(idx_l), std::move(val_l), -(lo + spec.margin));
    }
    return aux;
  };

  // State rows at t = 0 reduce to the constant x0 (the response to w_0 is
  // pinned to identity), so their membership is data validated upstream, not
  // a constraint; with the synthesis margin they would even exclude boundary
  // initial states.  The t = 0 objective group still provides the epigraph
  // variables for the alpha row when T = 0.
  const int obj = spec.objective_component - 1;
  GroupAux obj_aux;
  for (int t = 0; t <= T; ++t)
    for (int i = 0; i < n_x; ++i) {
      const bool is_obj = t == T && i == obj;
      if (t == 0 && !is_obj) continue;
      GroupAux aux =
          add_group(true, t, i, spec.X.lo()[i], spec.X.hi()[i], t > 0);
      if (is_obj) obj_aux = std::move(aux);
    }
  for (int t = 0; t < T; ++t)
    for (int r = 0; r < n_u; ++r)
      add_group(false, t, r, spec.U.lo()[r], spec.U.hi()[r], true);

  // alpha <= center term - sum rho s over the terminal objective row.
  {
    LpRow row;
    row.idx.push_back(lay.alpha_var);
    row.val.push_back(1.0);
    for (int q = 0; q < lay.n_w; ++q) {
      const WCoord& c = coords[q];
      if (c.center == 0.0) continue;
      row.idx.push_back(coord_var(true, T, obj, c));
      row.val.push_back(-c.center);
    }
    for (std::size_t k = 0; k < obj_aux.s_var.size(); ++k) {
      row.idx.push_back(obj_aux.s_var[k]);
      row.val.push_back(coords[obj_aux.s_coord[k]].halfwidth);
    }
    row.rhs = 0.0;
    lp.add_row(std::move(row));
  }

  // Contraction rows: row-abs-sums of the diagonal K^e = Phi_u(t,t) error
  // columns stay below gamma (strictness via gamma_slack).
  if (spec.gamma && informed) {
    const double rhs = std::max(*spec.gamma - spec.gamma_slack, 0.0);
    for (int t = 0; t <= T; ++t) {
      for (int r = 0; r < n_u; ++r) {
        std::vector<int> sum_idx;
        std::vector<double> sum_val;
        for (int k = 0; k < n_x; ++k) {
          const int v = lay.phi_u_var(t, t, r, n_x + k);
          const int g = lp.add_variable();
          lp.add_le_row({v, g}, {1.0, -1.0}, 0.0);
          lp.add_le_row({v, g}, {-1.0, -1.0}, 0.0);
          sum_idx.push_back(g);
          sum_val.push_back(1.0);
        }
        lp.add_le_row(std::move(sum_idx), std::move(sum_val), rhs);
      }
    }
  }

  if (layout_out) *layout_out = lay;
  return lp;
}

// ---------------------------------------------------------------------------
// Synthesis

InformedPolicy synthesize(const SynthesisSpec& spec, const SolveOptions& opts) {
  SlsLayout lay;
  const LinearProgram lp = build_sls_lp(spec, &lay);
  const LpSolution sol = solve_lp(lp, opts);

  if (sol.status == LpStatus::Infeasible)
    throw InfeasibleError(
        "synthesis LP is infeasible (Farkas certificate over " +
        std::to_string(sol.farkas_ray.size()) +
        " rows; likely causes: error box too wide for X/U, margin too large, "
        "or gamma too small)");
  if (sol.status == LpStatus::Unbounded)
    throw NumericalError("synthesis LP is unbounded; the state box X must bound alpha");
  if (sol.status != LpStatus::Optimal)
    throw NumericalError("synthesis LP did not converge: " + sol.message);

  const int T = spec.T;
  const int n_z = lay.n_z, n_u = lay.n_u, n_x = spec.aug.n_x;

  InformedPolicy policy;
  policy.T = T;
  policy.n_x = n_x;
  policy.n_u = n_u;
  policy.informed = spec.aug.informed;
  policy.alpha = -sol.objective;
  policy.gamma = spec.aug.informed ? spec.gamma : std::nullopt;

  SystemResponses resp(T, n_z, n_u);
  for (int t = 0; t <= T; ++t)
    for (int tau = 0; tau <= t; ++tau) {
      Eigen::MatrixXd& pz = resp.phi_z(t, tau);
      Eigen::MatrixXd& pu = resp.phi_u(t, tau);
      for (int r = 0; r < n_z; ++r)
        for (int c = 0; c < n_z; ++c) pz(r, c) = sol.x[lay.phi_z_var(t, tau, r, c)];
      for (int r = 0; r < n_u; ++r)
        for (int c = 0; c < n_z; ++c) pu(r, c) = sol.x[lay.phi_u_var(t, tau, r, c)];
    }

  // The diagonal blocks are pinned to I by equality rows; snap them exactly
  // so that back-substitution inverts Phi_z without amplifying solver slack.
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n_z, n_z);
  for (int t = 0; t <= T; ++t) {
    const double dev = (resp.phi_z(t, t) - I).cwiseAbs().maxCoeff();
    if (dev > 1e-6)
      throw NumericalError("synthesis diagonal block deviates from identity by " +
                           detail::format_double(dev));
    policy.diag_deviation = std::max(policy.diag_deviation, dev);
    resp.phi_z(t, t) = I;
  }

  // K(t,tau) = Phi_u(t,tau) - sum_{s > tau} K(t,s) Phi_z(s,tau).
  policy.K.assign(lay.n_blocks, Eigen::MatrixXd());
  for (int t = 0; t <= T; ++t) {
    for (int tau = t; tau >= 0; --tau) {
      Eigen::MatrixXd K = resp.phi_u(t, tau);
      for (int s = tau + 1; s <= t; ++s)
        K -= policy.K[SystemResponses::block_index(t, s)] * resp.phi_z(s, tau);
      policy.K[SystemResponses::block_index(t, tau)] = std::move(K);
    }
  }

  // Defensive reconstruction check: Phi_u = K Phi_z.
  double recon = 0.0;
  for (int t = 0; t <= T; ++t)
    for (int tau = 0; tau <= t; ++tau) {
      Eigen::MatrixXd R = resp.phi_u(t, tau);
      for (int s = tau; s <= t; ++s)
        R -= policy.K[SystemResponses::block_index(t, s)] * resp.phi_z(s, tau);
      recon = std::max(recon, R.cwiseAbs().maxCoeff());
    }
  if (recon > 1e-7)
    throw NumericalError("gain reconstruction residual " +
                         detail::format_double(recon));

  const double ach = verify_responses(resp, spec.aug);
  if (ach > 1e-6)
    throw NumericalError("achievability residual " + detail::format_double(ach));

  policy.responses = std::move(resp);
  return policy;
}

Eigen::MatrixXd InformedPolicy::Kx(int t, int tau) const {
  return gain(t, tau).leftCols(n_x);
}

Eigen::MatrixXd InformedPolicy::Ke(int t, int tau) const {
  if (!informed) return Eigen::MatrixXd::Zero(n_u, n_x);
  return gain(t, tau).middleCols(n_x, n_x);
}

std::vector<Eigen::VectorXd> worst_case_error_sequence(const InformedPolicy& policy,
                                                       const SynthesisSpec& spec) {
  if (policy.responses.empty())
    throw InputError("policy carries no responses; re-synthesize or load with audit data");
  const DisturbanceStack stack = disturbance_stack(spec);
  const std::vector<WCoord> coords = enumerate_coords(stack);
  const int obj = spec.objective_component - 1;
  const int n_x = spec.aug.n_x;
  const bool informed = spec.aug.informed;
  const int n_e = spec.aug.n_e();

  // Terminal objective coefficient of w_q, then pick the minimizing vertex.
  std::vector<Eigen::VectorXd> errors(informed ? spec.T + 1 : spec.T,
                                      Eigen::VectorXd::Zero(n_e));
  for (int q = 0; q < stack.dim(); ++q) {
    const WCoord& c = coords[q];
    const int col = c.block == 0 ? c.local : (informed ? n_x + c.local : c.local);
    const double coef = policy.responses.phi_z(spec.T, c.block)(obj, col);
    const double sgn = coef > 0.0 ? 1.0 : (coef < 0.0 ? -1.0 : 0.0);
    const double w = c.center - c.halfwidth * sgn;
    if (informed) {
      if (c.block == 0 && c.local >= n_x)
        errors[0][c.local - n_x] = w;  // e_bar_0 inside z_0
      else if (c.block >= 1)
        errors[c.block][c.local] = w;
    } else {
      if (c.block >= 1) errors[c.block - 1][c.local] = w;
    }
  }
  return errors;
}

// ---------------------------------------------------------------------------
// Artifact IO

void save_policy(const InformedPolicy& policy, const std::string& path,
                 bool include_responses) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  using detail::format_double;
  using detail::format_matrix_row_major;

  out << "[policy]\n";
  out << "T = " << policy.T << "\n";
  out << "n_x = " << policy.n_x << "\n";
  out << "n_u = " << policy.n_u << "\n";
  out << "informed = " << (policy.informed ? 1 : 0) << "\n";
  out << "alpha = " << format_double(policy.alpha) << "\n";
  if (policy.gamma) out << "gamma = " << format_double(*policy.gamma) << "\n";
  for (int t = 0; t <= policy.T; ++t)
    for (int tau = 0; tau <= t; ++tau)
      out << "K_" << t << "_" << tau << " = "
          << format_matrix_row_major(policy.gain(t, tau)) << "\n";

  if (include_responses && !policy.responses.empty()) {
    out << "\n[responses]\n";
    for (int t = 0; t <= policy.T; ++t)
      for (int tau = 0; tau <= t; ++tau) {
        out << "phi_z_" << t << "_" << tau << " = "
            << format_matrix_row_major(policy.responses.phi_z(t, tau)) << "\n";
        out << "phi_u_" << t << "_" << tau << " = "
            << format_matrix_row_major(policy.responses.phi_u(t, tau)) << "\n";
      }
  }
  if (!out) throw InputError("failed while writing '" + path + "'");
}

InformedPolicy load_policy(const std::string& path) {
  const detail::KvFile kv = detail::read_kv_file(path);
  InformedPolicy policy;
  policy.T = static_cast<int>(kv.get_int("policy", "T"));
  policy.n_x = static_cast<int>(kv.get_int("policy", "n_x"));
  policy.n_u = static_cast<int>(kv.get_int("policy", "n_u"));
  policy.informed = kv.get_int("policy", "informed") != 0;
  policy.alpha = kv.get_scalar("policy", "alpha");
  if (kv.has("policy", "gamma")) policy.gamma = kv.get_scalar("policy", "gamma");
  if (policy.T < 0 || policy.n_x < 1 || policy.n_u < 0)
    throw InputError(path + ": invalid policy header");

  const int n_z = policy.n_z();
  const int blocks = (policy.T + 1) * (policy.T + 2) / 2;
  policy.K.assign(blocks, Eigen::MatrixXd());
  for (int t = 0; t <= policy.T; ++t)
    for (int tau = 0; tau <= t; ++tau) {
      const std::string key = "K_" + std::to_string(t) + "_" + std::to_string(tau);
      const Eigen::VectorXd flat =
          kv.get_vector("policy", key, static_cast<Eigen::Index>(policy.n_u) * n_z);
      policy.K[SystemResponses::block_index(t, tau)] =
          Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                         Eigen::RowMajor>>(flat.data(), policy.n_u,
                                                           n_z);
    }

  if (kv.has("responses", "phi_z_0_0")) {
    SystemResponses resp(policy.T, n_z, policy.n_u);
    for (int t = 0; t <= policy.T; ++t)
      for (int tau = 0; tau <= t; ++tau) {
        const std::string suffix = std::to_string(t) + "_" + std::to_string(tau);
        const Eigen::VectorXd fz = kv.get_vector(
            "responses", "phi_z_" + suffix, static_cast<Eigen::Index>(n_z) * n_z);
        const Eigen::VectorXd fu = kv.get_vector(
            "responses", "phi_u_" + suffix, static_cast<Eigen::Index>(policy.n_u) * n_z);
        resp.phi_z(t, tau) =
            Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                           Eigen::RowMajor>>(fz.data(), n_z, n_z);
        resp.phi_u(t, tau) =
            Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                           Eigen::RowMajor>>(fu.data(), policy.n_u,
                                                             n_z);
      }
    policy.responses = std::move(resp);
  }
  return policy;
}

}  // namespace oactl
