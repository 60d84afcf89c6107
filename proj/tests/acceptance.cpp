// Acceptance gate: eight numbered criteria, one PASS/FAIL line each on
// stdout, exit 0 only when every requested criterion passes.
//
//   acceptance            runs 1..8 in order
//   acceptance 4 7        runs a subset (fixtures build lazily, so subset
//                         timings can exceed the per-criterion budgets that
//                         assume the full-suite fixture attribution)
//
// Shared fixtures (fits, policies, rollouts) are built once and reused;
// their cost lands in the first criterion that needs them, which the
// budgets of criteria 1 and 2 are sized for.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lp_brute.hpp"
#include "oactl/concretize.hpp"
#include "oactl/config.hpp"
#include "oactl/errors.hpp"
#include "oactl/kernels.hpp"
#include "oactl/lp.hpp"
#include "oactl/overapprox.hpp"
#include "oactl/simulate.hpp"
#include "oactl/sls.hpp"
#include "oactl/system.hpp"
#include "toys.hpp"

using namespace oactl;
using toys::vec;

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

std::string num(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double inf_norm_rows(const Eigen::MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().rowwise().sum().maxCoeff();
}

// ---------------------------------------------------------------------------
// Lazily built per-experiment fixtures.

struct Experiment {
  std::string name;
  SystemConfig cfg;
  LinearOverApprox oa;
  FitReport fit;
  SynthesisSpec spec_inf, spec_unin;
  InformedPolicy pol_inf, pol_unin;
  Trajectory roll_inf;
  bool has_fit = false, has_policies = false, has_rollout = false;
};

class Ctx {
 public:
  Experiment& fitted(int i) {
    Experiment& e = exp_[i];
    if (!e.has_fit) {
      e.name = i == 0 ? "exp1" : "exp2";
      std::fprintf(stderr, "[fixtures] %s: fitting over-approximation\n",
                   e.name.c_str());
      e.cfg = toys::load_config(e.name);
      auto [oa, rep] = compute_overapprox(e.cfg.system, e.cfg.experiment.delta);
      e.oa = std::move(oa);
      e.fit = std::move(rep);
      e.has_fit = true;
    }
    return e;
  }

  Experiment& synthesized(int i) {
    Experiment& e = fitted(i);
    if (!e.has_policies) {
      e.spec_inf = make_spec(e, true);
      e.spec_unin = make_spec(e, false);
      std::fprintf(stderr, "[fixtures] %s: synthesizing informed policy\n",
                   e.name.c_str());
      e.pol_inf = synthesize(e.spec_inf);
      std::fprintf(stderr, "[fixtures] %s: synthesizing uninformed policy\n",
                   e.name.c_str());
      e.pol_unin = synthesize(e.spec_unin);
      e.has_policies = true;
    }
    return e;
  }

  Experiment& rolled(int i) {
    Experiment& e = synthesized(i);
    if (!e.has_rollout) {
      RolloutOptions opts;
      opts.objective_component = e.cfg.experiment.objective_component;
      e.roll_inf = rollout(e.cfg.system, e.oa, e.pol_inf, e.cfg.experiment.x0, opts);
      e.has_rollout = true;
    }
    return e;
  }

 private:
  // Contraction bound as the synthesis front end picks it: needed only when
  // concretization iterates (general structure).
  static SynthesisSpec make_spec(const Experiment& e, bool informed) {
    SynthesisSpec spec;
    spec.aug = build_augmented(e.oa, informed);
    spec.X = e.cfg.system.X;
    spec.U = e.cfg.system.U;
    spec.x0 = e.cfg.experiment.x0;
    spec.T = e.cfg.experiment.horizon;
    spec.objective_component = e.cfg.experiment.objective_component;
    if (informed && e.cfg.system.structure == SystemStructure::General)
      spec.gamma = 1.0 / (e.cfg.system.lip_u + inf_norm_rows(e.oa.B));
    return spec;
  }

  Experiment exp_[2];
};

struct Criterion {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& text) {
    if (!detail.empty()) detail += "; ";
    if (!ok) detail += "FAILED ";
    detail += text;
    pass = pass && ok;
  }
};

std::string in_band(const char* label, double v, double lo, double hi) {
  return std::string(label) + "=" + num(v) + " in [" + num(lo) + ", " + num(hi) + "]";
}

// ---------------------------------------------------------------------------
// Criteria.

void crit_bands(Ctx& ctx, int i, double ilo, double ihi, double ulo, double uhi,
                double min_gap, Criterion& c) {
  Experiment& e = ctx.synthesized(i);
  const double ai = e.pol_inf.alpha;
  const double au = e.pol_unin.alpha;
  c.check(ai >= ilo && ai <= ihi, in_band("alpha_informed", ai, ilo, ihi));
  c.check(au >= ulo && au <= uhi, in_band("alpha_uninformed", au, ulo, uhi));
  c.check(ai - au >= min_gap, "gap=" + num(ai - au) + " >= " + num(min_gap));
}

void crit3_rollouts(Ctx& ctx, Criterion& c) {
  for (int i = 0; i < 2; ++i) {
    Experiment& e = ctx.rolled(i);
    const VerifyReport rep = verify_trajectory(
        e.roll_inf, e.cfg.system.X, e.cfg.system.U, e.oa.err_box, e.pol_inf.alpha,
        e.cfg.experiment.objective_component, 1e-9, 1e-6);
    c.check(rep.ok && rep.violations.empty(),
            e.name + " true-dynamics rollout: " +
                std::to_string(rep.violations.size()) + " violations, terminal=" +
                num(rep.terminal_objective, 9) + " vs alpha=" +
                num(e.pol_inf.alpha, 9));
  }
}

void crit4_soundness(Ctx& ctx, Criterion& c) {
  for (int i = 0; i < 2; ++i) {
    Experiment& e = ctx.fitted(i);
    c.check(e.fit.soundness.samples >= 100000 && e.fit.soundness.violations == 0,
            e.name + " soundness " + std::to_string(e.fit.soundness.violations) +
                "/" + std::to_string(e.fit.soundness.samples));
  }
  const auto [oa, rep] = compute_overapprox(toys::square_map(), 0.005);
  const double a = oa.A(0, 0);
  const double width = oa.err_box.hi()[0] - oa.err_box.lo()[0];
  c.check(std::abs(a - 1.0) <= 1e-2, "x^2 oracle A=" + num(a, 9));
  c.check(std::abs(width - 0.25) <= 1e-2, "x^2 oracle width=" + num(width, 9));
}

void crit5_sls(Ctx& ctx, Criterion& c) {
  double ach = 0.0, diag_stored = 0.0, diag_lp = 0.0, k_vs_phi = 0.0;
  for (int i = 0; i < 2; ++i) {
    Experiment& e = ctx.synthesized(i);
    for (const InformedPolicy* pol : {&e.pol_inf, &e.pol_unin}) {
      const AugmentedSystem& aug =
          pol->informed ? e.spec_inf.aug : e.spec_unin.aug;
      ach = std::max(ach, verify_responses(pol->responses, aug));
      diag_lp = std::max(diag_lp, pol->diag_deviation);
      const int n_z = pol->n_z();
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n_z, n_z);
      for (int t = 0; t <= pol->T; ++t) {
        diag_stored = std::max(
            diag_stored,
            (pol->responses.phi_z(t, t) - I).cwiseAbs().maxCoeff());
        k_vs_phi = std::max(
            k_vs_phi,
            (pol->gain(t, t) - pol->responses.phi_u(t, t)).cwiseAbs().maxCoeff());
      }
    }
  }
  c.check(ach <= 1e-8, "achievability residual=" + num(ach, 3));
  c.check(diag_stored <= 1e-9, "unit diagonals dev=" + num(diag_stored, 3) +
                                   " (pre-snap LP dev=" + num(diag_lp, 3) + ")");
  c.check(k_vs_phi <= 1e-9, "K_(t,t) vs Phi_u_(t,t) dev=" + num(k_vs_phi, 3));

  // Contraction rows of the policy that carries a gamma bound.
  const InformedPolicy& gpol = ctx.synthesized(1).pol_inf;
  if (gpol.gamma) {
    double worst = 0.0;
    for (int t = 0; t <= gpol.T; ++t)
      worst = std::max(worst, inf_norm_rows(gpol.Ke(t, t)));
    const double bound = std::max(*gpol.gamma - 1e-5, 0.0) + 1e-8;
    c.check(worst <= bound, "exp2 gamma rows: max ||Ke_(t,t)||=" + num(worst, 9) +
                                " <= " + num(bound, 9));
  } else {
    c.check(false, "exp2 informed policy carries no gamma bound");
  }

  // Informed dominance on a horizon-10 toy with binding state constraints.
  const LinearOverApprox oa = toys::scalar_oa(1.0, 1.0, -0.1, 0.1);
  const InformedPolicy ti =
      synthesize(toys::scalar_spec(oa, true, 10, -0.5, 0.5, -1.0, 1.0, 0.25));
  const InformedPolicy tu =
      synthesize(toys::scalar_spec(oa, false, 10, -0.5, 0.5, -1.0, 1.0, 0.25));
  c.check(ti.alpha >= tu.alpha + 0.1,
          "T=10 toy dominance: informed=" + num(ti.alpha, 9) +
              " uninformed=" + num(tu.alpha, 9));
}

void crit6_concretize(Ctx& ctx, Criterion& c) {
  // Fixed-point residuals of every applied input in the experiment rollouts.
  double roll_res = 0.0;
  for (int i = 0; i < 2; ++i) {
    Experiment& e = ctx.rolled(i);
    for (int t = 0; t < e.roll_inf.T(); ++t)
      roll_res = std::max(roll_res, e.roll_inf.meta[t].residual);
  }
  c.check(roll_res <= 1e-9, "rollout residuals=" + num(roll_res, 3));

  // Closed form and LP fallback on hand instances.
  const DynamicalSystem ag = toys::affine_gain();
  const LinearOverApprox ag_oa = toys::affine_gain_oa();
  StepAffinePolicy p;
  p.m = vec({1.0});
  p.Ke = Eigen::MatrixXd::Constant(1, 1, 1.0);
  const ConcretizationResult direct = concretize_affine(p, vec({0.0}), ag, ag_oa);
  p.Ke(0, 0) = 2.0;
  p.m[0] = 0.0;
  const ConcretizationResult lp_fb = concretize_affine(p, vec({0.0}), ag, ag_oa);
  c.check(direct.method == ConcretizeMethod::AffineLinearSolve &&
              direct.residual <= 1e-9 &&
              lp_fb.method == ConcretizeMethod::AffineFeasibilityLP &&
              lp_fb.residual <= 1e-9,
          "affine solve residual=" + num(direct.residual, 3) + ", LP fallback=" +
              num(lp_fb.residual, 3));

  // Banach vs affine on 10^3 random contractive instances.
  const DynamicalSystem sn = toys::sin_input();
  const LinearOverApprox sn_oa = toys::sin_input_oa();
  std::mt19937 rng(20260814u);
  std::uniform_real_distribution<double> um(-1.0, 1.0);
  std::uniform_real_distribution<double> uk(-0.35, 0.35);
  std::uniform_real_distribution<double> ux(-2.0, 2.0);
  double max_diff = 0.0, max_res = 0.0;
  ConcretizeOptions loose;
  loose.throw_on_violation = false;
  for (int k = 0; k < 1000; ++k) {
    StepAffinePolicy q;
    q.m = vec({um(rng)});
    q.Ke = Eigen::MatrixXd::Constant(1, 1, uk(rng));
    const Eigen::VectorXd x = vec({ux(rng)});
    const ConcretizationResult a = concretize_affine(q, x, ag, ag_oa, loose);
    const ConcretizationResult b =
        concretize_banach(q, x, ag, ag_oa, vec({0.0}), loose);
    max_diff = std::max(max_diff, (a.u - b.u).cwiseAbs().maxCoeff());
    max_res = std::max({max_res, a.residual, b.residual});
  }
  c.check(max_diff <= 1e-8 && max_res <= 1e-9,
          "Banach vs affine on 1000 instances: diff=" + num(max_diff, 3) +
              ", residual=" + num(max_res, 3));

  // Bisection oracle for u = 0.25 + 0.4 sin(u), plus extreme-start uniqueness.
  double lo = 0.0, hi = 2.0;
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    (mid - 0.25 - 0.4 * std::sin(mid) < 0.0 ? lo : hi) = mid;
  }
  const double root = 0.5 * (lo + hi);
  StepAffinePolicy q;
  q.m = vec({0.25});
  q.Ke = Eigen::MatrixXd::Constant(1, 1, 0.4);
  const ConcretizationResult r0 =
      concretize_banach(q, vec({0.0}), sn, sn_oa, vec({0.0}));
  const ConcretizationResult ra =
      concretize_banach(q, vec({0.0}), sn, sn_oa, sn.U.lo());
  const ConcretizationResult rb =
      concretize_banach(q, vec({0.0}), sn, sn_oa, sn.U.hi());
  const ConcretizeOptions defaults;
  c.check(std::abs(r0.u[0] - root) <= 1e-9,
          "bisection oracle diff=" + num(std::abs(r0.u[0] - root), 3));
  c.check(std::abs(ra.u[0] - rb.u[0]) <= 2.0 * defaults.tol,
          "extreme-start spread=" + num(std::abs(ra.u[0] - rb.u[0]), 3));
}

void crit7_lp(Criterion& c) {
  double obj_dev = 0.0, gap = 0.0, pres = 0.0, dres = 0.0;
  for (int k = 0; k < 20; ++k) {
    const LinearProgram lp = toys::random_lp(k, k % 2 == 1);
    const double ref = toys::brute_force_lp(lp);
    const LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::Optimal) {
      c.check(false, "instance " + std::to_string(k) + " not optimal");
      return;
    }
    obj_dev = std::max(obj_dev, std::abs(sol.objective - ref) / (1.0 + std::abs(ref)));
    gap = std::max(gap, sol.gap);
    pres = std::max(pres, sol.primal_residual);
    dres = std::max(dres, sol.dual_residual);
  }
  c.check(obj_dev <= 1e-7, "20 LPs vs vertex enumeration: dev=" + num(obj_dev, 3));
  c.check(gap <= 1e-6 && pres <= 1e-6 && dres <= 1e-6,
          "certificates: gap=" + num(gap, 3) + ", primal=" + num(pres, 3) +
              ", dual=" + num(dres, 3));

  // Independent audits of infeasibility / unboundedness certificates.
  LinearProgram inf_lp(1);
  inf_lp.set_bounds(0, 1.0, std::numeric_limits<double>::infinity());
  inf_lp.add_le_row({0}, {1.0}, 0.0);
  const LpSolution inf_sol = solve_lp(inf_lp);
  c.check(inf_sol.status == LpStatus::Infeasible &&
              farkas_violation(inf_lp, inf_sol.farkas_ray) <= 1e-6,
          "Farkas certificate verifies");
  LinearProgram unb_lp(2);
  unb_lp.set_objective(0, -1.0);
  unb_lp.set_bounds(0, 0.0, std::numeric_limits<double>::infinity());
  unb_lp.set_bounds(1, 0.0, 1.0);
  unb_lp.add_le_row({0, 1}, {-1.0, 1.0}, 5.0);
  const LpSolution unb_sol = solve_lp(unb_lp);
  c.check(unb_sol.status == LpStatus::Unbounded &&
              unbounded_violation(unb_lp, unb_sol.primal_ray) <= 1e-8,
          "unbounded ray verifies");

  // Row generation against the materialized program on a 1001-point fit.
  const DynamicalSystem sq = toys::square_map();
  const SampleGrid grid = uniform_grid(sq.X, sq.U, 1.0 / 2001.0);
  FitOptions full;
  full.rowgen_threshold = 1 << 30;
  FitOptions gen;
  gen.rowgen_threshold = 1;
  const ComponentFit f_full = fit_affine_component(0, grid, sq, full);
  const ComponentFit f_gen = fit_affine_component(0, grid, sq, gen);
  const double span_dev = std::abs((f_full.eps_hi - f_full.eps_lo) -
                                   (f_gen.eps_hi - f_gen.eps_lo));
  c.check(grid.points.rows() == 1001 && f_gen.rowgen_rounds > 0 &&
              span_dev <= 1e-9,
          "row generation on the " + std::to_string(grid.points.rows()) +
              "-point fit: span dev=" + num(span_dev, 3));
}

void crit8_monte_carlo(Ctx& ctx, Criterion& c) {
  for (int i = 0; i < 2; ++i) {
    Experiment& e = ctx.synthesized(i);
    const MonteCarloReport mc = monte_carlo_adversarial(
        e.spec_inf, e.pol_inf, e.pol_inf.alpha, 1000, 424242u);
    c.check(mc.violations == 0 && mc.min_terminal >= e.pol_inf.alpha - 1e-6,
            e.name + " Monte Carlo " + std::to_string(mc.violations) + "/" +
                std::to_string(mc.sequences) + " violations, min terminal=" +
                num(mc.min_terminal, 9));
  }
}

void run_criterion(int n, Ctx& ctx, Criterion& c) {
  switch (n) {
    case 1: crit_bands(ctx, 0, 0.71, 0.91, 0.52, 0.72, 0.10, c); break;
    case 2: crit_bands(ctx, 1, 2.9, 3.3, 2.5, 2.9, 0.2, c); break;
    case 3: crit3_rollouts(ctx, c); break;
    case 4: crit4_soundness(ctx, c); break;
    case 5: crit5_sls(ctx, c); break;
    case 6: crit6_concretize(ctx, c); break;
    case 7: crit7_lp(c); break;
    case 8: crit8_monte_carlo(ctx, c); break;
    default: c.check(false, "unknown criterion");
  }
}

// Wall-clock budgets (seconds); 0 = no budget stated for the criterion.
constexpr double kBudget[9] = {0, 600, 1200, 0, 60, 120, 60, 60, 120};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  for (int a = 1; a < argc; ++a) {
    const int n = std::atoi(argv[a]);
    if (n < 1 || n > 8) {
      std::fprintf(stderr, "usage: %s [criterion 1..8 ...]\n", argv[0]);
      return 2;
    }
    which.push_back(n);
  }
  if (which.empty())
    for (int n = 1; n <= 8; ++n) which.push_back(n);

  Ctx ctx;
  int passed = 0;
  for (const int n : which) {
    Criterion c;
    const double t0 = now_seconds();
    try {
      run_criterion(n, ctx, c);
    } catch (const std::exception& e) {
      c.check(false, std::string("exception: ") + e.what());
    }
    const double secs = now_seconds() - t0;
    if (kBudget[n] > 0)
      c.check(secs <= kBudget[n],
              num(secs, 4) + "s <= " + num(kBudget[n], 4) + "s");
    else
      c.check(true, num(secs, 4) + "s");
    std::printf("criterion %d: %s [%s]\n", n, c.pass ? "PASS" : "FAIL",
                c.detail.c_str());
    std::fflush(stdout);
    passed += c.pass ? 1 : 0;
  }
  std::printf("acceptance: %d/%zu criteria passed\n", passed, which.size());
  return passed == static_cast<int>(which.size()) ? 0 : 1;
}
