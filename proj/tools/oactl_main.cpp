// Command-line front end: over-approximation fitting, policy synthesis,
// closed-loop simulation, phase plots, and end-to-end reproduction runs.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oactl/concretize.hpp"
#include "oactl/config.hpp"
#include "oactl/errors.hpp"
#include "oactl/expr.hpp"
#include "oactl/manifest.hpp"
#include "oactl/overapprox.hpp"
#include "oactl/simulate.hpp"
#include "oactl/sls.hpp"
#include "oactl/svg_plot.hpp"
#include "oactl/system.hpp"

namespace fs = std::filesystem;
using namespace oactl;

namespace {

std::string num(double v, int digits = 9) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

Eigen::VectorXd parse_vector_arg(const std::string& text, int expected,
                                 const std::string& what) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) vals.push_back(eval_constant(part));
  if (expected >= 0 && static_cast<int>(vals.size()) != expected)
    throw InputError(what + ": expected " + std::to_string(expected) +
                     " comma-separated values, got " + std::to_string(vals.size()));
  return Eigen::Map<const Eigen::VectorXd>(vals.data(),
                                           static_cast<Eigen::Index>(vals.size()));
}

double inf_norm_rows(const Eigen::MatrixXd& M) {
  return M.size() == 0 ? 0.0 : M.cwiseAbs().rowwise().sum().maxCoeff();
}

// gamma spec: "auto" = 1/(lip_u + ||B||), "none" = no contraction rows,
// otherwise a numeric bound.  "default" picks auto only when the runtime
// would need the iterative concretization (general structure).
std::optional<double> resolve_gamma(const std::string& arg,
                                    const DynamicalSystem& sys,
                                    const LinearOverApprox& oa) {
  const double auto_gamma = 1.0 / (sys.lip_u + inf_norm_rows(oa.B));
  if (arg == "auto") return auto_gamma;
  if (arg == "none") return std::nullopt;
  if (arg == "default")
    return sys.structure == SystemStructure::General
               ? std::optional<double>(auto_gamma)
               : std::nullopt;
  return eval_constant(arg);
}

SynthesisSpec make_spec(const SystemConfig& cfg, const LinearOverApprox& oa,
                        bool informed, const std::string& gamma_arg) {
  SynthesisSpec spec;
  spec.aug = build_augmented(oa, informed);
  spec.X = cfg.system.X;
  spec.U = cfg.system.U;
  spec.x0 = cfg.experiment.x0;
  spec.T = cfg.experiment.horizon;
  spec.objective_component = cfg.experiment.objective_component;
  if (informed) spec.gamma = resolve_gamma(gamma_arg, cfg.system, oa);
  return spec;
}

std::string resolve_config_path(const std::string& arg) {
  if (fs::exists(arg)) return arg;
  const fs::path named = fs::path("configs") / (arg + ".cfg");
  if (fs::exists(named)) return named.string();
  throw InputError("config not found: '" + arg +
                   "' (tried the literal path and configs/" + arg + ".cfg)");
}

struct ExecOpts {
  bool serial = false;
  int threads = 0;

  ExecPolicy policy() const {
    ExecPolicy exec;
    exec.parallel = !serial;
    exec.threads = threads;
    return exec;
  }
};

// ---------------------------------------------------------------------------

struct OverapproxArgs {
  std::string config, out;
  double delta = -1.0;  // < 0: value from the config
  long long soundness_samples = 100000;
  std::uint64_t seed = 20260814u;
  ExecOpts exec;
};

LinearOverApprox run_overapprox(const OverapproxArgs& args, FitReport* report_out) {
  const SystemConfig cfg = load_system_config(args.config);
  const double delta = args.delta > 0 ? args.delta : cfg.experiment.delta;
  FitOptions opts;
  opts.soundness_samples = args.soundness_samples;
  opts.soundness_seed = args.seed;
  opts.exec = args.exec.policy();
  auto [oa, report] = compute_overapprox(cfg.system, delta, opts);

  std::cout << "samples: " << report.sample_count
            << " (dispersion " << num(report.grid_dispersion) << ")\n";
  for (int i = 0; i < cfg.system.n_x; ++i)
    std::cout << "e" << i + 1 << " in [" << num(oa.err_box.lo()[i]) << ", "
              << num(oa.err_box.hi()[i]) << "]  (sampled ["
              << num(report.eps_lo_sampled[i]) << ", "
              << num(report.eps_hi_sampled[i]) << "], lip "
              << num(report.lip_err[i]) << ")\n";
  std::cout << "soundness: " << report.soundness.violations << " violations in "
            << report.soundness.samples << " random samples\n";
  if (!args.out.empty()) {
    save_overapprox(oa, &report, args.out);
    std::cout << "wrote " << args.out << "\n";
  }
  if (report_out) *report_out = std::move(report);
  return oa;
}

struct SynthesizeArgs {
  std::string config, oa_path, out;
  bool uninformed = false;
  std::string gamma = "default";
  bool no_responses = false;
};

InformedPolicy run_synthesize(const SynthesizeArgs& args) {
  const SystemConfig cfg = load_system_config(args.config);
  const LinearOverApprox oa = load_overapprox(args.oa_path);
  const SynthesisSpec spec = make_spec(cfg, oa, !args.uninformed, args.gamma);
  const InformedPolicy policy = synthesize(spec);

  std::cout << (policy.informed ? "informed" : "uninformed")
            << " synthesis: alpha = " << num(policy.alpha, 12) << "\n";
  if (policy.gamma)
    std::cout << "contraction bound gamma = " << num(*policy.gamma, 12) << "\n";
  if (!args.out.empty()) {
    save_policy(policy, args.out, !args.no_responses);
    std::cout << "wrote " << args.out << "\n";
  }
  return policy;
}

struct SimulateArgs {
  std::string config, oa_path, policy_path, out;
  std::string x0;
};

VerifyReport run_simulate(const SimulateArgs& args, Trajectory* traj_out) {
  const SystemConfig cfg = load_system_config(args.config);
  const LinearOverApprox oa = load_overapprox(args.oa_path);
  const InformedPolicy policy = load_policy(args.policy_path);
  if (policy.n_x != cfg.system.n_x || policy.n_u != cfg.system.n_u)
    throw InputError("policy dimensions do not match the config");

  Eigen::VectorXd x0 = cfg.experiment.x0;
  if (!args.x0.empty())
    x0 = parse_vector_arg(args.x0, cfg.system.n_x, "--x0");
  if (!cfg.system.X.contains(x0, 0.0))
    throw InputError("initial state lies outside the state box X");

  RolloutOptions opts;
  opts.objective_component = cfg.experiment.objective_component;
  const Trajectory traj = rollout(cfg.system, oa, policy, x0, opts);
  const VerifyReport report =
      verify_trajectory(traj, cfg.system.X, cfg.system.U, oa.err_box,
                        policy.alpha, cfg.experiment.objective_component);
  std::cout << report.summary() << "\n";
  if (!args.out.empty()) {
    write_trajectory_csv(traj, args.out);
    std::cout << "wrote " << args.out << "\n";
  }
  if (traj_out) *traj_out = traj;
  return report;
}

struct PlotArgs {
  std::vector<std::string> csvs;
  std::string out;
  std::string config;  // optional, draws the X rectangle
  std::vector<std::string> vlines;
  std::string title;
};

void run_plot(const PlotArgs& args) {
  PlotSpec spec;
  spec.title = args.title;
  for (const std::string& path : args.csvs) {
    const CsvTrajectory csv = read_trajectory_csv(path);
    if (csv.n_x != 2)
      throw InputError(path + ": phase plots support exactly two state dimensions, got " +
                       std::to_string(csv.n_x));
    PlotSeries series;
    series.label = fs::path(path).stem().string();
    series.points = csv.x;
    spec.series.push_back(std::move(series));
  }
  if (!args.config.empty())
    spec.domain = load_system_config(args.config).system.X;
  for (const std::string& v : args.vlines) {
    const std::size_t eq = v.rfind('=');
    if (eq == std::string::npos)
      throw InputError("--vline expects label=value, got '" + v + "'");
    spec.vlines.emplace_back(v.substr(0, eq), eval_constant(v.substr(eq + 1)));
  }
  write_phase_plot_svg(spec, args.out);
  std::cout << "wrote " << args.out << "\n";
}

struct ReproduceArgs {
  std::string experiment;
  std::string out_dir;
  std::uint64_t mc_seed = 424242u;
  long long mc_samples = 1000;
  ExecOpts exec;
};

// Per-experiment target bands; names other than exp1/exp2 only require the
// rollouts to verify.
struct Targets {
  double inf_lo = -std::numeric_limits<double>::infinity();
  double inf_hi = std::numeric_limits<double>::infinity();
  double unin_lo = -std::numeric_limits<double>::infinity();
  double unin_hi = std::numeric_limits<double>::infinity();
  double min_gap = 0.0;
};

Targets targets_for(const std::string& name) {
  if (name == "exp1") return {0.71, 0.91, 0.52, 0.72, 0.10};
  if (name == "exp2") return {2.9, 3.3, 2.5, 2.9, 0.2};
  return {};
}

int run_reproduce(const ReproduceArgs& args) {
  const std::string config = resolve_config_path(args.experiment);
  const std::string name = fs::path(config).stem().string();
  const fs::path out_dir =
      args.out_dir.empty() ? fs::path("out") / name : fs::path(args.out_dir);
  fs::create_directories(out_dir);

  RunManifest manifest;
  manifest.experiment = name;
  manifest.config_path = config;
  manifest.soundness_seed = 20260814u;
  manifest.monte_carlo_seed = args.mc_seed;
  manifest.started_at = current_utc_timestamp();

  const SystemConfig cfg = load_system_config(config);

  OverapproxArgs oa_args;
  oa_args.config = config;
  oa_args.out = (out_dir / (name + ".oa")).string();
  oa_args.seed = manifest.soundness_seed;
  oa_args.exec = args.exec;
  const LinearOverApprox oa = run_overapprox(oa_args, nullptr);
  manifest.artifacts["overapprox"] = oa_args.out;

  struct ModeResult {
    InformedPolicy policy;
    bool rollout_ok = false;
    std::string csv;
  };
  ModeResult modes[2];
  std::vector<PlotSeries> series;
  for (int mode = 0; mode < 2; ++mode) {
    const bool informed = mode == 0;
    const std::string tag = informed ? "informed" : "uninformed";
    const SynthesisSpec spec = make_spec(cfg, oa, informed, "default");
    InformedPolicy policy = synthesize(spec);
    std::cout << tag << ": alpha = " << num(policy.alpha, 12) << "\n";

    const std::string pol_path = (out_dir / (name + "_" + tag + ".pol")).string();
    save_policy(policy, pol_path, true);
    manifest.artifacts["policy_" + tag] = pol_path;

    RolloutOptions ropts;
    ropts.objective_component = cfg.experiment.objective_component;
    const Trajectory traj = rollout(cfg.system, oa, policy, cfg.experiment.x0, ropts);
    const VerifyReport rep =
        verify_trajectory(traj, cfg.system.X, cfg.system.U, oa.err_box,
                          policy.alpha, cfg.experiment.objective_component);
    std::cout << tag << " rollout: " << rep.summary() << "\n";

    const std::string csv_path = (out_dir / (name + "_" + tag + ".csv")).string();
    write_trajectory_csv(traj, csv_path);
    manifest.artifacts["trajectory_" + tag] = csv_path;

    // Certificate cross-checks on the linear model: the worst-case error
    // sequence, then random sequences.
    const Trajectory worst = adversarial_error_rollout(
        spec.aug, policy, cfg.experiment.x0, worst_case_error_sequence(policy, spec),
        cfg.experiment.objective_component);
    std::cout << tag << " worst-case terminal on the linear model: "
              << num(worst.terminal_objective, 12) << "\n";
    const MonteCarloReport mc = monte_carlo_adversarial(
        spec, policy, policy.alpha, args.mc_samples, args.mc_seed,
        args.exec.policy());
    std::cout << tag << " linear-model Monte Carlo: " << mc.violations
              << " violations in " << mc.sequences
              << " sequences, min terminal " << num(mc.min_terminal, 12) << "\n";

    PlotSeries s;
    s.label = tag;
    s.points = traj.x;
    series.push_back(std::move(s));

    modes[mode].policy = std::move(policy);
    modes[mode].rollout_ok = rep.ok && mc.violations == 0;
    modes[mode].csv = csv_path;
  }

  manifest.alpha_informed = modes[0].policy.alpha;
  manifest.alpha_uninformed = modes[1].policy.alpha;
  manifest.informed_rollout_ok = modes[0].rollout_ok;
  manifest.uninformed_rollout_ok = modes[1].rollout_ok;

  PlotSpec plot;
  plot.title = name + " phase portrait";
  plot.series = std::move(series);
  plot.domain = cfg.system.X;
  plot.vlines = {{"alpha informed", manifest.alpha_informed},
                 {"alpha uninformed", manifest.alpha_uninformed}};
  const std::string svg_path = (out_dir / (name + "_phase.svg")).string();
  write_phase_plot_svg(plot, svg_path);
  manifest.artifacts["plot"] = svg_path;

  const Targets tgt = targets_for(name);
  manifest.alpha_informed_lo = tgt.inf_lo;
  manifest.alpha_informed_hi = tgt.inf_hi;
  manifest.alpha_uninformed_lo = tgt.unin_lo;
  manifest.alpha_uninformed_hi = tgt.unin_hi;
  manifest.min_gap = tgt.min_gap;
  manifest.targets_met =
      manifest.alpha_informed >= tgt.inf_lo &&
      manifest.alpha_informed <= tgt.inf_hi &&
      manifest.alpha_uninformed >= tgt.unin_lo &&
      manifest.alpha_uninformed <= tgt.unin_hi &&
      manifest.alpha_informed - manifest.alpha_uninformed >= tgt.min_gap &&
      manifest.informed_rollout_ok && manifest.uninformed_rollout_ok;

  manifest.finished_at = current_utc_timestamp();
  const std::string manifest_path = (out_dir / (name + "_manifest.json")).string();
  save_manifest(manifest, manifest_path);
  std::cout << "wrote " << manifest_path << "\n";
  std::cout << "alpha gap = "
            << num(manifest.alpha_informed - manifest.alpha_uninformed, 12)
            << ", targets " << (manifest.targets_met ? "met" : "NOT met") << "\n";
  if (!manifest.targets_met)
    throw NumericalError("reproduction finished but missed its target bands; see " +
                         manifest_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear over-approximation, informed policy synthesis, and "
               "closed-loop verification for constrained nonlinear systems"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  OverapproxArgs oa_args;
  CLI::App* oa_cmd = app.add_subcommand(
      "overapprox", "Fit a sound linear over-approximation over X x U");
  oa_cmd->add_option("config", oa_args.config, "system config file")->required();
  oa_cmd->add_option("-o,--output", oa_args.out, "artifact output path");
  oa_cmd->add_option("--delta", oa_args.delta, "sample dispersion override");
  oa_cmd->add_option("--soundness-samples", oa_args.soundness_samples,
                     "random validation sample count");
  oa_cmd->add_option("--seed", oa_args.seed, "validation RNG seed");
  oa_cmd->add_flag("--serial", oa_args.exec.serial, "disable OpenMP kernels");
  oa_cmd->add_option("--threads", oa_args.exec.threads, "OpenMP thread count");

  SynthesizeArgs syn_args;
  CLI::App* syn_cmd = app.add_subcommand(
      "synthesize", "Synthesize a finite-horizon policy from an over-approximation");
  syn_cmd->add_option("config", syn_args.config, "system config file")->required();
  syn_cmd->add_option("overapprox", syn_args.oa_path, "over-approximation artifact")
      ->required();
  syn_cmd->add_option("-o,--output", syn_args.out, "policy output path");
  CLI::Option* unin_flag =
      syn_cmd->add_flag("--uninformed", syn_args.uninformed,
                        "state feedback only (no error preview)");
  syn_cmd->add_flag("--informed", "error-feedback policy (default)")
      ->excludes(unin_flag);
  syn_cmd->add_option("--gamma", syn_args.gamma,
                      "contraction bound: auto, none, or a number "
                      "(default: auto for general-structure systems)");
  syn_cmd->add_flag("--no-responses", syn_args.no_responses,
                    "omit closed-loop responses from the artifact");

  SimulateArgs sim_args;
  CLI::App* sim_cmd = app.add_subcommand(
      "simulate", "Roll out a policy on the true dynamics and verify it");
  sim_cmd->add_option("config", sim_args.config, "system config file")->required();
  sim_cmd->add_option("overapprox", sim_args.oa_path, "over-approximation artifact")
      ->required();
  sim_cmd->add_option("policy", sim_args.policy_path, "policy artifact")->required();
  sim_cmd->add_option("-o,--output", sim_args.out, "trajectory CSV output path");
  sim_cmd->add_option("--x0", sim_args.x0, "initial state override (comma-separated)");

  PlotArgs plot_args;
  CLI::App* plot_cmd =
      app.add_subcommand("plot", "Render trajectory CSVs as an SVG phase plot");
  plot_cmd->add_option("csvs", plot_args.csvs, "trajectory CSV files")
      ->required()
      ->expected(-1);
  plot_cmd->add_option("-o,--output", plot_args.out, "SVG output path")->required();
  plot_cmd->add_option("--config", plot_args.config,
                       "config file providing the state box outline");
  plot_cmd->add_option("--vline", plot_args.vlines,
                       "vertical marker line, label=value (repeatable)");
  plot_cmd->add_option("--title", plot_args.title, "plot title");

  ReproduceArgs rep_args;
  CLI::App* rep_cmd = app.add_subcommand(
      "reproduce", "Full pipeline: fit, synthesize both modes, simulate, plot");
  rep_cmd->add_option("experiment", rep_args.experiment,
                      "config path or a name resolved as configs/<name>.cfg")
      ->required();
  rep_cmd->add_option("-o,--out-dir", rep_args.out_dir,
                      "output directory (default out/<name>)");
  rep_cmd->add_option("--mc-seed", rep_args.mc_seed, "Monte-Carlo RNG seed");
  rep_cmd->add_option("--mc-samples", rep_args.mc_samples,
                      "Monte-Carlo sequence count");
  rep_cmd->add_flag("--serial", rep_args.exec.serial, "disable OpenMP kernels");
  rep_cmd->add_option("--threads", rep_args.exec.threads, "OpenMP thread count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (oa_cmd->parsed()) {
      run_overapprox(oa_args, nullptr);
    } else if (syn_cmd->parsed()) {
      run_synthesize(syn_args);
    } else if (sim_cmd->parsed()) {
      run_simulate(sim_args, nullptr);
    } else if (plot_cmd->parsed()) {
      run_plot(plot_args);
    } else if (rep_cmd->parsed()) {
      return run_reproduce(rep_args);
    }
    return 0;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 3;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const EvalError& e) {
    std::cerr << "evaluation error: " << e.what() << "\n";
    return 4;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}
