#include "oactl/simulate.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>

#include "kv_util.hpp"
#include "oactl/errors.hpp"

namespace oactl {

namespace {

void note_box_violation(std::vector<Violation>& out, const Box& box,
                        const Eigen::VectorXd& p, double tol, int t,
                        const std::string& what) {
  const double v = box.violation(p);
  if (v > tol) out.push_back({t, what, v - tol});
}

}  // namespace

Trajectory rollout(const DynamicalSystem& sys, const LinearOverApprox& oa,
                   const InformedPolicy& policy, const Eigen::VectorXd& x0,
                   const RolloutOptions& opts) {
  const int T = opts.T < 0 ? policy.T : opts.T;
  if (T < 0 || T > policy.T)
    throw InputError("rollout horizon exceeds the policy horizon");
  if (x0.size() != sys.n_x) throw InputError("rollout: x0 dimension mismatch");
  if (policy.n_x != sys.n_x || policy.n_u != sys.n_u)
    throw InputError("rollout: policy does not match the system dimensions");

  Trajectory traj;
  traj.objective_component = opts.objective_component;
  traj.x.push_back(x0);
  note_box_violation(traj.violations, sys.X, x0, 1e-9, 0, "x outside X");

  for (int t = 0; t < T; ++t) {
    ConcretizationResult step = dispatch_concretize(
        policy, t, traj.x, traj.u, traj.e, traj.x[t], sys, oa, opts.conc);
    traj.e.push_back(eval_error(sys, oa, traj.x[t], step.u));
    traj.x.push_back(euler_step(sys, traj.x[t], step.u));
    traj.u.push_back(step.u);
    traj.meta.push_back(std::move(step));
    note_box_violation(traj.violations, sys.X, traj.x.back(), 1e-9, t + 1,
                       "x outside X");
  }

  // Terminal audit: evaluate (never apply) the policy's final input without
  // enforcing membership, so out-of-box terminal inputs surface in the log.
  ConcretizeOptions audit = opts.conc;
  audit.throw_on_violation = false;
  ConcretizationResult last = dispatch_concretize(policy, T, traj.x, traj.u,
                                                  traj.e, traj.x[T], sys, oa, audit);
  traj.e.push_back(eval_error(sys, oa, traj.x[T], last.u));
  traj.u.push_back(last.u);
  traj.meta.push_back(std::move(last));

  traj.terminal_objective = traj.x[T][opts.objective_component - 1];
  return traj;
}

VerifyReport verify_trajectory(const Trajectory& traj, const Box& X, const Box& U,
                               const Box& E, double alpha, int objective_component,
                               double tol, double terminal_slack) {
  if (traj.x.empty()) throw InputError("verify_trajectory: empty trajectory");
  const int T = traj.T();
  VerifyReport rep;
  rep.alpha = alpha;
  for (int t = 0; t <= T; ++t)
    note_box_violation(rep.violations, X, traj.x[t], tol, t, "x outside X");
  for (int t = 0; t < T; ++t) {
    if (t < static_cast<int>(traj.u.size()))
      note_box_violation(rep.violations, U, traj.u[t], tol, t, "u outside U");
    if (t < static_cast<int>(traj.e.size()))
      note_box_violation(rep.violations, E, traj.e[t], tol, t, "e outside E");
  }
  for (std::size_t t = 0; t + 1 < traj.meta.size(); ++t)
    rep.max_residual = std::max(rep.max_residual, traj.meta[t].residual);

  rep.terminal_objective = traj.x[T][objective_component - 1];
  if (rep.terminal_objective < alpha - terminal_slack)
    rep.violations.push_back(
        {T, "terminal objective below alpha",
         alpha - terminal_slack - rep.terminal_objective});
  rep.ok = rep.violations.empty();
  return rep;
}

std::string VerifyReport::summary() const {
  std::ostringstream os;
  os << (ok ? "PASS" : "FAIL") << ": terminal objective "
     << detail::format_double(terminal_objective) << " vs alpha "
     << detail::format_double(alpha) << ", max concretization residual "
     << detail::format_double(max_residual) << ", " << violations.size()
     << " violation(s)";
  for (const Violation& v : violations)
    os << "\n  t=" << v.t << ": " << v.what << " by "
       << detail::format_double(v.amount);
  return os.str();
}

Trajectory adversarial_error_rollout(const AugmentedSystem& aug,
                                     const InformedPolicy& policy,
                                     const Eigen::VectorXd& x0,
                                     const std::vector<Eigen::VectorXd>& errors,
                                     int objective_component) {
  const int T = policy.T;
  const std::size_t expected = aug.informed ? T + 1 : T;
  if (errors.size() != expected)
    throw InputError("adversarial rollout: expected " + std::to_string(expected) +
                     " error vectors, got " + std::to_string(errors.size()));
  if (policy.informed != aug.informed)
    throw InputError("adversarial rollout: policy/model informedness mismatch");
  if (x0.size() != aug.n_x) throw InputError("adversarial rollout: bad x0");
  for (const Eigen::VectorXd& e : errors)
    if (e.size() != aug.n_e())
      throw InputError("adversarial rollout: bad error dimension");

  const int n_z = aug.n_z();
  std::vector<Eigen::VectorXd> z(T + 1);
  z[0] = Eigen::VectorXd::Zero(n_z);
  z[0].head(aug.n_x) = x0;
  if (aug.informed) z[0].tail(aug.n_x) = errors[0];

  Trajectory traj;
  traj.objective_component = objective_component;
  for (int t = 0; t <= T; ++t) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(policy.n_u);
    for (int tau = 0; tau <= t; ++tau) u += policy.gain(t, tau) * z[tau];
    traj.x.push_back(z[t].head(aug.n_x));
    traj.u.push_back(u);
    if (t < T) {
      const Eigen::VectorXd& e_next = aug.informed ? errors[t + 1] : errors[t];
      // The error entering x_{t+1} is e_bar_t: part of z_t when informed,
      // injected directly when not.
      traj.e.push_back(aug.informed ? Eigen::VectorXd(z[t].tail(aug.n_x))
                                    : errors[t]);
      z[t + 1] = aug.A_til * z[t] + aug.B_til * u + aug.D_til * e_next;
    } else {
      traj.e.push_back(aug.informed ? Eigen::VectorXd(z[t].tail(aug.n_x))
                                    : Eigen::VectorXd::Zero(aug.n_x));
    }
    ConcretizationResult meta;
    meta.u = traj.u.back();
    meta.method = ConcretizeMethod::SharedClosedForm;
    meta.iterations = 0;
    meta.residual = 0.0;
    traj.meta.push_back(std::move(meta));
  }
  traj.terminal_objective = traj.x[T][objective_component - 1];
  return traj;
}

MonteCarloReport monte_carlo_adversarial(const SynthesisSpec& spec,
                                         const InformedPolicy& policy,
                                         double alpha, long long n_sequences,
                                         std::uint64_t seed,
                                         const ExecPolicy& exec, double tol,
                                         double terminal_slack) {
  spec.validate();
  if (n_sequences < 0) throw InputError("monte_carlo_adversarial: n < 0");
  const int T = spec.T;
  const int n_e = spec.aug.n_e();
  const int n_errors = spec.aug.informed ? T + 1 : T;

  struct Partial {
    long long violations = 0;
    long long first = -1;
    double min_terminal = std::numeric_limits<double>::infinity();
  };
  std::vector<Partial> partials(
      static_cast<std::size_t>(kernel_num_chunks(n_sequences)));

  parallel_chunks(n_sequences, exec, [&](long long chunk, long long begin,
                                         long long end) {
    Partial& part = partials[static_cast<std::size_t>(chunk)];
    std::vector<Eigen::VectorXd> errors(n_errors);
    for (long long q = begin; q < end; ++q) {
      for (int k = 0; k < n_errors; ++k)
        errors[k] = sample_box(spec.aug.err_box, seed,
                               static_cast<std::uint64_t>(q),
                               static_cast<std::uint32_t>(k) * n_e);
      const Trajectory traj = adversarial_error_rollout(
          spec.aug, policy, spec.x0, errors, spec.objective_component);
      bool bad = traj.terminal_objective < alpha - terminal_slack;
      for (int t = 0; t <= T && !bad; ++t)
        bad = spec.X.violation(traj.x[t]) > tol;
      for (int t = 0; t < T && !bad; ++t)
        bad = spec.U.violation(traj.u[t]) > tol;
      if (bad) {
        ++part.violations;
        if (part.first < 0) part.first = q;
      }
      part.min_terminal = std::min(part.min_terminal, traj.terminal_objective);
    }
  });

  MonteCarloReport rep;
  rep.sequences = n_sequences;
  for (const Partial& part : partials) {
    rep.violations += part.violations;
    if (rep.first_violation < 0 && part.first >= 0) rep.first_violation = part.first;
    rep.min_terminal = std::min(rep.min_terminal, part.min_terminal);
  }
  return rep;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  if (traj.x.empty()) throw InputError("cannot write an empty trajectory");
  std::ofstream out(path);
  if (!out) throw InputError("cannot open '" + path + "' for writing");

  const int n_x = static_cast<int>(traj.x[0].size());
  const int n_u = traj.u.empty() ? 0 : static_cast<int>(traj.u[0].size());
  out << "t";
  for (int i = 1; i <= n_x; ++i) out << ",x" << i;
  for (int i = 1; i <= n_u; ++i) out << ",u" << i;
  for (int i = 1; i <= n_x; ++i) out << ",e" << i;
  out << ",method,iterations,residual\n";

  for (int t = 0; t <= traj.T(); ++t) {
    out << t;
    for (int i = 0; i < n_x; ++i)
      out << "," << detail::format_double(traj.x[t][i]);
    const bool has_u = t < static_cast<int>(traj.u.size());
    for (int i = 0; i < n_u; ++i)
      out << "," << detail::format_double(has_u ? traj.u[t][i] : 0.0);
    const bool has_e = t < static_cast<int>(traj.e.size());
    for (int i = 0; i < n_x; ++i)
      out << "," << detail::format_double(has_e ? traj.e[t][i] : 0.0);
    if (t < static_cast<int>(traj.meta.size())) {
      const ConcretizationResult& m = traj.meta[t];
      out << "," << to_string(m.method) << "," << m.iterations << ","
          << detail::format_double(m.residual);
    } else {
      out << ",none,0,0";
    }
    out << "\n";
  }
  if (!out) throw InputError("failed while writing '" + path + "'");
}

CsvTrajectory read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::string header;
  if (!std::getline(in, header))
    throw InputError(path + ": empty trajectory file");

  std::vector<std::string> cols;
  {
    std::stringstream ss(header);
    std::string part;
    while (std::getline(ss, part, ',')) cols.push_back(detail::kv_trim(part));
  }
  if (cols.empty() || cols[0] != "t")
    throw InputError(path + ": malformed trajectory header");
  CsvTrajectory csv;
  std::size_t i = 1;
  while (i < cols.size() && cols[i] == "x" + std::to_string(csv.n_x + 1)) {
    ++csv.n_x;
    ++i;
  }
  while (i < cols.size() && cols[i] == "u" + std::to_string(csv.n_u + 1)) {
    ++csv.n_u;
    ++i;
  }
  if (csv.n_x == 0)
    throw InputError(path + ": no state columns in trajectory header");

  std::string line;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::kv_trim(line).empty()) continue;
    std::stringstream ss(line);
    std::string part;
    std::vector<std::string> fields;
    while (std::getline(ss, part, ',')) fields.push_back(part);
    if (static_cast<int>(fields.size()) < 1 + csv.n_x)
      throw InputError(path + ":" + std::to_string(lineno) + ": truncated row");
    Eigen::VectorXd x(csv.n_x);
    for (int k = 0; k < csv.n_x; ++k)
      x[k] = detail::parse_double(fields[1 + k],
                                  path + ":" + std::to_string(lineno));
    csv.x.push_back(std::move(x));
  }
  if (csv.x.empty()) throw InputError(path + ": trajectory has no data rows");
  return csv;
}

}  // namespace oactl
