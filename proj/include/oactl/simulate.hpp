#pragma once

#include <Eigen/Dense>
#include <limits>
#include <string>
#include <vector>

#include "oactl/concretize.hpp"
#include "oactl/kernels.hpp"
#include "oactl/sls.hpp"
#include "oactl/system.hpp"

namespace oactl {

struct Violation {
  int t = 0;
  std::string what;     // "x outside X", "u outside U", ...
  double amount = 0.0;  // violation magnitude beyond the tolerance
};

// Closed-loop log.  x has T+1 entries; u, e and meta also have T+1 entries,
// but index T is an audit record (the policy's terminal input is evaluated
// and logged, never applied); x_{t+1} = f(x_t, u_t) holds for t < T only.
struct Trajectory {
  std::vector<Eigen::VectorXd> x;
  std::vector<Eigen::VectorXd> u;
  std::vector<Eigen::VectorXd> e;
  std::vector<ConcretizationResult> meta;
  int objective_component = 1;
  double terminal_objective = 0.0;
  std::vector<Violation> violations;  // X-escapes observed during rollout

  int T() const { return static_cast<int>(x.size()) - 1; }
};

struct RolloutOptions {
  int T = -1;                   // default: the policy horizon
  int objective_component = 1;  // 1-based state index reported as objective
  ConcretizeOptions conc;
};

// Runs the true nonlinear dynamics under the policy, concretizing each input.
// Concretization failures abort with the underlying error; states escaping X
// are recorded as violations and the rollout continues.
Trajectory rollout(const DynamicalSystem& sys, const LinearOverApprox& oa,
                   const InformedPolicy& policy, const Eigen::VectorXd& x0,
                   const RolloutOptions& opts = {});

struct VerifyReport {
  bool ok = true;
  std::vector<Violation> violations;
  double terminal_objective = 0.0;
  double alpha = -std::numeric_limits<double>::infinity();
  double max_residual = 0.0;

  std::string summary() const;  // one line per check, human-readable
};

// Membership of every state/input/error in X/U/E (tol), plus the terminal
// objective against alpha (slack terminal_slack).  Inputs and errors are
// checked for t < T only; the terminal audit record is not a guarantee.
VerifyReport verify_trajectory(const Trajectory& traj, const Box& X, const Box& U,
                               const Box& E, double alpha, int objective_component,
                               double tol = 1e-9, double terminal_slack = 1e-6);

// Simulates the LINEAR over-approximation under a given error sequence; the
// policy is evaluated directly on the model state (no concretization).
// Informed policies take T+1 errors (e_bar_0 .. e_bar_T), uninformed T.
Trajectory adversarial_error_rollout(const AugmentedSystem& aug,
                                     const InformedPolicy& policy,
                                     const Eigen::VectorXd& x0,
                                     const std::vector<Eigen::VectorXd>& errors,
                                     int objective_component = 1);

struct MonteCarloReport {
  long long sequences = 0;
  long long violations = 0;       // sequences with any constraint breach
  long long first_violation = -1; // sequence index, -1 when clean
  double min_terminal = std::numeric_limits<double>::infinity();
};

// Samples n_sequences error sequences uniformly from E (counter-based RNG,
// one stream per sequence), replays each on the linear model, and checks
// state/input membership and the terminal bound alpha - terminal_slack.
MonteCarloReport monte_carlo_adversarial(const SynthesisSpec& spec,
                                         const InformedPolicy& policy,
                                         double alpha, long long n_sequences,
                                         std::uint64_t seed,
                                         const ExecPolicy& exec = {},
                                         double tol = 1e-9,
                                         double terminal_slack = 1e-6);

// CSV I/O: header t,x1..xn,u1..um,e1..en,method,iterations,residual with one
// row per time index (T+1 rows), doubles at 17 significant digits.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

struct CsvTrajectory {
  int n_x = 0;
  int n_u = 0;
  std::vector<Eigen::VectorXd> x;  // per row
};

CsvTrajectory read_trajectory_csv(const std::string& path);

}  // namespace oactl
