#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nac/sim.hpp"

namespace nac {

struct SweepOptions {
  double dt = 0.0;            // 0 = scenario default
  int log_stride = 0;         // 0 = scenario default
  double u_max = -1.0;        // <0 = scenario default
  double stats_horizon = 0.0; // 0 = scenario default
  int workers = 0;            // 0 = NAC_WORKERS env or hardware concurrency
  bool monitor = true;        // evaluate task satisfaction (skipped for the pendulum)
  double monitor_horizon_cycles = 2.0;  // record length past t_f1 in suffix periods
};

struct RunSummary {
  int instance_id = -1;
  bool completed = false;
  std::string abort_reason;
  int guard_trips = 0;

  // channel 0 of the per-scenario aggregate at t=0 and t=stats_horizon
  double initial_metric = 0.0;
  double final_metric = 0.0;
  double initial_beta = 0.0;  // unicycle
  double final_beta = 0.0;

  bool monitored = false;
  bool satisfied = false;

  // adaptation diagnostics (adaptive controllers only)
  bool gains_monotone = true;
  Eigen::VectorXd gains_final;
  double l1_last_second_growth = 0.0;
  double l2_last_second_growth = 0.0;

  // u vs u_nn in the final second (proposed policy)
  double u_minus_unn_final = 0.0;  // max ||u - u_nn|| over the final second
  double u_unn_bound = 0.0;        // (k2 + l1(T)) max||e_v|| + l2(T)
  double sup_u = 0.0;
  double max_ev_final = 0.0;

  // pendulum metrics
  double reward_final = 0.0;
  double window_cost = 0.0;
};

struct SweepResult {
  PlantKind kind = PlantKind::Manipulator;
  ControllerKind controller = ControllerKind::Proposed;
  std::vector<RunSummary> summaries;  // instance order
  std::vector<int> incomplete;

  std::vector<double> grid;            // shared stats time grid
  std::vector<std::string> channels;   // names of aggregated channels
  Eigen::MatrixXd mean;                // channels x grid
  Eigen::MatrixXd stddev;

  double satisfaction_rate = 0.0;  // over all instances; incomplete counts unsatisfied
  int completed_count = 0;

  double mean_initial_metric() const;
  double mean_final_metric() const;
  double mean_initial_beta() const;
  double mean_final_beta() const;
  double mean_reward_final() const;
  double mean_window_cost() const;
};

int worker_count(int requested);

// Run one controller over a set of instances in parallel and aggregate the
// error channels on a common grid. Instances that abort are kept in
// `summaries` (completed=false) and excluded from the mean/std.
SweepResult run_sweep(const ScenarioConfig& scenario,
                      const std::vector<InstanceSpec>& instances,
                      const ControlGains& gains, std::shared_ptr<const MlpModel> model,
                      ControllerKind controller, const SweepOptions& opts);

// mean/std table as CSV: t, <channel>_mean, <channel>_std ...
std::string sweep_csv(const SweepResult& result);
std::string summaries_json(const SweepResult& result);

}  // namespace nac
