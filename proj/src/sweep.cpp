#include "nac/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <nlohmann/json.hpp>
#include <thread>

#include "nac/planner.hpp"

using nlohmann::json;

namespace nac {

int worker_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("NAC_WORKERS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 2;
}

namespace {

std::vector<std::string> channel_names(PlantKind kind) {
  switch (kind) {
    case PlantKind::Manipulator: return {"err_sum", "ev_norm"};
    case PlantKind::Unicycle: return {"e_d", "abs_beta", "abs_ev", "abs_ew"};
    case PlantKind::Pendulum: return {"reward", "abs_e", "abs_ev"};
  }
  return {};
}

Eigen::VectorXd channels_at(PlantKind kind, const RunLog& log, int row) {
  switch (kind) {
    case PlantKind::Manipulator: {
      Eigen::Vector2d e = log.err.col(row).head<2>();
      Eigen::Vector2d edot = log.err.col(row).segment<2>(2);
      Eigen::Vector2d ev = log.err.col(row).tail<2>();
      return Eigen::Vector2d(e.norm() + edot.norm(), ev.norm());
    }
    case PlantKind::Unicycle: {
      Eigen::Vector4d c;
      c << log.err(0, row), std::abs(log.err(1, row)), std::abs(log.err(2, row)),
          std::abs(log.err(3, row));
      return c;
    }
    case PlantKind::Pendulum: {
      double r = pendulum_reward(log.x(0, row), log.xdot(0, row), log.u(0, row));
      Eigen::Vector3d c;
      c << r, std::abs(log.err(0, row)), std::abs(log.err(2, row));
      return c;
    }
  }
  return {};
}

}  // namespace

double SweepResult::mean_initial_metric() const {
  double s = 0;
  int n = 0;
  for (const auto& r : summaries)
    if (r.completed) s += r.initial_metric, ++n;
  return n ? s / n : 0.0;
}
double SweepResult::mean_final_metric() const {
  double s = 0;
  int n = 0;
  for (const auto& r : summaries)
    if (r.completed) s += r.final_metric, ++n;
  return n ? s / n : 0.0;
}
double SweepResult::mean_initial_beta() const {
  double s = 0;
  int n = 0;
  for (const auto& r : summaries)
    if (r.completed) s += std::abs(r.initial_beta), ++n;
  return n ? s / n : 0.0;
}
double SweepResult::mean_final_beta() const {
  double s = 0;
  int n = 0;
  for (const auto& r : summaries)
    if (r.completed) s += std::abs(r.final_beta), ++n;
  return n ? s / n : 0.0;
}
double SweepResult::mean_reward_final() const {
  double s = 0;
  int n = 0;
  for (const auto& r : summaries)
    if (r.completed) s += r.reward_final, ++n;
  return n ? s / n : 0.0;
}
double SweepResult::mean_window_cost() const {
  double s = 0;
  int n = 0;
  for (const auto& r : summaries)
    if (r.completed) s += r.window_cost, ++n;
  return n ? s / n : 0.0;
}

SweepResult run_sweep(const ScenarioConfig& scenario,
                      const std::vector<InstanceSpec>& instances,
                      const ControlGains& gains, std::shared_ptr<const MlpModel> model,
                      ControllerKind controller, const SweepOptions& opts) {
  auto defaults = integration_defaults(scenario.kind);
  const double dt = opts.dt > 0 ? opts.dt : defaults.dt;
  const int stride = opts.log_stride > 0 ? opts.log_stride : defaults.log_stride;
  const double u_max = opts.u_max >= 0 ? opts.u_max : defaults.u_max;
  const double stats_horizon =
      opts.stats_horizon > 0 ? opts.stats_horizon : defaults.stats_horizon;
  const bool monitored = opts.monitor && scenario.kind != PlantKind::Pendulum;

  SweepResult result;
  result.kind = scenario.kind;
  result.controller = controller;
  result.channels = channel_names(scenario.kind);
  const int n_ch = static_cast<int>(result.channels.size());
  const int n_inst = static_cast<int>(instances.size());
  result.summaries.resize(n_inst);

  const int grid_count = static_cast<int>(std::llround(stats_horizon / (dt * stride))) + 1;
  result.grid.resize(grid_count);
  for (int i = 0; i < grid_count; ++i) result.grid[i] = i * dt * stride;

  std::vector<Eigen::MatrixXd> series(n_inst);

  auto run_one = [&](int idx) {
    const InstanceSpec& inst = instances[idx];
    RunSummary& summary = result.summaries[idx];
    summary.instance_id = inst.id;
    try {
      RunSetup setup = make_run_setup(scenario, inst, gains);
      setup.controller = controller;
      setup.model = model;
      setup.dt = dt;
      setup.log_stride = stride;
      setup.u_max = u_max;
      setup.horizon = stats_horizon;
      if (monitored)
        setup.horizon = std::max(
            setup.horizon,
            setup.traj.t_f1() + opts.monitor_horizon_cycles * setup.traj.period());
      RunLog log = integrate(setup);

      summary.completed = log.completed;
      summary.abort_reason = log.abort_reason;
      summary.guard_trips = log.guard_trips;
      summary.sup_u = log.sup_u;
      if (!log.completed) return;

      Eigen::MatrixXd ch(n_ch, grid_count);
      for (int i = 0; i < grid_count; ++i) ch.col(i) = channels_at(scenario.kind, log, i);
      series[idx] = ch;

      summary.initial_metric = ch(0, 0);
      summary.final_metric = ch(0, grid_count - 1);
      if (scenario.kind == PlantKind::Unicycle) {
        summary.initial_beta = log.err(1, 0);
        summary.final_beta = log.err(1, grid_count - 1);
      }

      const bool adaptive =
          controller == ControllerKind::Proposed || controller == ControllerKind::NoNn;
      if (adaptive) {
        int l1_row = scenario.kind == PlantKind::Unicycle ? 2 : 0;
        int l2_row = l1_row + 1;
        summary.gains_final = log.gains.col(log.steps() - 1);
        for (int i = 1; i < log.steps(); ++i) {
          if (log.gains(l1_row, i) < log.gains(l1_row, i - 1) ||
              log.gains(l2_row, i) < log.gains(l2_row, i - 1)) {
            summary.gains_monotone = false;
            break;
          }
        }
        double T = log.t.back();
        int first_final = log.steps() - 1;
        while (first_final > 0 && log.t[first_final - 1] >= T - 1.0) --first_final;
        summary.l1_last_second_growth =
            log.gains(l1_row, log.steps() - 1) - log.gains(l1_row, first_final);
        summary.l2_last_second_growth =
            log.gains(l2_row, log.steps() - 1) - log.gains(l2_row, first_final);
        for (int i = first_final; i < log.steps(); ++i) {
          summary.u_minus_unn_final = std::max(
              summary.u_minus_unn_final, (log.u.col(i) - log.u_nn.col(i)).norm());
          if (scenario.kind == PlantKind::Unicycle)
            summary.max_ev_final =
                std::max(summary.max_ev_final, std::hypot(log.err(2, i), log.err(3, i)));
          else
            summary.max_ev_final =
                std::max(summary.max_ev_final, log.err.col(i).tail(log.err.rows() / 3).norm());
        }
        if (scenario.kind != PlantKind::Unicycle)
          summary.u_unn_bound =
              (gains.k2 + log.gains(l1_row, log.steps() - 1)) * summary.max_ev_final +
              log.gains(l2_row, log.steps() - 1);
      }

      if (scenario.kind == PlantKind::Pendulum && !log.reward.empty()) {
        summary.reward_final = log.reward.back();
        summary.window_cost = pendulum_cost(log.reward, std::min<int>(200, log.reward.size()), 1.0);
      }

      if (monitored) {
        summary.monitored = true;
        VisitTask task = make_task(scenario, inst);
        summary.satisfied = sitl::monitor(log.position_signal(), task_formula(task)).verdict;
      }
    } catch (const std::exception& ex) {
      summary.completed = false;
      summary.abort_reason = ex.what();
    }
  };

  const int workers = std::min(worker_count(opts.workers), n_inst);
  if (workers <= 1) {
    for (int i = 0; i < n_inst; ++i) run_one(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&]() {
        for (int i = next.fetch_add(1); i < n_inst; i = next.fetch_add(1)) run_one(i);
      });
    for (auto& th : pool) th.join();
  }

  result.mean = Eigen::MatrixXd::Zero(n_ch, grid_count);
  result.stddev = Eigen::MatrixXd::Zero(n_ch, grid_count);
  int completed = 0;
  for (int i = 0; i < n_inst; ++i) {
    if (result.summaries[i].completed) {
      result.mean += series[i];
      ++completed;
    } else {
      result.incomplete.push_back(result.summaries[i].instance_id);
    }
  }
  result.completed_count = completed;
  if (completed > 0) {
    result.mean /= completed;
    for (int i = 0; i < n_inst; ++i)
      if (result.summaries[i].completed)
        result.stddev += (series[i] - result.mean).array().square().matrix();
    result.stddev = (result.stddev / completed).array().sqrt();
  }

  if (monitored && n_inst > 0) {
    int satisfied = 0;
    for (const auto& s : result.summaries)
      if (s.completed && s.satisfied) ++satisfied;
    result.satisfaction_rate = static_cast<double>(satisfied) / n_inst;
  }
  return result;
}

std::string sweep_csv(const SweepResult& result) {
  std::string out = "t";
  for (const auto& ch : result.channels) out += "," + ch + "_mean," + ch + "_std";
  out += "\n";
  char buf[32];
  for (size_t i = 0; i < result.grid.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", result.grid[i]);
    out += buf;
    for (int c = 0; c < result.mean.rows(); ++c) {
      std::snprintf(buf, sizeof(buf), ",%.17g,%.17g", result.mean(c, static_cast<int>(i)),
                    result.stddev(c, static_cast<int>(i)));
      out += buf;
    }
    out += "\n";
  }
  return out;
}

std::string summaries_json(const SweepResult& result) {
  json j;
  j["format"] = "nac-sweep-summary";
  j["version"] = 1;
  j["scenario"] = to_string(result.kind);
  j["controller"] = to_string(result.controller);
  j["satisfaction_rate"] = result.satisfaction_rate;
  j["completed"] = result.completed_count;
  j["incomplete_ids"] = result.incomplete;
  json arr = json::array();
  for (const auto& s : result.summaries) {
    json sj;
    sj["id"] = s.instance_id;
    sj["completed"] = s.completed;
    if (!s.completed) sj["abort_reason"] = s.abort_reason;
    sj["initial_metric"] = s.initial_metric;
    sj["final_metric"] = s.final_metric;
    sj["initial_beta"] = s.initial_beta;
    sj["final_beta"] = s.final_beta;
    sj["satisfied"] = s.satisfied;
    sj["guard_trips"] = s.guard_trips;
    sj["gains_monotone"] = s.gains_monotone;
    sj["sup_u"] = s.sup_u;
    sj["reward_final"] = s.reward_final;
    sj["window_cost"] = s.window_cost;
    arr.push_back(std::move(sj));
  }
  j["runs"] = arr;
  return j.dump(2);
}

}  // namespace nac
