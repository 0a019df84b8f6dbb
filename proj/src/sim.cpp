#include "nac/sim.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace nac {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::string to_string(ControllerKind k) {
  switch (k) {
    case ControllerKind::Proposed: return "proposed";
    case ControllerKind::NonAdaptive: return "non-adaptive";
    case ControllerKind::NoNn: return "no-nn";
    case ControllerKind::Nominal: return "nominal";
    case ControllerKind::OpenLoopNn: return "open-loop-nn";
  }
  return "?";
}

ControllerKind controller_kind_from_string(const std::string& s) {
  if (s == "proposed") return ControllerKind::Proposed;
  if (s == "non-adaptive") return ControllerKind::NonAdaptive;
  if (s == "no-nn") return ControllerKind::NoNn;
  if (s == "nominal") return ControllerKind::Nominal;
  if (s == "open-loop-nn") return ControllerKind::OpenLoopNn;
  throw std::invalid_argument("unknown controller '" + s + "'");
}

Eigen::VectorXd unn_features(PlantKind kind, const Eigen::VectorXd& xbar, double t,
                             double t_f1, double period) {
  double clock = t <= t_f1 ? t : t_f1 + std::fmod(t - t_f1, period);
  if (kind == PlantKind::Pendulum) {
    Eigen::VectorXd f(4);
    f << std::sin(xbar[0]), std::cos(xbar[0]), xbar[1], clock;
    return f;
  }
  Eigen::VectorXd f(xbar.size() + 1);
  f.head(xbar.size()) = xbar;
  f[xbar.size()] = clock;
  return f;
}

UnnHandle make_unn_handle(const MlpModel& model, PlantKind kind, double t_f1,
                          double period) {
  return [&model, kind, t_f1, period](const Eigen::VectorXd& xbar, double t) {
    return model.forward(unn_features(kind, xbar, t, t_f1, period));
  };
}

IntegrationDefaults integration_defaults(PlantKind kind) {
  switch (kind) {
    case PlantKind::Manipulator: return {5e-4, 20, 0.0, 20.0};
    case PlantKind::Unicycle: return {1e-3, 10, 0.0, 20.0};
    case PlantKind::Pendulum: return {2e-3, 1, 15.0, 10.0};
  }
  return {};
}

SampledSignal RunLog::position_signal() const {
  SampledSignal sig;
  sig.times = t;
  sig.values = x;
  return sig;
}

// ---------------------------------------------------------------------------
// Stage evaluation

namespace {

struct StageOut {
  Eigen::VectorXd u;
  Eigen::VectorXd u_nn;
  Eigen::VectorXd gains_dot;
  Eigen::VectorXd err;
  double e_v_norm = 0.0;
};

struct PendulumError {
  double e, edot;
};

PendulumError pendulum_error(double q, double qd) {
  return {1.0 - std::cos(q - kPi), std::sin(q - kPi) * qd};
}

class RunContext {
 public:
  explicit RunContext(const RunSetup& setup) : s_(setup) {
    switch (s_.kind) {
      case PlantKind::Manipulator:
        n_ = 2;
        nu_ = 2;
        state_dim_ = 4;
        break;
      case PlantKind::Pendulum:
        n_ = 1;
        nu_ = 1;
        state_dim_ = 2;
        break;
      case PlantKind::Unicycle:
        n_ = 3;
        nu_ = 2;
        state_dim_ = UnicyclePlant::kStateDim;
        break;
    }
    adaptive_ = s_.controller == ControllerKind::Proposed || s_.controller == ControllerKind::NoNn;
    gain_dim_ = adaptive_ ? (s_.kind == PlantKind::Unicycle ? 4 : 2) : 0;
    err_dim_ = s_.kind == PlantKind::Unicycle ? 4 : 3 * n_;

    zero_ = zero_unn(nu_);
    bool needs_model = s_.controller == ControllerKind::Proposed ||
                       s_.controller == ControllerKind::NonAdaptive ||
                       s_.controller == ControllerKind::OpenLoopNn;
    if (needs_model) {
      if (!s_.model) throw std::invalid_argument("controller needs a trained model");
      unn_ = make_unn_handle(*s_.model, s_.kind, s_.traj.t_f1(), s_.traj.period());
    } else {
      unn_ = zero_unn(nu_);
    }
  }

  int state_dim() const { return state_dim_; }
  int gain_dim() const { return gain_dim_; }
  int err_dim() const { return err_dim_; }
  int nu() const { return nu_; }
  int n() const { return n_; }
  long guard_evals() const { return guard_evals_; }

  Eigen::VectorXd initial_gains() const {
    if (!adaptive_) return Eigen::VectorXd();
    if (s_.kind == PlantKind::Unicycle) {
      Eigen::VectorXd g(4);
      g << s_.gains.lv_init, s_.gains.lw_init, s_.gains.l1_init, s_.gains.l2_init;
      return g;
    }
    Eigen::VectorXd g(2);
    g << s_.gains.l1_init, s_.gains.l2_init;
    return g;
  }

  StageOut eval(const Eigen::VectorXd& state, const Eigen::VectorXd& gains, double t) {
    StageOut out = s_.kind == PlantKind::Unicycle ? eval_unicycle(state, gains, t)
                                                  : eval_fully_actuated(state, gains, t);
    if (s_.u_max > 0.0)
      out.u = out.u.cwiseMax(-s_.u_max).cwiseMin(s_.u_max);
    return out;
  }

  Eigen::VectorXd plant_derivative(const Eigen::VectorXd& state, const Eigen::VectorXd& u,
                                   double t) const {
    switch (s_.kind) {
      case PlantKind::Manipulator: return s_.arm->derivative(state, u, t);
      case PlantKind::Pendulum: return s_.pendulum->derivative(state, u, t);
      case PlantKind::Unicycle: return s_.unicycle->derivative(state, Eigen::Vector2d(u), t);
    }
    return {};
  }

 private:
  StageOut eval_fully_actuated(const Eigen::VectorXd& xbar, const Eigen::VectorXd& gains,
                               double t) {
    StageOut out;
    auto ref = s_.traj.eval(t);
    Eigen::VectorXd e, edot;
    if (s_.kind == PlantKind::Pendulum) {
      auto pe = pendulum_error(xbar[0], xbar[1]);
      e = Eigen::VectorXd::Constant(1, pe.e);
      edot = Eigen::VectorXd::Constant(1, pe.edot);
    } else {
      e = xbar.head(n_) - ref.pos;
      edot = xbar.tail(n_) - ref.vel;
    }
    Eigen::VectorXd e_v = xbar.tail(n_) - (ref.vel - s_.gains.k1 * e);

    switch (s_.controller) {
      case ControllerKind::Proposed:
      case ControllerKind::NoNn: {
        const UnnHandle& handle = s_.controller == ControllerKind::Proposed ? unn_ : zero_;
        auto cmd = adaptive_control(xbar, t, e, ref, s_.gains, gains[0], gains[1], handle);
        out.u = cmd.u;
        out.u_nn = cmd.u_nn;
        out.gains_dot = Eigen::Vector2d(cmd.l1_dot, cmd.l2_dot);
        break;
      }
      case ControllerKind::NonAdaptive: {
        auto cmd = baseline_nonadaptive(xbar, t, e, edot, s_.gains, unn_);
        out.u = cmd.u;
        out.u_nn = cmd.u_nn;
        break;
      }
      case ControllerKind::Nominal: {
        if (s_.kind == PlantKind::Manipulator) {
          TwoLinkArm believed(s_.arm_believed, DisturbanceModel::zero(2));
          out.u = nominal_arm_control(believed, xbar, ref, s_.gains);
        } else {
          out.u = Eigen::VectorXd::Constant(
              1, nominal_pendulum_control(s_.pendulum_believed, xbar, ref, s_.gains));
        }
        out.u_nn = Eigen::VectorXd::Zero(nu_);
        break;
      }
      case ControllerKind::OpenLoopNn: {
        out.u_nn = unn_(xbar, t);
        out.u = out.u_nn;
        break;
      }
    }
    out.err.resize(3 * n_);
    out.err << e, edot, e_v;
    out.e_v_norm = e_v.norm();
    return out;
  }

  StageOut eval_unicycle(const Eigen::VectorXd& state, const Eigen::VectorXd& gains,
                         double t) {
    StageOut out;
    const auto& plant = *s_.unicycle;
    auto ref = s_.traj.eval(t);
    Eigen::VectorXd xbar = plant.xbar(state);
    double v = plant.linear_velocity(state);
    double w = plant.angular_velocity(state);

    UnicycleErrors err = unicycle_errors(xbar.head<2>(), xbar[2], ref.pos.head<2>(),
                                         last_beta_, s_.gains);
    if (err.guarded)
      ++guard_evals_;
    else
      last_beta_ = err.beta;

    UnicycleReference uref =
        unicycle_reference(err, xbar[2], ref.vel.head<2>(), ref.acc.head<2>(), v, w, s_.gains);

    UnicycleCommand cmd;
    switch (s_.controller) {
      case ControllerKind::Proposed:
      case ControllerKind::NoNn: {
        const UnnHandle& handle = s_.controller == ControllerKind::Proposed ? unn_ : zero_;
        UnicycleAdaptiveState adapt{gains[0], gains[1], gains[2], gains[3]};
        cmd = unicycle_control(xbar, t, err, uref, s_.gains, adapt, handle);
        out.gains_dot.resize(4);
        out.gains_dot << cmd.lv_dot, cmd.lw_dot, cmd.l1_dot, cmd.l2_dot;
        break;
      }
      case ControllerKind::NonAdaptive: {
        UnicycleParams scaled = s_.unicycle_believed;
        scaled.m *= s_.baseline_param_scale;
        scaled.I_C *= s_.baseline_param_scale;
        scaled.I_0 *= s_.baseline_param_scale;
        scaled.r *= s_.baseline_param_scale;
        scaled.d_off *= s_.baseline_param_scale;
        cmd = unicycle_nonadaptive(xbar, t, err, uref, s_.gains, unicycle_lv(scaled),
                                   unicycle_lw(scaled), unn_);
        break;
      }
      case ControllerKind::Nominal: {
        cmd.u = nominal_unicycle_control(s_.unicycle_believed, err, uref, v, w, s_.gains);
        cmd.e_v = v - uref.v_d;
        cmd.e_w = w - uref.w_d;
        break;
      }
      case ControllerKind::OpenLoopNn: {
        cmd.u_nn = unn_(xbar, t);
        cmd.u = cmd.u_nn;
        cmd.e_v = v - uref.v_d;
        cmd.e_w = w - uref.w_d;
        break;
      }
    }
    out.u = cmd.u;
    out.u_nn = cmd.u_nn;
    out.err.resize(4);
    out.err << err.e_d, err.beta, cmd.e_v, cmd.e_w;
    out.e_v_norm = std::hypot(cmd.e_v, cmd.e_w);
    return out;
  }

  const RunSetup& s_;
  UnnHandle unn_;
  UnnHandle zero_;
  int n_ = 0, nu_ = 0, state_dim_ = 0, gain_dim_ = 0, err_dim_ = 0;
  bool adaptive_ = false;
  double last_beta_ = 0.0;
  long guard_evals_ = 0;
};

}  // namespace

RunLog integrate(const RunSetup& setup) {
  if (!(setup.dt > 0.0) || setup.horizon < setup.dt || setup.log_stride < 1)
    throw std::invalid_argument("integrate: bad dt/horizon/log stride");
  RunContext ctx(setup);
  if (setup.x0.size() != ctx.state_dim())
    throw std::invalid_argument("integrate: initial state has wrong dimension");
  int steps = static_cast<int>(std::ceil(setup.horizon / setup.dt - 1e-9));
  steps = ((steps + setup.log_stride - 1) / setup.log_stride) * setup.log_stride;
  const int rows = steps / setup.log_stride + 1;

  RunLog log;
  const int npos = setup.kind == PlantKind::Unicycle ? 3 : ctx.n();
  log.t.reserve(rows);
  log.x.resize(npos, rows);
  log.xdot.resize(npos, rows);
  log.u.resize(ctx.nu(), rows);
  log.u_nn.resize(ctx.nu(), rows);
  log.gains.resize(ctx.gain_dim(), rows);
  log.err.resize(ctx.err_dim(), rows);
  if (setup.kind == PlantKind::Pendulum) log.reward.reserve(steps);

  const int sd = ctx.state_dim();
  const int gd = ctx.gain_dim();
  Eigen::VectorXd y(sd + gd);
  y.head(sd) = setup.x0;
  if (gd > 0) y.tail(gd) = ctx.initial_gains();

  auto positions = [&](const Eigen::VectorXd& state) -> Eigen::VectorXd {
    if (setup.kind == PlantKind::Unicycle) return state.head(3);
    return state.head(ctx.n());
  };
  auto velocities = [&](const Eigen::VectorXd& state) -> Eigen::VectorXd {
    if (setup.kind == PlantKind::Unicycle) return setup.unicycle->xbar(state).tail(3);
    return state.tail(ctx.n());
  };

  StageOut stage1;
  auto rhs = [&](const Eigen::VectorXd& yv, double t, bool capture) -> Eigen::VectorXd {
    StageOut out = ctx.eval(yv.head(sd), yv.tail(gd), t);
    Eigen::VectorXd dy(sd + gd);
    dy.head(sd) = ctx.plant_derivative(yv.head(sd), out.u, t);
    if (gd > 0) dy.tail(gd) = out.gains_dot;
    if (capture) stage1 = std::move(out);
    return dy;
  };

  int row = 0;
  const double dt = setup.dt;
  for (int step = 0; step <= steps; ++step) {
    double t = step * dt;
    Eigen::VectorXd k1 = rhs(y, t, true);

    if (step % setup.log_stride == 0) {
      log.t.push_back(t);
      log.x.col(row) = positions(y.head(sd));
      log.xdot.col(row) = velocities(y.head(sd));
      log.u.col(row) = stage1.u;
      log.u_nn.col(row) = stage1.u_nn;
      if (gd > 0) log.gains.col(row) = y.tail(gd);
      log.err.col(row) = stage1.err;
      ++row;
    }
    log.sup_u = std::max(log.sup_u, stage1.u.norm());
    log.sup_ev = std::max(log.sup_ev, stage1.e_v_norm);
    log.sup_err = std::max(log.sup_err, stage1.err.norm());
    if (setup.kind == PlantKind::Pendulum && step < steps)
      log.reward.push_back(pendulum_reward(y[0], y[1], stage1.u[0]));

    if (step == steps) break;

    Eigen::VectorXd k2 = rhs(y + 0.5 * dt * k1, t + 0.5 * dt, false);
    Eigen::VectorXd k3 = rhs(y + 0.5 * dt * k2, t + 0.5 * dt, false);
    Eigen::VectorXd k4 = rhs(y + dt * k3, t + dt, false);
    y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    if (!y.allFinite() || y.norm() > 1e12) {
      log.completed = false;
      log.abort_time = t + dt;
      log.abort_reason = !y.allFinite() ? "non-finite state" : "state norm exceeded 1e12";
      break;
    }
  }

  if (!log.completed) {
    log.x.conservativeResize(Eigen::NoChange, row);
    log.xdot.conservativeResize(Eigen::NoChange, row);
    log.u.conservativeResize(Eigen::NoChange, row);
    log.u_nn.conservativeResize(Eigen::NoChange, row);
    log.gains.conservativeResize(Eigen::NoChange, row);
    log.err.conservativeResize(Eigen::NoChange, row);
  }
  log.guard_trips = static_cast<int>(ctx.guard_evals());
  return log;
}

// ---------------------------------------------------------------------------
// Data generation

RunSetup make_run_setup(const ScenarioConfig& scenario, const InstanceSpec& inst,
                        const ControlGains& gains) {
  RunSetup setup;
  setup.kind = scenario.kind;
  setup.gains = gains;
  auto defaults = integration_defaults(scenario.kind);
  setup.dt = defaults.dt;
  setup.log_stride = defaults.log_stride;
  setup.u_max = defaults.u_max;
  setup.horizon = defaults.stats_horizon;

  VisitTask task = make_task(scenario, inst);
  setup.traj = plan(task);
  setup.x0 = initial_state(scenario, inst);
  DisturbanceModel dist = make_disturbance(inst);

  switch (scenario.kind) {
    case PlantKind::Manipulator: {
      TwoLinkArmParams p = make_arm_params(scenario, inst);
      setup.arm = std::make_shared<TwoLinkArm>(p, dist);
      setup.arm_believed = p;
      break;
    }
    case PlantKind::Pendulum: {
      PendulumParams p = make_pendulum_params(scenario, inst);
      setup.pendulum = std::make_shared<PendulumPlant>(p, dist);
      setup.pendulum_believed = p;
      break;
    }
    case PlantKind::Unicycle: {
      UnicycleParams p = make_unicycle_params(scenario, inst);
      setup.unicycle = std::make_shared<UnicyclePlant>(p, dist);
      setup.unicycle_believed = p;
      break;
    }
  }
  return setup;
}

TrainingTriplets generate_training_data(const ScenarioConfig& scenario,
                                        const std::vector<InstanceSpec>& instances,
                                        const ControlGains& gains,
                                        const DataGenOptions& opts) {
  if (opts.kappa < 3)
    throw std::invalid_argument("generate_training_data: kappa must be >= 3");
  TrainingTriplets out;
  out.kind = scenario.kind;
  const int xdim = scenario.kind == PlantKind::Unicycle ? 6
                   : scenario.kind == PlantKind::Manipulator ? 4
                                                             : 2;
  const int nu = scenario.kind == PlantKind::Pendulum ? 1 : 2;
  std::vector<Eigen::VectorXd> xcols, ucols;

  for (const auto& inst : instances) {
    if (!inst.train) continue;
    RunSetup setup = make_run_setup(scenario, inst, gains);
    setup.controller = ControllerKind::Nominal;
    setup.dt = opts.dt > 0 ? opts.dt : setup.dt;
    setup.log_stride = opts.log_stride;
    setup.horizon = setup.traj.t_f1() + opts.kappa * setup.traj.period();
    RunLog log = integrate(setup);
    if (!log.completed)
      throw std::runtime_error("training run for instance " + std::to_string(inst.id) +
                               " aborted: " + log.abort_reason);
    const int rows = log.steps();
    if (rows < opts.points_per_traj)
      throw std::runtime_error("training run too short for requested points");
    for (int j = 0; j < opts.points_per_traj; ++j) {
      int idx = static_cast<int>(std::llround(
          static_cast<double>(j) * (rows - 1) / (opts.points_per_traj - 1)));
      Eigen::VectorXd xb(xdim);
      xb << log.x.col(idx), log.xdot.col(idx);
      xcols.push_back(xb);
      ucols.push_back(log.u.col(idx));
      out.traj_id.push_back(inst.id);
      out.t.push_back(log.t[idx]);
    }
    out.trajectories.push_back({inst.id, setup.traj.t_f1(), setup.traj.t_f2()});
  }
  out.xbar.resize(xdim, static_cast<int>(xcols.size()));
  out.u.resize(nu, static_cast<int>(ucols.size()));
  for (size_t i = 0; i < xcols.size(); ++i) {
    out.xbar.col(static_cast<int>(i)) = xcols[i];
    out.u.col(static_cast<int>(i)) = ucols[i];
  }
  return out;
}

TrainingData triplets_to_training_data(const TrainingTriplets& triplets) {
  if (triplets.count() == 0) throw std::invalid_argument("no training triplets");
  std::unordered_map<int, const TrainingTriplets::TrajInfo*> info;
  for (const auto& tr : triplets.trajectories) info[tr.id] = &tr;

  const int fdim = triplets.kind == PlantKind::Pendulum
                       ? 4
                       : static_cast<int>(triplets.xbar.rows()) + 1;
  TrainingData data;
  data.features.resize(fdim, triplets.count());
  data.targets = triplets.u;
  for (int i = 0; i < triplets.count(); ++i) {
    const auto* tr = info.at(triplets.traj_id[i]);
    data.features.col(i) = unn_features(triplets.kind, triplets.xbar.col(i), triplets.t[i],
                                        tr->t_f1, tr->t_f2 - tr->t_f1);
  }
  return data;
}

}  // namespace nac
