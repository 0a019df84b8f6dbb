#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nac/control.hpp"
#include "nac/dynamics.hpp"
#include "nac/instances.hpp"
#include "nac/mlp.hpp"
#include "nac/trajectory.hpp"

namespace nac {

enum class ControllerKind { Proposed, NonAdaptive, NoNn, Nominal, OpenLoopNn };

std::string to_string(ControllerKind k);
ControllerKind controller_kind_from_string(const std::string& s);

// Network input features per scenario; the time feature is the clock wrapped
// into the suffix period so the network sees the periodic phase it was
// trained on.
Eigen::VectorXd unn_features(PlantKind kind, const Eigen::VectorXd& xbar, double t,
                             double t_f1, double period);

UnnHandle make_unn_handle(const MlpModel& model, PlantKind kind, double t_f1,
                          double period);

// Fully assembled closed-loop run description. Exactly one plant pointer is
// set, matching `kind`.
struct RunSetup {
  PlantKind kind = PlantKind::Manipulator;
  ControllerKind controller = ControllerKind::Proposed;
  ControlGains gains;
  double dt = 1e-3;
  double horizon = 20.0;
  int log_stride = 10;
  double u_max = 0.0;  // 0 disables saturation
  PrefixSuffixTrajectory traj;
  Eigen::VectorXd x0;

  std::shared_ptr<const TwoLinkArm> arm;
  std::shared_ptr<const PendulumPlant> pendulum;
  std::shared_ptr<const UnicyclePlant> unicycle;

  // parameters the model-based controllers believe in
  TwoLinkArmParams arm_believed;
  PendulumParams pendulum_believed;
  UnicycleParams unicycle_believed;
  double baseline_param_scale = 1.25;  // static-estimate deviation for the unicycle baseline

  std::shared_ptr<const MlpModel> model;  // required for Proposed/NonAdaptive/OpenLoopNn
};

// Channel layout of `err`:
//   manipulator/pendulum: [e..., e_v...]
//   unicycle:             [e_d, beta, e_v, e_w]
struct RunLog {
  std::vector<double> t;
  Eigen::MatrixXd x;       // positions (n or [p1,p2,phi])
  Eigen::MatrixXd xdot;
  Eigen::MatrixXd u;
  Eigen::MatrixXd u_nn;
  Eigen::MatrixXd gains;   // adaptation states; zero rows when not adaptive
  Eigen::MatrixXd err;
  std::vector<double> reward;  // pendulum, one entry per integration step

  bool completed = true;
  std::string abort_reason;
  double abort_time = 0.0;
  int guard_trips = 0;
  double sup_u = 0.0;
  double sup_ev = 0.0;
  double sup_err = 0.0;

  int steps() const { return static_cast<int>(t.size()); }

  // positions as a monitorable signal
  SampledSignal position_signal() const;
};

// Classical fixed-step RK4 on [plant state; adaptation state]; the controller
// is evaluated at every stage. Deterministic for identical setups. A
// non-finite or exploding state aborts the run (completed=false) with the
// offending time recorded.
RunLog integrate(const RunSetup& setup);

// ---------------------------------------------------------------------------
// Offline data generation

struct TrainingTriplets {
  std::vector<int> traj_id;   // one entry per sample
  std::vector<double> t;
  Eigen::MatrixXd xbar;       // 2n x M
  Eigen::MatrixXd u;          // nu x M
  struct TrajInfo {
    int id = 0;
    double t_f1 = 0.0;
    double t_f2 = 0.0;
  };
  std::vector<TrajInfo> trajectories;
  PlantKind kind = PlantKind::Manipulator;

  int count() const { return static_cast<int>(t.size()); }
};

struct DataGenOptions {
  int kappa = 3;             // suffix repetitions in each training run
  int points_per_traj = 500;
  double dt = 1e-3;
  int log_stride = 1;
};

// One run per training instance under the instance's own model-based
// controller (disturbance unknown to it), subsampled uniformly.
TrainingTriplets generate_training_data(const ScenarioConfig& scenario,
                                        const std::vector<InstanceSpec>& instances,
                                        const ControlGains& gains,
                                        const DataGenOptions& opts);

// Map raw triplets to network inputs/targets using each trajectory's clock.
TrainingData triplets_to_training_data(const TrainingTriplets& triplets);

// Build the RunSetup shared pieces for one instance (plant, trajectory,
// initial state, believed parameters). `controller` and `model` are filled by
// the caller.
RunSetup make_run_setup(const ScenarioConfig& scenario, const InstanceSpec& inst,
                        const ControlGains& gains);

// Default integration settings per scenario (dt, log stride, saturation).
struct IntegrationDefaults {
  double dt = 1e-3;
  int log_stride = 10;
  double u_max = 0.0;
  double stats_horizon = 20.0;
};
IntegrationDefaults integration_defaults(PlantKind kind);

}  // namespace nac
