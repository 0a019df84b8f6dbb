#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "nac/dynamics.hpp"
#include "nac/planner.hpp"

namespace nac {

enum class PlantKind { Manipulator, Unicycle, Pendulum };

std::string to_string(PlantKind k);
PlantKind plant_kind_from_string(const std::string& s);

struct DisturbanceDraw {
  std::vector<double> amps, freqs, phases;
  std::vector<int> gates;
};

// One randomized problem instance: parameter, task and initial-condition
// offsets drawn from the documented ranges with an RNG stream keyed by
// (seed, index), so each instance is reproducible in isolation.
struct InstanceSpec {
  PlantKind kind = PlantKind::Manipulator;
  int id = 0;
  bool train = true;
  std::uint64_t seed = 0;

  std::vector<double> param_offsets;            // order documented per scenario
  std::vector<Eigen::VectorXd> waypoint_offsets;
  std::vector<double> deadline_offsets;         // added to each right endpoint
  std::vector<int> order;
  Eigen::VectorXd init_pos_offset;              // from the first visited waypoint
  Eigen::VectorXd init_vel;                     // manipulator: qdot; unicycle: wheel rates; pendulum: qdot
  double init_heading_offset = 0.0;             // unicycle only
  DisturbanceDraw disturbance;
};

// Nominal values plus draw ranges for one benchmark family.
struct ScenarioConfig {
  PlantKind kind = PlantKind::Manipulator;

  std::vector<Eigen::VectorXd> waypoints;
  double radius = 0.1;
  double deadline_lo = 0.0;
  double deadline_hi = 20.0;
  bool recurrent = true;

  double waypoint_offset_range = 0.3;   // uniform in [-range, range] per element
  double deadline_offset_range = 2.0;   // uniform in [-range, range] on right endpoints

  TwoLinkArmParams arm;
  UnicycleParams unicycle;
  PendulumParams pendulum;

  // disturbance draw ranges
  Eigen::VectorXd dist_amp_max;   // A_i uniform in (0, amp_max_i)
  double dist_freq_max = 1.0;     // eta_i uniform in (0, max)
  double dist_phase_max = 2.0;    // phi_i uniform in (0, max)
  bool dist_velocity_coupling = true;

  // initial-condition draw ranges
  double init_pos_range = 0.3;
  double init_vel_lo = 0.0, init_vel_hi = 1.0;
  double init_heading_range = 0.25;  // unicycle

  static ScenarioConfig manipulator();
  static ScenarioConfig unicycle_scenario();
  static ScenarioConfig pendulum_scenario();
  static ScenarioConfig by_kind(PlantKind k);
};

// Deterministic instance list; the first 2/3 are flagged train, the rest test.
std::vector<InstanceSpec> generate_instances(const ScenarioConfig& scenario, int count,
                                             std::uint64_t seed);

// Realize the pieces of an instance.
VisitTask make_task(const ScenarioConfig& scenario, const InstanceSpec& inst);
DisturbanceModel make_disturbance(const InstanceSpec& inst);
TwoLinkArmParams make_arm_params(const ScenarioConfig& scenario, const InstanceSpec& inst);
UnicycleParams make_unicycle_params(const ScenarioConfig& scenario, const InstanceSpec& inst);
PendulumParams make_pendulum_params(const ScenarioConfig& scenario, const InstanceSpec& inst);

// Initial plant state (layout depends on the scenario kind; the unicycle
// heading points at the trajectory start plus the drawn offset).
Eigen::VectorXd initial_state(const ScenarioConfig& scenario, const InstanceSpec& inst);

std::string instances_to_json(const ScenarioConfig& scenario,
                              const std::vector<InstanceSpec>& list, std::uint64_t seed);
std::vector<InstanceSpec> instances_from_json(const std::string& text,
                                              ScenarioConfig* scenario_out = nullptr);

}  // namespace nac
