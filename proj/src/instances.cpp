#include "nac/instances.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

#include "nac/rng.hpp"

using nlohmann::json;

namespace nac {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::string to_string(PlantKind k) {
  switch (k) {
    case PlantKind::Manipulator: return "manipulator";
    case PlantKind::Unicycle: return "unicycle";
    case PlantKind::Pendulum: return "pendulum";
  }
  return "?";
}

PlantKind plant_kind_from_string(const std::string& s) {
  if (s == "manipulator") return PlantKind::Manipulator;
  if (s == "unicycle") return PlantKind::Unicycle;
  if (s == "pendulum") return PlantKind::Pendulum;
  throw std::invalid_argument("unknown scenario '" + s + "'");
}

ScenarioConfig ScenarioConfig::manipulator() {
  ScenarioConfig s;
  s.kind = PlantKind::Manipulator;
  s.waypoints = {Eigen::Vector2d(-0.07, -1.05), Eigen::Vector2d(1.28, 0.35),
                 Eigen::Vector2d(-0.08, 0.85), Eigen::Vector2d(-0.7, -0.76)};
  s.init_pos_range = 0.5;
  s.init_vel_lo = 0.0;
  s.init_vel_hi = 1.0;
  // torque disturbance amplitude scales with the link masses
  s.dist_amp_max = Eigen::Vector2d(2.0 * s.arm.m1, 2.0 * s.arm.m2);
  return s;
}

ScenarioConfig ScenarioConfig::unicycle_scenario() {
  ScenarioConfig s;
  s.kind = PlantKind::Unicycle;
  s.waypoints = {Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(0.0, 2.0),
                 Eigen::Vector2d(2.0, 0.0), Eigen::Vector2d(2.0, 2.0)};
  s.init_pos_range = 0.3;
  s.init_vel_lo = -0.25;
  s.init_vel_hi = 0.25;
  s.dist_amp_max = Eigen::Vector2d(0.2, 0.2);
  return s;
}

ScenarioConfig ScenarioConfig::pendulum_scenario() {
  ScenarioConfig s;
  s.kind = PlantKind::Pendulum;
  s.waypoints = {Eigen::VectorXd::Constant(1, kPi)};
  s.recurrent = false;
  s.deadline_hi = 5.0;
  s.waypoint_offset_range = 0.0;
  s.deadline_offset_range = 0.0;
  s.init_pos_range = 1.0;  // q(0) uniform in [-1,1] about the hanging position
  s.init_vel_lo = -1.0;
  s.init_vel_hi = 1.0;
  s.dist_amp_max = Eigen::VectorXd::Constant(1, 0.2);
  s.dist_velocity_coupling = false;
  return s;
}

ScenarioConfig ScenarioConfig::by_kind(PlantKind k) {
  switch (k) {
    case PlantKind::Manipulator: return manipulator();
    case PlantKind::Unicycle: return unicycle_scenario();
    case PlantKind::Pendulum: return pendulum_scenario();
  }
  throw std::invalid_argument("bad plant kind");
}

namespace {

// Relative parameter offsets are drawn in (-1/2, 1/2) of the nominal value;
// the documented order per scenario is fixed here.
std::vector<double> draw_param_offsets(const ScenarioConfig& s, RngStream& rng) {
  switch (s.kind) {
    case PlantKind::Manipulator:
      // m1, m2, I1, I2
      return {rng.uniform(-0.5 * s.arm.m1, 0.5 * s.arm.m1),
              rng.uniform(-0.5 * s.arm.m2, 0.5 * s.arm.m2),
              rng.uniform(-0.5 * s.arm.I1, 0.5 * s.arm.I1),
              rng.uniform(-0.5 * s.arm.I2, 0.5 * s.arm.I2)};
    case PlantKind::Unicycle:
      // m, I_C, I_0, r, d_off
      return {rng.uniform(-0.5 * s.unicycle.m, 0.5 * s.unicycle.m),
              rng.uniform(-0.5 * s.unicycle.I_C, 0.5 * s.unicycle.I_C),
              rng.uniform(-0.5 * s.unicycle.I_0, 0.5 * s.unicycle.I_0),
              rng.uniform(-0.5 * s.unicycle.r, 0.5 * s.unicycle.r),
              rng.uniform(-0.5 * s.unicycle.d_off, 0.5 * s.unicycle.d_off)};
    case PlantKind::Pendulum:
      // L
      return {rng.uniform(-0.5, 0.5)};
  }
  return {};
}

int control_dim(PlantKind k) { return k == PlantKind::Pendulum ? 1 : 2; }

}  // namespace

std::vector<InstanceSpec> generate_instances(const ScenarioConfig& scenario, int count,
                                             std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("count must be >= 1");
  std::vector<InstanceSpec> out;
  out.reserve(count);
  const int n_train = (2 * count) / 3;
  const int k = static_cast<int>(scenario.waypoints.size());
  const int nu = control_dim(scenario.kind);
  const int dim = static_cast<int>(scenario.waypoints[0].size());

  for (int i = 0; i < count; ++i) {
    RngStream rng = RngStream::keyed(seed, static_cast<std::uint64_t>(i));
    InstanceSpec inst;
    inst.kind = scenario.kind;
    inst.id = i;
    inst.train = i < n_train;
    inst.seed = seed;

    for (int w = 0; w < k; ++w) {
      Eigen::VectorXd off(dim);
      for (int d = 0; d < dim; ++d)
        off[d] = rng.uniform(-scenario.waypoint_offset_range, scenario.waypoint_offset_range);
      inst.waypoint_offsets.push_back(off);
    }
    for (int w = 0; w < k; ++w)
      inst.deadline_offsets.push_back(
          rng.uniform(-scenario.deadline_offset_range, scenario.deadline_offset_range));
    inst.order = rng.permutation(k);
    inst.param_offsets = draw_param_offsets(scenario, rng);

    inst.init_pos_offset = Eigen::VectorXd(dim);
    for (int d = 0; d < dim; ++d)
      inst.init_pos_offset[d] = rng.uniform(-scenario.init_pos_range, scenario.init_pos_range);
    inst.init_vel = Eigen::VectorXd(nu == 1 ? 1 : 2);
    for (int d = 0; d < inst.init_vel.size(); ++d)
      inst.init_vel[d] = rng.uniform(scenario.init_vel_lo, scenario.init_vel_hi);
    inst.init_heading_offset =
        rng.uniform(-scenario.init_heading_range, scenario.init_heading_range);

    for (int d = 0; d < nu; ++d) {
      inst.disturbance.amps.push_back(rng.uniform(0.0, scenario.dist_amp_max[d]));
      inst.disturbance.freqs.push_back(rng.uniform(0.0, scenario.dist_freq_max));
      inst.disturbance.phases.push_back(rng.uniform(0.0, scenario.dist_phase_max));
      inst.disturbance.gates.push_back(
          scenario.dist_velocity_coupling ? static_cast<int>(rng.uniform_index(2)) : 0);
    }
    out.push_back(std::move(inst));
  }
  return out;
}

VisitTask make_task(const ScenarioConfig& scenario, const InstanceSpec& inst) {
  VisitTask task;
  task.recurrent = scenario.recurrent;
  task.order = inst.order;
  for (size_t w = 0; w < scenario.waypoints.size(); ++w) {
    VisitTask::Waypoint wp;
    wp.center = scenario.waypoints[w] + inst.waypoint_offsets[w];
    wp.radius = scenario.radius;
    wp.deadline_lo = scenario.deadline_lo;
    wp.deadline_hi = scenario.deadline_hi + inst.deadline_offsets[w];
    task.waypoints.push_back(std::move(wp));
  }
  task.start = task.waypoints[task.order[0]].center;
  return task;
}

DisturbanceModel make_disturbance(const InstanceSpec& inst) {
  const int n = static_cast<int>(inst.disturbance.amps.size());
  DisturbanceModel d = DisturbanceModel::zero(n);
  for (int i = 0; i < n; ++i) {
    d.amps[i] = inst.disturbance.amps[i];
    d.freqs[i] = inst.disturbance.freqs[i];
    d.phases[i] = inst.disturbance.phases[i];
    d.gates[i] = inst.disturbance.gates[i];
  }
  return d;
}

TwoLinkArmParams make_arm_params(const ScenarioConfig& scenario, const InstanceSpec& inst) {
  TwoLinkArmParams p = scenario.arm;
  p.m1 += inst.param_offsets[0];
  p.m2 += inst.param_offsets[1];
  p.I1 += inst.param_offsets[2];
  p.I2 += inst.param_offsets[3];
  return p;
}

UnicycleParams make_unicycle_params(const ScenarioConfig& scenario, const InstanceSpec& inst) {
  UnicycleParams p = scenario.unicycle;
  p.m += inst.param_offsets[0];
  p.I_C += inst.param_offsets[1];
  p.I_0 += inst.param_offsets[2];
  p.r += inst.param_offsets[3];
  p.d_off += inst.param_offsets[4];
  return p;
}

PendulumParams make_pendulum_params(const ScenarioConfig& scenario, const InstanceSpec& inst) {
  PendulumParams p = scenario.pendulum;
  p.L += inst.param_offsets[0];
  return p;
}

Eigen::VectorXd initial_state(const ScenarioConfig& scenario, const InstanceSpec& inst) {
  VisitTask task = make_task(scenario, inst);
  Eigen::VectorXd start = task.start;
  switch (scenario.kind) {
    case PlantKind::Manipulator: {
      Eigen::VectorXd st(4);
      st.head(2) = start + inst.init_pos_offset;
      st.tail(2) = inst.init_vel;
      return st;
    }
    case PlantKind::Pendulum: {
      // q(0) about the hanging position q = 0, not about the target
      Eigen::VectorXd st(2);
      st[0] = inst.init_pos_offset[0];
      st[1] = inst.init_vel[0];
      return st;
    }
    case PlantKind::Unicycle: {
      Eigen::VectorXd st = Eigen::VectorXd::Zero(UnicyclePlant::kStateDim);
      st.head(2) = start.head(2) + inst.init_pos_offset;
      Eigen::Vector2d e = st.head(2) - start.head(2);
      double heading = e.norm() > 1e-12 ? std::atan2(-e[1], -e[0]) : 0.0;
      st[2] = heading + inst.init_heading_offset;
      st[5] = inst.init_vel[0];
      st[6] = inst.init_vel[1];
      return st;
    }
  }
  throw std::invalid_argument("bad plant kind");
}

// ---------------------------------------------------------------------------
// JSON schema

namespace {

json vec_to_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vec_from_json(const json& j) {
  auto v = j.get<std::vector<double>>();
  return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<int>(v.size()));
}

}  // namespace

std::string instances_to_json(const ScenarioConfig& scenario,
                              const std::vector<InstanceSpec>& list, std::uint64_t seed) {
  json j;
  j["format"] = "nac-instances";
  j["version"] = 1;
  j["scenario"] = to_string(scenario.kind);
  j["seed"] = seed;
  json arr = json::array();
  for (const auto& inst : list) {
    json ij;
    ij["id"] = inst.id;
    ij["split"] = inst.train ? "train" : "test";
    ij["param_offsets"] = inst.param_offsets;
    json wo = json::array();
    for (const auto& o : inst.waypoint_offsets) wo.push_back(vec_to_json(o));
    ij["waypoint_offsets"] = wo;
    ij["deadline_offsets"] = inst.deadline_offsets;
    ij["order"] = inst.order;
    ij["init_pos_offset"] = vec_to_json(inst.init_pos_offset);
    ij["init_vel"] = vec_to_json(inst.init_vel);
    ij["init_heading_offset"] = inst.init_heading_offset;
    ij["disturbance"] = {{"amps", inst.disturbance.amps},
                         {"freqs", inst.disturbance.freqs},
                         {"phases", inst.disturbance.phases},
                         {"gates", inst.disturbance.gates}};
    arr.push_back(std::move(ij));
  }
  j["instances"] = arr;
  return j.dump(2);
}

std::vector<InstanceSpec> instances_from_json(const std::string& text,
                                              ScenarioConfig* scenario_out) {
  json j = json::parse(text);
  if (j.at("format").get<std::string>() != "nac-instances")
    throw std::invalid_argument("not an instances file");
  PlantKind kind = plant_kind_from_string(j.at("scenario").get<std::string>());
  if (scenario_out) *scenario_out = ScenarioConfig::by_kind(kind);
  std::uint64_t seed = j.at("seed").get<std::uint64_t>();
  std::vector<InstanceSpec> out;
  for (const auto& ij : j.at("instances")) {
    InstanceSpec inst;
    inst.kind = kind;
    inst.id = ij.at("id").get<int>();
    inst.train = ij.at("split").get<std::string>() == "train";
    inst.seed = seed;
    inst.param_offsets = ij.at("param_offsets").get<std::vector<double>>();
    for (const auto& o : ij.at("waypoint_offsets")) inst.waypoint_offsets.push_back(vec_from_json(o));
    inst.deadline_offsets = ij.at("deadline_offsets").get<std::vector<double>>();
    inst.order = ij.at("order").get<std::vector<int>>();
    inst.init_pos_offset = vec_from_json(ij.at("init_pos_offset"));
    inst.init_vel = vec_from_json(ij.at("init_vel"));
    inst.init_heading_offset = ij.at("init_heading_offset").get<double>();
    inst.disturbance.amps = ij.at("disturbance").at("amps").get<std::vector<double>>();
    inst.disturbance.freqs = ij.at("disturbance").at("freqs").get<std::vector<double>>();
    inst.disturbance.phases = ij.at("disturbance").at("phases").get<std::vector<double>>();
    inst.disturbance.gates = ij.at("disturbance").at("gates").get<std::vector<int>>();
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace nac
