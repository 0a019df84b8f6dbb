#include "nac/config.hpp"

#include <nlohmann/json.hpp>
#include <set>

using nlohmann::json;

namespace nac {

namespace {

json gains_json(const ControlGains& g) {
  return {{"k1", g.k1},
          {"k2", g.k2},
          {"k_l1", g.k_l1},
          {"k_l2", g.k_l2},
          {"k_d", g.k_d},
          {"k_beta", g.k_beta},
          {"k_v", g.k_v},
          {"k_w", g.k_w},
          {"k_lv", g.k_lv},
          {"k_lw", g.k_lw},
          {"eps_layer", g.eps_layer},
          {"e_d_floor", g.e_d_floor},
          {"beta_max", g.beta_max},
          {"l1_init", g.l1_init},
          {"l2_init", g.l2_init},
          {"lv_init", g.lv_init},
          {"lw_init", g.lw_init},
          {"kp_nominal", g.kp_nominal},
          {"kd_nominal", g.kd_nominal}};
}

void gains_from(const json& j, ControlGains& g) {
  auto get = [&](const char* key, double& field) {
    if (j.contains(key)) field = j.at(key).get<double>();
  };
  get("k1", g.k1);
  get("k2", g.k2);
  get("k_l1", g.k_l1);
  get("k_l2", g.k_l2);
  get("k_d", g.k_d);
  get("k_beta", g.k_beta);
  get("k_v", g.k_v);
  get("k_w", g.k_w);
  get("k_lv", g.k_lv);
  get("k_lw", g.k_lw);
  get("eps_layer", g.eps_layer);
  get("e_d_floor", g.e_d_floor);
  get("beta_max", g.beta_max);
  get("l1_init", g.l1_init);
  get("l2_init", g.l2_init);
  get("lv_init", g.lv_init);
  get("lw_init", g.lw_init);
  get("kp_nominal", g.kp_nominal);
  get("kd_nominal", g.kd_nominal);
}

json integ_json(const IntegrationDefaults& d) {
  return {{"dt", d.dt},
          {"log_stride", d.log_stride},
          {"u_max", d.u_max},
          {"stats_horizon", d.stats_horizon}};
}

void integ_from(const json& j, IntegrationDefaults& d) {
  if (j.contains("dt")) d.dt = j.at("dt").get<double>();
  if (j.contains("log_stride")) d.log_stride = j.at("log_stride").get<int>();
  if (j.contains("u_max")) d.u_max = j.at("u_max").get<double>();
  if (j.contains("stats_horizon")) d.stats_horizon = j.at("stats_horizon").get<double>();
}

}  // namespace

std::string AppConfig::to_json() const {
  json j;
  j["seed"] = seed;
  j["instance_count"] = instance_count;
  j["workers"] = workers;
  j["datagen"] = {{"kappa", datagen.kappa},
                  {"points_per_traj", datagen.points_per_traj}};
  j["mlp"] = {{"hidden", mlp.hidden},
              {"batch_norm", mlp.batch_norm},
              {"batch_size", mlp.batch_size},
              {"learning_rate", mlp.learning_rate},
              {"target_loss", mlp.target_loss},
              {"max_epochs", mlp.max_epochs},
              {"bn_momentum", mlp.bn_momentum}};
  j["gains"] = {{"manipulator", gains_json(gains_manipulator)},
                {"unicycle", gains_json(gains_unicycle)},
                {"pendulum", gains_json(gains_pendulum)}};
  j["integration"] = {{"manipulator", integ_json(integ_manipulator)},
                      {"unicycle", integ_json(integ_unicycle)},
                      {"pendulum", integ_json(integ_pendulum)}};
  j["diag_ceiling"] = diag_ceiling;
  return j.dump(2);
}

AppConfig AppConfig::from_json(const std::string& text) {
  AppConfig c;
  json j = json::parse(text);
  static const std::set<std::string> known = {"seed",   "instance_count", "workers",
                                              "datagen", "mlp",           "gains",
                                              "integration", "diag_ceiling"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw std::invalid_argument("config: unknown key '" + key + "'");

  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("instance_count")) c.instance_count = j["instance_count"].get<int>();
  if (j.contains("workers")) c.workers = j["workers"].get<int>();
  if (j.contains("diag_ceiling")) c.diag_ceiling = j["diag_ceiling"].get<double>();
  if (j.contains("datagen")) {
    const auto& d = j["datagen"];
    if (d.contains("kappa")) c.datagen.kappa = d["kappa"].get<int>();
    if (d.contains("points_per_traj"))
      c.datagen.points_per_traj = d["points_per_traj"].get<int>();
  }
  if (j.contains("mlp")) {
    const auto& m = j["mlp"];
    if (m.contains("hidden")) c.mlp.hidden = m["hidden"].get<std::vector<int>>();
    if (m.contains("batch_norm")) c.mlp.batch_norm = m["batch_norm"].get<bool>();
    if (m.contains("batch_size")) c.mlp.batch_size = m["batch_size"].get<int>();
    if (m.contains("learning_rate")) c.mlp.learning_rate = m["learning_rate"].get<double>();
    if (m.contains("target_loss")) c.mlp.target_loss = m["target_loss"].get<double>();
    if (m.contains("max_epochs")) c.mlp.max_epochs = m["max_epochs"].get<int>();
    if (m.contains("bn_momentum")) c.mlp.bn_momentum = m["bn_momentum"].get<double>();
  }
  if (j.contains("gains")) {
    const auto& g = j["gains"];
    if (g.contains("manipulator")) gains_from(g["manipulator"], c.gains_manipulator);
    if (g.contains("unicycle")) gains_from(g["unicycle"], c.gains_unicycle);
    if (g.contains("pendulum")) gains_from(g["pendulum"], c.gains_pendulum);
  }
  if (j.contains("integration")) {
    const auto& g = j["integration"];
    if (g.contains("manipulator")) integ_from(g["manipulator"], c.integ_manipulator);
    if (g.contains("unicycle")) integ_from(g["unicycle"], c.integ_unicycle);
    if (g.contains("pendulum")) integ_from(g["pendulum"], c.integ_pendulum);
  }
  return c;
}

}  // namespace nac
