#include "nac/pipeline.hpp"

#include <cstdio>
#include <filesystem>
#include <ostream>

#include "nac/csvio.hpp"

namespace nac {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

}  // namespace

PipelineResult run_pipeline(PlantKind scenario, const AppConfig& config,
                            const std::string& out_dir, std::ostream& progress) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  auto path = [&](const std::string& name) { return (fs::path(out_dir) / name).string(); };

  PipelineResult result;
  ScenarioConfig sc = ScenarioConfig::by_kind(scenario);
  const ControlGains& gains = config.gains(scenario);

  progress << "[instances] generating " << config.instance_count << " instances (seed "
           << config.seed << ")\n";
  auto instances = generate_instances(sc, config.instance_count, config.seed);
  result.instances_path = path("instances.json");
  write_text_file(result.instances_path, instances_to_json(sc, instances, config.seed));

  std::vector<InstanceSpec> train_split, test_split;
  for (const auto& inst : instances) (inst.train ? train_split : test_split).push_back(inst);
  progress << "[instances] " << train_split.size() << " train / " << test_split.size()
           << " test\n";

  progress << "[gen-data] nominal-controller runs over " << train_split.size()
           << " training instances\n";
  DataGenOptions dg = config.datagen;
  dg.dt = config.integration(scenario).dt;
  dg.log_stride = config.integration(scenario).log_stride;
  TrainingTriplets triplets = generate_training_data(sc, train_split, gains, dg);
  result.data_path = path("train_data.csv");
  write_training_csv(triplets, result.data_path, path("train_data.meta.json"));
  progress << "[gen-data] " << triplets.count() << " triplets\n";

  progress << "[train] mlp";
  for (int h : config.mlp.hidden) progress << " " << h;
  progress << ", batch " << config.mlp.batch_size << ", target loss "
           << config.mlp.target_loss << "\n";
  MlpConfig mlp_cfg = config.mlp;
  mlp_cfg.seed = config.seed;
  TrainResult train = train_mlp(triplets_to_training_data(triplets), mlp_cfg);
  result.train_epochs = train.epochs;
  result.final_loss = train.loss_curve.back();
  result.loss_target_reached = train.reached_target;
  result.model_path = path("model.json");
  write_text_file(result.model_path, train.model.to_json());
  progress << "[train] loss " << fmt(result.final_loss) << " after " << train.epochs
           << " epochs (target " << fmt(config.mlp.target_loss) << ")\n";

  auto model = std::make_shared<const MlpModel>(std::move(train.model));
  SweepOptions sw;
  sw.workers = config.workers;
  const auto& integ = config.integration(scenario);
  sw.dt = integ.dt;
  sw.log_stride = integ.log_stride;
  sw.u_max = integ.u_max;
  sw.stats_horizon = integ.stats_horizon;

  auto do_sweep = [&](ControllerKind kind, const char* tag) {
    progress << "[sweep] " << tag << " over " << test_split.size() << " test instances\n";
    SweepResult r = run_sweep(sc, test_split, gains, model, kind, sw);
    std::string base = std::string("sweep_") + tag;
    write_text_file(path(base + ".csv"), sweep_csv(r));
    write_text_file(path(base + "_summaries.json"), summaries_json(r));
    return r;
  };
  result.proposed = do_sweep(ControllerKind::Proposed, "proposed");
  result.non_adaptive = do_sweep(ControllerKind::NonAdaptive, "non-adaptive");
  result.no_nn = do_sweep(ControllerKind::NoNn, "no-nn");

  std::string report = pipeline_report(scenario, result);
  write_text_file(path("report.txt"), report);
  progress << report;
  return result;
}

std::string pipeline_report(PlantKind scenario, const PipelineResult& result) {
  std::string out;
  out += "=== " + to_string(scenario) + " pipeline ===\n";
  out += "training loss " + fmt(result.final_loss) + " after " +
         std::to_string(result.train_epochs) + " epochs\n";
  auto row = [&](const char* tag, const SweepResult& r) {
    out += "  " + std::string(tag) + ": ";
    if (scenario == PlantKind::Pendulum) {
      out += "mean final reward " + fmt(r.mean_reward_final()) + ", mean window cost " +
             fmt(r.mean_window_cost());
    } else {
      out += "mean metric " + fmt(r.mean_initial_metric()) + " -> " +
             fmt(r.mean_final_metric());
      if (scenario == PlantKind::Unicycle)
        out += ", |beta| " + fmt(r.mean_initial_beta()) + " -> " + fmt(r.mean_final_beta());
      out += ", satisfaction " + fmt(r.satisfaction_rate);
    }
    out += ", completed " + std::to_string(r.completed_count) + "/" +
           std::to_string(r.summaries.size());
    if (!r.incomplete.empty()) {
      out += " (diverged:";
      for (int id : r.incomplete) out += " " + std::to_string(id);
      out += ")";
    }
    out += "\n";
  };
  row("proposed    ", result.proposed);
  row("non-adaptive", result.non_adaptive);
  row("no-nn       ", result.no_nn);
  return out;
}

}  // namespace nac
