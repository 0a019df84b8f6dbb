#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "nac/config.hpp"
#include "nac/csvio.hpp"
#include "nac/pipeline.hpp"
#include "nac/planner.hpp"

using namespace nac;

namespace {

// exit codes: 0 ok, 1 stage failure, 2 invalid input
constexpr int kExitFailure = 1;
constexpr int kExitBadInput = 2;

AppConfig load_config(const std::string& config_path) {
  if (config_path.empty()) return AppConfig{};
  return AppConfig::from_json(read_text_file(config_path));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"neuro-adaptive tracking of temporal-logic tasks"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  app.add_option("--config", config_path, "JSON config file (see print-config)")
      ->envname("NAC_CONFIG");
  app.add_option("--seed", seed, "override the run seed")->each([&](const std::string&) {
    seed_set = true;
  });

  // print-config
  app.add_subcommand("print-config", "print the built-in defaults as JSON");

  // instances
  auto* cmd_instances = app.add_subcommand("instances", "generate problem instances");
  std::string scenario_name = "manipulator";
  std::string out_path = "instances.json";
  int count = 0;
  cmd_instances->add_option("--scenario", scenario_name, "manipulator|unicycle|pendulum")
      ->required();
  cmd_instances->add_option("--out", out_path, "output file");
  cmd_instances->add_option("--count", count, "number of instances (default from config)");

  // plan
  auto* cmd_plan = app.add_subcommand("plan", "plan a trajectory for a task file");
  std::string task_path, traj_out = "traj.json";
  cmd_plan->add_option("--task", task_path, "task JSON")->required();
  cmd_plan->add_option("--out", traj_out, "output trajectory JSON");

  // gen-data
  auto* cmd_gendata = app.add_subcommand("gen-data", "generate training triplets");
  std::string instances_path, data_out = "train_data.csv";
  cmd_gendata->add_option("--instances", instances_path, "instances JSON")->required();
  cmd_gendata->add_option("--out", data_out, "output CSV");

  // train
  auto* cmd_train = app.add_subcommand("train", "train the network on a triplet CSV");
  std::string train_data_path, model_out = "model.json";
  cmd_train->add_option("--data", train_data_path, "training CSV")->required();
  cmd_train->add_option("--out", model_out, "output model JSON");

  // run
  auto* cmd_run = app.add_subcommand("run", "simulate one instance closed loop");
  std::string run_instances, run_model, controller_name = "proposed";
  std::string log_out = "run_log.csv";
  int run_id = 0;
  cmd_run->add_option("--instances", run_instances, "instances JSON")->required();
  cmd_run->add_option("--id", run_id, "instance id")->required();
  cmd_run->add_option("--model", run_model, "model JSON (needed unless no-nn/nominal)");
  cmd_run->add_option("--controller", controller_name,
                      "proposed|non-adaptive|no-nn|nominal|open-loop-nn");
  cmd_run->add_option("--out", log_out, "output log CSV");

  // sweep
  auto* cmd_sweep = app.add_subcommand("sweep", "run a controller over the test split");
  std::string sweep_instances, sweep_model, sweep_controller = "proposed";
  std::string sweep_prefix = "sweep";
  cmd_sweep->add_option("--instances", sweep_instances, "instances JSON")->required();
  cmd_sweep->add_option("--model", sweep_model, "model JSON");
  cmd_sweep->add_option("--controller", sweep_controller, "controller kind");
  cmd_sweep->add_option("--out-prefix", sweep_prefix, "output file prefix");

  // monitor
  auto* cmd_monitor = app.add_subcommand("monitor", "check a run log against a formula");
  std::string monitor_log, monitor_formula, monitor_task;
  cmd_monitor->add_option("--log", monitor_log, "run log CSV")->required();
  cmd_monitor->add_option("--formula", monitor_formula, "SITL formula text");
  cmd_monitor->add_option("--task", monitor_task, "task JSON (alternative to --formula)");

  // pipeline
  auto* cmd_pipeline = app.add_subcommand("pipeline", "instances -> data -> train -> sweeps");
  std::string pipe_scenario, pipe_out = "out";
  cmd_pipeline->add_option("--scenario", pipe_scenario, "manipulator|unicycle|pendulum")
      ->required();
  cmd_pipeline->add_option("--out-dir", pipe_out, "artifact directory");

  CLI11_PARSE(app, argc, argv);

  try {
    AppConfig config = load_config(config_path);
    if (seed_set) config.seed = seed;

    if (app.got_subcommand("print-config")) {
      std::cout << config.to_json() << "\n";
      return 0;
    }

    if (app.got_subcommand(cmd_instances)) {
      ScenarioConfig sc = ScenarioConfig::by_kind(plant_kind_from_string(scenario_name));
      int n = count > 0 ? count : config.instance_count;
      auto list = generate_instances(sc, n, config.seed);
      write_text_file(out_path, instances_to_json(sc, list, config.seed));
      std::cout << "wrote " << list.size() << " instances to " << out_path << "\n";
      return 0;
    }

    if (app.got_subcommand(cmd_plan)) {
      VisitTask task = VisitTask::from_json(read_text_file(task_path));
      PrefixSuffixTrajectory traj = plan(task);
      write_text_file(traj_out, traj.to_json());
      std::cout << "planned trajectory: t_f1=" << traj.t_f1() << " t_f2=" << traj.t_f2()
                << " -> " << traj_out << "\n";
      return 0;
    }

    if (app.got_subcommand(cmd_gendata)) {
      ScenarioConfig sc;
      auto list = instances_from_json(read_text_file(instances_path), &sc);
      std::vector<InstanceSpec> train_split;
      for (const auto& inst : list)
        if (inst.train) train_split.push_back(inst);
      DataGenOptions dg = config.datagen;
      dg.dt = config.integration(sc.kind).dt;
      dg.log_stride = config.integration(sc.kind).log_stride;
      auto triplets = generate_training_data(sc, train_split, config.gains(sc.kind), dg);
      write_training_csv(triplets, data_out, data_out + ".meta.json");
      std::cout << "wrote " << triplets.count() << " triplets to " << data_out << "\n";
      return 0;
    }

    if (app.got_subcommand(cmd_train)) {
      auto triplets = read_training_csv(train_data_path, train_data_path + ".meta.json");
      MlpConfig mc = config.mlp;
      mc.seed = config.seed;
      TrainResult tr = train_mlp(triplets_to_training_data(triplets), mc);
      write_text_file(model_out, tr.model.to_json());
      std::cout << "final loss " << tr.loss_curve.back() << " after " << tr.epochs
                << " epochs (target " << mc.target_loss
                << (tr.reached_target ? ", reached" : ", not reached") << ") -> " << model_out
                << "\n";
      return tr.reached_target ? 0 : kExitFailure;
    }

    if (app.got_subcommand(cmd_run)) {
      ScenarioConfig sc;
      auto list = instances_from_json(read_text_file(run_instances), &sc);
      if (run_id < 0 || run_id >= static_cast<int>(list.size()))
        throw std::invalid_argument("instance id out of range");
      RunSetup setup = make_run_setup(sc, list[run_id], config.gains(sc.kind));
      setup.controller = controller_kind_from_string(controller_name);
      const auto& integ = config.integration(sc.kind);
      setup.dt = integ.dt;
      setup.log_stride = integ.log_stride;
      setup.u_max = integ.u_max;
      setup.horizon = std::max(integ.stats_horizon, setup.traj.t_f1() + 2 * setup.traj.period());
      if (!run_model.empty())
        setup.model = std::make_shared<const MlpModel>(MlpModel::from_json(read_text_file(run_model)));
      RunLog log = integrate(setup);
      write_run_log_csv(log, log_out);
      std::cout << (log.completed ? "completed" : "aborted: " + log.abort_reason) << ", "
                << log.steps() << " logged steps -> " << log_out << "\n";
      return log.completed ? 0 : kExitFailure;
    }

    if (app.got_subcommand(cmd_sweep)) {
      ScenarioConfig sc;
      auto list = instances_from_json(read_text_file(sweep_instances), &sc);
      std::vector<InstanceSpec> test_split;
      for (const auto& inst : list)
        if (!inst.train) test_split.push_back(inst);
      std::shared_ptr<const MlpModel> model;
      if (!sweep_model.empty())
        model = std::make_shared<const MlpModel>(MlpModel::from_json(read_text_file(sweep_model)));
      SweepOptions sw;
      sw.workers = config.workers;
      const auto& integ = config.integration(sc.kind);
      sw.dt = integ.dt;
      sw.log_stride = integ.log_stride;
      sw.u_max = integ.u_max;
      sw.stats_horizon = integ.stats_horizon;
      SweepResult r = run_sweep(sc, test_split, config.gains(sc.kind), model,
                                controller_kind_from_string(sweep_controller), sw);
      write_text_file(sweep_prefix + ".csv", sweep_csv(r));
      write_text_file(sweep_prefix + "_summaries.json", summaries_json(r));
      std::cout << "completed " << r.completed_count << "/" << r.summaries.size()
                << ", satisfaction " << r.satisfaction_rate << " -> " << sweep_prefix
                << ".csv\n";
      return 0;
    }

    if (app.got_subcommand(cmd_monitor)) {
      if (monitor_formula.empty() == monitor_task.empty())
        throw std::invalid_argument("monitor: give exactly one of --formula / --task");
      sitl::Formula phi = monitor_formula.empty()
                              ? task_formula(VisitTask::from_json(read_text_file(monitor_task)))
                              : sitl::parse_formula(monitor_formula);
      SampledSignal sig = read_position_csv(monitor_log);
      try {
        auto report = sitl::monitor(sig, phi);
        std::cout << "verdict: " << (report.verdict ? "SATISFIED" : "VIOLATED")
                  << " (checked horizon " << report.checked_horizon << " s)\n";
        for (const auto& clause : report.clauses) {
          std::cout << "  " << (clause.verdict ? "ok  " : "FAIL") << "  " << clause.text;
          if (clause.witness_time)
            std::cout << "  [witness t=" << *clause.witness_time << "]";
          if (clause.violation_time)
            std::cout << "  [first violation t=" << *clause.violation_time << "]";
          std::cout << "\n";
        }
        return report.verdict ? 0 : kExitFailure;
      } catch (const sitl::HorizonError& ex) {
        std::cout << "verdict: HORIZON-EXCEEDED (" << ex.what() << ")\n";
        return kExitFailure;
      }
    }

    if (app.got_subcommand(cmd_pipeline)) {
      PlantKind kind = plant_kind_from_string(pipe_scenario);
      run_pipeline(kind, config, pipe_out, std::cout);
      return 0;
    }
  } catch (const std::invalid_argument& ex) {
    std::cerr << "invalid input: " << ex.what() << "\n";
    return kExitBadInput;
  } catch (const sitl::ParseError& ex) {
    std::cerr << "invalid input: " << ex.what() << "\n";
    return kExitBadInput;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitFailure;
  }
  return 0;
}
