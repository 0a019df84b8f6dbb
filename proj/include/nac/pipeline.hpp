#pragma once

#include <iosfwd>
#include <string>

#include "nac/config.hpp"
#include "nac/sweep.hpp"

namespace nac {

struct PipelineResult {
  std::string instances_path;
  std::string data_path;
  std::string model_path;

  int train_epochs = 0;
  double final_loss = 0.0;
  bool loss_target_reached = false;

  SweepResult proposed;
  SweepResult non_adaptive;
  SweepResult no_nn;
};

// instances -> trajectories -> training data -> model -> test sweeps for the
// proposed policy and the two baselines. Artifacts land in out_dir; partial
// artifacts are kept when a later stage fails.
PipelineResult run_pipeline(PlantKind scenario, const AppConfig& config,
                            const std::string& out_dir, std::ostream& progress);

// the printed comparison block, also written to <out_dir>/report.txt
std::string pipeline_report(PlantKind scenario, const PipelineResult& result);

}  // namespace nac
