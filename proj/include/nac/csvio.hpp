#pragma once

#include <string>

#include "nac/sim.hpp"

namespace nac {

// RunLog CSV: one row per logged step, columns
//   t, x*, xd*, u*, unn*, g*, err*  (+ reward for the pendulum)
// written at full double precision so replays are exact.
void write_run_log_csv(const RunLog& log, const std::string& path);

// Minimal reload for monitoring: time column plus the x* position block.
SampledSignal read_position_csv(const std::string& path);

// Training triplets CSV: trajectory_id, t, xbar*, u*; trajectory clock data
// (t_f1/t_f2 per trajectory, scenario kind) goes to the meta JSON next to it.
void write_training_csv(const TrainingTriplets& data, const std::string& csv_path,
                        const std::string& meta_path);
TrainingTriplets read_training_csv(const std::string& csv_path,
                                   const std::string& meta_path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace nac
