#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "nac/sitl.hpp"

namespace nac {

// One polynomial segment per dimension, evaluated in local time s = t - t0.
// coeffs(d, k) is the coefficient of s^k for dimension d.
struct TrajectorySegment {
  double t0 = 0.0;
  double t1 = 0.0;
  Eigen::MatrixXd coeffs;  // dim x 6

  double duration() const { return t1 - t0; }
};

// Open-loop plan: finite prefix on [0, t_f1] followed by a suffix on
// [t_f1, t_f2] that repeats forever. Evaluation past t_f1 wraps into the
// suffix, so position, velocity and acceleration are defined for all t >= 0.
class PrefixSuffixTrajectory {
 public:
  PrefixSuffixTrajectory() = default;
  PrefixSuffixTrajectory(std::vector<TrajectorySegment> prefix,
                         std::vector<TrajectorySegment> suffix);

  struct State {
    Eigen::VectorXd pos;
    Eigen::VectorXd vel;
    Eigen::VectorXd acc;
  };

  State eval(double t) const;

  int dim() const { return dim_; }
  double t_f1() const { return t_f1_; }
  double t_f2() const { return t_f2_; }
  double period() const { return t_f2_ - t_f1_; }

  const std::vector<TrajectorySegment>& prefix() const { return prefix_; }
  const std::vector<TrajectorySegment>& suffix() const { return suffix_; }

  // max |.| discrepancy across pos/vel/acc between eval(t_f1) and eval(t_f2)
  double loop_closure_residual() const;

  std::string to_json() const;
  static PrefixSuffixTrajectory from_json(const std::string& text);

  // Constant trajectory at a point; prefix [0,t_f1], suffix [t_f1,t_f2].
  static PrefixSuffixTrajectory constant(const Eigen::VectorXd& point, double t_f1,
                                         double t_f2);

 private:
  const TrajectorySegment& locate(const std::vector<TrajectorySegment>& segs,
                                  double t) const;

  std::vector<TrajectorySegment> prefix_;
  std::vector<TrajectorySegment> suffix_;
  double t_f1_ = 0.0;
  double t_f2_ = 0.0;
  int dim_ = 0;
};

// Sample positions over the prefix plus `cycles` suffix repetitions at step
// dt and evaluate the formula at t = 0 (top-level G[.,inf] clauses are
// checked over every instant whose horizon fits the record).
bool satisfies_prefix_suffix(const PrefixSuffixTrajectory& traj,
                             const sitl::Formula& phi, double dt, int cycles);

// The sampled record used above, exposed for monitoring closed-loop logs.
SampledSignal sample_trajectory(const PrefixSuffixTrajectory& traj, double dt,
                                int cycles);

}  // namespace nac
