#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nac/sitl.hpp"
#include "nac/trajectory.hpp"

namespace nac {

struct InfeasibleTiming : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A sequence of timed region visits. `order` permutes `waypoints`; deadlines
// stay attached to their waypoint. Recurrent tasks revisit every waypoint
// once per suffix cycle.
struct VisitTask {
  struct Waypoint {
    Eigen::VectorXd center;
    double radius = 0.1;
    double deadline_lo = 0.0;
    double deadline_hi = 20.0;
  };

  std::vector<Waypoint> waypoints;
  std::vector<int> order;
  bool recurrent = true;
  Eigen::VectorXd start;  // trajectory start; defaults to the first visited waypoint

  int dim() const { return waypoints.empty() ? 0 : static_cast<int>(waypoints[0].center.size()); }
  void validate() const;

  std::string to_json() const;
  static VisitTask from_json(const std::string& text);
};

// The task as an SITL formula: for each waypoint i,
//   recurrent:  G[0,inf] F[a_i,b_i] (norm(x - c_i) <= r_i)
//   one-shot:   F[a_i,b_i] (norm(x - c_i) <= r_i)
// conjoined over all waypoints.
sitl::Formula task_formula(const VisitTask& task);

struct PlannerOptions {
  double period_margin = 0.9;     // suffix period as a fraction of min(b_i - a_i)
  double min_separation = 0.0;    // min time between visits; 0 = period/(2k)
  double hold_duration = 0.0;     // suffix length for one-shot tasks; 0 = max(1, t_f1)
};

// Quintic-spline plan through the waypoints in visit order. Visit times start
// from the deadline midpoints and are shifted minimally (isotonic projection)
// to be strictly increasing; the suffix repeats one full cycle back to the
// first waypoint. Throws InfeasibleTiming when no monotone assignment fits
// inside the deadlines.
PrefixSuffixTrajectory plan(const VisitTask& task, const PlannerOptions& opts = {});

}  // namespace nac
