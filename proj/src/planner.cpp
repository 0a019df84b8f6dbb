#include "nac/planner.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

using nlohmann::json;

namespace nac {

void VisitTask::validate() const {
  if (waypoints.empty()) throw std::invalid_argument("task has no waypoints");
  if (order.size() != waypoints.size())
    throw std::invalid_argument("order must permute the waypoints");
  std::vector<bool> seen(waypoints.size(), false);
  for (int idx : order) {
    if (idx < 0 || idx >= static_cast<int>(waypoints.size()) || seen[idx])
      throw std::invalid_argument("order is not a permutation");
    seen[idx] = true;
  }
  int n = dim();
  for (const auto& w : waypoints) {
    if (static_cast<int>(w.center.size()) != n)
      throw std::invalid_argument("waypoint dimensions differ");
    if (!(w.radius > 0)) throw std::invalid_argument("waypoint radius must be positive");
    if (w.deadline_lo < 0 || !(w.deadline_hi > w.deadline_lo))
      throw std::invalid_argument("deadline must satisfy 0 <= a < b");
  }
  if (start.size() != 0 && static_cast<int>(start.size()) != n)
    throw std::invalid_argument("start dimension mismatch");
}

sitl::Formula task_formula(const VisitTask& task) {
  task.validate();
  std::optional<sitl::Formula> phi;
  for (const auto& w : task.waypoints) {
    sitl::Formula visit = sitl::Formula::pred(sitl::Predicate::norm_ball(w.center, w.radius));
    sitl::Formula clause =
        task.recurrent
            ? sitl::Formula::always(0.0, sitl::kInf,
                                    sitl::Formula::eventually(w.deadline_lo, w.deadline_hi, visit))
            : sitl::Formula::eventually(w.deadline_lo, w.deadline_hi, visit);
    phi = phi ? sitl::Formula::conjunction(*phi, clause) : clause;
  }
  return *phi;
}

namespace {

// L2 projection onto non-decreasing sequences (pool adjacent violators)
std::vector<double> isotonic(const std::vector<double>& y) {
  struct Block {
    double sum;
    int count;
  };
  std::vector<Block> blocks;
  for (double v : y) {
    blocks.push_back({v, 1});
    while (blocks.size() > 1) {
      auto& b = blocks[blocks.size() - 1];
      auto& a = blocks[blocks.size() - 2];
      if (a.sum / a.count <= b.sum / b.count) break;
      a.sum += b.sum;
      a.count += b.count;
      blocks.pop_back();
    }
  }
  std::vector<double> out;
  for (const auto& b : blocks)
    out.insert(out.end(), b.count, b.sum / b.count);
  return out;
}

// min-jerk quintic from p0 to p1 over [t0,t1], zero boundary velocity/acceleration
TrajectorySegment quintic_segment(double t0, double t1, const Eigen::VectorXd& p0,
                                  const Eigen::VectorXd& p1) {
  TrajectorySegment seg;
  seg.t0 = t0;
  seg.t1 = t1;
  double T = t1 - t0;
  int n = static_cast<int>(p0.size());
  seg.coeffs = Eigen::MatrixXd::Zero(n, 6);
  Eigen::VectorXd delta = p1 - p0;
  seg.coeffs.col(0) = p0;
  seg.coeffs.col(3) = delta * (10.0 / (T * T * T));
  seg.coeffs.col(4) = delta * (-15.0 / (T * T * T * T));
  seg.coeffs.col(5) = delta * (6.0 / (T * T * T * T * T));
  return seg;
}

}  // namespace

PrefixSuffixTrajectory plan(const VisitTask& task, const PlannerOptions& opts) {
  task.validate();
  const int k = static_cast<int>(task.order.size());

  std::vector<const VisitTask::Waypoint*> seq;
  for (int idx : task.order) seq.push_back(&task.waypoints[idx]);

  Eigen::VectorXd start = task.start.size() ? task.start : seq[0]->center;

  double min_window = sitl::kInf;
  for (const auto* w : seq) min_window = std::min(min_window, w->deadline_hi - w->deadline_lo);
  const double period = opts.period_margin * min_window;
  const double sep = opts.min_separation > 0 ? opts.min_separation : period / (2.0 * k);

  // visit times: deadline midpoints, minimally shifted to be increasing with
  // at least `sep` between consecutive visits
  std::vector<double> target(k);
  for (int j = 0; j < k; ++j)
    target[j] = 0.5 * (seq[j]->deadline_lo + seq[j]->deadline_hi) - j * sep;
  std::vector<double> t = isotonic(target);
  for (int j = 0; j < k; ++j) {
    t[j] += j * sep;
    t[j] = std::clamp(t[j], seq[j]->deadline_lo, seq[j]->deadline_hi);
  }
  for (int j = 1; j < k; ++j)
    if (!(t[j] > t[j - 1]))
      throw InfeasibleTiming("no monotone visit-time assignment fits the deadlines");
  if (!(t[0] > 0.0))
    throw InfeasibleTiming("first visit time must be positive");
  if (task.recurrent && !(period > t[k - 1] - t[0] + 0.5 * sep))
    throw InfeasibleTiming("suffix period leaves no time to close the cycle");

  std::vector<TrajectorySegment> prefix, suffix;
  if (task.recurrent) {
    prefix.push_back(quintic_segment(0.0, t[0], start, seq[0]->center));
    for (int j = 1; j < k; ++j)
      suffix.push_back(quintic_segment(t[j - 1], t[j], seq[j - 1]->center, seq[j]->center));
    suffix.push_back(quintic_segment(t[k - 1], t[0] + period, seq[k - 1]->center, seq[0]->center));
  } else {
    prefix.push_back(quintic_segment(0.0, t[0], start, seq[0]->center));
    for (int j = 1; j < k; ++j)
      prefix.push_back(quintic_segment(t[j - 1], t[j], seq[j - 1]->center, seq[j]->center));
    double hold = opts.hold_duration > 0 ? opts.hold_duration : std::max(1.0, t[k - 1]);
    suffix.push_back(
        quintic_segment(t[k - 1], t[k - 1] + hold, seq[k - 1]->center, seq[k - 1]->center));
  }
  return PrefixSuffixTrajectory(std::move(prefix), std::move(suffix));
}

std::string VisitTask::to_json() const {
  json j;
  j["format"] = "nac-task";
  j["version"] = 1;
  j["dim"] = dim();
  j["recurrent"] = recurrent;
  j["order"] = order;
  if (start.size()) j["start"] = std::vector<double>(start.data(), start.data() + start.size());
  json wps = json::array();
  for (const auto& w : waypoints) {
    json wj;
    wj["center"] = std::vector<double>(w.center.data(), w.center.data() + w.center.size());
    wj["radius"] = w.radius;
    wj["deadline"] = {w.deadline_lo, w.deadline_hi};
    wps.push_back(wj);
  }
  j["waypoints"] = wps;
  return j.dump(2);
}

VisitTask VisitTask::from_json(const std::string& text) {
  json j = json::parse(text);
  if (j.at("format").get<std::string>() != "nac-task")
    throw std::invalid_argument("not a task file");
  VisitTask task;
  task.recurrent = j.at("recurrent").get<bool>();
  task.order = j.at("order").get<std::vector<int>>();
  if (j.contains("start")) {
    auto s = j["start"].get<std::vector<double>>();
    task.start = Eigen::Map<Eigen::VectorXd>(s.data(), static_cast<int>(s.size()));
  }
  for (const auto& wj : j.at("waypoints")) {
    VisitTask::Waypoint w;
    auto c = wj.at("center").get<std::vector<double>>();
    w.center = Eigen::Map<Eigen::VectorXd>(c.data(), static_cast<int>(c.size()));
    w.radius = wj.at("radius").get<double>();
    w.deadline_lo = wj.at("deadline")[0].get<double>();
    w.deadline_hi = wj.at("deadline")[1].get<double>();
    task.waypoints.push_back(std::move(w));
  }
  task.validate();
  return task;
}

}  // namespace nac
