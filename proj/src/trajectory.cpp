#include "nac/trajectory.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <stdexcept>

using nlohmann::json;

namespace nac {

PrefixSuffixTrajectory::PrefixSuffixTrajectory(std::vector<TrajectorySegment> prefix,
                                               std::vector<TrajectorySegment> suffix)
    : prefix_(std::move(prefix)), suffix_(std::move(suffix)) {
  if (prefix_.empty() || suffix_.empty())
    throw std::invalid_argument("trajectory needs at least one prefix and one suffix segment");
  t_f1_ = prefix_.back().t1;
  t_f2_ = suffix_.back().t1;
  dim_ = static_cast<int>(prefix_.front().coeffs.rows());
  if (!(t_f1_ > 0.0) || !(t_f2_ > t_f1_))
    throw std::invalid_argument("trajectory needs t_f2 > t_f1 > 0");
}

const TrajectorySegment& PrefixSuffixTrajectory::locate(
    const std::vector<TrajectorySegment>& segs, double t) const {
  // segments are contiguous; pick the one whose [t0,t1) contains t
  for (const auto& s : segs)
    if (t < s.t1) return s;
  return segs.back();
}

PrefixSuffixTrajectory::State PrefixSuffixTrajectory::eval(double t) const {
  if (t < 0.0) t = 0.0;
  const bool in_prefix = t <= t_f1_;
  double tq = in_prefix ? t : t_f1_ + std::fmod(t - t_f1_, period());
  const auto& seg = locate(in_prefix ? prefix_ : suffix_, tq);
  double s = tq - seg.t0;
  State st;
  st.pos = Eigen::VectorXd::Zero(dim_);
  st.vel = Eigen::VectorXd::Zero(dim_);
  st.acc = Eigen::VectorXd::Zero(dim_);
  for (int d = 0; d < dim_; ++d) {
    double p = 0, v = 0, a = 0;
    for (int k = 5; k >= 0; --k) p = p * s + seg.coeffs(d, k);
    for (int k = 5; k >= 1; --k) v = v * s + k * seg.coeffs(d, k);
    for (int k = 5; k >= 2; --k) a = a * s + k * (k - 1) * seg.coeffs(d, k);
    st.pos[d] = p;
    st.vel[d] = v;
    st.acc[d] = a;
  }
  return st;
}

double PrefixSuffixTrajectory::loop_closure_residual() const {
  // compare suffix endpoint states directly (eval() would wrap t_f2 around)
  const auto& first = suffix_.front();
  const auto& last = suffix_.back();
  double res = 0.0;
  double s_end = last.t1 - last.t0;
  for (int d = 0; d < dim_; ++d) {
    double p0 = first.coeffs(d, 0);
    double v0 = first.coeffs(d, 1);
    double a0 = 2.0 * first.coeffs(d, 2);
    double p1 = 0, v1 = 0, a1 = 0;
    for (int k = 5; k >= 0; --k) p1 = p1 * s_end + last.coeffs(d, k);
    for (int k = 5; k >= 1; --k) v1 = v1 * s_end + k * last.coeffs(d, k);
    for (int k = 5; k >= 2; --k) a1 = a1 * s_end + k * (k - 1) * last.coeffs(d, k);
    res = std::max({res, std::abs(p1 - p0), std::abs(v1 - v0), std::abs(a1 - a0)});
  }
  return res;
}

PrefixSuffixTrajectory PrefixSuffixTrajectory::constant(const Eigen::VectorXd& point,
                                                        double t_f1, double t_f2) {
  TrajectorySegment pre, suf;
  pre.t0 = 0.0;
  pre.t1 = t_f1;
  pre.coeffs = Eigen::MatrixXd::Zero(point.size(), 6);
  pre.coeffs.col(0) = point;
  suf = pre;
  suf.t0 = t_f1;
  suf.t1 = t_f2;
  return PrefixSuffixTrajectory({pre}, {suf});
}

namespace {

json segment_to_json(const TrajectorySegment& s) {
  json j;
  j["t0"] = s.t0;
  j["t1"] = s.t1;
  std::vector<std::vector<double>> rows;
  for (int d = 0; d < s.coeffs.rows(); ++d) {
    std::vector<double> row(6);
    for (int k = 0; k < 6; ++k) row[k] = s.coeffs(d, k);
    rows.push_back(std::move(row));
  }
  j["coeffs"] = rows;
  return j;
}

TrajectorySegment segment_from_json(const json& j) {
  TrajectorySegment s;
  s.t0 = j.at("t0").get<double>();
  s.t1 = j.at("t1").get<double>();
  auto rows = j.at("coeffs").get<std::vector<std::vector<double>>>();
  s.coeffs = Eigen::MatrixXd::Zero(static_cast<int>(rows.size()), 6);
  for (size_t d = 0; d < rows.size(); ++d)
    for (int k = 0; k < 6; ++k) s.coeffs(static_cast<int>(d), k) = rows[d][k];
  return s;
}

}  // namespace

std::string PrefixSuffixTrajectory::to_json() const {
  json j;
  j["format"] = "nac-trajectory";
  j["version"] = 1;
  j["dim"] = dim_;
  j["t_f1"] = t_f1_;
  j["t_f2"] = t_f2_;
  json pre = json::array(), suf = json::array();
  for (const auto& s : prefix_) pre.push_back(segment_to_json(s));
  for (const auto& s : suffix_) suf.push_back(segment_to_json(s));
  j["prefix"] = pre;
  j["suffix"] = suf;
  return j.dump(2);
}

PrefixSuffixTrajectory PrefixSuffixTrajectory::from_json(const std::string& text) {
  json j = json::parse(text);
  if (j.at("format").get<std::string>() != "nac-trajectory")
    throw std::invalid_argument("not a trajectory file");
  std::vector<TrajectorySegment> pre, suf;
  for (const auto& s : j.at("prefix")) pre.push_back(segment_from_json(s));
  for (const auto& s : j.at("suffix")) suf.push_back(segment_from_json(s));
  return PrefixSuffixTrajectory(std::move(pre), std::move(suf));
}

SampledSignal sample_trajectory(const PrefixSuffixTrajectory& traj, double dt,
                                int cycles) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (cycles < 1) throw std::invalid_argument("cycles must be >= 1");
  double t_end = traj.t_f1() + cycles * traj.period();
  int n = static_cast<int>(std::floor(t_end / dt + 1e-9)) + 1;
  SampledSignal sig;
  sig.times.resize(n);
  sig.values.resize(traj.dim(), n);
  for (int i = 0; i < n; ++i) {
    double t = i * dt;
    sig.times[i] = t;
    sig.values.col(i) = traj.eval(t).pos;
  }
  return sig;
}

bool satisfies_prefix_suffix(const PrefixSuffixTrajectory& traj,
                             const sitl::Formula& phi, double dt, int cycles) {
  if (cycles < 2) throw std::invalid_argument("cycles must be >= 2");
  SampledSignal sig = sample_trajectory(traj, dt, cycles);
  return sitl::monitor(sig, phi).verdict;
}

}  // namespace nac
