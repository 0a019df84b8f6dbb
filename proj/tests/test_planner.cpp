#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nac/instances.hpp"
#include "nac/planner.hpp"
#include "test_util.hpp"

using namespace nac;
using namespace nac::testing;

namespace {

VisitTask appendix_unicycle_task() {
  VisitTask task;
  for (auto c : {Eigen::Vector2d(0, 0), Eigen::Vector2d(0, 2), Eigen::Vector2d(2, 0),
                 Eigen::Vector2d(2, 2)}) {
    VisitTask::Waypoint w;
    w.center = c;
    w.radius = 0.1;
    w.deadline_lo = 0.0;
    w.deadline_hi = 20.0;
    task.waypoints.push_back(w);
  }
  task.order = {0, 1, 2, 3};
  task.recurrent = true;
  task.start = task.waypoints[0].center;
  return task;
}

}  // namespace

TEST_CASE("single coincident waypoint gives a constant satisfying trajectory") {
  VisitTask task;
  VisitTask::Waypoint w;
  w.center = Eigen::Vector2d(0, 0);
  w.radius = 0.1;
  w.deadline_lo = 0.0;
  w.deadline_hi = 20.0;
  task.waypoints.push_back(w);
  task.order = {0};
  task.recurrent = false;
  task.start = w.center;

  PrefixSuffixTrajectory traj = plan(task);
  for (double t : {0.0, 3.0, 17.5, 60.0}) {
    auto st = traj.eval(t);
    CHECK(st.pos.isApprox(Eigen::Vector2d(0, 0), 1e-12));
    CHECK(st.vel.norm() == doctest::Approx(0.0));
    CHECK(st.acc.norm() == doctest::Approx(0.0));
  }
  CHECK(satisfies_prefix_suffix(traj, task_formula(task), 0.01, 3));

  // same trajectory misses a far-away ball
  VisitTask far = task;
  far.waypoints[0].center = Eigen::Vector2d(1, 0);
  far.start = Eigen::Vector2d(1, 0);
  CHECK_FALSE(satisfies_prefix_suffix(traj, task_formula(far), 0.01, 3));
}

TEST_CASE("the four-corner unicycle task plans and verifies") {
  VisitTask task = appendix_unicycle_task();
  PrefixSuffixTrajectory traj = plan(task);
  CHECK(traj.t_f1() > 0);
  CHECK(traj.t_f2() > traj.t_f1());
  CHECK(traj.period() <= 20.0);  // every waypoint revisited within its window
  CHECK(traj.loop_closure_residual() <= 1e-9);
  CHECK(satisfies_prefix_suffix(traj, task_formula(task), 0.01, 3));

  // every waypoint is interpolated exactly once per cycle
  for (const auto& w : task.waypoints) {
    double best = 1e9;
    for (double t = traj.t_f1(); t <= traj.t_f2(); t += 0.001)
      best = std::min(best, (traj.eval(t).pos - w.center).norm());
    CHECK(best <= 1e-6);
  }
}

TEST_CASE("random scenario instances plan to monitor-verified trajectories") {
  for (PlantKind kind : {PlantKind::Manipulator, PlantKind::Unicycle, PlantKind::Pendulum}) {
    ScenarioConfig sc = ScenarioConfig::by_kind(kind);
    auto instances = generate_instances(sc, 10, 99);
    for (const auto& inst : instances) {
      VisitTask task = make_task(sc, inst);
      PrefixSuffixTrajectory traj = plan(task);
      CAPTURE(to_string(kind));
      CAPTURE(inst.id);
      CHECK(traj.loop_closure_residual() <= 1e-9);
      CHECK(satisfies_prefix_suffix(traj, task_formula(task), 0.01, 3));
    }
  }
}

TEST_CASE("infeasible deadline orders are rejected") {
  VisitTask task = appendix_unicycle_task();
  // second visit must happen inside [0, 0.1] although the first sits at ~10 s
  task.waypoints[task.order[1]].deadline_hi = 0.1;
  CHECK_THROWS_AS(plan(task), InfeasibleTiming);
}

TEST_CASE("eval wraps periodically and matches finite differences") {
  VisitTask task = appendix_unicycle_task();
  PrefixSuffixTrajectory traj = plan(task);

  auto close = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b, double tol) {
    return (a - b).lpNorm<Eigen::Infinity>() <= tol;
  };

  // loop closure state equality
  auto at1 = traj.eval(traj.t_f1());
  auto at2 = traj.eval(traj.t_f2());
  CHECK(close(at1.pos, at2.pos, 1e-9));
  CHECK(close(at1.vel, at2.vel, 1e-9));
  CHECK(close(at1.acc, at2.acc, 1e-9));

  RngStream rng(5);
  double period = traj.period();
  double max_vel = 0.0;
  for (double t = 0; t < traj.t_f2(); t += 0.01)
    max_vel = std::max(max_vel, traj.eval(t).vel.norm());

  for (int i = 0; i < 200; ++i) {
    double t = rng.uniform(0.0, traj.t_f2() + 2 * period);
    // periodicity
    if (t >= traj.t_f1()) {
      for (int k = 1; k <= 3; ++k) {
        auto a = traj.eval(t);
        auto b = traj.eval(t + k * period);
        CHECK(close(a.pos, b.pos, 1e-9 * (1 + a.pos.norm())));
        CHECK(close(a.vel, b.vel, 1e-8 * (1 + max_vel)));
      }
    }
    // central finite differences of position/velocity
    double h = 1e-4;
    if (t < h) continue;
    // skip stencils crossing the wrap point, where one-sided values differ
    double tq = t <= traj.t_f1() ? t : traj.t_f1() + std::fmod(t - traj.t_f1(), period);
    if (std::abs(tq - traj.t_f1()) < 2 * h || std::abs(tq - traj.t_f2()) < 2 * h) continue;
    auto st = traj.eval(t);
    auto fwd = traj.eval(t + h);
    auto bwd = traj.eval(t - h);
    Eigen::VectorXd vel_fd = (fwd.pos - bwd.pos) / (2 * h);
    Eigen::VectorXd acc_fd = (fwd.vel - bwd.vel) / (2 * h);
    CHECK((st.vel - vel_fd).lpNorm<Eigen::Infinity>() <= 1e-6 * (1.0 + max_vel));
    CHECK((st.acc - acc_fd).lpNorm<Eigen::Infinity>() <= 1e-5 * (1.0 + max_vel));
  }
}

TEST_CASE("verdicts are stable under grid refinement") {
  VisitTask task = appendix_unicycle_task();
  PrefixSuffixTrajectory traj = plan(task);
  sitl::Formula phi = task_formula(task);
  bool v1 = satisfies_prefix_suffix(traj, phi, 0.02, 3);
  bool v2 = satisfies_prefix_suffix(traj, phi, 0.01, 3);
  bool v3 = satisfies_prefix_suffix(traj, phi, 0.005, 3);
  CHECK(v1);
  CHECK(v1 == v2);
  CHECK(v2 == v3);

  // a violated task stays violated on finer grids
  VisitTask shifted = task;
  for (auto& w : shifted.waypoints) w.center.array() += 5.0;
  sitl::Formula bad = task_formula(shifted);
  CHECK_FALSE(satisfies_prefix_suffix(traj, bad, 0.02, 3));
  CHECK_FALSE(satisfies_prefix_suffix(traj, bad, 0.005, 3));
}

TEST_CASE("trajectory JSON round trip") {
  VisitTask task = appendix_unicycle_task();
  PrefixSuffixTrajectory traj = plan(task);
  PrefixSuffixTrajectory back = PrefixSuffixTrajectory::from_json(traj.to_json());
  CHECK(back.t_f1() == traj.t_f1());
  CHECK(back.t_f2() == traj.t_f2());
  RngStream rng(3);
  for (int i = 0; i < 50; ++i) {
    double t = rng.uniform(0.0, 2.0 * traj.t_f2());
    CHECK(back.eval(t).pos.isApprox(traj.eval(t).pos, 1e-15));
    CHECK(back.eval(t).vel.isApprox(traj.eval(t).vel, 1e-15));
  }
  // task JSON round trip
  VisitTask tback = VisitTask::from_json(task.to_json());
  CHECK(tback.waypoints.size() == task.waypoints.size());
  CHECK(tback.order == task.order);
  CHECK(tback.recurrent == task.recurrent);
}
