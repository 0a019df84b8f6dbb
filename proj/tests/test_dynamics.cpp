#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nac/dynamics.hpp"
#include "nac/instances.hpp"
#include "test_util.hpp"

using namespace nac;
using namespace nac::testing;

namespace {
constexpr double kPi = 3.14159265358979323846;

Eigen::VectorXd random_vec(RngStream& rng, int n, double lo, double hi) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform(lo, hi);
  return v;
}
}  // namespace

TEST_CASE("pendulum drift at the stated points") {
  PendulumPlant plant({1.0, 9.81}, DisturbanceModel::zero(1));
  Eigen::VectorXd x(2), u(1);

  x << 0.0, 0.0;
  u << 0.0;
  CHECK(plant.derivative(x, u, 0.0)[1] == doctest::Approx(0.0));

  x << kPi / 2, 0.0;
  CHECK(plant.derivative(x, u, 0.0)[1] == doctest::Approx(9.81));

  // control and disturbance enter additively
  DisturbanceModel d = DisturbanceModel::zero(1);
  d.amps[0] = 0.2;
  d.freqs[0] = 1.0;
  d.phases[0] = 0.5;
  PendulumPlant noisy({2.0, 9.81}, d);
  x << 0.3, -0.1;
  u << 1.5;
  double expect = 9.81 / 2.0 * std::sin(0.3) + 1.5 + 0.2 * std::sin(1.0 * 2.0 + 0.5);
  CHECK(noisy.derivative(x, u, 2.0)[1] == doctest::Approx(expect).epsilon(1e-12));

  CHECK_THROWS_AS(plant.derivative(x, Eigen::VectorXd::Constant(1, 1e308 * 10), 0.0),
                  std::invalid_argument);
}

TEST_CASE("two-link arm accelerations agree across both algebraic routes") {
  RngStream rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    TwoLinkArmParams p;
    p.m1 = rng.uniform(0.5, 1.5);
    p.m2 = rng.uniform(0.5, 1.5);
    p.I1 = rng.uniform(0.01, 0.03);
    p.I2 = rng.uniform(0.01, 0.03);
    DisturbanceModel d = DisturbanceModel::zero(2);
    d.amps = random_vec(rng, 2, 0.0, 2.0);
    d.freqs = random_vec(rng, 2, 0.0, 1.0);
    d.phases = random_vec(rng, 2, 0.0, 2.0);
    d.gates << 1, 0;
    TwoLinkArm arm(p, d);

    Eigen::VectorXd xbar = random_vec(rng, 4, -2.0, 2.0);
    Eigen::VectorXd u = random_vec(rng, 2, -5.0, 5.0);
    double t = rng.uniform(0.0, 10.0);

    Eigen::Vector2d via_inverse =
        (arm.drift(xbar, t) + arm.input_gain(xbar, t) * u).head<2>();
    Eigen::Vector2d via_solve = arm.accel_via_solve(xbar, u, t);
    CHECK((via_inverse - via_solve).norm() <= 1e-10 * (1.0 + via_solve.norm()));
  }
}

TEST_CASE("arm structural properties: SPD inertia and skew Coriolis identity") {
  RngStream rng(23);
  ScenarioConfig sc = ScenarioConfig::manipulator();
  auto instances = generate_instances(sc, 20, 7);
  for (const auto& inst : instances) {
    TwoLinkArm arm(make_arm_params(sc, inst), make_disturbance(inst));
    for (int k = 0; k < 50; ++k) {
      Eigen::Vector2d q = random_vec(rng, 2, -kPi, kPi);
      Eigen::Vector2d qd = random_vec(rng, 2, -3.0, 3.0);

      Eigen::Matrix2d B = arm.inertia(q);
      CHECK((B - B.transpose()).norm() <= 1e-14);
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(B);
      CHECK(es.eigenvalues().minCoeff() > 0.0);

      // Bdot - 2C skew-symmetric: finite-difference Bdot along qd
      double h = 1e-7;
      Eigen::Matrix2d Bdot =
          (arm.inertia(q + h * qd) - arm.inertia(q - h * qd)) / (2 * h);
      Eigen::Matrix2d S = Bdot - 2.0 * arm.coriolis(q, qd);
      CHECK((S + S.transpose()).norm() <= 1e-6);
    }
  }
}

TEST_CASE("input gain stays positive definite over sampled states (Assumption 1)") {
  RngStream rng(31);
  for (PlantKind kind : {PlantKind::Manipulator, PlantKind::Pendulum}) {
    ScenarioConfig sc = ScenarioConfig::by_kind(kind);
    auto instances = generate_instances(sc, 10, 11);
    for (const auto& inst : instances) {
      std::unique_ptr<SecondOrderPlant> plant;
      if (kind == PlantKind::Manipulator)
        plant = std::make_unique<TwoLinkArm>(make_arm_params(sc, inst), make_disturbance(inst));
      else
        plant = std::make_unique<PendulumPlant>(make_pendulum_params(sc, inst),
                                                make_disturbance(inst));
      for (int k = 0; k < 1000; ++k) {
        Eigen::VectorXd xbar = random_vec(rng, 2 * plant->n(), -3.0, 3.0);
        Eigen::MatrixXd g = plant->input_gain(xbar, rng.uniform(0.0, 20.0));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (g + g.transpose()));
        CHECK(es.eigenvalues().minCoeff() > 0.0);
      }
    }
  }
}

TEST_CASE("unicycle inertia structure and velocity relations") {
  UnicycleParams p;  // nominal values
  UnicyclePlant plant(p, DisturbanceModel::zero(2));

  double expect_m1 = p.m * p.r * p.r / 4.0 +
                     (p.I_C + p.m * p.d_off * p.d_off) * p.r * p.r / (4.0 * p.R * p.R) + p.I_0;
  double expect_m2 = p.m * p.r * p.r / 4.0 -
                     (p.I_C + p.m * p.d_off * p.d_off) * p.r * p.r / (4.0 * p.R * p.R);
  CHECK(plant.m1() == doctest::Approx(expect_m1).epsilon(1e-14));
  CHECK(plant.m2() == doctest::Approx(expect_m2).epsilon(1e-14));
  CHECK(plant.m1() > std::abs(plant.m2()));  // SPD

  Eigen::VectorXd st = Eigen::VectorXd::Zero(UnicyclePlant::kStateDim);
  st[5] = 3.0;   // thetaR_dot
  st[6] = -1.0;  // thetaL_dot
  CHECK(plant.linear_velocity(st) == doctest::Approx(0.5 * p.r * 2.0));
  CHECK(plant.angular_velocity(st) == doctest::Approx(p.r / (2 * p.R) * 4.0));

  // wheel dynamics: M thetadd = u, checked against the closed-form inverse
  Eigen::Vector2d u(0.4, -0.2);
  auto dx = plant.derivative(st, u, 0.0);
  Eigen::Matrix2d M;
  M << plant.m1(), plant.m2(), plant.m2(), plant.m1();
  Eigen::Vector2d thetadd = M.ldlt().solve(u);
  CHECK(dx[5] == doctest::Approx(thetadd[0]).epsilon(1e-12));
  CHECK(dx[6] == doctest::Approx(thetadd[1]).epsilon(1e-12));

  // kinematics satisfy the non-holonomic constraint identically
  RngStream rng(3);
  for (int k = 0; k < 100; ++k) {
    Eigen::VectorXd s = random_vec(rng, UnicyclePlant::kStateDim, -2.0, 2.0);
    auto d = plant.derivative(s, Eigen::Vector2d(rng.uniform(-1, 1), rng.uniform(-1, 1)),
                              rng.uniform(0, 10));
    double residual = d[0] * std::sin(s[2]) - d[1] * std::cos(s[2]);
    CHECK(std::abs(residual) <= 1e-15);
  }
}

TEST_CASE("disturbance bounds: sup of the time part equals the amplitude norm") {
  RngStream rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    DisturbanceModel d = DisturbanceModel::zero(2);
    d.amps = random_vec(rng, 2, 0.0, 2.0);
    d.freqs = random_vec(rng, 2, 0.1, 1.0);
    d.phases = random_vec(rng, 2, 0.0, 2.0);
    d.gates << 1, 1;
    double sup = 0.0;
    for (double t = 0; t < 200.0; t += 0.01) sup = std::max(sup, d.time_part(t).norm());
    CHECK(sup <= d.sup_time_part() + 1e-12);
    CHECK(sup >= 0.7 * d.sup_time_part());  // long horizon nearly attains it

    // fixed state: d(x,t) uniformly bounded in t
    Eigen::VectorXd v = random_vec(rng, 2, -3.0, 3.0);
    for (double t = 0; t < 50.0; t += 0.37)
      CHECK(d.eval(t, v).norm() <=
            d.sup_time_part() + (d.gates.array() * d.amps.array() * v.array()).matrix().norm() +
                1e-12);
  }
}

TEST_CASE("instance generation: determinism, split, documented ranges") {
  ScenarioConfig sc = ScenarioConfig::unicycle_scenario();
  auto a = generate_instances(sc, 150, 42);
  auto b = generate_instances(sc, 150, 42);
  REQUIRE(a.size() == 150);

  int train = 0;
  for (const auto& inst : a) train += inst.train ? 1 : 0;
  CHECK(train == 100);
  CHECK(a[99].train);
  CHECK_FALSE(a[100].train);

  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].param_offsets == b[i].param_offsets);
    CHECK(a[i].order == b[i].order);
    CHECK(a[i].init_pos_offset == b[i].init_pos_offset);
    CHECK(a[i].disturbance.amps == b[i].disturbance.amps);
  }
  // different seed changes the draws
  auto c = generate_instances(sc, 150, 43);
  CHECK(a[0].param_offsets != c[0].param_offsets);

  for (const auto& inst : a) {
    // mass offsets in (-m/2, m/2) -> mass in (14, 42)
    UnicycleParams p = make_unicycle_params(sc, inst);
    CHECK(p.m > 14.0);
    CHECK(p.m < 42.0);
    CHECK(p.r > 0.005);
    CHECK(p.r < 0.015);
    for (const auto& off : inst.waypoint_offsets) {
      CHECK(off.lpNorm<Eigen::Infinity>() <= 0.3);
    }
    for (double d : inst.deadline_offsets) CHECK(std::abs(d) <= 2.0);
    CHECK(std::abs(inst.init_heading_offset) <= 0.25);
    for (double amp : inst.disturbance.amps) {
      CHECK(amp >= 0.0);
      CHECK(amp <= 0.2);
    }
    // inertia matrix positive definite for every instance
    UnicyclePlant plant(p, make_disturbance(inst));
    CHECK(plant.m1() > std::abs(plant.m2()));
  }

  // instances are reproducible in isolation (keyed streams)
  auto sub = generate_instances(sc, 10, 42);
  for (int i = 0; i < 10; ++i) CHECK(sub[i].param_offsets == a[i].param_offsets);
}

TEST_CASE("instances JSON round trip") {
  ScenarioConfig sc = ScenarioConfig::manipulator();
  auto list = generate_instances(sc, 12, 5);
  std::string text = instances_to_json(sc, list, 5);
  ScenarioConfig sc2;
  auto back = instances_from_json(text, &sc2);
  CHECK(sc2.kind == PlantKind::Manipulator);
  REQUIRE(back.size() == list.size());
  for (size_t i = 0; i < list.size(); ++i) {
    CHECK(back[i].id == list[i].id);
    CHECK(back[i].train == list[i].train);
    CHECK(back[i].param_offsets == list[i].param_offsets);
    CHECK(back[i].order == list[i].order);
    CHECK(back[i].disturbance.phases == list[i].disturbance.phases);
  }
}

TEST_CASE("unicycle initial heading points at the trajectory start") {
  ScenarioConfig sc = ScenarioConfig::unicycle_scenario();
  auto list = generate_instances(sc, 30, 21);
  for (const auto& inst : list) {
    VisitTask task = make_task(sc, inst);
    Eigen::VectorXd st = initial_state(sc, inst);
    Eigen::Vector2d e = st.head<2>() - task.start.head<2>();
    if (e.norm() < 1e-9) continue;
    double to_target = std::atan2(-e[1], -e[0]);
    double diff = std::remainder(st[2] - to_target, 2 * kPi);
    CHECK(std::abs(diff) <= 0.25 + 1e-12);
  }
}
