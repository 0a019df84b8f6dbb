#pragma once

#include <Eigen/Dense>
#include <memory>
#include <stdexcept>
#include <vector>

namespace nac {

// d(xbar,t) = d_t(t) + d_f(xbar) with d_t = A.*sin(eta t + phase) and
// d_f = gate .* (A .* v), one channel per actuated coordinate. `v` is the
// velocity the friction term couples to (joint rates, wheel rates, ...).
struct DisturbanceModel {
  Eigen::VectorXd amps;    // diagonal of A_t
  Eigen::VectorXd freqs;   // eta_i (rad/s)
  Eigen::VectorXd phases;  // phi_i
  Eigen::VectorXd gates;   // 0/1 diagonal of R_t

  static DisturbanceModel zero(int n) {
    DisturbanceModel d;
    d.amps = Eigen::VectorXd::Zero(n);
    d.freqs = Eigen::VectorXd::Zero(n);
    d.phases = Eigen::VectorXd::Zero(n);
    d.gates = Eigen::VectorXd::Zero(n);
    return d;
  }

  Eigen::VectorXd time_part(double t) const {
    return amps.array() * (freqs.array() * t + phases.array()).sin();
  }

  Eigen::VectorXd eval(double t, const Eigen::VectorXd& v) const {
    return time_part(t) + (gates.array() * amps.array() * v.array()).matrix();
  }

  double sup_time_part() const { return amps.norm(); }
};

// Fully-actuated second-order plant: xdd = f(xbar,t) + g(xbar,t) u with
// xbar = [x; xdot]. g must be positive definite (checked by sampling in the
// tests, not enforced here).
class SecondOrderPlant {
 public:
  virtual ~SecondOrderPlant() = default;

  virtual int n() const = 0;
  virtual Eigen::VectorXd drift(const Eigen::VectorXd& xbar, double t) const = 0;
  virtual Eigen::MatrixXd input_gain(const Eigen::VectorXd& xbar, double t) const = 0;

  // d/dt [x; xdot] = [xdot; f + g u]
  Eigen::VectorXd derivative(const Eigen::VectorXd& xbar, const Eigen::VectorXd& u,
                             double t) const;
};

// Planar 2-link arm with point-mass-plus-rotor links:
//   B(q) qdd + C(q,qd) qd + gvec(q) = u + d(xbar,t)
struct TwoLinkArmParams {
  double m1 = 1.0, m2 = 1.0;
  double l1 = 0.5, l2 = 0.5;
  double I1 = 1.0 * 0.5 * 0.5 / 12.0, I2 = 1.0 * 0.5 * 0.5 / 12.0;
  double g0 = 9.81;
  bool gravity = true;
};

class TwoLinkArm : public SecondOrderPlant {
 public:
  TwoLinkArm(TwoLinkArmParams params, DisturbanceModel dist)
      : p_(params), dist_(std::move(dist)) {}

  int n() const override { return 2; }
  Eigen::VectorXd drift(const Eigen::VectorXd& xbar, double t) const override;
  Eigen::MatrixXd input_gain(const Eigen::VectorXd& xbar, double t) const override;

  Eigen::Matrix2d inertia(const Eigen::Vector2d& q) const;
  Eigen::Matrix2d coriolis(const Eigen::Vector2d& q, const Eigen::Vector2d& qd) const;
  Eigen::Vector2d gravity_vec(const Eigen::Vector2d& q) const;

  // acceleration by linear solve instead of explicit inverse; used as the
  // second algebraic route in the tests
  Eigen::Vector2d accel_via_solve(const Eigen::VectorXd& xbar, const Eigen::VectorXd& u,
                                  double t) const;

  double kinetic_energy(const Eigen::VectorXd& xbar) const;

  const TwoLinkArmParams& params() const { return p_; }
  const DisturbanceModel& disturbance() const { return dist_; }

 private:
  TwoLinkArmParams p_;
  DisturbanceModel dist_;
};

// Single pendulum, qdd = (g0/L) sin q + u + d(t); the upright target is q = pi.
struct PendulumParams {
  double L = 1.0;
  double g0 = 9.81;
};

class PendulumPlant : public SecondOrderPlant {
 public:
  PendulumPlant(PendulumParams params, DisturbanceModel dist)
      : p_(params), dist_(std::move(dist)) {}

  int n() const override { return 1; }
  Eigen::VectorXd drift(const Eigen::VectorXd& xbar, double t) const override;
  Eigen::MatrixXd input_gain(const Eigen::VectorXd&, double) const override {
    return Eigen::MatrixXd::Identity(1, 1);
  }

  const PendulumParams& params() const { return p_; }
  const DisturbanceModel& disturbance() const { return dist_; }

 private:
  PendulumParams p_;
  DisturbanceModel dist_;
};

// Differential-drive unicycle. Pose kinematics plus wheel dynamics
// M thetadd = u + f_theta(xbar,t), with M = [[M1,M2],[M2,M1]].
// State layout: [p1, p2, phi, thR, thL, thRd, thLd].
struct UnicycleParams {
  double m = 28.0;
  double I_C = 0.1;    // body inertia about the axle midpoint
  double I_0 = 0.01;   // wheel inertia
  double r = 0.01;     // wheel radius
  double R = 0.1;      // half axle length
  double d_off = 0.01; // axle midpoint to centre of mass
};

class UnicyclePlant {
 public:
  static constexpr int kStateDim = 7;

  UnicyclePlant(UnicycleParams params, DisturbanceModel dist)
      : p_(params), dist_(std::move(dist)) {
    if (!(m1() > std::abs(m2())))
      throw std::invalid_argument("unicycle inertia matrix not positive definite");
  }

  double m1() const {
    return p_.m * p_.r * p_.r / 4.0 +
           (p_.I_C + p_.m * p_.d_off * p_.d_off) * p_.r * p_.r / (4.0 * p_.R * p_.R) + p_.I_0;
  }
  double m2() const {
    return p_.m * p_.r * p_.r / 4.0 -
           (p_.I_C + p_.m * p_.d_off * p_.d_off) * p_.r * p_.r / (4.0 * p_.R * p_.R);
  }

  double linear_velocity(const Eigen::VectorXd& state) const {
    return 0.5 * p_.r * (state[5] + state[6]);
  }
  double angular_velocity(const Eigen::VectorXd& state) const {
    return p_.r / (2.0 * p_.R) * (state[5] - state[6]);
  }

  // [x; xdot] = [p1,p2,phi,p1d,p2d,phid] as seen by the controller
  Eigen::VectorXd xbar(const Eigen::VectorXd& state) const;

  Eigen::VectorXd derivative(const Eigen::VectorXd& state, const Eigen::Vector2d& u,
                             double t) const;

  const UnicycleParams& params() const { return p_; }
  const DisturbanceModel& disturbance() const { return dist_; }

 private:
  UnicycleParams p_;
  DisturbanceModel dist_;
};

}  // namespace nac
