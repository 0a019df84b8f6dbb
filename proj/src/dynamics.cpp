#include "nac/dynamics.hpp"

#include <cmath>

namespace nac {

Eigen::VectorXd SecondOrderPlant::derivative(const Eigen::VectorXd& xbar,
                                             const Eigen::VectorXd& u, double t) const {
  const int nn = n();
  if (xbar.size() != 2 * nn || u.size() != nn)
    throw std::invalid_argument("plant derivative: dimension mismatch");
  if (!xbar.allFinite() || !u.allFinite() || !std::isfinite(t))
    throw std::invalid_argument("plant derivative: non-finite input");
  Eigen::VectorXd out(2 * nn);
  out.head(nn) = xbar.tail(nn);
  out.tail(nn) = drift(xbar, t) + input_gain(xbar, t) * u;
  return out;
}

// ---------------------------------------------------------------------------
// Two-link arm (planar, uniform rods, gravity along -y of the joint plane)

Eigen::Matrix2d TwoLinkArm::inertia(const Eigen::Vector2d& q) const {
  double lc1 = 0.5 * p_.l1, lc2 = 0.5 * p_.l2;
  double a = p_.I1 + p_.I2 + p_.m1 * lc1 * lc1 + p_.m2 * (p_.l1 * p_.l1 + lc2 * lc2);
  double b = p_.m2 * p_.l1 * lc2;
  double c = p_.I2 + p_.m2 * lc2 * lc2;
  double c2 = std::cos(q[1]);
  Eigen::Matrix2d B;
  B << a + 2 * b * c2, c + b * c2, c + b * c2, c;
  return B;
}

Eigen::Matrix2d TwoLinkArm::coriolis(const Eigen::Vector2d& q,
                                     const Eigen::Vector2d& qd) const {
  double b = p_.m2 * p_.l1 * 0.5 * p_.l2;
  double s2 = std::sin(q[1]);
  Eigen::Matrix2d C;
  C << -b * s2 * qd[1], -b * s2 * (qd[0] + qd[1]), b * s2 * qd[0], 0.0;
  return C;
}

Eigen::Vector2d TwoLinkArm::gravity_vec(const Eigen::Vector2d& q) const {
  if (!p_.gravity) return Eigen::Vector2d::Zero();
  double lc1 = 0.5 * p_.l1, lc2 = 0.5 * p_.l2;
  double g = p_.g0;
  Eigen::Vector2d gv;
  gv[0] = (p_.m1 * lc1 + p_.m2 * p_.l1) * g * std::cos(q[0]) +
          p_.m2 * lc2 * g * std::cos(q[0] + q[1]);
  gv[1] = p_.m2 * lc2 * g * std::cos(q[0] + q[1]);
  return gv;
}

Eigen::VectorXd TwoLinkArm::drift(const Eigen::VectorXd& xbar, double t) const {
  Eigen::Vector2d q = xbar.head<2>(), qd = xbar.tail<2>();
  Eigen::Vector2d rhs = -coriolis(q, qd) * qd - gravity_vec(q) + dist_.eval(t, qd);
  return inertia(q).inverse() * rhs;
}

Eigen::MatrixXd TwoLinkArm::input_gain(const Eigen::VectorXd& xbar, double) const {
  Eigen::Vector2d q = xbar.head<2>();
  return inertia(q).inverse();
}

Eigen::Vector2d TwoLinkArm::accel_via_solve(const Eigen::VectorXd& xbar,
                                            const Eigen::VectorXd& u, double t) const {
  Eigen::Vector2d q = xbar.head<2>(), qd = xbar.tail<2>();
  Eigen::Vector2d rhs = u - coriolis(q, qd) * qd - gravity_vec(q) + dist_.eval(t, qd);
  return inertia(q).ldlt().solve(rhs);
}

double TwoLinkArm::kinetic_energy(const Eigen::VectorXd& xbar) const {
  Eigen::Vector2d q = xbar.head<2>(), qd = xbar.tail<2>();
  return 0.5 * qd.dot(inertia(q) * qd);
}

// ---------------------------------------------------------------------------
// Pendulum

Eigen::VectorXd PendulumPlant::drift(const Eigen::VectorXd& xbar, double t) const {
  Eigen::VectorXd f(1);
  f[0] = p_.g0 / p_.L * std::sin(xbar[0]) + dist_.time_part(t)[0];
  return f;
}

// ---------------------------------------------------------------------------
// Unicycle

Eigen::VectorXd UnicyclePlant::xbar(const Eigen::VectorXd& state) const {
  double v = linear_velocity(state);
  double w = angular_velocity(state);
  Eigen::VectorXd xb(6);
  xb << state[0], state[1], state[2], v * std::cos(state[2]), v * std::sin(state[2]), w;
  return xb;
}

Eigen::VectorXd UnicyclePlant::derivative(const Eigen::VectorXd& state,
                                          const Eigen::Vector2d& u, double t) const {
  if (state.size() != kStateDim)
    throw std::invalid_argument("unicycle state must have 7 entries");
  if (!state.allFinite() || !u.allFinite())
    throw std::invalid_argument("unicycle derivative: non-finite input");
  double v = linear_velocity(state);
  double w = angular_velocity(state);
  double phi = state[2];
  Eigen::Vector2d wheel_rates = state.tail<2>();
  Eigen::Vector2d rhs = u + dist_.eval(t, wheel_rates);
  // M = [[M1,M2],[M2,M1]]; closed-form inverse
  double M1 = m1(), M2 = m2();
  double det = M1 * M1 - M2 * M2;
  Eigen::Vector2d thetadd;
  thetadd[0] = (M1 * rhs[0] - M2 * rhs[1]) / det;
  thetadd[1] = (-M2 * rhs[0] + M1 * rhs[1]) / det;
  Eigen::VectorXd out(kStateDim);
  out << v * std::cos(phi), v * std::sin(phi), w, state[5], state[6], thetadd[0], thetadd[1];
  return out;
}

}  // namespace nac
