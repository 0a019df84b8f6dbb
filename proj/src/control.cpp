#include "nac/control.hpp"

#include <cmath>

#include "nac/rng.hpp"

namespace nac {

Eigen::VectorXd boundary_layer_unit(const Eigen::VectorXd& e_v, double eps) {
  double n = e_v.norm();
  if (n == 0.0) return Eigen::VectorXd::Zero(e_v.size());
  return e_v / std::max(n, eps);
}

// ---------------------------------------------------------------------------
// Fully-actuated law

ReferenceVelocity reference_velocity(const Eigen::VectorXd& e, const Eigen::VectorXd& edot,
                                     const Eigen::VectorXd& pd_dot,
                                     const Eigen::VectorXd& pd_ddot, double k1) {
  ReferenceVelocity out;
  out.v_d = pd_dot - k1 * e;
  out.v_d_dot = pd_ddot - k1 * edot;
  return out;
}

AdaptiveCommand adaptive_control(const Eigen::VectorXd& xbar, double t,
                                 const Eigen::VectorXd& e,
                                 const PrefixSuffixTrajectory::State& ref,
                                 const ControlGains& gains, double l1, double l2,
                                 const UnnHandle& u_nn) {
  const int n = static_cast<int>(e.size());
  AdaptiveCommand cmd;
  cmd.e = e;
  Eigen::VectorXd v_d = ref.vel - gains.k1 * e;
  cmd.e_v = xbar.tail(n) - v_d;
  cmd.u_nn = u_nn(xbar, t);
  Eigen::VectorXd ev_hat = boundary_layer_unit(cmd.e_v, gains.eps_layer);
  cmd.u = cmd.u_nn - gains.k2 * cmd.e_v - l1 * cmd.e_v - l2 * ev_hat;
  double ev_norm = cmd.e_v.norm();
  cmd.l1_dot = gains.k_l1 * ev_norm * ev_norm;
  cmd.l2_dot = gains.k_l2 * ev_norm;
  return cmd;
}

AdaptiveCommand baseline_nonadaptive(const Eigen::VectorXd& xbar, double t,
                                     const Eigen::VectorXd& e, const Eigen::VectorXd& edot,
                                     const ControlGains& gains, const UnnHandle& u_nn) {
  AdaptiveCommand cmd;
  cmd.e = e;
  cmd.e_v = edot;  // logged in place of the backstepping error
  cmd.u_nn = u_nn(xbar, t);
  cmd.u = cmd.u_nn - gains.k1 * e - gains.k2 * edot;
  return cmd;
}

// ---------------------------------------------------------------------------
// Unicycle law

UnicycleErrors unicycle_errors(const Eigen::Vector2d& p, double phi,
                               const Eigen::Vector2d& p_d, double last_beta,
                               const ControlGains& gains) {
  UnicycleErrors err;
  err.e1 = p[0] - p_d[0];
  err.e2 = p[1] - p_d[1];
  err.e_d = std::hypot(err.e1, err.e2);
  if (err.e_d < gains.e_d_floor) {
    err.beta = last_beta;
    err.guarded = true;
  } else {
    double s = err.e1 * std::sin(phi) - err.e2 * std::cos(phi);   // e_d sin(beta)
    double c = -err.e1 * std::cos(phi) - err.e2 * std::sin(phi);  // e_d cos(beta)
    err.beta = std::atan2(s, c);
  }
  return err;
}

UnicycleReference unicycle_reference(const UnicycleErrors& err, double phi,
                                     const Eigen::Vector2d& pd_dot,
                                     const Eigen::Vector2d& pd_ddot, double v, double w,
                                     const ControlGains& gains) {
  // clamp beta away from +-pi/2 so sec/tan stay bounded
  double beta = std::clamp(err.beta, -gains.beta_max, gains.beta_max);
  double cb = std::cos(beta), sb = std::sin(beta);
  double sec = 1.0 / cb, tanb = sb / cb;
  double cpb = std::cos(phi + beta), spb = std::sin(phi + beta);
  double inv_ed = err.guarded ? 0.0 : 1.0 / err.e_d;

  UnicycleReference ref;
  double A = pd_dot[0] * cpb + pd_dot[1] * spb + gains.k_d * err.e_d;
  ref.v_d = sec * A;
  double N = -pd_dot[0] * std::sin(phi) + pd_dot[1] * std::cos(phi);
  ref.w_d = N * inv_ed * sec + gains.k_d * tanb + gains.k_beta * beta;

  double ed_dot = -v * cb + pd_dot[0] * cpb + pd_dot[1] * spb;
  double beta_dot =
      err.guarded ? 0.0 : -w + (v * sb - pd_dot[0] * spb + pd_dot[1] * cpb) * inv_ed;
  double phi_dot = w;

  double A_dot = pd_ddot[0] * cpb + pd_ddot[1] * spb +
                 (phi_dot + beta_dot) * (-pd_dot[0] * spb + pd_dot[1] * cpb) +
                 gains.k_d * ed_dot;
  ref.v_d_dot = sec * A_dot + A * sec * tanb * beta_dot;

  double N_dot = -pd_ddot[0] * std::sin(phi) + pd_ddot[1] * std::cos(phi) -
                 phi_dot * (pd_dot[0] * std::cos(phi) + pd_dot[1] * std::sin(phi));
  ref.w_d_dot = N_dot * inv_ed * sec - N * ed_dot * inv_ed * inv_ed * sec +
                N * inv_ed * sec * tanb * beta_dot + gains.k_d * sec * sec * beta_dot +
                gains.k_beta * beta_dot;
  return ref;
}

namespace {

double scalar_layer(double e, double eps) {
  if (e == 0.0) return 0.0;
  return e / std::max(std::abs(e), eps);
}

Eigen::Vector2d wheel_torques(double u_S, double u_D) {
  return Eigen::Vector2d(0.5 * (u_S + u_D), 0.5 * (u_S - u_D));
}

}  // namespace

UnicycleCommand unicycle_control(const Eigen::VectorXd& xbar, double t,
                                 const UnicycleErrors& err, const UnicycleReference& ref,
                                 const ControlGains& gains,
                                 const UnicycleAdaptiveState& adapt, const UnnHandle& u_nn) {
  UnicycleCommand cmd;
  double v = xbar[3] * std::cos(xbar[2]) + xbar[4] * std::sin(xbar[2]);
  double w = xbar[5];
  cmd.e_v = v - ref.v_d;
  cmd.e_w = w - ref.w_d;
  double ev_hat = scalar_layer(cmd.e_v, gains.eps_layer);
  double ew_hat = scalar_layer(cmd.e_w, gains.eps_layer);
  double beta = err.beta;
  double cross = err.guarded ? 0.0 : beta * std::sin(beta) / err.e_d;

  cmd.u_S = adapt.lv * ref.v_d_dot - (gains.k_v + adapt.l1) * cmd.e_v - adapt.l2 * ev_hat +
            err.e_d * std::cos(beta) - cross;
  cmd.u_D = adapt.lw * ref.w_d_dot - (gains.k_w + adapt.l1) * cmd.e_w - adapt.l2 * ew_hat + beta;
  cmd.u_nn = u_nn(xbar, t);
  cmd.u = wheel_torques(cmd.u_S, cmd.u_D) + cmd.u_nn;

  cmd.lv_dot = -gains.k_lv * cmd.e_v * ref.v_d_dot;
  cmd.lw_dot = -gains.k_lw * cmd.e_w * ref.w_d_dot;
  cmd.l1_dot = gains.k_l1 * (cmd.e_v * cmd.e_v + cmd.e_w * cmd.e_w);
  cmd.l2_dot = gains.k_l2 * (std::abs(cmd.e_v) + std::abs(cmd.e_w));
  return cmd;
}

UnicycleCommand unicycle_nonadaptive(const Eigen::VectorXd& xbar, double t,
                                     const UnicycleErrors& err, const UnicycleReference& ref,
                                     const ControlGains& gains, double M_S, double M_D,
                                     const UnnHandle& u_nn) {
  UnicycleCommand cmd;
  double v = xbar[3] * std::cos(xbar[2]) + xbar[4] * std::sin(xbar[2]);
  double w = xbar[5];
  cmd.e_v = v - ref.v_d;
  cmd.e_w = w - ref.w_d;
  double beta = err.beta;
  double cross = err.guarded ? 0.0 : beta * std::sin(beta) / err.e_d;

  cmd.u_S = M_S * ref.v_d_dot - gains.k_v * cmd.e_v + err.e_d * std::cos(beta) - cross;
  cmd.u_D = M_D * ref.w_d_dot - gains.k_w * cmd.e_w + beta;
  cmd.u_nn = u_nn(xbar, t);
  cmd.u = wheel_torques(cmd.u_S, cmd.u_D) + cmd.u_nn;
  return cmd;
}

double unicycle_lv(const UnicycleParams& p) {
  UnicyclePlant plant(p, DisturbanceModel::zero(2));
  return 2.0 * (plant.m1() + plant.m2()) / p.r;
}

double unicycle_lw(const UnicycleParams& p) {
  UnicyclePlant plant(p, DisturbanceModel::zero(2));
  return 2.0 * p.R * (plant.m1() - plant.m2()) / p.r;
}

// ---------------------------------------------------------------------------
// Computed-torque controllers (training-data generation)

Eigen::Vector2d nominal_arm_control(const TwoLinkArm& believed, const Eigen::VectorXd& xbar,
                                    const PrefixSuffixTrajectory::State& ref,
                                    const ControlGains& gains) {
  Eigen::Vector2d q = xbar.head<2>(), qd = xbar.tail<2>();
  Eigen::Vector2d qdd_cmd = ref.acc + gains.kp_nominal * (ref.pos - q).eval() +
                            gains.kd_nominal * (ref.vel - qd).eval();
  return believed.inertia(q) * qdd_cmd + believed.coriolis(q, qd) * qd +
         believed.gravity_vec(q);
}

double nominal_pendulum_control(const PendulumParams& believed, const Eigen::VectorXd& xbar,
                                const PrefixSuffixTrajectory::State& ref,
                                const ControlGains& gains) {
  double q = xbar[0], qd = xbar[1];
  double qdd_cmd = ref.acc[0] + gains.kp_nominal * (ref.pos[0] - q) +
                   gains.kd_nominal * (ref.vel[0] - qd);
  return qdd_cmd - believed.g0 / believed.L * std::sin(q);
}

Eigen::Vector2d nominal_unicycle_control(const UnicycleParams& believed,
                                         const UnicycleErrors& err,
                                         const UnicycleReference& ref, double v, double w,
                                         const ControlGains& gains) {
  double lv = unicycle_lv(believed);
  double lw = unicycle_lw(believed);
  double u_S = lv * (ref.v_d_dot - gains.k_v * (v - ref.v_d));
  double u_D = lw * (ref.w_d_dot - gains.k_w * (w - ref.w_d));
  (void)err;
  return wheel_torques(u_S, u_D);
}

// ---------------------------------------------------------------------------
// Growth-bound diagnostic

AffineBoundFit fit_affine_bound(const std::vector<double>& s, const std::vector<double>& y,
                                double d_ceiling) {
  AffineBoundFit fit;
  const size_t n = s.size();
  if (n == 0 || y.size() != n) throw std::invalid_argument("fit_affine_bound: bad samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += s[i];
    sy += y[i];
    sxx += s[i] * s[i];
    sxy += s[i] * y[i];
  }
  double denom = n * sxx - sx * sx;
  double slope = std::abs(denom) > 1e-12 ? (n * sxy - sx * sy) / denom : 0.0;
  fit.d_hat = std::max(slope, 0.0);
  double intercept = (sy - fit.d_hat * sx) / static_cast<double>(n);
  // lift the intercept so the line dominates every sample
  double lift = 0.0;
  for (size_t i = 0; i < n; ++i)
    lift = std::max(lift, y[i] - (fit.d_hat * s[i] + intercept));
  fit.b_hat = std::max(intercept + lift, 0.0);
  for (size_t i = 0; i < n; ++i) {
    double gap = y[i] - (fit.d_hat * s[i] + fit.b_hat);
    if (gap > 1e-9) {
      ++fit.violations;
      fit.residual = std::max(fit.residual, gap);
    }
  }
  fit.ceiling_flag = fit.d_hat > d_ceiling;
  return fit;
}

AffineBoundFit assumption_diagnostic(const SecondOrderPlant& plant, const UnnHandle& u_nn,
                                     const Eigen::VectorXd& box_lo,
                                     const Eigen::VectorXd& box_hi, double t_max,
                                     int samples, std::uint64_t seed, double d_ceiling) {
  RngStream rng = RngStream::keyed(seed, 0xD1A6ull);
  std::vector<double> s(samples), y(samples);
  const int dim = static_cast<int>(box_lo.size());
  for (int i = 0; i < samples; ++i) {
    Eigen::VectorXd xbar(dim);
    for (int d = 0; d < dim; ++d) xbar[d] = rng.uniform(box_lo[d], box_hi[d]);
    double t = rng.uniform(0.0, t_max);
    Eigen::VectorXd f = plant.drift(xbar, t);
    Eigen::VectorXd total = f + plant.input_gain(xbar, t) * u_nn(xbar, t);
    s[i] = xbar.norm();
    y[i] = total.norm();
  }
  return fit_affine_bound(s, y, d_ceiling);
}

// ---------------------------------------------------------------------------
// Pendulum metrics

double pendulum_reward(double q, double qd, double u) {
  return -std::cos(q) - 0.1 * std::sin(q) - 0.1 * qd - 0.001 * u * u;
}

double pendulum_cost(const std::vector<double>& rewards, int H, double gamma) {
  if (H < 1 || gamma <= 0.0 || gamma > 1.0)
    throw std::invalid_argument("pendulum_cost: need H >= 1 and gamma in (0,1]");
  if (static_cast<int>(rewards.size()) < H)
    throw std::invalid_argument("pendulum_cost: fewer rewards than the window");
  double J = 0.0;
  double g = 1.0;
  size_t base = rewards.size() - static_cast<size_t>(H);
  for (int t = 1; t <= H; ++t) {
    g *= gamma;
    J += g * rewards[base + static_cast<size_t>(t - 1)];
  }
  return J;
}

}  // namespace nac
