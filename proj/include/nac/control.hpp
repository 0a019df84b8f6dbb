#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "nac/dynamics.hpp"
#include "nac/trajectory.hpp"

namespace nac {

using UnnHandle = std::function<Eigen::VectorXd(const Eigen::VectorXd& xbar, double t)>;

inline UnnHandle zero_unn(int out_dim) {
  return [out_dim](const Eigen::VectorXd&, double) { return Eigen::VectorXd::Zero(out_dim); };
}

struct ControlGains {
  // fully-actuated tracking law
  double k1 = 1.0;
  double k2 = 10.0;
  double k_l1 = 10.0;  // l1-hat adaptation rate (shared with the unicycle law)
  double k_l2 = 10.0;  // l2-hat adaptation rate

  // unicycle law
  double k_d = 0.25;
  double k_beta = 1.0;
  double k_v = 10.0;   // linear-velocity error feedback
  double k_w = 10.0;   // angular-velocity error feedback
  double k_lv = 1.0;   // lv-hat adaptation rate
  double k_lw = 1.0;   // lw-hat adaptation rate

  // boundary layer replacing the unit-vector term near zero error
  double eps_layer = 0.05;

  // unicycle singularity guard
  double e_d_floor = 1e-4;
  double beta_max = 1.4;  // < pi/2

  // initial adaptation values (must be positive)
  double l1_init = 0.1;
  double l2_init = 0.1;
  double lv_init = 0.1;
  double lw_init = 0.1;

  // PD gains of the model-based controller used for data generation
  double kp_nominal = 25.0;
  double kd_nominal = 10.0;
};

// e_v / max(||e_v||, eps): equals the unit vector outside the layer, linear
// inside, and exactly 0 at e_v = 0.
Eigen::VectorXd boundary_layer_unit(const Eigen::VectorXd& e_v, double eps);

// ---------------------------------------------------------------------------
// Fully-actuated law

struct ReferenceVelocity {
  Eigen::VectorXd v_d;
  Eigen::VectorXd v_d_dot;
};

// v_d = pd_dot - k1 e, with v_d_dot = pd_ddot - k1 edot.
ReferenceVelocity reference_velocity(const Eigen::VectorXd& e, const Eigen::VectorXd& edot,
                                     const Eigen::VectorXd& pd_dot,
                                     const Eigen::VectorXd& pd_ddot, double k1);

struct AdaptiveCommand {
  Eigen::VectorXd u;
  Eigen::VectorXd u_nn;
  double l1_dot = 0.0;
  double l2_dot = 0.0;
  Eigen::VectorXd e;
  Eigen::VectorXd e_v;
};

// u = u_nn - k2 e_v - l1 e_v - l2 e_v_hat;  l1' = k_l1 |e_v|^2, l2' = k_l2 |e_v|.
// `e`/`edot` may be reshaped coordinates (the pendulum uses 1 - cos(q - pi)).
AdaptiveCommand adaptive_control(const Eigen::VectorXd& xbar, double t,
                                 const Eigen::VectorXd& e,
                                 const PrefixSuffixTrajectory::State& ref,
                                 const ControlGains& gains, double l1, double l2,
                                 const UnnHandle& u_nn);

// u_c = u_nn - k1 e - k2 edot (no adaptation state).
AdaptiveCommand baseline_nonadaptive(const Eigen::VectorXd& xbar, double t,
                                     const Eigen::VectorXd& e, const Eigen::VectorXd& edot,
                                     const ControlGains& gains, const UnnHandle& u_nn);

// ---------------------------------------------------------------------------
// Unicycle law

struct UnicycleErrors {
  double e1 = 0.0, e2 = 0.0;
  double e_d = 0.0;
  double beta = 0.0;
  bool guarded = false;  // e_d under the floor; beta frozen at last_beta
};

UnicycleErrors unicycle_errors(const Eigen::Vector2d& p, double phi,
                               const Eigen::Vector2d& p_d, double last_beta,
                               const ControlGains& gains);

struct UnicycleReference {
  double v_d = 0.0, w_d = 0.0;
  double v_d_dot = 0.0, w_d_dot = 0.0;
};

// Reference velocities and their analytic time derivatives. `v` and `w` are
// the measured vehicle velocities (they enter through e_d_dot and beta_dot).
UnicycleReference unicycle_reference(const UnicycleErrors& err, double phi,
                                     const Eigen::Vector2d& pd_dot,
                                     const Eigen::Vector2d& pd_ddot, double v, double w,
                                     const ControlGains& gains);

struct UnicycleCommand {
  Eigen::Vector2d u = Eigen::Vector2d::Zero();  // wheel torques [u_R, u_L]
  Eigen::Vector2d u_nn = Eigen::Vector2d::Zero();
  double u_S = 0.0, u_D = 0.0;
  double lv_dot = 0.0, lw_dot = 0.0, l1_dot = 0.0, l2_dot = 0.0;
  double e_v = 0.0, e_w = 0.0;
};

struct UnicycleAdaptiveState {
  double lv = 0.1, lw = 0.1, l1 = 0.1, l2 = 0.1;
};

UnicycleCommand unicycle_control(const Eigen::VectorXd& xbar, double t,
                                 const UnicycleErrors& err, const UnicycleReference& ref,
                                 const ControlGains& gains,
                                 const UnicycleAdaptiveState& adapt, const UnnHandle& u_nn);

// Static-estimate baseline: M_S, M_D replace the adapted lv, lw and the
// sliding/adaptation terms are dropped.
UnicycleCommand unicycle_nonadaptive(const Eigen::VectorXd& xbar, double t,
                                     const UnicycleErrors& err, const UnicycleReference& ref,
                                     const ControlGains& gains, double M_S, double M_D,
                                     const UnnHandle& u_nn);

// lumped wheel gains 2(M1+M2)/r and 2R(M1-M2)/r for given parameters
double unicycle_lv(const UnicycleParams& p);
double unicycle_lw(const UnicycleParams& p);

// ---------------------------------------------------------------------------
// Model-based (computed-torque) controllers for data generation

Eigen::Vector2d nominal_arm_control(const TwoLinkArm& believed, const Eigen::VectorXd& xbar,
                                    const PrefixSuffixTrajectory::State& ref,
                                    const ControlGains& gains);

double nominal_pendulum_control(const PendulumParams& believed, const Eigen::VectorXd& xbar,
                                const PrefixSuffixTrajectory::State& ref,
                                const ControlGains& gains);

Eigen::Vector2d nominal_unicycle_control(const UnicycleParams& believed,
                                         const UnicycleErrors& err,
                                         const UnicycleReference& ref, double v, double w,
                                         const ControlGains& gains);

// ---------------------------------------------------------------------------
// Growth-bound diagnostic

struct AffineBoundFit {
  double d_hat = 0.0;
  double b_hat = 0.0;
  double residual = 0.0;  // max violation of d_hat*|x| + b_hat >= y after the fit
  bool ceiling_flag = false;
  int violations = 0;
};

// Least-squares fit of y ~ d*s + b lifted to dominate all samples
// (s_i = ||xbar_i||, y_i the measured norm).
AffineBoundFit fit_affine_bound(const std::vector<double>& s, const std::vector<double>& y,
                                double d_ceiling);

// Samples ||f + g u_nn|| over a state/time box and fits the affine bound.
AffineBoundFit assumption_diagnostic(const SecondOrderPlant& plant, const UnnHandle& u_nn,
                                     const Eigen::VectorXd& box_lo,
                                     const Eigen::VectorXd& box_hi, double t_max,
                                     int samples, std::uint64_t seed, double d_ceiling);

// ---------------------------------------------------------------------------
// Pendulum benchmark metrics

double pendulum_reward(double q, double qd, double u);

// sum_{t=1..H} gamma^t r[N-H-1+t] over the last H rewards
double pendulum_cost(const std::vector<double>& rewards, int H, double gamma);

}  // namespace nac
