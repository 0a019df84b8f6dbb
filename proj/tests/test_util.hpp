#pragma once

#include <Eigen/Dense>

#include "nac/rng.hpp"
#include "nac/signal.hpp"
#include "nac/sitl.hpp"

namespace nac::testing {

inline SampledSignal random_signal(RngStream& rng, int dim, int points, double max_step = 0.5) {
  SampledSignal sig;
  sig.times.resize(points);
  sig.values.resize(dim, points);
  double t = 0.0;
  for (int i = 0; i < points; ++i) {
    sig.times[i] = t;
    t += rng.uniform(0.05, max_step);
    for (int d = 0; d < dim; ++d) sig.values(d, i) = rng.uniform(-1.5, 1.5);
  }
  return sig;
}

inline sitl::Predicate random_predicate(RngStream& rng, int dim) {
  if (rng.uniform() < 0.5) {
    Eigen::VectorXd c(dim);
    for (int d = 0; d < dim; ++d) c[d] = rng.uniform(-1.0, 1.0);
    return sitl::Predicate::norm_ball(c, rng.uniform(0.2, 1.5));
  }
  Eigen::VectorXd a(dim);
  for (int d = 0; d < dim; ++d) a[d] = rng.uniform(-1.0, 1.0);
  return sitl::Predicate::half_space(a, rng.uniform(-0.5, 0.5));
}

// Random formula with nesting depth <= depth; interval bounds kept small so
// horizons fit short records.
inline sitl::Formula random_formula(RngStream& rng, int depth, int dim) {
  using sitl::Formula;
  if (depth == 0) {
    if (rng.uniform() < 0.1) return Formula::top();
    return Formula::pred(random_predicate(rng, dim));
  }
  double a = rng.uniform(0.0, 1.0);
  double b = a + rng.uniform(0.1, 1.2);
  switch (rng.uniform_index(6)) {
    case 0:
      return Formula::pred(random_predicate(rng, dim));
    case 1:
      return Formula::negation(random_formula(rng, depth - 1, dim));
    case 2:
      return Formula::conjunction(random_formula(rng, depth - 1, dim),
                                  random_formula(rng, depth - 1, dim));
    case 3:
      return Formula::until(random_formula(rng, depth - 1, dim),
                            random_formula(rng, depth - 1, dim), a, b);
    case 4:
      return Formula::eventually(a, b, random_formula(rng, depth - 1, dim));
    default:
      return Formula::always(a, b, random_formula(rng, depth - 1, dim));
  }
}

}  // namespace nac::testing
