#pragma once

// Brute-force reference for the sampled SITL semantics: a direct transcription
// of the recursive definition with explicit loops. Kept deliberately naive and
// independent of the production evaluator.

#include "nac/sitl.hpp"

namespace nac::testing {

inline bool oracle_eval(const SampledSignal& y, int i, const sitl::Formula::Node& n) {
  using K = sitl::Formula::Kind;
  switch (n.kind) {
    case K::True:
      return true;
    case K::Pred:
      return n.pred->eval(y.at(i)) >= 0.0;
    case K::Not:
      return !oracle_eval(y, i, *n.lhs);
    case K::And:
      return oracle_eval(y, i, *n.lhs) && oracle_eval(y, i, *n.rhs);
    case K::Until: {
      // exists t1 in [t+a, t+b]: rhs holds at t1 and lhs holds on [t, t1]
      for (int j = i; j < y.size(); ++j) {
        if (!sitl::in_window(y.times[j], y.times[i] + n.a, y.times[i] + n.b)) continue;
        if (!oracle_eval(y, j, *n.rhs)) continue;
        bool lhs_all = true;
        for (int k = i; k <= j; ++k)
          if (!oracle_eval(y, k, *n.lhs)) {
            lhs_all = false;
            break;
          }
        if (lhs_all) return true;
      }
      return false;
    }
  }
  return false;
}

inline bool oracle_satisfies(const SampledSignal& y, int i, const sitl::Formula& phi) {
  return oracle_eval(y, i, phi.node());
}

}  // namespace nac::testing
