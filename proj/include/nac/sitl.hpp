#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nac/signal.hpp"

namespace nac::sitl {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Tolerance for deciding whether a grid point lies in a quantifier window.
// Part of the documented sampling semantics; shared by monitor and tests.
inline double time_eps(double bound) {
  return 1e-9 * (1.0 + std::min(std::abs(bound), 1e9));
}
inline bool in_window(double t, double lo, double hi) {
  return t >= lo - time_eps(lo) && t <= hi + time_eps(hi);
}

struct ParseError : std::runtime_error {
  size_t position;
  ParseError(const std::string& msg, size_t pos)
      : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"),
        position(pos) {}
};

struct HorizonError : std::runtime_error {
  double required;
  double available;
  HorizonError(double req, double avail)
      : std::runtime_error("formula horizon " + std::to_string(req) +
                           " s exceeds record end " + std::to_string(avail) + " s"),
        required(req),
        available(avail) {}
};

// Atomic proposition: true at a sample iff h(y) >= 0. The grammar produces
// the two structured forms; arbitrary handles can be built programmatically.
struct Predicate {
  enum class Kind { NormBall, HalfSpace, Custom };

  Kind kind = Kind::Custom;
  std::function<double(const Eigen::VectorXd&)> h;
  std::string description;

  // structured parameters (NormBall: |x-center| <= radius; HalfSpace: a.x + b >= 0)
  Eigen::VectorXd center;
  double radius = 0.0;
  Eigen::VectorXd normal;
  double offset = 0.0;

  static Predicate norm_ball(const Eigen::VectorXd& c, double r);
  static Predicate half_space(const Eigen::VectorXd& a, double b);
  static Predicate custom(std::function<double(const Eigen::VectorXd&)> fn,
                          std::string desc);

  double eval(const Eigen::VectorXd& y) const { return h(y); }
  bool operator==(const Predicate& other) const;
};

// Immutable AST. F and G are constructor sugar and desugar on construction:
//   F[a,b] p  :=  top U[a,b] p
//   G[a,b] p  :=  !(top U[a,b] !p)
class Formula {
 public:
  enum class Kind { True, Pred, Not, And, Until };

  struct Node {
    Kind kind;
    std::optional<Predicate> pred;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
    double a = 0.0;
    double b = 0.0;
  };

  Formula() : node_(true_node()) {}

  static Formula top();
  static Formula pred(Predicate p);
  static Formula negation(Formula f);
  static Formula conjunction(Formula l, Formula r);
  static Formula until(Formula l, Formula r, double a, double b);
  static Formula eventually(double a, double b, Formula f);
  static Formula always(double a, double b, Formula f);

  Kind kind() const { return node_->kind; }
  const Node& node() const { return *node_; }
  std::shared_ptr<const Node> ptr() const { return node_; }

  // Time horizon needed to decide the formula at a given instant.
  double horizon() const;

  bool operator==(const Formula& other) const;

  // Canonical text form; reparses to an equal AST.
  std::string to_string() const;

 private:
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static std::shared_ptr<const Node> true_node();
  std::shared_ptr<const Node> node_;
};

// Parse the documented grammar. Throws ParseError on malformed input and on
// bad intervals (a < 0 or a >= b); `inf` is accepted as the right endpoint
// only under an outermost G (through conjunctions).
Formula parse_formula(const std::string& src);

// Satisfaction of the sampled semantics at time t (snapped to the nearest
// grid point). Quantifiers range over grid points. Throws HorizonError when
// t + horizon exceeds the record, and std::invalid_argument on dimension
// mismatch between signal and predicates.
bool satisfies(const SampledSignal& y, double t, const Formula& phi);

// Verdict table for phi over every grid index whose horizon fits the record.
// Entry -1 means undecidable at that index.
std::vector<signed char> satisfies_all(const SampledSignal& y, const Formula& phi);

struct MonitorReport {
  bool verdict = false;
  double checked_horizon = 0.0;  // largest instant at which outer G obligations were checked
  // one entry per top-level conjunct
  struct Clause {
    std::string text;
    bool verdict = false;
    bool recurrent = false;               // outermost G[.,inf] clause
    std::optional<double> witness_time;   // F witness for the first obligation window
    std::optional<double> violation_time; // first outer instant where a G obligation fails
  };
  std::vector<Clause> clauses;
};

// Evaluate phi at t=0 against a finite record. Top-level conjunctions are
// split; G[a,inf] clauses are checked at every grid point where the inner
// horizon fits (there must be at least one, else HorizonError).
MonitorReport monitor(const SampledSignal& y, const Formula& phi);

}  // namespace nac::sitl
