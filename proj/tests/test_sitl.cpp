#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nac/sitl.hpp"
#include "sitl_oracle.hpp"
#include "test_util.hpp"

using namespace nac;
using namespace nac::testing;
using sitl::Formula;
using sitl::Predicate;

namespace {

SampledSignal zero_signal(int dim, double t_end, double dt) {
  SampledSignal sig;
  int n = static_cast<int>(t_end / dt) + 1;
  sig.times.resize(n);
  for (int i = 0; i < n; ++i) sig.times[i] = i * dt;
  sig.values = Eigen::MatrixXd::Zero(dim, n);
  return sig;
}

}  // namespace

TEST_CASE("parser builds the documented examples") {
  Formula f = sitl::parse_formula("G[0,inf] F[0,20] (norm(x - [0,0]) <= 0.1)");
  Formula expected = Formula::always(
      0.0, sitl::kInf,
      Formula::eventually(0.0, 20.0,
                          Formula::pred(Predicate::norm_ball(Eigen::Vector2d(0, 0), 0.1))));
  CHECK(f == expected);

  CHECK(sitl::parse_formula("top") == Formula::top());

  CHECK_THROWS_AS(sitl::parse_formula("F[2,1] top"), sitl::ParseError);
  CHECK_THROWS_AS(sitl::parse_formula("F[-1,2] top"), sitl::ParseError);
  CHECK_THROWS_AS(sitl::parse_formula("F[0,inf] top"), sitl::ParseError);
  CHECK_THROWS_AS(sitl::parse_formula("! G[0,inf] top"), sitl::ParseError);
  CHECK_THROWS_AS(sitl::parse_formula("G[0,5] G[0,inf] top"), sitl::ParseError);
  CHECK_THROWS_AS(sitl::parse_formula("top &"), sitl::ParseError);
  CHECK_THROWS_AS(sitl::parse_formula("(norm(x - [0,0]) <= )"), sitl::ParseError);

  // conjunction of outermost G's keeps inf legal
  CHECK_NOTHROW(sitl::parse_formula(
      "G[0,inf] (norm(x - [0,0]) <= 1) & G[0,inf] (norm(x - [1,1]) <= 1)"));
  // half-space predicate
  Formula hs = sitl::parse_formula("(dot([1,-2], x) + -0.5 >= 0)");
  CHECK(hs == Formula::pred(Predicate::half_space(Eigen::Vector2d(1, -2), -0.5)));

  // syntax errors report a position
  try {
    sitl::parse_formula("F[0,2] ??");
    CHECK(false);
  } catch (const sitl::ParseError& ex) {
    CHECK(ex.position == 7);
  }
}

TEST_CASE("pretty-printed formulas reparse to an equal AST") {
  RngStream rng(42);
  for (int i = 0; i < 300; ++i) {
    Formula f = random_formula(rng, 1 + static_cast<int>(rng.uniform_index(3)), 2);
    CAPTURE(f.to_string());
    CHECK(sitl::parse_formula(f.to_string()) == f);
  }
  // with an unbounded G on top
  Formula g = Formula::always(0.0, sitl::kInf, random_formula(rng, 2, 2));
  CHECK(sitl::parse_formula(g.to_string()) == g);
}

TEST_CASE("predicate semantics at a sample") {
  SampledSignal y = zero_signal(2, 10.0, 1.0);
  Formula inside = Formula::pred(
      Predicate::custom([](const Eigen::VectorXd& z) { return 1.0 - z.norm(); }, "1-|z|"));
  CHECK(sitl::satisfies(y, 0.0, inside));

  Formula never = Formula::always(
      0.0, 5.0,
      Formula::pred(Predicate::custom([](const Eigen::VectorXd&) { return -1.0; }, "-1")));
  CHECK_FALSE(sitl::satisfies(y, 0.0, never));
}

TEST_CASE("desugaring identities hold as verdict equalities") {
  RngStream rng(7);
  for (int i = 0; i < 200; ++i) {
    SampledSignal y = random_signal(rng, 2, 20);
    double a = rng.uniform(0.0, 1.0);
    double b = a + rng.uniform(0.1, 1.5);
    Formula body = random_formula(rng, 1, 2);
    Formula f_sugar = Formula::eventually(a, b, body);
    Formula f_raw = Formula::until(Formula::top(), body, a, b);
    CHECK(sitl::satisfies(y, 0.0, f_sugar) == sitl::satisfies(y, 0.0, f_raw));

    Formula g_sugar = Formula::always(a, b, body);
    Formula g_raw = Formula::negation(Formula::eventually(a, b, Formula::negation(body)));
    CHECK(sitl::satisfies(y, 0.0, g_sugar) == sitl::satisfies(y, 0.0, g_raw));

    Formula once = random_formula(rng, 2, 2);
    if (once.horizon() <= y.t_end()) {
      Formula twice = Formula::negation(Formula::negation(once));
      CHECK(sitl::satisfies(y, 0.0, once) == sitl::satisfies(y, 0.0, twice));
    }
  }
}

TEST_CASE("verdicts match the brute-force recursion on random pairs") {
  RngStream rng(123);
  int checked = 0;
  for (int i = 0; i < 1000; ++i) {
    SampledSignal y = random_signal(rng, 1 + static_cast<int>(rng.uniform_index(2)), 20);
    Formula f = random_formula(rng, 1 + static_cast<int>(rng.uniform_index(3)), y.dim());
    if (f.horizon() > y.t_end()) continue;  // horizon error path tested separately
    bool impl = sitl::satisfies(y, 0.0, f);
    bool oracle = oracle_satisfies(y, 0, f);
    CAPTURE(f.to_string());
    CHECK(impl == oracle);
    ++checked;
    // also at an interior instant
    int mid = y.size() / 2;
    if (y.times[mid] + f.horizon() <= y.t_end()) {
      CHECK(sitl::satisfies(y, y.times[mid], f) == oracle_satisfies(y, mid, f));
    }
  }
  CHECK(checked > 500);
}

TEST_CASE("horizon excess raises instead of returning false") {
  SampledSignal y = zero_signal(1, 10.0, 0.5);
  Formula far = Formula::eventually(
      0.0, 100.0,
      Formula::pred(Predicate::custom([](const Eigen::VectorXd&) { return 1.0; }, "1")));
  CHECK_THROWS_AS(sitl::satisfies(y, 0.0, far), sitl::HorizonError);
  // would be trivially true if it were evaluated on the truncated record
  Formula ok = Formula::eventually(0.0, 9.0, far);  // nested: horizon 109
  CHECK_THROWS_AS(sitl::satisfies(y, 0.0, ok), sitl::HorizonError);

  auto table = sitl::satisfies_all(y, Formula::eventually(0.0, 4.0, Formula::top()));
  CHECK(table.front() == 1);
  CHECK(table.back() == -1);  // undecidable near the end of the record
}

TEST_CASE("dimension mismatch is rejected") {
  SampledSignal y = zero_signal(1, 5.0, 1.0);
  Formula f = Formula::pred(Predicate::norm_ball(Eigen::Vector2d(0, 0), 1.0));
  CHECK_THROWS_AS(sitl::satisfies(y, 0.0, f), std::invalid_argument);
}

TEST_CASE("monitor handles unbounded G clauses and reports witnesses") {
  // 1-dim signal that dips into the ball around 2 every ~3 s
  SampledSignal y;
  int n = 121;
  y.times.resize(n);
  y.values.resize(1, n);
  for (int i = 0; i < n; ++i) {
    double t = 0.1 * i;
    y.times[i] = t;
    y.values(0, i) = 2.0 * std::abs(std::sin(3.14159265358979 * t / 3.0));
  }
  Formula phi = sitl::parse_formula("G[0,inf] F[0,3] (norm(x - [2]) <= 0.2)");
  auto report = sitl::monitor(y, phi);
  CHECK(report.verdict);
  REQUIRE(report.clauses.size() == 1);
  CHECK(report.clauses[0].recurrent);
  REQUIRE(report.clauses[0].witness_time.has_value());
  CHECK(*report.clauses[0].witness_time <= 3.0);

  Formula bad = sitl::parse_formula("G[0,inf] F[0,3] (norm(x - [5]) <= 0.2)");
  auto report2 = sitl::monitor(y, bad);
  CHECK_FALSE(report2.verdict);
  REQUIRE(report2.clauses[0].violation_time.has_value());
  CHECK(*report2.clauses[0].violation_time == 0.0);

  // record shorter than one inner horizon
  SampledSignal tiny = zero_signal(1, 2.0, 0.1);
  CHECK_THROWS_AS(sitl::monitor(tiny, phi), sitl::HorizonError);
}
