#include "nac/sitl.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <map>
#include <sstream>

namespace nac::sitl {

namespace {

std::string num_to_string(double v) {
  if (v == kInf) return "inf";
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::string vec_to_string(const Eigen::VectorXd& v) {
  std::string s = "[";
  for (int i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += num_to_string(v[i]);
  }
  return s + "]";
}

}  // namespace

// ---------------------------------------------------------------------------
// Predicate

Predicate Predicate::norm_ball(const Eigen::VectorXd& c, double r) {
  Predicate p;
  p.kind = Kind::NormBall;
  p.center = c;
  p.radius = r;
  p.h = [c, r](const Eigen::VectorXd& y) { return r - (y - c).norm(); };
  p.description = "norm(x - " + vec_to_string(c) + ") <= " + num_to_string(r);
  return p;
}

Predicate Predicate::half_space(const Eigen::VectorXd& a, double b) {
  Predicate p;
  p.kind = Kind::HalfSpace;
  p.normal = a;
  p.offset = b;
  p.h = [a, b](const Eigen::VectorXd& y) { return a.dot(y) + b; };
  p.description = "dot(" + vec_to_string(a) + ", x) + " + num_to_string(b) + " >= 0";
  return p;
}

Predicate Predicate::custom(std::function<double(const Eigen::VectorXd&)> fn,
                            std::string desc) {
  Predicate p;
  p.kind = Kind::Custom;
  p.h = std::move(fn);
  p.description = std::move(desc);
  return p;
}

bool Predicate::operator==(const Predicate& other) const {
  if (kind != other.kind) return false;
  switch (kind) {
    case Kind::NormBall:
      return center == other.center && radius == other.radius;
    case Kind::HalfSpace:
      return normal == other.normal && offset == other.offset;
    case Kind::Custom:
      return description == other.description;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Formula construction

std::shared_ptr<const Formula::Node> Formula::true_node() {
  static const auto node = std::make_shared<const Node>(Node{Kind::True, {}, nullptr, nullptr, 0, 0});
  return node;
}

Formula Formula::top() { return Formula(true_node()); }

Formula Formula::pred(Predicate p) {
  return Formula(std::make_shared<const Node>(
      Node{Kind::Pred, std::move(p), nullptr, nullptr, 0, 0}));
}

Formula Formula::negation(Formula f) {
  return Formula(std::make_shared<const Node>(
      Node{Kind::Not, {}, f.node_, nullptr, 0, 0}));
}

Formula Formula::conjunction(Formula l, Formula r) {
  return Formula(std::make_shared<const Node>(
      Node{Kind::And, {}, l.node_, r.node_, 0, 0}));
}

Formula Formula::until(Formula l, Formula r, double a, double b) {
  if (a < 0 || !(b > a))
    throw std::invalid_argument("until: interval must satisfy 0 <= a < b");
  return Formula(std::make_shared<const Node>(
      Node{Kind::Until, {}, l.node_, r.node_, a, b}));
}

Formula Formula::eventually(double a, double b, Formula f) {
  return until(top(), std::move(f), a, b);
}

Formula Formula::always(double a, double b, Formula f) {
  return negation(eventually(a, b, negation(std::move(f))));
}

double Formula::horizon() const {
  std::function<double(const Node&)> rec = [&](const Node& n) -> double {
    switch (n.kind) {
      case Kind::True:
      case Kind::Pred:
        return 0.0;
      case Kind::Not:
        return rec(*n.lhs);
      case Kind::And:
        return std::max(rec(*n.lhs), rec(*n.rhs));
      case Kind::Until:
        return n.b + std::max(rec(*n.lhs), rec(*n.rhs));
    }
    return 0.0;
  };
  return rec(*node_);
}

bool Formula::operator==(const Formula& other) const {
  std::function<bool(const Node&, const Node&)> eq = [&](const Node& a,
                                                         const Node& b) -> bool {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
      case Kind::True:
        return true;
      case Kind::Pred:
        return *a.pred == *b.pred;
      case Kind::Not:
        return eq(*a.lhs, *b.lhs);
      case Kind::And:
        return eq(*a.lhs, *b.lhs) && eq(*a.rhs, *b.rhs);
      case Kind::Until:
        return a.a == b.a && a.b == b.b && eq(*a.lhs, *b.lhs) && eq(*a.rhs, *b.rhs);
    }
    return false;
  };
  return eq(*node_, *other.node_);
}

// ---------------------------------------------------------------------------
// Printing (emits F/G sugar where the node shape matches)

namespace {

using Node = Formula::Node;

bool is_f_pattern(const Node& n) {
  return n.kind == Formula::Kind::Until && n.lhs->kind == Formula::Kind::True;
}

// G[a,b] psi  ==  !(top U[a,b] !psi)
const Node* g_pattern_body(const Node& n) {
  if (n.kind != Formula::Kind::Not) return nullptr;
  const Node& u = *n.lhs;
  if (!is_f_pattern(u)) return nullptr;
  if (u.rhs->kind != Formula::Kind::Not) return nullptr;
  return u.rhs->lhs.get();
}

std::string interval_to_string(double a, double b) {
  return "[" + num_to_string(a) + "," + num_to_string(b) + "]";
}

std::string print_node(const Node& n);

// operand of a unary operator or of U/&: parenthesize the loose binders
std::string print_arg(const Node& n, bool paren_until, bool paren_and) {
  bool needs_paren = false;
  if (g_pattern_body(n) == nullptr && n.kind == Formula::Kind::Until && !is_f_pattern(n))
    needs_paren = paren_until;
  if (is_f_pattern(n)) needs_paren = paren_until;  // F binds like U for safety
  if (n.kind == Formula::Kind::And) needs_paren = paren_and;
  std::string s = print_node(n);
  return needs_paren ? "(" + s + ")" : s;
}

std::string print_node(const Node& n) {
  if (const Node* body = g_pattern_body(n)) {
    const Node& u = *n.lhs;
    return "G" + interval_to_string(u.a, u.b) + " " + print_arg(*body, true, true);
  }
  switch (n.kind) {
    case Formula::Kind::True:
      return "top";
    case Formula::Kind::Pred:
      return "(" + n.pred->description + ")";
    case Formula::Kind::Not:
      return "! " + print_arg(*n.lhs, true, true);
    case Formula::Kind::And:
      // left-associative chain prints flat; right-nested And needs parens
      return print_arg(*n.lhs, true, false) + " & " + print_arg(*n.rhs, true, true);
    case Formula::Kind::Until:
      if (is_f_pattern(n))
        return "F" + interval_to_string(n.a, n.b) + " " + print_arg(*n.rhs, true, true);
      return print_arg(*n.lhs, true, true) + " U" + interval_to_string(n.a, n.b) + " " +
             print_arg(*n.rhs, true, true);
  }
  return "top";
}

}  // namespace

std::string Formula::to_string() const { return print_node(*node_); }

// ---------------------------------------------------------------------------
// Parser

namespace {

struct Token {
  enum class Type { Ident, Number, Symbol, End };
  Type type = Type::End;
  std::string text;
  double value = 0.0;
  size_t pos = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
    tok_ = Token{};
    tok_.pos = i_;
    if (i_ >= src_.size()) {
      tok_.type = Token::Type::End;
      return;
    }
    char c = src_[i_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i_;
      while (j < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[j])) || src_[j] == '_'))
        ++j;
      tok_.type = Token::Type::Ident;
      tok_.text = src_.substr(i_, j - i_);
      i_ = j;
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = src_.c_str() + i_;
      char* end = nullptr;
      tok_.value = std::strtod(begin, &end);
      tok_.type = Token::Type::Number;
      tok_.text.assign(begin, static_cast<size_t>(end - begin));
      i_ += static_cast<size_t>(end - begin);
      return;
    }
    if (c == '<' || c == '>') {
      if (i_ + 1 < src_.size() && src_[i_ + 1] == '=') {
        tok_.type = Token::Type::Symbol;
        tok_.text = src_.substr(i_, 2);
        i_ += 2;
        return;
      }
      throw ParseError("unexpected character '" + std::string(1, c) + "'", i_);
    }
    static const std::string singles = "!&()[],+-";
    if (singles.find(c) != std::string::npos) {
      tok_.type = Token::Type::Symbol;
      tok_.text = std::string(1, c);
      ++i_;
      return;
    }
    throw ParseError("unexpected character '" + std::string(1, c) + "'", i_);
  }

  const std::string& src_;
  size_t i_ = 0;
  Token tok_;
};

class Parser {
 public:
  explicit Parser(const std::string& src) : lex_(src) {}

  Formula parse() {
    Formula f = parse_conj(true);
    if (lex_.peek().type != Token::Type::End)
      throw ParseError("trailing input after formula", lex_.peek().pos);
    return f;
  }

 private:
  // `outermost` is true while we are still above nothing but conjunctions;
  // only there may a G interval use inf.
  Formula parse_conj(bool outermost) {
    Formula f = parse_until(outermost);
    while (is_symbol("&")) {
      lex_.take();
      f = Formula::conjunction(f, parse_until(outermost));
    }
    return f;
  }

  Formula parse_until(bool outermost) {
    Formula f = parse_unary(outermost);
    if (is_ident("U")) {
      size_t pos = lex_.peek().pos;
      lex_.take();
      auto [a, b] = parse_interval(false, pos);
      f = Formula::until(f, parse_unary(false), a, b);
    }
    return f;
  }

  Formula parse_unary(bool outermost) {
    const Token& t = lex_.peek();
    if (is_symbol("!")) {
      lex_.take();
      return Formula::negation(parse_unary(false));
    }
    if (is_ident("F")) {
      size_t pos = t.pos;
      lex_.take();
      auto [a, b] = parse_interval(false, pos);
      return Formula::eventually(a, b, parse_unary(false));
    }
    if (is_ident("G")) {
      size_t pos = t.pos;
      lex_.take();
      auto [a, b] = parse_interval(outermost, pos);
      return Formula::always(a, b, parse_unary(false));
    }
    if (is_ident("top")) {
      lex_.take();
      return Formula::top();
    }
    if (is_symbol("(")) {
      lex_.take();
      Formula inner = is_ident("norm") || is_ident("dot")
                          ? Formula::pred(parse_predicate())
                          : parse_conj(outermost);
      expect_symbol(")");
      return inner;
    }
    throw ParseError("expected formula", t.pos);
  }

  Predicate parse_predicate() {
    if (is_ident("norm")) {
      lex_.take();
      expect_symbol("(");
      expect_ident("x");
      expect_symbol("-");
      Eigen::VectorXd c = parse_vector();
      expect_symbol(")");
      expect_symbol("<=");
      double r = parse_number();
      return Predicate::norm_ball(c, r);
    }
    expect_ident("dot");
    expect_symbol("(");
    Eigen::VectorXd a = parse_vector();
    expect_symbol(",");
    expect_ident("x");
    expect_symbol(")");
    expect_symbol("+");
    double b = parse_number();
    expect_symbol(">=");
    size_t pos = lex_.peek().pos;
    double rhs = parse_number();
    if (rhs != 0.0)
      throw ParseError("half-space predicate must compare against 0", pos);
    return Predicate::half_space(a, b);
  }

  Eigen::VectorXd parse_vector() {
    expect_symbol("[");
    std::vector<double> vals;
    vals.push_back(parse_number());
    while (is_symbol(",")) {
      lex_.take();
      vals.push_back(parse_number());
    }
    expect_symbol("]");
    return Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<int>(vals.size()));
  }

  std::pair<double, double> parse_interval(bool allow_inf, size_t op_pos) {
    expect_symbol("[");
    double a = parse_number();
    expect_symbol(",");
    double b;
    if (is_ident("inf")) {
      if (!allow_inf)
        throw ParseError("inf endpoint only allowed under the outermost G", lex_.peek().pos);
      lex_.take();
      b = kInf;
    } else {
      b = parse_number();
    }
    expect_symbol("]");
    if (a < 0 || !(b > a))
      throw ParseError("interval error: need 0 <= a < b", op_pos);
    return {a, b};
  }

  double parse_number() {
    double sign = 1.0;
    if (is_symbol("-")) {
      lex_.take();
      sign = -1.0;
    }
    const Token& t = lex_.peek();
    if (t.type != Token::Type::Number)
      throw ParseError("expected number", t.pos);
    return sign * lex_.take().value;
  }

  bool is_symbol(const char* s) const {
    return lex_.peek().type == Token::Type::Symbol && lex_.peek().text == s;
  }
  bool is_ident(const char* s) const {
    return lex_.peek().type == Token::Type::Ident && lex_.peek().text == s;
  }
  void expect_symbol(const char* s) {
    if (!is_symbol(s)) throw ParseError(std::string("expected '") + s + "'", lex_.peek().pos);
    lex_.take();
  }
  void expect_ident(const char* s) {
    if (!is_ident(s)) throw ParseError(std::string("expected '") + s + "'", lex_.peek().pos);
    lex_.take();
  }

  Lexer lex_;
};

}  // namespace

Formula parse_formula(const std::string& src) { return Parser(src).parse(); }

// ---------------------------------------------------------------------------
// Evaluation. Each subformula is evaluated bottom-up into a verdict table
// over all grid indices; windows that run past the record are truncated, and
// validity is decided by the static horizon rule at the query point.

namespace {

class Evaluator {
 public:
  explicit Evaluator(const SampledSignal& y) : y_(y) { y_.validate(); }

  const std::vector<std::uint8_t>& table(const Node& n) {
    auto it = memo_.find(&n);
    if (it != memo_.end()) return it->second;
    std::vector<std::uint8_t> out(static_cast<size_t>(y_.size()), 0);
    const int N = y_.size();
    switch (n.kind) {
      case Formula::Kind::True:
        std::fill(out.begin(), out.end(), 1);
        break;
      case Formula::Kind::Pred: {
        check_dims(*n.pred);
        for (int i = 0; i < N; ++i) out[i] = n.pred->eval(y_.at(i)) >= 0.0 ? 1 : 0;
        break;
      }
      case Formula::Kind::Not: {
        const auto& c = table(*n.lhs);
        for (int i = 0; i < N; ++i) out[i] = c[i] ? 0 : 1;
        break;
      }
      case Formula::Kind::And: {
        const auto& l = table(*n.lhs);
        const auto& r = table(*n.rhs);
        for (int i = 0; i < N; ++i) out[i] = (l[i] && r[i]) ? 1 : 0;
        break;
      }
      case Formula::Kind::Until: {
        const auto& l = table(*n.lhs);
        const auto& r = table(*n.rhs);
        // first index >= i where lhs is false / rhs is true
        std::vector<int> first_lhs_false(N + 1, N), first_rhs_true(N + 1, N);
        for (int i = N - 1; i >= 0; --i) {
          first_lhs_false[i] = l[i] ? first_lhs_false[i + 1] : i;
          first_rhs_true[i] = r[i] ? i : first_rhs_true[i + 1];
        }
        for (int i = 0; i < N; ++i) {
          int jlo = window_low(i, n.a);
          int jhi = window_high(i, n.b);
          if (jlo >= N || jlo > jhi) continue;
          int j = first_rhs_true[jlo];
          // earliest witness is optimal: lhs must hold on [i..j]
          out[i] = (j <= jhi && j < first_lhs_false[i]) ? 1 : 0;
        }
        break;
      }
    }
    return memo_.emplace(&n, std::move(out)).first->second;
  }

  // first grid index with t_j >= t_i + a (within tolerance)
  int window_low(int i, double a) const {
    double lo = y_.times[i] + a;
    auto it = std::lower_bound(y_.times.begin(), y_.times.end(), lo - time_eps(lo));
    return static_cast<int>(it - y_.times.begin());
  }

  // last grid index with t_j <= t_i + b (within tolerance); -1 if none
  int window_high(int i, double b) const {
    if (b == kInf) return y_.size() - 1;
    double hi = y_.times[i] + b;
    auto it = std::upper_bound(y_.times.begin(), y_.times.end(), hi + time_eps(hi));
    return static_cast<int>(it - y_.times.begin()) - 1;
  }

  int snap_index(double t) const {
    const auto& ts = y_.times;
    if (t < ts.front() - time_eps(t) || t > ts.back() + time_eps(t))
      throw std::invalid_argument("evaluation time outside the record");
    auto it = std::lower_bound(ts.begin(), ts.end(), t);
    if (it == ts.end()) return y_.size() - 1;
    int i = static_cast<int>(it - ts.begin());
    if (i > 0 && t - ts[i - 1] < ts[i] - t) --i;
    return i;
  }

 private:
  void check_dims(const Predicate& p) const {
    int want = -1;
    if (p.kind == Predicate::Kind::NormBall) want = static_cast<int>(p.center.size());
    if (p.kind == Predicate::Kind::HalfSpace) want = static_cast<int>(p.normal.size());
    if (want >= 0 && want != y_.dim())
      throw std::invalid_argument("predicate dimension " + std::to_string(want) +
                                  " does not match signal dimension " +
                                  std::to_string(y_.dim()));
  }

  const SampledSignal& y_;
  std::map<const Node*, std::vector<std::uint8_t>> memo_;
};

}  // namespace

bool satisfies(const SampledSignal& y, double t, const Formula& phi) {
  Evaluator ev(y);
  int i = ev.snap_index(t);
  double h = phi.horizon();
  double need = y.times[i] + h;
  if (!(need <= y.t_end() + time_eps(need))) throw HorizonError(need, y.t_end());
  return ev.table(phi.node())[i] != 0;
}

std::vector<signed char> satisfies_all(const SampledSignal& y, const Formula& phi) {
  Evaluator ev(y);
  const auto& tab = ev.table(phi.node());
  double h = phi.horizon();
  std::vector<signed char> out(tab.size(), -1);
  for (size_t i = 0; i < tab.size(); ++i) {
    double need = y.times[i] + h;
    if (need <= y.t_end() + time_eps(need)) out[i] = tab[i] ? 1 : 0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Monitoring with clause reports

namespace {

void collect_conjuncts(std::shared_ptr<const Node> n,
                       std::vector<std::shared_ptr<const Node>>& out) {
  if (n->kind == Formula::Kind::And) {
    collect_conjuncts(n->lhs, out);
    collect_conjuncts(n->rhs, out);
  } else {
    out.push_back(n);
  }
}

// G[a,inf] body: Not(Until(True, Not(body), a, inf))
struct RecurrentClause {
  const Node* body = nullptr;
  double a = 0.0;
};

std::optional<RecurrentClause> match_recurrent(const Node& n) {
  if (n.kind != Formula::Kind::Not) return std::nullopt;
  const Node& u = *n.lhs;
  if (u.kind != Formula::Kind::Until || u.b != kInf) return std::nullopt;
  if (u.lhs->kind != Formula::Kind::True) return std::nullopt;
  if (u.rhs->kind != Formula::Kind::Not) return std::nullopt;
  return RecurrentClause{u.rhs->lhs.get(), u.a};
}

double node_horizon(const Node& n) {
  std::function<double(const Node&)> rec = [&](const Node& m) -> double {
    switch (m.kind) {
      case Formula::Kind::True:
      case Formula::Kind::Pred:
        return 0.0;
      case Formula::Kind::Not:
        return rec(*m.lhs);
      case Formula::Kind::And:
        return std::max(rec(*m.lhs), rec(*m.rhs));
      case Formula::Kind::Until:
        return m.b + std::max(rec(*m.lhs), rec(*m.rhs));
    }
    return 0.0;
  };
  return rec(n);
}

}  // namespace

MonitorReport monitor(const SampledSignal& y, const Formula& phi) {
  Evaluator ev(y);
  MonitorReport report;
  report.verdict = true;
  report.checked_horizon = y.t_end();

  std::vector<std::shared_ptr<const Node>> clauses;
  collect_conjuncts(phi.ptr(), clauses);

  for (const auto& cptr : clauses) {
    const Node& c = *cptr;
    MonitorReport::Clause clause;
    clause.text = print_node(c);

    auto find_f_witness = [&](const Node& f_node, int from_idx) -> std::optional<double> {
      if (!is_f_pattern(f_node)) return std::nullopt;
      const auto& rhs = ev.table(*f_node.rhs);
      int jlo = ev.window_low(from_idx, f_node.a);
      int jhi = ev.window_high(from_idx, f_node.b);
      for (int j = jlo; j <= jhi && j < y.size(); ++j)
        if (rhs[j]) return y.times[j];
      return std::nullopt;
    };

    if (auto rec = match_recurrent(c)) {
      clause.recurrent = true;
      double h = node_horizon(*rec->body);
      const auto& body_tab = ev.table(*rec->body);
      int checked = 0;
      bool ok = true;
      double last_checked = 0.0;
      for (int i = 0; i < y.size(); ++i) {
        double ti = y.times[i];
        if (ti < rec->a - time_eps(rec->a)) continue;
        double need = ti + h;
        if (!(need <= y.t_end() + time_eps(need))) break;
        ++checked;
        last_checked = ti;
        if (!body_tab[i] && ok) {
          ok = false;
          clause.violation_time = ti;
        }
      }
      if (checked == 0) throw HorizonError(rec->a + h, y.t_end());
      clause.verdict = ok;
      clause.witness_time = find_f_witness(*rec->body, 0);
      report.checked_horizon = std::min(report.checked_horizon, last_checked);
    } else {
      double h = node_horizon(c);
      double need = y.t_begin() + h;
      if (!(need <= y.t_end() + time_eps(need))) throw HorizonError(need, y.t_end());
      clause.verdict = ev.table(c)[0] != 0;
      clause.witness_time = find_f_witness(c, 0);
      if (const Node* body = g_pattern_body(c)) {
        // bounded G: report first violating instant in [a,b]
        const auto& tab = ev.table(*body);
        const Node& u = *c.lhs;
        int jlo = ev.window_low(0, u.a);
        int jhi = ev.window_high(0, u.b);
        for (int j = jlo; j <= jhi && j < y.size(); ++j)
          if (!tab[j]) {
            clause.violation_time = y.times[j];
            break;
          }
      }
    }
    report.verdict = report.verdict && clause.verdict;
    report.clauses.push_back(std::move(clause));
  }
  return report;
}

}  // namespace nac::sitl
