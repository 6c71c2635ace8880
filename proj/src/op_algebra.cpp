#include "fkbe/op_algebra.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace fkbe {

int OpPoly::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

Rational OpPoly::coeff(const OpMonomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rational(0) : it->second;
}

void OpPoly::add(const OpMonomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, fresh] = terms_.emplace(m, c);
  if (!fresh) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

OpPoly& OpPoly::operator+=(const OpPoly& o) {
  for (const auto& [m, c] : o.terms_) add(m, c);
  return *this;
}

OpPoly& OpPoly::operator-=(const OpPoly& o) {
  for (const auto& [m, c] : o.terms_) add(m, -c);
  return *this;
}

OpPoly& OpPoly::operator*=(const Rational& s) {
  if (s == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, c] : terms_) c *= s;
  return *this;
}

namespace {

// Left multiplication of a normal-form polynomial by one generator. The
// closed forms follow from the rewrite rules:
//   D K^a P^b   = K^a P^b (D + a - b)
//   P K^a       = K^a P + K^{a-1} (2a D + a(a-1))
OpPoly left_mul(int gen, const OpPoly& q) {
  OpPoly r;
  for (const auto& [m, c] : q.terms()) {
    const int a = m.k, b = m.py, d = m.d;
    switch (gen) {
      case 0:
        r.add({a + 1, b, d}, c);
        break;
      case 1:
        r.add({a, b + 1, d}, c);
        if (a > 0) {
          r.add({a - 1, b, d + 1}, c * (2 * a));
          r.add({a - 1, b, d}, c * (a * a - a - 2 * a * b));
        }
        break;
      case 2:
        r.add({a, b, d + 1}, c);
        r.add({a, b, d}, c * (a - b));
        break;
    }
  }
  return r;
}

}  // namespace

OpPoly operator*(const OpPoly& p, const OpPoly& q) {
  OpPoly out;
  for (const auto& [m, c] : p.terms()) {
    OpPoly acc = q;
    for (int i = 0; i < m.d; ++i) acc = left_mul(2, acc);
    for (int i = 0; i < m.py; ++i) acc = left_mul(1, acc);
    for (int i = 0; i < m.k; ++i) acc = left_mul(0, acc);
    out += acc * c;
  }
  return out;
}

OpPoly op_multiply(const OpPoly& p, const OpPoly& q) { return p * q; }

OpPoly op_pow(const OpPoly& p, int n) {
  if (n < 0) throw std::invalid_argument("negative operator power");
  OpPoly r(Rational(1));
  for (int i = 0; i < n; ++i) r = r * p;
  return r;
}

OpPoly commutator(const OpPoly& p, const OpPoly& q) { return p * q - q * p; }

OpPoly casimir() {
  OpPoly c;
  c.add({0, 0, 2}, 1);
  c.add({0, 0, 1}, -1);
  c.add({1, 1, 0}, -1);
  return c;
}

OpPoly lemma_product(int n) {
  if (n < 0) throw std::invalid_argument("lemma_product: n must be non-negative");
  const OpPoly pk = OpPoly::gen_Py() * OpPoly::gen_K();
  OpPoly acc(Rational(1));
  for (int k = 1; k <= n; ++k) {
    OpPoly factor = pk + OpPoly::gen_D() * Rational(2 * k) + OpPoly(Rational(k * k + k));
    acc = acc * factor;
  }
  return acc * OpPoly::gen_Py();
}

OpPoly lemma_rhs(int n) {
  if (n < 0) throw std::invalid_argument("lemma_rhs: n must be non-negative");
  return op_pow(OpPoly::gen_Py(), n + 1) * op_pow(OpPoly::gen_K(), n);
}

OpPoly normal_order(const Word& w, RewriteStrategy s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::map<Word, Rational> pending{{w, Rational(1)}};
  OpPoly out;
  while (!pending.empty()) {
    auto it = pending.begin();
    if (s == RewriteStrategy::Random) {
      std::uniform_int_distribution<std::size_t> pick(0, pending.size() - 1);
      std::advance(it, pick(rng));
    }
    Word word = it->first;
    Rational c = it->second;
    pending.erase(it);
    if (c == 0) continue;
    std::vector<std::size_t> bad;
    for (std::size_t i = 0; i + 1 < word.size(); ++i)
      if (word[i] > word[i + 1]) bad.push_back(i);
    if (bad.empty()) {
      OpMonomial m;
      for (auto l : word) (l == 0 ? m.k : l == 1 ? m.py : m.d)++;
      out.add(m, c);
      continue;
    }
    std::size_t i = bad.front();
    if (s == RewriteStrategy::Rightmost) i = bad.back();
    if (s == RewriteStrategy::Random) i = bad[std::uniform_int_distribution<std::size_t>(0, bad.size() - 1)(rng)];
    const std::uint8_t a = word[i], b = word[i + 1];
    auto emit = [&](std::vector<std::uint8_t> mid, const Rational& f) {
      Word nw(word.begin(), word.begin() + i);
      nw.insert(nw.end(), mid.begin(), mid.end());
      nw.insert(nw.end(), word.begin() + i + 2, word.end());
      pending[nw] += c * f;
    };
    emit({b, a}, 1);
    if (a == 1 && b == 0) emit({2}, 2);       // P K = K P + 2D
    else if (a == 2 && b == 0) emit({0}, 1);  // D K = K D + K
    else emit({1}, -1);                       // D P = P D - P
  }
  return out;
}

namespace {

struct Parser {
  const std::string& s;
  std::size_t i = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("operator syntax error at column " + std::to_string(i + 1) + ": " + what + " in '" +
                                s + "'");
  }
  void skip() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool eat(char c) {
    skip();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }
  bool at_end() {
    skip();
    return i >= s.size();
  }

  OpPoly expr() {
    OpPoly r = term();
    for (;;) {
      if (eat('+')) r += term();
      else if (eat('-')) r -= term();
      else return r;
    }
  }
  OpPoly term() {
    bool neg = false;
    while (true) {
      if (eat('-')) neg = !neg;
      else if (!eat('+')) break;
    }
    OpPoly r = power();
    while (eat('*')) r = r * power();
    return neg ? r * Rational(-1) : r;
  }
  OpPoly power() {
    OpPoly base = primary();
    if (eat('^')) {
      skip();
      std::size_t start = i;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      if (start == i) fail("expected a non-negative integer exponent");
      return op_pow(base, std::stoi(s.substr(start, i - start)));
    }
    return base;
  }
  OpPoly primary() {
    skip();
    if (i >= s.size()) fail("unexpected end of input");
    if (eat('(')) {
      OpPoly r = expr();
      if (!eat(')')) fail("expected ')'");
      return r;
    }
    if (s.compare(i, 2, "Py") == 0) {
      i += 2;
      return OpPoly::gen_Py();
    }
    if (s[i] == 'D') {
      ++i;
      return OpPoly::gen_D();
    }
    if (s[i] == 'K') {
      ++i;
      return OpPoly::gen_K();
    }
    if (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.') {
      std::size_t start = i;
      while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.')) ++i;
      Rational v = parse_rational(s.substr(start, i - start));
      skip();
      // a slash directly after a number is part of the scalar
      if (i < s.size() && s[i] == '/') {
        ++i;
        skip();
        std::size_t d0 = i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        if (d0 == i) fail("expected a denominator");
        Rational den = parse_rational(s.substr(d0, i - d0));
        if (den == 0) fail("zero denominator");
        v /= den;
      }
      return OpPoly(v);
    }
    fail(std::string("unexpected character '") + s[i] + "'");
  }
};

bool graded_before(const OpMonomial& a, const OpMonomial& b) {
  if (a.degree() != b.degree()) return a.degree() > b.degree();
  return std::tie(a.k, a.py, a.d) > std::tie(b.k, b.py, b.d);
}

std::string monomial_text(const OpMonomial& m) {
  std::string out;
  auto part = [&](const char* g, int e) {
    if (!e) return;
    if (!out.empty()) out += "*";
    out += g;
    if (e > 1) out += "^" + std::to_string(e);
  };
  part("K", m.k);
  part("Py", m.py);
  part("D", m.d);
  return out;
}

}  // namespace

OpPoly parse_op(const std::string& text) {
  Parser p{text};
  if (p.at_end()) throw std::invalid_argument("empty operator expression");
  OpPoly r = p.expr();
  if (!p.at_end()) p.fail("trailing input");
  return r;
}

std::string to_string(const OpPoly& p) {
  if (p.is_zero()) return "0";
  std::vector<std::pair<OpMonomial, Rational>> t(p.terms().begin(), p.terms().end());
  std::sort(t.begin(), t.end(), [](const auto& a, const auto& b) { return graded_before(a.first, b.first); });
  std::string out;
  for (const auto& [m, c0] : t) {
    Rational c = c0;
    const bool neg = c < 0;
    if (neg) c = -c;
    if (out.empty()) {
      if (neg) out += "-";
    } else {
      out += neg ? " - " : " + ";
    }
    const std::string mono = monomial_text(m);
    if (mono.empty()) out += format_rational(c);
    else if (c == 1) out += mono;
    else out += format_rational(c) + "*" + mono;
  }
  return out;
}

int ConcreteOperator::degree() const {
  int d = 0;
  for (const auto& [c, w] : terms) {
    int k = 0;
    for (Letter l : w) k += l == Letter::L ? 2 : 1;
    d = std::max(d, k);
  }
  return d;
}

ConcreteOperator operator*(const ConcreteOperator& a, const ConcreteOperator& b) {
  ConcreteOperator r;
  for (const auto& [ca, wa] : a.terms)
    for (const auto& [cb, wb] : b.terms) {
      std::vector<Letter> w = wa;
      w.insert(w.end(), wb.begin(), wb.end());
      r.terms.emplace_back(ca * cb, std::move(w));
    }
  return r;
}

ConcreteOperator operator+(ConcreteOperator a, const ConcreteOperator& b) {
  a.terms.insert(a.terms.end(), b.terms.begin(), b.terms.end());
  return a;
}

ConcreteOperator operator*(const Rational& s, ConcreteOperator a) {
  for (auto& t : a.terms) t.first *= s;
  return a;
}

ConcreteOperator identity_operator() { return ConcreteOperator{{{Rational(1), {}}}}; }

ConcreteOperator realize(Letter g) { return ConcreteOperator{{{Rational(1), {g}}}}; }

ConcreteOperator realize(const OpPoly& p) {
  ConcreteOperator r;
  for (const auto& [m, c] : p.terms()) {
    std::vector<Letter> w;
    w.insert(w.end(), m.k, Letter::K);
    w.insert(w.end(), m.py, Letter::Py);
    w.insert(w.end(), m.d, Letter::D);
    r.terms.emplace_back(c, std::move(w));
  }
  return r;
}

namespace {

Jetd apply_letter(Letter l, const Jetd& f) {
  if (f.arity() != 3) throw std::invalid_argument("concrete operators act on jets in (t, x, y)");
  const int n = f.order();
  const int need = l == Letter::L ? 2 : 1;
  if (n < need)
    throw OrderBudgetError("operator application needs jet order >= " + std::to_string(need) + ", have " +
                           std::to_string(n));
  const auto& p = f.base();
  Jetd x = Jetd::variable(3, n - 1, 1, p), y = Jetd::variable(3, n - 1, 2, p);
  switch (l) {
    case Letter::Py: return f.partial(2);
    case Letter::Pt: return f.partial(0);
    case Letter::D: return x * f.partial(1) + y * f.partial(2);
    case Letter::K: return 2.0 * x * y * f.partial(1) + y * y * f.partial(2) + x * f.truncated(n - 1);
    case Letter::L: {
      Jetd x2 = Jetd::variable(3, n - 2, 1, p);
      return f.partial(0).truncated(n - 2) + x2 * f.partial(2).truncated(n - 2) - x2 * x2 * f.partial(1).partial(1);
    }
  }
  throw std::logic_error("unknown letter");
}

}  // namespace

Jetd apply(const ConcreteOperator& op, const Jetd& f) {
  const int out_order = f.order() - op.degree();
  if (out_order < 0)
    throw OrderBudgetError("operator of degree " + std::to_string(op.degree()) + " applied to a jet of order " +
                           std::to_string(f.order()));
  Jetd acc(3, out_order, f.base());
  for (const auto& [c, w] : op.terms) {
    Jetd g = f;
    for (auto it = w.rbegin(); it != w.rend(); ++it) g = apply_letter(*it, g);
    acc += g.truncated(out_order) * to_double(c);
  }
  return acc;
}

Jetd apply(const ConcreteOperator& op, const SolutionExpr& f, double t, double x, double y, int out_order) {
  return apply(op, f.jet(t, x, y, op.degree() + out_order));
}

SolutionExpr apply_to_solution(const ConcreteOperator& op, const SolutionExpr& f, std::string name) {
  SolutionExpr r;
  r.name = name.empty() ? "op(" + f.name + ")" : std::move(name);
  r.regular = f.regular;
  r.locus = f.locus;
  const int extra = op.degree();
  Field3 inner = f.fn;
  r.fn = [op, inner, extra](const Jetd& t, const Jetd& x, const Jetd& y) {
    return lifted3(inner, extra, [&op](const Jetd& j) { return apply(op, j); }, t, x, y);
  };
  return r;
}

std::vector<OpMonomial> monomials_up_to(int degree) {
  std::vector<OpMonomial> out;
  for (int d = 0; d <= degree; ++d)
    for (int a = d; a >= 0; --a)
      for (int b = d - a; b >= 0; --b) out.push_back({a, b, d - a - b});
  return out;
}

IndependenceReport symbol_independence_test(int max_degree, int samples, std::uint64_t seed, bool duplicate_column) {
  if (max_degree < 0 || max_degree > 4) throw std::invalid_argument("symbol_independence_test: max degree must be 0..4");
  auto monos = monomials_up_to(max_degree);
  std::vector<ConcreteOperator> ops;
  for (const auto& m : monos) ops.push_back(realize(OpPoly(m)));
  if (duplicate_column) ops.push_back(ops.back());
  const int cols = static_cast<int>(ops.size());
  if (samples < cols)
    throw std::invalid_argument("symbol_independence_test: " + std::to_string(samples) + " samples for " +
                                std::to_string(cols) + " monomials");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd a(samples, cols);
  for (int s = 0; s < samples; ++s) {
    const double x = u(rng), y = u(rng), mu = u(rng), nu = u(rng);
    Jetd::Point p{0.0, x, y};
    Jetd e = exp(mu * Jetd::variable(3, max_degree, 1, p) + nu * Jetd::variable(3, max_degree, 2, p));
    for (int c = 0; c < cols; ++c) a(s, c) = apply(ops[c], e.truncated(max_degree)).value() / e.value();
  }
  for (int c = 0; c < cols; ++c) a.col(c).normalize();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  IndependenceReport r;
  r.monomials = cols;
  r.samples = samples;
  r.max_singular = svd.singularValues()(0);
  r.min_singular = svd.singularValues()(cols - 1);
  r.independent = r.min_singular > 1e-8;
  return r;
}

}  // namespace fkbe
