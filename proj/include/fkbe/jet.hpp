// Truncated multivariate Taylor jets.
//
// A Jet<Scalar> of arity n and order N stores the normalized Taylor
// coefficients c_a = (d^a f)(p) / a! for every multi-index |a| <= N, in
// graded order. Arithmetic truncates at N; elementary functions are applied
// by composing their univariate series with the jet minus its value.
#pragma once

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace fkbe {

using MultiIndex = std::array<int, 3>;

struct OrderBudgetError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Index tables shared by every jet of a given shape.
struct JetLayout {
  int arity = 0;
  int order = 0;
  std::vector<MultiIndex> index;   // position -> multi-index
  std::vector<int> lookup;         // dense (order+1)^arity grid -> position, -1 if out of budget
  std::vector<std::tuple<int, int, int>> products;  // (i, j, k): e_i * e_j contributes to e_k

  int position(const MultiIndex& a) const {
    int key = 0;
    for (int v = 0; v < arity; ++v) {
      if (a[v] < 0 || a[v] > order) return -1;
      key = key * (order + 1) + a[v];
    }
    return lookup[key];
  }
  int size() const { return static_cast<int>(index.size()); }

  static const JetLayout& get(int arity, int order) {
    if (arity < 1 || arity > 3) throw std::invalid_argument("jet arity must be 1, 2 or 3");
    if (order < 0) throw std::invalid_argument("jet order must be non-negative");
    static std::mutex mu;
    static std::vector<std::unique_ptr<JetLayout>> cache;
    std::lock_guard<std::mutex> lock(mu);
    for (auto& l : cache)
      if (l->arity == arity && l->order == order) return *l;
    cache.push_back(std::make_unique<JetLayout>(build(arity, order)));
    return *cache.back();
  }

 private:
  static JetLayout build(int arity, int order) {
    JetLayout l;
    l.arity = arity;
    l.order = order;
    int grid = 1;
    for (int v = 0; v < arity; ++v) grid *= order + 1;
    l.lookup.assign(grid, -1);
    // graded, lexicographically descending inside each degree
    for (int d = 0; d <= order; ++d) {
      for (int a0 = d; a0 >= 0; --a0) {
        if (arity == 1) {
          if (a0 == d) l.index.push_back({a0, 0, 0});
          continue;
        }
        for (int a1 = d - a0; a1 >= 0; --a1) {
          int a2 = d - a0 - a1;
          if (arity == 2 && a2 != 0) continue;
          if (arity == 2) {
            l.index.push_back({a0, a1, 0});
          } else {
            l.index.push_back({a0, a1, a2});
          }
        }
      }
    }
    for (int i = 0; i < l.size(); ++i) {
      int key = 0;
      for (int v = 0; v < arity; ++v) key = key * (order + 1) + l.index[i][v];
      l.lookup[key] = i;
    }
    for (int i = 0; i < l.size(); ++i)
      for (int j = 0; j < l.size(); ++j) {
        MultiIndex s{l.index[i][0] + l.index[j][0], l.index[i][1] + l.index[j][1],
                     l.index[i][2] + l.index[j][2]};
        int k = l.position(s);
        if (k >= 0) l.products.emplace_back(i, j, k);
      }
    return l;
  }
};

inline int degree(const MultiIndex& a) { return a[0] + a[1] + a[2]; }

template <class Scalar>
class Jet {
 public:
  using Coeffs = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Point = std::array<Scalar, 3>;

  Jet() = default;
  Jet(int arity, int order, Point base = {})
      : layout_(&JetLayout::get(arity, order)), base_(base), c_(Coeffs::Zero(layout_->size())) {}

  static Jet constant(int arity, int order, const Scalar& value, Point base = {}) {
    Jet j(arity, order, base);
    j.c_[0] = value;
    return j;
  }

  // The coordinate function z_which, expanded at base.
  static Jet variable(int arity, int order, int which, Point base) {
    if (which < 0 || which >= arity) throw std::invalid_argument("jet variable index out of range");
    Jet j(arity, order, base);
    j.c_[0] = base[which];
    if (order >= 1) {
      MultiIndex e{0, 0, 0};
      e[which] = 1;
      j.c_[j.layout_->position(e)] = Scalar(1);
    }
    return j;
  }

  int arity() const { return layout_->arity; }
  int order() const { return layout_->order; }
  const Point& base() const { return base_; }
  const JetLayout& layout() const { return *layout_; }
  const Coeffs& coeffs() const { return c_; }
  Coeffs& coeffs() { return c_; }

  const Scalar& value() const { return c_[0]; }

  Scalar coeff(const MultiIndex& a) const {
    int k = checked_position(a);
    return c_[k];
  }
  void set_coeff(const MultiIndex& a, const Scalar& v) { c_[checked_position(a)] = v; }

  // d^a f at the base point (coefficient times a!).
  Scalar derivative(const MultiIndex& a) const {
    Scalar v = coeff(a);
    for (int n : a)
      for (int k = 2; k <= n; ++k) v *= Scalar(k);
    return v;
  }

  // Jet of the partial derivative along `var`, one order lower.
  Jet partial(int var) const {
    if (order() == 0) throw OrderBudgetError("partial derivative of an order-0 jet");
    Jet r(arity(), order() - 1, base_);
    for (int i = 0; i < r.layout_->size(); ++i) {
      MultiIndex a = r.layout_->index[i];
      a[var] += 1;
      r.c_[i] = c_[layout_->position(a)] * Scalar(a[var]);
    }
    return r;
  }

  Jet truncated(int new_order) const {
    if (new_order > order()) throw OrderBudgetError("cannot raise jet order from " + std::to_string(order()) + " to " + std::to_string(new_order));
    Jet r(arity(), new_order, base_);
    for (int i = 0; i < r.layout_->size(); ++i) r.c_[i] = c_[i];
    return r;
  }

  // Same coefficients viewed as a jet of higher arity (extra variables absent).
  Jet promoted(int new_arity, Point base) const {
    Jet r(new_arity, order(), base);
    for (int i = 0; i < layout_->size(); ++i) r.c_[r.layout_->position(layout_->index[i])] = c_[i];
    return r;
  }

  Jet operator-() const {
    Jet r = *this;
    r.c_ = -c_;
    return r;
  }

  Jet& operator+=(const Jet& o) {
    check_compatible(o);
    c_ += o.c_;
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    check_compatible(o);
    c_ -= o.c_;
    return *this;
  }
  Jet& operator*=(const Jet& o) {
    *this = *this * o;
    return *this;
  }
  Jet& operator+=(const Scalar& s) {
    c_[0] += s;
    return *this;
  }
  Jet& operator-=(const Scalar& s) {
    c_[0] -= s;
    return *this;
  }
  Jet& operator*=(const Scalar& s) {
    c_ *= s;
    return *this;
  }
  Jet& operator/=(const Scalar& s) {
    c_ /= s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator+(Jet a, const Scalar& s) { return a += s; }
  friend Jet operator+(const Scalar& s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, const Scalar& s) { return a -= s; }
  friend Jet operator-(const Scalar& s, const Jet& a) { return -a + s; }
  friend Jet operator*(Jet a, const Scalar& s) { return a *= s; }
  friend Jet operator*(const Scalar& s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, const Scalar& s) { return a /= s; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    a.check_compatible(b);
    Jet r(a.arity(), a.order(), a.base_);
    for (const auto& [i, j, k] : a.layout_->products) r.c_[k] += a.c_[i] * b.c_[j];
    return r;
  }

  void check_compatible(const Jet& o) const {
    if (layout_ != o.layout_)
      throw std::invalid_argument("jet shape mismatch: arity/order " + std::to_string(arity()) + "/" +
                                  std::to_string(order()) + " vs " + std::to_string(o.arity()) + "/" +
                                  std::to_string(o.order()));
  }

 private:
  int checked_position(const MultiIndex& a) const {
    if (degree(a) > order())
      throw OrderBudgetError("derivative of total order " + std::to_string(degree(a)) +
                             " requested from a jet of order " + std::to_string(order()));
    int k = layout_->position(a);
    if (k < 0) throw std::invalid_argument("multi-index outside the jet's variables");
    return k;
  }

  const JetLayout* layout_ = nullptr;
  Point base_{};
  Coeffs c_;
};

// sum_k s[k] * d^k by Horner, where d has zero constant term.
template <class Scalar>
Jet<Scalar> horner(const std::vector<Scalar>& s, const Jet<Scalar>& d) {
  Jet<Scalar> r = Jet<Scalar>::constant(d.arity(), d.order(), s.back(), d.base());
  for (int k = static_cast<int>(s.size()) - 2; k >= 0; --k) r = r * d + s[k];
  return r;
}

// f(g_1, ..., g_k): f is a Taylor jet in k variables expanded at the values
// of the g_i; result has the shape of the g_i.
template <class Scalar>
Jet<Scalar> compose(const Jet<Scalar>& f, const std::vector<Jet<Scalar>>& g) {
  if (static_cast<int>(g.size()) != f.arity()) throw std::invalid_argument("compose: argument count mismatch");
  const int n = g.front().order();
  if (f.order() < n) throw OrderBudgetError("compose: outer jet order " + std::to_string(f.order()) + " below " + std::to_string(n));
  std::vector<std::vector<Jet<Scalar>>> pw(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) {
    Jet<Scalar> d = g[v];
    d.coeffs()[0] = Scalar(0);
    pw[v].push_back(Jet<Scalar>::constant(d.arity(), n, Scalar(1), d.base()));
    for (int k = 1; k <= n; ++k) pw[v].push_back(pw[v].back() * d);
  }
  Jet<Scalar> r(g.front().arity(), n, g.front().base());
  const auto& L = f.layout();
  for (int i = 0; i < L.size(); ++i) {
    const MultiIndex& a = L.index[i];
    if (degree(a) > n || f.coeffs()[i] == Scalar(0)) continue;
    Jet<Scalar> term = pw[0][a[0]];
    for (int v = 1; v < f.arity(); ++v)
      if (a[v]) term = term * pw[v][a[v]];
    r += term * f.coeffs()[i];
  }
  return r;
}

namespace detail {

template <class Scalar>
Jet<Scalar> apply_series(const Jet<Scalar>& a, const std::vector<Scalar>& s) {
  Jet<Scalar> d = a;
  d.coeffs()[0] = Scalar(0);
  return horner(s, d);
}

// Taylor coefficients of 1/p for a univariate series p with p[0] != 0.
template <class Scalar>
std::vector<Scalar> series_reciprocal(const std::vector<Scalar>& p, int n) {
  std::vector<Scalar> q(n + 1, Scalar(0));
  q[0] = Scalar(1) / p[0];
  for (int k = 1; k <= n; ++k) {
    Scalar acc(0);
    for (int j = 1; j <= k && j < static_cast<int>(p.size()); ++j) acc += p[j] * q[k - j];
    q[k] = -acc / p[0];
  }
  return q;
}

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

// Elementary functions, floating-point scalars only.

template <class Scalar>
Jet<Scalar> exp(const Jet<Scalar>& a) {
  const int n = a.order();
  std::vector<Scalar> s(n + 1);
  s[0] = std::exp(a.value());
  for (int k = 1; k <= n; ++k) s[k] = s[k - 1] / Scalar(k);
  return detail::apply_series(a, s);
}

template <class Scalar>
Jet<Scalar> log(const Jet<Scalar>& a) {
  const Scalar x = a.value();
  if (!(x > 0)) throw DomainError("log: argument " + detail::fmt(x) + " is not positive");
  const int n = a.order();
  std::vector<Scalar> s(n + 1);
  s[0] = std::log(x);
  Scalar p = x;
  for (int k = 1; k <= n; ++k, p *= x) s[k] = (k % 2 ? Scalar(1) : Scalar(-1)) / (Scalar(k) * p);
  return detail::apply_series(a, s);
}

// a^r for real r; non-integer r needs a > 0, negative integers need a != 0.
template <class Scalar>
Jet<Scalar> pow(const Jet<Scalar>& a, Scalar r) {
  const Scalar x = a.value();
  const bool integral = r == std::round(r);
  if (!integral && !(x > 0))
    throw DomainError("pow: base " + detail::fmt(x) + " must be positive for exponent " + detail::fmt(r));
  if (integral && r < 0 && x == 0) throw DomainError("pow: zero base with negative exponent " + detail::fmt(r));
  const int n = a.order();
  std::vector<Scalar> s(n + 1);
  if (x == 0) {
    // non-negative integer power of a jet vanishing at the base
    Jet<Scalar> r_jet = Jet<Scalar>::constant(a.arity(), n, Scalar(1), a.base());
    for (int k = 0; k < static_cast<int>(r); ++k) r_jet = r_jet * a;
    return r_jet;
  }
  s[0] = std::pow(x, r);
  for (int k = 1; k <= n; ++k) s[k] = s[k - 1] * (r - Scalar(k - 1)) / (Scalar(k) * x);
  return detail::apply_series(a, s);
}

template <class Scalar>
Jet<Scalar> sqrt(const Jet<Scalar>& a) {
  if (!(a.value() > 0)) throw DomainError("sqrt: argument " + detail::fmt(a.value()) + " is not positive");
  return pow(a, Scalar(0.5));
}

template <class Scalar>
Jet<Scalar> recip(const Jet<Scalar>& a) {
  if (a.value() == 0) throw DomainError("recip: argument is zero");
  return pow(a, Scalar(-1));
}

template <class Scalar>
Jet<Scalar> operator/(const Jet<Scalar>& a, const Jet<Scalar>& b) {
  return a * recip(b);
}

template <class Scalar>
Jet<Scalar> operator/(const Scalar& s, const Jet<Scalar>& b) {
  return recip(b) * s;
}

template <class Scalar>
Jet<Scalar> sin(const Jet<Scalar>& a) {
  const int n = a.order();
  std::vector<Scalar> s(n + 1);
  const Scalar sv = std::sin(a.value()), cv = std::cos(a.value());
  Scalar f(1);
  for (int k = 0; k <= n; ++k) {
    if (k) f *= Scalar(k);
    const Scalar d[4] = {sv, cv, -sv, -cv};
    s[k] = d[k % 4] / f;
  }
  return detail::apply_series(a, s);
}

template <class Scalar>
Jet<Scalar> cos(const Jet<Scalar>& a) {
  const int n = a.order();
  std::vector<Scalar> s(n + 1);
  const Scalar sv = std::sin(a.value()), cv = std::cos(a.value());
  Scalar f(1);
  for (int k = 0; k <= n; ++k) {
    if (k) f *= Scalar(k);
    const Scalar d[4] = {cv, -sv, -cv, sv};
    s[k] = d[k % 4] / f;
  }
  return detail::apply_series(a, s);
}

template <class Scalar>
Jet<Scalar> atan(const Jet<Scalar>& a) {
  const int n = a.order();
  const Scalar x = a.value();
  // atan' = 1 / (1 + (x + h)^2)
  auto q = detail::series_reciprocal<Scalar>({Scalar(1) + x * x, Scalar(2) * x, Scalar(1)}, n);
  std::vector<Scalar> s(n + 1);
  s[0] = std::atan(x);
  for (int k = 1; k <= n; ++k) s[k] = q[k - 1] / Scalar(k);
  return detail::apply_series(a, s);
}

// |a| on the branch of the base value.
template <class Scalar>
Jet<Scalar> abs(const Jet<Scalar>& a) {
  if (a.value() == 0) throw DomainError("abs: argument is zero (branch undefined)");
  return a.value() > 0 ? a : -a;
}

template <class Scalar>
Scalar sign_of(const Jet<Scalar>& a) {
  if (a.value() == 0) throw DomainError("sign: argument is zero");
  return a.value() > 0 ? Scalar(1) : Scalar(-1);
}

using Jetd = Jet<double>;

}  // namespace fkbe
