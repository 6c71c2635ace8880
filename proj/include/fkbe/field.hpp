// Jet-evaluable scalar fields and the lifting helpers shared by the
// solution families, operator application and the reductions.
#pragma once

#include "fkbe/jet.hpp"

#include <functional>

namespace fkbe {

using Field1 = std::function<Jetd(const Jetd&)>;
using Field2 = std::function<Jetd(const Jetd&, const Jetd&)>;
using Field3 = std::function<Jetd(const Jetd&, const Jetd&, const Jetd&)>;
using JetMap = std::function<Jetd(const Jetd&)>;

// Taylor jet of f at (a, b) in its own two variables.
inline Jetd taylor2(const Field2& f, double a, double b, int order) {
  Jetd::Point p{a, b, 0.0};
  return f(Jetd::variable(2, order, 0, p), Jetd::variable(2, order, 1, p));
}

inline Jetd taylor3(const Field3& f, double t, double x, double y, int order) {
  Jetd::Point p{t, x, y};
  return f(Jetd::variable(3, order, 0, p), Jetd::variable(3, order, 1, p), Jetd::variable(3, order, 2, p));
}

// op(f) evaluated at jet arguments: f is expanded to order N + extra at the
// values of (a, b), op acts on that Taylor jet (losing at most `extra`
// orders) and the result is composed back with (a, b).
inline Jetd lifted2(const Field2& f, int extra, const JetMap& op, const Jetd& a, const Jetd& b) {
  const int n = a.order();
  Jetd t = op(taylor2(f, a.value(), b.value(), n + extra));
  if (t.order() < n) throw OrderBudgetError("lifted operator consumed more than its declared order budget");
  return compose(t.truncated(n), {a, b});
}

inline Jetd lifted3(const Field3& f, int extra, const JetMap& op, const Jetd& t, const Jetd& x, const Jetd& y) {
  const int n = t.order();
  Jetd j = op(taylor3(f, t.value(), x.value(), y.value(), n + extra));
  if (j.order() < n) throw OrderBudgetError("lifted operator consumed more than its declared order budget");
  return compose(j.truncated(n), {t, x, y});
}

}  // namespace fkbe
