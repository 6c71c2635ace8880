#pragma once

#include "fkbe/field.hpp"

#include <string>

namespace fkbe {

// A function u(t, x, y), evaluable on jets, with a declared singular locus.
struct SolutionExpr {
  std::string name;
  Field3 fn;
  std::function<bool(double, double, double)> regular;  // empty: regular everywhere
  std::string locus;                                    // human-readable singular locus

  void check(double t, double x, double y) const {
    if (regular && !regular(t, x, y))
      throw DomainError(name + ": point (" + std::to_string(t) + ", " + std::to_string(x) + ", " + std::to_string(y) +
                        ") lies on the singular locus " + locus);
  }

  Jetd operator()(const Jetd& t, const Jetd& x, const Jetd& y) const {
    check(t.value(), x.value(), y.value());
    return fn(t, x, y);
  }

  Jetd jet(double t, double x, double y, int order) const {
    check(t, x, y);
    return taylor3(fn, t, x, y, order);
  }

  double value(double t, double x, double y) const { return jet(t, x, y, 0).value(); }
};

}  // namespace fkbe
