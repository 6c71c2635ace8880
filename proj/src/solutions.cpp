#include "fkbe/solutions.hpp"

#include <cmath>
#include <stdexcept>

namespace fkbe {

Residual make_residual(double raw, double scale) {
  Residual r;
  r.raw = raw;
  r.scale = scale;
  r.relative = scale == 0 ? (raw == 0 ? 0.0 : std::abs(raw)) : std::abs(raw) / scale;
  return r;
}

Residual residual(const PlaneSolution& w, double z1, double z2) {
  Jetd j = w.jet(z1, z2, 2);
  const double w1 = j.derivative({1, 0, 0});
  const double w22 = j.derivative({0, 2, 0});
  double pot = 0;
  if (w.mu_tilde != 0) {
    if (z2 == 0) throw DomainError(w.name + ": inverse-square residual at z2 = 0");
    pot = w.mu_tilde * j.value() / (z2 * z2);
  }
  return make_residual(w1 - w22 + pot, std::abs(w1) + std::abs(w22) + std::abs(pot));
}

Residual residual(const SolutionExpr& u, double t, double x, double y) {
  Jetd j = u.jet(t, x, y, 2);
  const double a = j.derivative({1, 0, 0});
  const double b = x * j.derivative({0, 0, 1});
  const double c = -x * x * j.derivative({0, 2, 0});
  return make_residual(a + b + c, std::abs(a) + std::abs(b) + std::abs(c));
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

Field2 checked(const PlaneSolution& th) {
  return [th](const Jetd& a, const Jetd& b) { return th(a, b); };
}

bool is_nonneg_int(double p) { return p >= 0 && p == std::round(p); }

// prod_{k=n-s}^{n-1} (2k d_2 + k^2) applied to theta, as a plane function.
Field2 heat_ladder(const PlaneSolution& th, int n, int s) {
  Field2 f = checked(th);
  if (s == 0) return f;
  return [f, n, s](const Jetd& a, const Jetd& b) {
    return lifted2(f, s,
                   [n, s](const Jetd& g0) {
                     Jetd g = g0;
                     for (int k = n - s; k <= n - 1; ++k)
                       g = 2.0 * k * g.partial(1) + double(k * k) * g.truncated(g.order() - 1);
                     return g;
                   },
                   a, b);
  };
}

}  // namespace

HeatSolution heat_kernel(double s0, double x0) {
  HeatSolution h;
  h.name = "kernel(" + num(s0) + "," + num(x0) + ")";
  h.fn = [s0, x0](const Jetd& z1, const Jetd& z2) {
    Jetd tau = z1 + s0;
    Jetd d = z2 - x0;
    return pow(tau, -0.5) * exp(-(d * d) / (4.0 * tau));
  };
  h.regular = [s0](double z1, double) { return z1 + s0 > 0; };
  h.locus = "z1 + s0 <= 0";
  return h;
}

HeatSolution heat_poly(int k) {
  if (k < 0) throw std::invalid_argument("heat polynomial degree must be non-negative");
  HeatSolution h;
  h.name = "poly(" + std::to_string(k) + ")";
  h.fn = [k](const Jetd& z1, const Jetd& z2) {
    // sum_j k!/(j!(k-2j)!) z1^j z2^(k-2j)
    Jetd r = Jetd::constant(z1.arity(), z1.order(), 0.0, z1.base());
    double c = 1;  // k!/(j!(k-2j)!) at j = 0
    for (int j = 0; 2 * j <= k; ++j) {
      if (j > 0) c *= double(k - 2 * j + 2) * double(k - 2 * j + 1) / double(j);
      Jetd term = Jetd::constant(z1.arity(), z1.order(), c, z1.base());
      for (int i = 0; i < j; ++i) term = term * z1;
      for (int i = 0; i < k - 2 * j; ++i) term = term * z2;
      r += term;
    }
    return r;
  };
  return h;
}

HeatSolution heat_expmode(double lambda) {
  HeatSolution h;
  h.name = "expmode(" + num(lambda) + ")";
  h.fn = [lambda](const Jetd& z1, const Jetd& z2) { return exp(lambda * lambda * z1 + lambda * z2); };
  return h;
}

HeatSolution heat_shift(const HeatSolution& th, double dz1, double dz2) {
  HeatSolution h;
  h.name = "shift(" + th.name + "," + num(dz1) + "," + num(dz2) + ")";
  h.mu_tilde = th.mu_tilde;
  if (th.mu_tilde != 0 && dz2 != 0) throw std::invalid_argument("z2-shift does not preserve an inverse-square potential");
  Field2 f = checked(th);
  h.fn = [f, dz1, dz2](const Jetd& z1, const Jetd& z2) { return f(z1 + dz1, z2 + dz2); };
  if (th.regular) h.regular = [r = th.regular, dz1, dz2](double a, double b) { return r(a + dz1, b + dz2); };
  h.locus = th.locus + " (shifted)";
  return h;
}

HeatSolution heat_scale(const HeatSolution& th, double a) {
  if (a == 0) throw std::invalid_argument("heat_scale: zero scale");
  HeatSolution h;
  h.name = "scale(" + th.name + "," + num(a) + ")";
  h.mu_tilde = th.mu_tilde;
  Field2 f = checked(th);
  h.fn = [f, a](const Jetd& z1, const Jetd& z2) { return f(a * a * z1, a * z2); };
  if (th.regular) h.regular = [r = th.regular, a](double u, double v) { return r(a * a * u, a * v); };
  h.locus = th.locus + " (scaled)";
  return h;
}

InvSqSolution stationary_power(double mu_tilde, int branch) {
  const double disc = 1 + 4 * mu_tilde;
  if (disc < 0)
    throw std::invalid_argument("stationary_power: 1 + 4 mu~ = " + num(disc) + " < 0, no real exponent");
  if (branch != 1 && branch != -1) throw std::invalid_argument("stationary_power: branch must be +1 or -1");
  InvSqSolution h;
  h.mu_tilde = mu_tilde;
  const double p = (1 + branch * std::sqrt(disc)) / 2;
  h.name = "power(mu=" + num(mu_tilde) + "," + (branch > 0 ? "+" : "-") + ")";
  if (disc == 0 && branch < 0) {
    // double root: the second solution is |z2|^{1/2} ln|z2|
    h.fn = [](const Jetd&, const Jetd& z2) {
      Jetd a = abs(z2);
      return sqrt(a) * log(a);
    };
  } else if (is_nonneg_int(p)) {
    h.fn = [p](const Jetd&, const Jetd& z2) { return pow(z2, p); };
  } else {
    h.fn = [p](const Jetd&, const Jetd& z2) { return pow(abs(z2), p); };
  }
  if (!is_nonneg_int(p) || (disc == 0 && branch < 0)) {
    h.regular = [](double, double z2) { return z2 != 0; };
    h.locus = "z2 = 0";
  }
  return h;
}

InvSqSolution invsq_kernel(double mu_tilde, double s0, int branch) {
  const double disc = 1 + 4 * mu_tilde;
  if (disc < 0) throw std::invalid_argument("invsq_kernel: 1 + 4 mu~ < 0");
  const double p = (1 + branch * std::sqrt(disc)) / 2;
  InvSqSolution h;
  h.mu_tilde = mu_tilde;
  h.name = "invsq_kernel(mu=" + num(mu_tilde) + ",s0=" + num(s0) + "," + (branch > 0 ? "+" : "-") + ")";
  h.fn = [p, s0](const Jetd& z1, const Jetd& z2) {
    Jetd tau = z1 + s0;
    return pow(abs(z2), p) * pow(tau, -p - 0.5) * exp(-(z2 * z2) / (4.0 * tau));
  };
  h.regular = [s0](double z1, double z2) { return z1 + s0 > 0 && z2 != 0; };
  h.locus = "z1 + s0 <= 0 or z2 = 0";
  return h;
}

InvSqSolution radial(double s0) {
  InvSqSolution h = invsq_kernel(-0.25, s0, 1);
  h.name = "radial(" + num(s0) + ")";
  return h;
}

InvSqSolution radialpoly() {
  InvSqSolution h;
  h.mu_tilde = -0.25;
  h.name = "radialpoly()";
  h.fn = [](const Jetd& z1, const Jetd& z2) { return sqrt(abs(z2)) * (z2 * z2 + 4.0 * z1); };
  h.regular = [](double, double z2) { return z2 != 0; };
  h.locus = "z2 = 0";
  return h;
}

InvSqSolution darboux_from(const InvSqSolution& v) {
  if (std::abs(v.mu_tilde + 0.25) > 1e-12)
    throw std::invalid_argument("darboux_from: seed " + v.name + " has mu~ = " + num(v.mu_tilde) +
                                ", the Darboux step needs a mu~ = -1/4 seed");
  // the seed must verify before it is used
  for (double z1 : {-0.3, 0.2, 0.6})
    for (double z2 : {0.7, 1.3, 2.1, -0.9}) {
      if (v.regular && !v.regular(z1, z2)) continue;
      Residual r = residual(v, z1, z2);
      if (r.relative > 1e-9)
        throw std::invalid_argument("darboux_from: seed " + v.name + " fails its residual test at (" + num(z1) + ", " +
                                    num(z2) + "), relative " + num(r.relative));
    }
  InvSqSolution w;
  w.mu_tilde = 0.75;
  w.name = "darboux(" + v.name + ")";
  Field2 f = checked(v);
  w.fn = [f](const Jetd& z1, const Jetd& z2) {
    return lifted2(f, 1,
                   [](const Jetd& g) {
                     const int n = g.order() - 1;
                     Jetd zz = Jetd::variable(2, n, 1, g.base());
                     return g.partial(1) - 0.5 * g.truncated(n) * recip(zz);
                   },
                   z1, z2);
  };
  auto vr = v.regular;
  w.regular = [vr](double z1, double z2) { return z2 != 0 && (!vr || vr(z1, z2)); };
  w.locus = "z2 = 0" + (v.locus.empty() ? std::string() : " or " + v.locus);
  return w;
}

PlaneSolution combine(double a, const PlaneSolution& f, double b, const PlaneSolution& g) {
  if (f.mu_tilde != g.mu_tilde) throw std::invalid_argument("combine: different potentials");
  PlaneSolution h;
  h.mu_tilde = f.mu_tilde;
  h.name = num(a) + "*" + f.name + " + " + num(b) + "*" + g.name;
  Field2 ff = checked(f), gg = checked(g);
  h.fn = [ff, gg, a, b](const Jetd& z1, const Jetd& z2) { return a * ff(z1, z2) + b * gg(z1, z2); };
  auto fr = f.regular, gr = g.regular;
  if (fr || gr) h.regular = [fr, gr](double u, double v) { return (!fr || fr(u, v)) && (!gr || gr(u, v)); };
  h.locus = f.locus + (g.locus.empty() ? "" : " / " + g.locus);
  return h;
}

PlaneSolution plane_zero(double mu_tilde) {
  PlaneSolution h;
  h.mu_tilde = mu_tilde;
  h.name = "0";
  h.fn = [](const Jetd& z1, const Jetd&) { return Jetd::constant(z1.arity(), z1.order(), 0.0, z1.base()); };
  return h;
}

PlaneSolution plane_partial(const PlaneSolution& f, int which) {
  PlaneSolution h;
  h.name = "d" + std::to_string(which + 1) + "(" + f.name + ")";
  h.mu_tilde = f.mu_tilde;
  Field2 ff = checked(f);
  h.fn = [ff, which](const Jetd& z1, const Jetd& z2) {
    return lifted2(ff, 1, [which](const Jetd& g) { return g.partial(which); }, z1, z2);
  };
  h.regular = f.regular;
  h.locus = f.locus;
  return h;
}

namespace {

std::function<bool(double, double, double)> pulled_regular(
    const PlaneSolution& th, std::function<std::pair<double, double>(double, double, double)> map) {
  auto r = th.regular;
  return [r, map](double t, double x, double y) {
    if (x == 0) return false;
    if (!r) return true;
    auto [a, b] = map(t, x, y);
    return r(a, b);
  };
}

std::pair<double, double> heat1_args(double, double x, double y) {
  return {(x > 0 ? 1.0 : -1.0) * y, 2 * std::sqrt(std::abs(x))};
}
std::pair<double, double> heat2_args(double t, double x, double) { return {t, std::log(std::abs(x))}; }

}  // namespace

SolutionExpr sol_heat1(const HeatSolution& th) {
  if (th.mu_tilde != 0) throw std::invalid_argument("sol_heat1: seed " + th.name + " is not a free-heat solution");
  SolutionExpr u;
  u.name = "sol_heat1(" + th.name + ")";
  Field2 f = checked(th);
  u.fn = [f](const Jetd& t, const Jetd& x, const Jetd& y) {
    const double e = sign_of(x);
    Jetd ax = abs(x);
    return exp(-3.0 / 16.0 * t) * pow(ax, 0.25) * f(e * y, 2.0 * sqrt(ax));
  };
  u.regular = pulled_regular(th, heat1_args);
  u.locus = "x = 0" + (th.locus.empty() ? std::string() : " or seed locus " + th.locus);
  return u;
}

SolutionExpr sol_heat2(const HeatSolution& th) {
  if (th.mu_tilde != 0) throw std::invalid_argument("sol_heat2: seed " + th.name + " is not a free-heat solution");
  SolutionExpr u;
  u.name = "sol_heat2(" + th.name + ")";
  Field2 f = checked(th);
  u.fn = [f](const Jetd& t, const Jetd& x, const Jetd& y) {
    (void)y;
    Jetd ax = abs(x);
    return exp(-0.25 * t) * sqrt(ax) * f(t, log(ax));
  };
  u.regular = pulled_regular(th, heat2_args);
  u.locus = "x = 0" + (th.locus.empty() ? std::string() : " or seed locus " + th.locus);
  return u;
}

SolutionExpr sol_invsq(double mu, const InvSqSolution& th) {
  if (std::abs(th.mu_tilde - (4 * mu + 0.75)) > 1e-12)
    throw std::invalid_argument("sol_invsq: seed " + th.name + " has mu~ = " + num(th.mu_tilde) + ", expected 4*mu + 3/4 = " +
                                num(4 * mu + 0.75));
  SolutionExpr u;
  u.name = "sol_invsq(" + num(mu) + "," + th.name + ")";
  Field2 f = checked(th);
  u.fn = [f, mu](const Jetd& t, const Jetd& x, const Jetd& y) {
    const double e = sign_of(x);
    Jetd ax = abs(x);
    return exp(mu * t) * pow(ax, 0.25) * f(e * y, 2.0 * sqrt(ax));
  };
  u.regular = pulled_regular(th, heat1_args);
  u.locus = "x = 0" + (th.locus.empty() ? std::string() : " or seed locus " + th.locus);
  return u;
}

SolutionExpr gen_solution1(int n, const HeatSolution& th) {
  if (n < 1) throw std::invalid_argument("gen_solution1: n must be >= 1");
  if (th.mu_tilde != 0) throw std::invalid_argument("gen_solution1: seed must be a free-heat solution");
  std::vector<Field2> ladder;
  for (int s = 0; s < n; ++s) ladder.push_back(heat_ladder(th, n, s));
  SolutionExpr u;
  u.name = "gen_solution1(" + std::to_string(n) + "," + th.name + ")";
  u.fn = [ladder, n](const Jetd& t, const Jetd& x, const Jetd& y) {
    Jetd ax = abs(x);
    Jetd lx = log(ax);
    Jetd sum = Jetd::constant(t.arity(), t.order(), 0.0, t.base());
    Jetd ys = Jetd::constant(t.arity(), t.order(), 1.0, t.base());
    Jetd xinv = recip(x);
    Jetd xs = ys;
    double fact = 1;
    for (int s = 0; s < n; ++s) {
      if (s > 0) {
        ys = ys * y;
        xs = xs * xinv;
        fact *= s;
      }
      sum += ys * xs * ladder[s](t, lx) / fact;
    }
    return exp(-0.25 * t) * pow(ax, n - 0.5) * sum;
  };
  u.regular = pulled_regular(th, heat2_args);
  u.locus = "x = 0" + (th.locus.empty() ? std::string() : " or seed locus " + th.locus);
  return u;
}

SolutionExpr gen_solution2(const InvSqSolution& v) {
  if (std::abs(v.mu_tilde + 0.25) > 1e-12)
    throw std::invalid_argument("gen_solution2: seed " + v.name + " has mu~ = " + num(v.mu_tilde) + ", expected -1/4");
  SolutionExpr u;
  u.name = "gen_solution2(" + v.name + ")";
  Field2 f = checked(v);
  Field2 f2 = plane_partial(v, 1).fn;
  u.fn = [f, f2](const Jetd& t, const Jetd& x, const Jetd& y) {
    const double e = sign_of(x);
    Jetd ax = abs(x);
    Jetd a = e * y, b = 2.0 * sqrt(ax);
    return pow(ax, 0.25) * (t * f2(a, b) - (0.25 * t + 1.0) * pow(ax, -0.5) * f(a, b));
  };
  u.regular = pulled_regular(v, heat1_args);
  u.locus = "x = 0" + (v.locus.empty() ? std::string() : " or seed locus " + v.locus);
  return u;
}

std::vector<PlaneSolution> hn_tuple(int n, const HeatSolution& th, int eps) {
  if (n < 1) throw std::invalid_argument("hn_tuple: n must be >= 1");
  if (eps != 1 && eps != -1) throw std::invalid_argument("hn_tuple: eps must be +1 or -1");
  std::vector<PlaneSolution> out;
  for (int s = 0; s < n; ++s) {
    PlaneSolution w;
    w.name = "w" + std::to_string(s) + "[" + th.name + "]";
    Field2 g = heat_ladder(th, n, s);
    const double sign = (s % 2 && eps < 0) ? -1.0 : 1.0;
    const double rate = n - s - 1;
    w.fn = [g, sign, rate](const Jetd& z1, const Jetd& z2) { return sign * exp(rate * z2) * g(z1, z2); };
    w.regular = th.regular;
    w.locus = th.locus;
    out.push_back(std::move(w));
  }
  return out;
}

SolutionExpr constant_solution(double c) {
  SolutionExpr u;
  u.name = "const(" + num(c) + ")";
  u.fn = [c](const Jetd& t, const Jetd&, const Jetd&) { return Jetd::constant(t.arity(), t.order(), c, t.base()); };
  return u;
}

SolutionExpr coordinate_solution(int which) {
  static const char* names[3] = {"t", "x", "y"};
  SolutionExpr u;
  u.name = names[which];
  u.fn = [which](const Jetd& t, const Jetd& x, const Jetd& y) { return which == 0 ? t : which == 1 ? x : y; };
  return u;
}

SolutionExpr combine(double a, const SolutionExpr& f, double b, const SolutionExpr& g) {
  SolutionExpr u;
  u.name = num(a) + "*" + f.name + " + " + num(b) + "*" + g.name;
  u.fn = [f, g, a, b](const Jetd& t, const Jetd& x, const Jetd& y) { return a * f(t, x, y) + b * g(t, x, y); };
  auto fr = f.regular, gr = g.regular;
  if (fr || gr)
    u.regular = [fr, gr](double t, double x, double y) { return (!fr || fr(t, x, y)) && (!gr || gr(t, x, y)); };
  u.locus = f.locus + (g.locus.empty() ? "" : " / " + g.locus);
  return u;
}

}  // namespace fkbe
