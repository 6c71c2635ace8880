#include "fkbe/reductions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace fkbe {

namespace {

std::string num(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

Jetd konst(const Jetd& like, double v) { return Jetd::constant(like.arity(), like.order(), v, like.base()); }

double parse_number(const std::string& s) {
  double v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

}  // namespace

std::string case_name(CaseId id) {
  switch (id) {
    case CaseId::C11: return "1.1";
    case CaseId::C13: return "1.3";
    case CaseId::C14: return "1.4";
    case CaseId::C15: return "1.5";
    case CaseId::C17: return "1.7";
  }
  return "?";
}

std::string ReductionCase::label() const {
  switch (id) {
    case CaseId::C11:
    case CaseId::C13: return case_name(id) + ":mu=" + num(mu);
    case CaseId::C14: return case_name(id) + ":delta=" + num(delta);
    case CaseId::C15:
    case CaseId::C17: return case_name(id) + ":nu=" + num(nu) + ",mu=" + num(mu);
  }
  return "?";
}

Jetd ReductionCase::z1(const Jetd& t, const Jetd&, const Jetd& y) const {
  switch (id) {
    case CaseId::C11: return y;
    case CaseId::C13: return t - y;
    case CaseId::C14: return t;
    case CaseId::C15: return t - nu * log(abs(y));
    case CaseId::C17: return t - nu * atan(y);
  }
  throw std::logic_error("unknown case");
}

Jetd ReductionCase::z2(const Jetd&, const Jetd& x, const Jetd& y) const {
  switch (id) {
    case CaseId::C15: return x / y;
    case CaseId::C17: return x / (y * y + 1.0);
    default: return x;
  }
}

Jetd ReductionCase::multiplier(const Jetd& t, const Jetd& x, const Jetd& y) const {
  switch (id) {
    case CaseId::C11:
    case CaseId::C13: return exp(mu * t);
    case CaseId::C14: return exp(delta * y);
    case CaseId::C15: return pow(abs(y), mu);
    case CaseId::C17: return exp(mu * atan(y) - x * y / (y * y + 1.0));
  }
  throw std::logic_error("unknown case");
}

bool ReductionCase::regular(double, double, double y) const { return id != CaseId::C15 || y != 0; }

std::string ReductionCase::locus() const { return id == CaseId::C15 ? "y = 0" : "none"; }

EssVector<double> ReductionCase::generator() const {
  EssVector<double> v = EssVector<double>::Zero();
  switch (id) {
    case CaseId::C11: v[Pt] = 1; v[Iden] = mu; break;
    case CaseId::C13: v[Py] = 1; v[Pt] = 1; v[Iden] = mu; break;
    case CaseId::C14: v[Py] = 1; v[Iden] = delta; break;
    case CaseId::C15: v[Dil] = 1; v[Pt] = nu; v[Iden] = mu; break;
    case CaseId::C17: v[Py] = 1; v[Kgen] = 1; v[Pt] = nu; v[Iden] = mu; break;
  }
  return v;
}

ReductionCase make_case(CaseId id, double mu, double delta, double nu) {
  for (double p : {mu, delta, nu})
    if (!std::isfinite(p)) throw std::invalid_argument("case parameters must be finite");
  if (id == CaseId::C14 && delta != 0 && delta != 1) throw std::invalid_argument("case 1.4: delta must be 0 or 1");
  if ((id == CaseId::C15 || id == CaseId::C17)) {
    if (nu < 0) throw std::invalid_argument("case " + case_name(id) + ": nu must be >= 0");
    if (nu == 0 && mu < 0) throw std::invalid_argument("case " + case_name(id) + ": mu must be >= 0 when nu = 0");
  }
  ReductionCase c;
  c.id = id;
  c.mu = mu;
  c.delta = delta;
  c.nu = nu;
  return c;
}

ReductionCase parse_case(const std::string& text) {
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  static const std::map<std::string, CaseId> ids = {
      {"1.1", CaseId::C11}, {"1.3", CaseId::C13}, {"1.4", CaseId::C14}, {"1.5", CaseId::C15}, {"1.7", CaseId::C17}};
  auto it = ids.find(head);
  if (it == ids.end()) throw std::invalid_argument("unknown reduction case '" + head + "' (expected 1.1, 1.3, 1.4, 1.5 or 1.7)");
  const CaseId id = it->second;
  std::map<std::string, double> params;
  if (colon != std::string::npos) {
    std::string rest = text.substr(colon + 1);
    std::size_t pos = 0;
    while (pos <= rest.size() && !rest.empty()) {
      const auto comma = rest.find(',', pos);
      const std::string item = rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("expected key=value in '" + item + "'");
      params[item.substr(0, eq)] = parse_number(item.substr(eq + 1));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  std::vector<std::string> allowed;
  switch (id) {
    case CaseId::C11:
    case CaseId::C13: allowed = {"mu"}; break;
    case CaseId::C14: allowed = {"delta"}; break;
    default: allowed = {"nu", "mu"};
  }
  for (const auto& [k, v] : params)
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      throw std::invalid_argument("case " + head + " has no parameter '" + k + "'");
  auto get = [&](const char* k) { return params.count(k) ? params[k] : 0.0; };
  return make_case(id, get("mu"), get("delta"), get("nu"));
}

SolutionExpr ansatz_lift(const ReductionCase& c, const PlaneSolution& w) {
  SolutionExpr u;
  u.name = "lift[" + c.label() + "](" + w.name + ")";
  u.fn = [c, w](const Jetd& t, const Jetd& x, const Jetd& y) {
    return c.multiplier(t, x, y) * w(c.z1(t, x, y), c.z2(t, x, y));
  };
  u.regular = [c, w](double t, double x, double y) {
    if (!c.regular(t, x, y)) return false;
    if (!w.regular) return true;
    Jetd T = Jetd::constant(3, 0, t), X = Jetd::constant(3, 0, x), Y = Jetd::constant(3, 0, y);
    return w.regular(c.z1(T, X, Y).value(), c.z2(T, X, Y).value());
  };
  u.locus = c.locus() + "; pulled " + (w.locus.empty() ? "none" : w.locus);
  return u;
}

namespace {

// Terms of the reduced equation; their sum vanishes on solutions.
std::vector<Jetd> reduced_terms(const ReductionCase& c, const Jetd& w) {
  const int n = w.order();
  if (n < 2) throw OrderBudgetError("reduced residual needs a jet of order >= 2");
  const Jetd z2 = Jetd::variable(w.arity(), n - 2, 1, w.base());
  const Jetd w0 = w.truncated(n - 2), w1 = w.partial(0).truncated(n - 2), w2 = w.partial(1).truncated(n - 2);
  const Jetd w22 = w.partial(1).partial(1);
  const Jetd d = -(z2 * z2 * w22);
  switch (c.id) {
    case CaseId::C11: return {z2 * w1, d, c.mu * w0};
    case CaseId::C13: return {(1.0 - z2) * w1, d, c.mu * w0};
    case CaseId::C14: return {w1, d, c.delta * z2 * w0};
    case CaseId::C15: return {(1.0 - c.nu * z2) * w1, d, -(z2 * z2 * w2), c.mu * z2 * w0};
    case CaseId::C17: return {(1.0 - c.nu * z2) * w1, d, -(z2 * (z2 - c.mu) * w0)};
  }
  throw std::logic_error("unknown case");
}

}  // namespace

Jetd reduced_operator(const ReductionCase& c, const Jetd& w) {
  auto terms = reduced_terms(c, w);
  Jetd r = terms[0];
  for (std::size_t i = 1; i < terms.size(); ++i) r += terms[i];
  return r;
}

Residual reduced_residual(const ReductionCase& c, const PlaneSolution& w, double z1, double z2) {
  double raw = 0, scale = 0;
  for (const Jetd& term : reduced_terms(c, w.jet(z1, z2, 2))) {
    raw += term.value();
    scale += std::abs(term.value());
  }
  return make_residual(raw, scale);
}

ConcreteOperator realize_generator(const EssVector<double>& v) {
  ConcreteOperator op;
  const std::pair<int, Letter> letters[] = {{Py, Letter::Py}, {Dil, Letter::D}, {Kgen, Letter::K}, {Pt, Letter::Pt}};
  for (const auto& [g, l] : letters)
    if (v[g] != 0) op = op + to_rational(v[g]) * realize(l);
  // u dd_u acts on characteristics as multiplication by -1
  if (v[Iden] != 0) op = op + to_rational(-v[Iden]) * identity_operator();
  return op;
}

// ---------------------------------------------------------------- canonical maps

namespace {

using Pot = std::function<Jetd(const Jetd&, const Jetd&, const Jetd&)>;

// (1/16)(c/q - 6/q^2 - 5/q^3)
Jetd p16(const Jetd& c, const Jetd& q) {
  Jetd iq = recip(q);
  return (c * iq - 6.0 * iq * iq - 5.0 * iq * iq * iq) / 16.0;
}

Jetd s_lo(double nu, const Jetd& z2) { return sqrt(1.0 - nu * z2); }
Jetd s_hi(double nu, const Jetd& z2) { return sqrt(nu * z2 - 1.0); }

double zs_lo(double s) { return 2 * s + std::log(std::abs((s - 1) / (s + 1))); }
double zs_hi(double s) { return 2 * s - 2 * std::atan(s); }

CanonicalForm form(Z1Rule r, Pot v, std::string text, bool autonomous = true) {
  CanonicalForm f;
  f.z1_rule = r;
  f.potential = std::move(v);
  f.text = std::move(text);
  f.autonomous = autonomous;
  return f;
}

void set_lo(CanonicalMap& m, double nu) {
  m.Z = [nu](const Jetd& z2) {
    Jetd s = s_lo(nu, z2);
    return 2.0 * s + log(abs((s - 1.0) / (s + 1.0)));
  };
  m.dZ = [nu](const Jetd& z2) { return s_lo(nu, z2) / z2; };
  m.sides = {-1, 1};
}

void set_hi(CanonicalMap& m, double nu) {
  m.Z = [nu](const Jetd& z2) {
    Jetd s = s_hi(nu, z2);
    return 2.0 * s - 2.0 * atan(s);
  };
  m.dZ = [nu](const Jetd& z2) { return s_hi(nu, z2) / z2; };
  m.sides = {1};
}

void set_log(CanonicalMap& m) {
  m.Z = [](const Jetd& z2) { return log(abs(z2)); };
  m.dZ = [](const Jetd& z2) { return recip(z2); };
  m.sides = {-1, 1};
}

double branch_nu(const CanonicalMap& m) { return m.rcase.id == CaseId::C13 ? 1.0 : m.rcase.nu; }

}  // namespace

std::string CanonicalMap::id() const { return rcase.label() + (branch.empty() ? "" : "/" + branch); }

bool CanonicalMap::in_branch(double z2) const {
  if (z2 == 0 || !std::isfinite(z2)) return false;
  if (branch == "lo") return branch_nu(*this) * z2 < 1;
  if (branch == "hi") return branch_nu(*this) * z2 > 1;
  return true;
}

double CanonicalMap::margin(double z2) const {
  double m = std::abs(z2);
  if (branch == "lo" || branch == "hi") m = std::min(m, std::abs(z2 - 1 / branch_nu(*this)));
  return m;
}

double CanonicalMap::z1_factor(MapForm f, int side) const {
  switch (form(f).z1_rule) {
    case Z1Rule::Same: return 1;
    case Z1Rule::Flip: return -1;
    case Z1Rule::SignZ2: return side;
  }
  return 1;
}

bool CanonicalMap::is_free_heat() const {
  return (rcase.id == CaseId::C11 && 4 * rcase.mu + 0.75 == 0) || (rcase.id == CaseId::C14 && rcase.delta == 0);
}

double CanonicalMap::inverse(double zt2, int side) const {
  if (std::find(sides.begin(), sides.end(), side) == sides.end())
    throw DomainError(id() + ": sign side " + std::to_string(side) + " is not part of this branch");
  if (!std::isfinite(zt2)) throw DomainError(id() + ": non-finite z~2");
  const auto out = [&](const std::string& why) { return DomainError(id() + ": z~2 = " + num(zt2) + " " + why); };
  double z2 = 0;
  if (branch.empty() && rcase.id == CaseId::C11) {
    if (!(zt2 > 0)) throw out("outside (0, inf)");
    return side * zt2 * zt2 / 4;
  } else if (branch.empty() || branch == "nu0") {
    return side * std::exp(zt2);
  } else {
    const double nu = branch_nu(*this);
    const bool lo = branch == "lo";
    // Z is monotone in s on each side; bracket in s, then polish in z2.
    double a, b;
    std::function<double(double)> g;
    if (lo && side < 0) {
      a = 1, b = 2;
      g = [&](double s) { return zs_lo(s) - zt2; };
      while (g(b) < 0) {
        b *= 2;
        if (b > 1e150) throw out("cannot be bracketed");
      }
    } else if (lo) {
      if (!(zt2 < 0)) throw out("outside (-inf, 0)");
      a = 0, b = 1;
      g = [&](double s) { return zt2 - zs_lo(s); };  // increasing in s
    } else {
      if (!(zt2 > 0)) throw out("outside (0, inf)");
      a = 0, b = 1;
      g = [&](double s) { return zs_hi(s) - zt2; };
      while (g(b) < 0) {
        b *= 2;
        if (b > 1e150) throw out("cannot be bracketed");
      }
    }
    for (int it = 0; it < 2000 && b - a > 1e-16 * std::max(1.0, b); ++it) {
      const double mid = 0.5 * (a + b);
      (g(mid) < 0 ? a : b) = mid;
    }
    const double s = 0.5 * (a + b);
    z2 = lo ? (1 - s * s) / nu : (1 + s * s) / nu;
  }
  for (int it = 0; it < 4; ++it) {
    Jetd j = Jetd::variable(1, 1, 0, {z2, 0, 0});
    Jetd zj = Z(j);
    const double step = (zj.value() - zt2) / zj.coeff({1, 0, 0});
    if (!std::isfinite(step) || !in_branch(z2 - step) || (z2 - step) * side <= 0) break;
    z2 -= step;
  }
  if (!(std::abs(forward(z2) - zt2) <= 1e-12)) throw std::runtime_error(id() + ": root finding failed for z~2 = " + num(zt2));
  return z2;
}

Jetd CanonicalMap::inverse_jet(const Jetd& zt2, int side) const {
  Jetd z = konst(zt2, inverse(zt2.value(), side));
  int iters = 2;
  for (int k = 1; k < zt2.order() + 1; k *= 2) ++iters;
  for (int i = 0; i < iters; ++i) z = z - (Z(z) - zt2) / dZ(z);
  return z;
}

std::vector<CanonicalMap> canonical_maps(const ReductionCase& c) {
  std::vector<CanonicalMap> out;
  const double mu = c.mu, nu = c.nu, delta = c.delta;
  auto base = [&](std::string branch) {
    CanonicalMap m;
    m.rcase = c;
    m.branch = std::move(branch);
    return m;
  };
  auto finish = [&](CanonicalMap m) {
    if (m.anomaly.empty()) m.corrected = m.display;
    out.push_back(std::move(m));
  };

  switch (c.id) {
    case CaseId::C11: {
      CanonicalMap m = base("");
      m.Z = [](const Jetd& z2) { return 2.0 * sqrt(abs(z2)); };
      m.dZ = [](const Jetd& z2) { return sign_of(z2) * pow(abs(z2), -0.5); };
      m.W = [](const Jetd&, const Jetd& z2) { return pow(abs(z2), -0.25); };
      m.sides = {-1, 1};
      const double mt = 4 * mu + 0.75;
      m.display = form(Z1Rule::SignZ2, [mt](const Jetd&, const Jetd&, const Jetd& zt2) { return -mt / (zt2 * zt2); },
                       "V = -(4 mu + 3/4)/z~2^2");
      finish(m);
      break;
    }
    case CaseId::C13: {
      auto pot = [mu](double sg) {
        return [mu, sg](const Jetd&, const Jetd& z2, const Jetd&) { return sg * p16(konst(z2, 16 * mu + 3), z2 - 1.0); };
      };
      CanonicalMap lo = base("lo");
      set_lo(lo, 1);
      lo.W = [](const Jetd&, const Jetd& z2) { return pow(1.0 - z2, 0.25) / sqrt(abs(z2)); };
      lo.display = form(Z1Rule::Same, pot(-1), "V = -(1/16)((16mu+3)/(z2-1) - 6/(z2-1)^2 - 5/(z2-1)^3)");
      lo.corrected = form(Z1Rule::Same, pot(1), "V = +(1/16)((16mu+3)/(z2-1) - 6/(z2-1)^2 - 5/(z2-1)^3)");
      lo.anomaly = "displayed potential has the wrong overall sign";
      finish(lo);
      CanonicalMap hi = base("hi");
      set_hi(hi, 1);
      hi.W = [](const Jetd&, const Jetd& z2) { return pow(z2 - 1.0, 0.25) / sqrt(z2); };
      hi.display = form(Z1Rule::Flip, pot(1), "z~1 = -z1, V = +(1/16)((16mu+3)/(z2-1) - 6/(z2-1)^2 - 5/(z2-1)^3)");
      hi.corrected = form(Z1Rule::Flip, pot(-1), "z~1 = -z1, V = -(1/16)((16mu+3)/(z2-1) - 6/(z2-1)^2 - 5/(z2-1)^3)");
      hi.anomaly = "displayed potential has the wrong overall sign";
      finish(hi);
      break;
    }
    case CaseId::C14: {
      CanonicalMap m = base("");
      set_log(m);
      m.W = [](const Jetd& z1, const Jetd& z2) { return exp(z1 / 4.0) / sqrt(abs(z2)); };
      m.display = form(Z1Rule::Same,
                       [delta](const Jetd&, const Jetd& z2, const Jetd& zt2) { return -delta * sign_of(z2) * exp(zt2); },
                       "V = -delta eps~ e^{z~2}, eps~ = sgn z2");
      finish(m);
      break;
    }
    case CaseId::C15: {
      if (nu > 0) {
        auto pot = [mu, nu](double sg) {
          return [mu, nu, sg](const Jetd&, const Jetd& z2, const Jetd&) {
            return sg * p16(4.0 * z2 * z2 + 16.0 * mu * z2 + 3.0, nu * z2 - 1.0);
          };
        };
        const std::string body = "(1/16)((4z2^2+16mu z2+3)/(nu z2-1) - 6/(nu z2-1)^2 - 5/(nu z2-1)^3)";
        CanonicalMap lo = base("lo");
        set_lo(lo, nu);
        lo.W = [nu](const Jetd&, const Jetd& z2) { return exp(z2 / 2.0) / sqrt(abs(z2)) * pow(1.0 - nu * z2, 0.25); };
        lo.display = form(Z1Rule::Same, pot(1), "V = +" + body);
        finish(lo);
        CanonicalMap hi = base("hi");
        set_hi(hi, nu);
        hi.W = [nu](const Jetd&, const Jetd& z2) { return exp(z2 / 2.0) / sqrt(z2) * pow(nu * z2 - 1.0, 0.25); };
        hi.display = form(Z1Rule::Flip, pot(-1), "z~1 = -z1, V = -" + body);
        finish(hi);
      } else {
        CanonicalMap m = base("nu0");
        set_log(m);
        m.W = [](const Jetd& z1, const Jetd& z2) { return exp(z1 / 4.0 + z2 / 2.0) / sqrt(abs(z2)); };
        m.display = form(Z1Rule::Same,
                         [mu](const Jetd&, const Jetd& z2, const Jetd& zt2) {
                           return -(sign_of(z2) * mu * exp(zt2) + 0.25 * exp(2.0 * zt2));
                         },
                         "V = -(eps~ mu e^{z~2} + e^{2 z~2}/4), eps~ = sgn z2");
        finish(m);
      }
      break;
    }
    case CaseId::C17: {
      if (nu > 0) {
        // which = 1 reproduces the displayed numerator 16 z1 (mu - z2) + 3
        auto pot = [mu, nu](double sg, int which) {
          return [mu, nu, sg, which](const Jetd& z1, const Jetd& z2, const Jetd&) {
            const Jetd& lead = which == 1 ? z1 : z2;
            return sg * p16(16.0 * lead * (mu - z2) + 3.0, nu * z2 - 1.0);
          };
        };
        const std::string tail = "(mu-z2)+3)/(nu z2-1) - 6/(nu z2-1)^2 - 5/(nu z2-1)^3)";
        CanonicalMap lo = base("lo");
        set_lo(lo, nu);
        lo.W = [nu](const Jetd&, const Jetd& z2) { return pow(1.0 - nu * z2, 0.25) / sqrt(abs(z2)); };
        lo.display = form(Z1Rule::Same, pot(1, 1), "V = +(1/16)((16 z1" + tail, false);
        lo.corrected = form(Z1Rule::Same, pot(1, 2), "V = +(1/16)((16 z2" + tail);
        lo.anomaly = "displayed potential depends on z1 (16 z1 (mu - z2)); the mapped equation has 16 z2 (mu - z2)";
        finish(lo);
        CanonicalMap hi = base("hi");
        set_hi(hi, nu);
        hi.W = [nu](const Jetd&, const Jetd& z2) { return pow(nu * z2 - 1.0, 0.25) / sqrt(z2); };
        hi.display = form(Z1Rule::Same, pot(-1, 1), "z~1 = z1, V = -(1/16)((16 z1" + tail, false);
        hi.corrected = form(Z1Rule::Flip, pot(-1, 2), "z~1 = -z1, V = -(1/16)((16 z2" + tail);
        hi.anomaly = "displayed potential depends on z1 and z~1 keeps the sign of z1; the mapped equation needs "
                     "16 z2 (mu - z2) and z~1 = -z1";
        finish(hi);
      } else {
        CanonicalMap m = base("nu0");
        set_log(m);
        m.W = [](const Jetd& z1, const Jetd& z2) { return exp(z1 / 4.0) / sqrt(abs(z2)); };
        m.display = form(Z1Rule::Same,
                         [mu](const Jetd&, const Jetd& z2, const Jetd& zt2) {
                           return exp(2.0 * zt2) - sign_of(z2) * mu * exp(zt2);
                         },
                         "V = e^{2 z~2} - eps~ mu e^{z~2}, eps~ = sgn z2");
        finish(m);
      }
      break;
    }
  }
  return out;
}

CanonicalMap canonical_map(const ReductionCase& c, const std::string& branch) {
  auto maps = canonical_maps(c);
  if (branch.empty() && maps.size() == 1) return maps.front();
  std::string avail;
  for (const auto& m : maps) {
    if (m.branch == branch) return m;
    avail += (avail.empty() ? "" : ", ") + (m.branch.empty() ? std::string("(none)") : m.branch);
  }
  throw std::invalid_argument("case " + c.label() + " has no branch '" + branch + "' (available: " + avail + ")");
}

std::vector<CaseTemplate> case_table() {
  std::vector<CaseTemplate> t;
  auto add = [&](CaseId id, std::vector<ReductionCase> cs) {
    CaseTemplate e{id, {}};
    for (const auto& c : cs)
      for (auto& m : canonical_maps(c)) e.maps.push_back(std::move(m));
    t.push_back(std::move(e));
  };
  add(CaseId::C11, {make_case(CaseId::C11, 0.5)});
  add(CaseId::C13, {make_case(CaseId::C13, 0.5)});
  add(CaseId::C14, {make_case(CaseId::C14, 0, 1)});
  add(CaseId::C15, {make_case(CaseId::C15, 0.5, 0, 1), make_case(CaseId::C15, 0.5, 0, 0)});
  add(CaseId::C17, {make_case(CaseId::C17, 0.5, 0, 1), make_case(CaseId::C17, 0.5, 0, 0)});
  return t;
}

PlaneSolution canonical_pull(const CanonicalMap& m, const CanonicalSeed& seed, MapForm f) {
  PlaneSolution w;
  const int probe = m.sides.back();
  w.name = "pull[" + m.id() + (f == MapForm::Corrected ? ",corrected" : "") + "](" + seed(probe).name + ")";
  w.fn = [m, seed, f](const Jetd& z1, const Jetd& z2) {
    const double v = z2.value();
    if (!m.in_branch(v)) throw DomainError(m.id() + ": z2 = " + num(v) + " is outside the branch");
    const int side = v > 0 ? 1 : -1;
    return seed(side)(m.z1_factor(f, side) * z1, m.Z(z2)) / m.W(z1, z2);
  };
  w.regular = [m, seed, f](double z1, double z2) {
    if (!m.in_branch(z2)) return false;
    const int side = z2 > 0 ? 1 : -1;
    PlaneSolution s = seed(side);
    return !s.regular || s.regular(m.z1_factor(f, side) * z1, m.forward(z2));
  };
  w.locus = "z2 = 0, z2 outside branch " + m.id() + ", pulled " + seed(probe).locus;
  return w;
}

PlaneSolution canonical_pull(const CanonicalMap& m, const PlaneSolution& seed, MapForm f) {
  return canonical_pull(m, CanonicalSeed([seed](int) { return seed; }), f);
}

PlaneSolution canonical_push(const CanonicalMap& m, const PlaneSolution& w, int side, MapForm f) {
  PlaneSolution wt;
  wt.name = "push[" + m.id() + ",side=" + std::to_string(side) + "](" + w.name + ")";
  const double c = m.z1_factor(f, side);
  wt.fn = [m, w, side, c](const Jetd& zt1, const Jetd& zt2) {
    Jetd z2 = m.inverse_jet(zt2, side);
    Jetd z1 = zt1 / c;
    return m.W(z1, z2) * w(z1, z2);
  };
  wt.locus = "z~2 outside the image of side " + std::to_string(side);
  return wt;
}

Residual canonical_residual(const CanonicalMap& m, MapForm f, const PlaneSolution& wt, double zt1, double zt2, int side) {
  Jetd j = wt.jet(zt1, zt2, 2);
  const double z2 = m.inverse(zt2, side);
  const double z1 = zt1 / m.z1_factor(f, side);
  const double V =
      m.form(f).potential(Jetd::constant(1, 0, z1), Jetd::constant(1, 0, z2), Jetd::constant(1, 0, zt2)).value();
  const double w1 = j.derivative({1, 0, 0}), w22 = j.derivative({0, 2, 0}), pv = V * j.value();
  return make_residual(w1 - w22 - pv, std::abs(w1) + std::abs(w22) + std::abs(pv));
}

// ---------------------------------------------------------------- Taylor ODE

namespace {

std::vector<double> local_series(const LinearOde2& ode, double x, double y0, double y1, int n) {
  const Jetd X = Jetd::variable(1, n, 0, {x, 0, 0});
  const Jetd P = ode.p(X), Q = ode.q(X);
  std::vector<double> c(n + 1, 0.0);
  c[0] = y0;
  if (n >= 1) c[1] = y1;
  for (int j = 0; j + 2 <= n; ++j) {
    double acc = 0;
    for (int i = 0; i <= j; ++i)
      acc += P.coeff({i, 0, 0}) * (j - i + 1) * c[j - i + 1] + Q.coeff({i, 0, 0}) * c[j - i];
    c[j + 2] = acc / ((j + 1.0) * (j + 2.0));
  }
  return c;
}

}  // namespace

std::vector<double> ode_series(const LinearOde2& ode, double x0, double y0, double dy0, double x1, int order) {
  constexpr int N = 30;
  double x = x0, y = y0, dy = dy0;
  for (int steps = 0; x != x1; ++steps) {
    if (steps > 200000) throw std::runtime_error("ode_series: step budget exhausted");
    const auto c = local_series(ode, x, y, dy, N);
    const double M = std::max({std::abs(c[0]), std::abs(c[1]), 1e-300});
    double rho = std::numeric_limits<double>::infinity();
    for (int k : {N - 1, N})
      if (c[k] != 0) rho = std::min(rho, std::pow(std::abs(c[k]) / M, -1.0 / k));
    double h = std::min(0.5, rho / 4);
    const double rem = x1 - x;
    const bool last = std::abs(rem) <= h;
    const double step = last ? rem : std::copysign(h, rem);
    double yn = 0, dyn = 0;
    for (int k = N; k >= 0; --k) yn = yn * step + c[k];
    for (int k = N; k >= 1; --k) dyn = dyn * step + k * c[k];
    y = yn;
    dy = dyn;
    x = last ? x1 : x + step;
  }
  auto c = local_series(ode, x1, y, dy, std::max(order, 1));
  c.resize(order + 1);
  return c;
}

namespace {

// exp(lambda z1) g(z2) with g given as a Taylor series at the value of z2.
Jetd separable(double lambda, const Jetd& z1, const Jetd& z2, const std::function<std::vector<double>(double, int)>& g) {
  const auto c = g(z2.value(), z2.order());
  Jetd s(1, z2.order(), {z2.value(), 0, 0});
  for (int k = 0; k <= z2.order(); ++k) s.set_coeff({k, 0, 0}, c[k]);
  return exp(lambda * z1) * compose(s, {z2});
}

}  // namespace

PlaneSolution reduced_mode(const ReductionCase& c, double lambda, int side) {
  if (side != 1 && side != -1) throw std::invalid_argument("reduced_mode: side must be +-1");
  LinearOde2 ode;
  const double mu = c.mu, nu = c.nu, delta = c.delta, l = lambda;
  ode.p = [id = c.id](const Jetd& x) { return konst(x, id == CaseId::C15 ? -1.0 : 0.0); };
  ode.q = [id = c.id, mu, nu, delta, l](const Jetd& x) {
    Jetd num_ = konst(x, 0);
    switch (id) {
      case CaseId::C11: num_ = l * x + mu; break;
      case CaseId::C13: num_ = l * (1.0 - x) + mu; break;
      case CaseId::C14: num_ = l + delta * x; break;
      case CaseId::C15: num_ = l * (1.0 - nu * x) + mu * x; break;
      case CaseId::C17: num_ = l * (1.0 - nu * x) - x * (x - mu); break;
    }
    return num_ / (x * x);
  };
  PlaneSolution w;
  w.name = "mode[" + c.label() + "](lambda=" + num(lambda) + ",side=" + std::to_string(side) + ")";
  w.fn = [ode, side, lambda](const Jetd& z1, const Jetd& z2) {
    if (!(z2.value() * side > 0)) throw DomainError("reduced mode: z2 has the wrong sign");
    return separable(lambda, z1, z2, [&](double v, int n) { return ode_series(ode, side, 1.0, 0.25, v, n); });
  };
  w.regular = [side](double, double z2) { return z2 * side > 0; };
  w.locus = side > 0 ? "z2 <= 0" : "z2 >= 0";
  return w;
}

PlaneSolution canonical_mode(const CanonicalMap& m, MapForm f, double lambda, int side) {
  const CanonicalForm& form_ = m.form(f);
  if (!form_.autonomous)
    throw std::invalid_argument(m.id() + ": the " + std::string(f == MapForm::Display ? "displayed" : "corrected") +
                                " potential depends on z~1, so no separable canonical solution exists");
  if (std::find(m.sides.begin(), m.sides.end(), side) == m.sides.end())
    throw DomainError(m.id() + ": side " + std::to_string(side) + " is not part of this branch");
  const double nu = branch_nu(m);
  double ref = side;
  if (m.branch == "lo") ref = side < 0 ? -1 / nu : 1 / (2 * nu);
  if (m.branch == "hi") ref = 2 / nu;
  const double x0 = m.forward(ref);
  LinearOde2 ode;
  ode.p = [](const Jetd& x) { return konst(x, 0); };
  ode.q = [m, f, side, lambda](const Jetd& x) {
    return lambda - m.form(f).potential(konst(x, 0), m.inverse_jet(x, side), x);
  };
  PlaneSolution w;
  w.name = "mode(" + num(lambda) + ")[" + m.id() + ",side=" + std::to_string(side) + "]";
  w.fn = [ode, x0, lambda](const Jetd& zt1, const Jetd& zt2) {
    return separable(lambda, zt1, zt2, [&](double v, int n) { return ode_series(ode, x0, 1.0, 0.25, v, n); });
  };
  w.locus = "z~2 outside the image of side " + std::to_string(side);
  return w;
}

}  // namespace fkbe
