#include "fkbe/group.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fkbe {

std::string SingularLocus::describe() const {
  if (empty()) return "none";
  std::ostringstream os;
  os.precision(17);
  os << "y = " << -delta / gamma;
  return os.str();
}

Mat2d canonical_matrix(Mat2d M) {
  for (int i = 0; i < 4; ++i) {
    const double m = M(i / 2, i % 2);
    if (std::abs(m) > 1e-12) {
      if (m < 0) M = -M;
      break;
    }
  }
  return M;
}

GroupElement GroupElement::make(double lambda, double sigma, const Mat2d& M, std::optional<SolutionExpr> f) {
  if (sigma == 0) throw std::invalid_argument("group element: sigma must be nonzero");
  const double det = M.determinant();
  if (!(std::abs(det) > 1e-300)) throw std::invalid_argument("group element: singular matrix");
  GroupElement g;
  g.lambda = lambda;
  g.sigma = sigma;
  g.M = canonical_matrix(M / std::sqrt(std::abs(det)));
  g.f = std::move(f);
  return g;
}

bool GroupElement::approx_equal(const GroupElement& o, double tol) const {
  return std::abs(lambda - o.lambda) <= tol && std::abs(sigma - o.sigma) <= tol && (M - o.M).cwiseAbs().maxCoeff() <= tol &&
         f.has_value() == o.f.has_value();
}

namespace {

void check_denominator(double v, const GroupElement& g) {
  if (v == 0) throw DomainError("point lies on the singular locus " + g.singular_locus().describe());
}

struct Moved {
  Jetd t, x, y, mult;  // image point and exp(gamma x / (gamma y + delta))
};

Moved move_jets(const GroupElement& g, const Jetd& t, const Jetd& x, const Jetd& y) {
  Jetd den = g.gamma() * y + g.delta();
  check_denominator(den.value(), g);
  Jetd inv = recip(den);
  return {t + g.lambda, g.det() * x * inv * inv, (g.alpha() * y + g.beta()) * inv, exp(g.gamma() * x * inv)};
}

}  // namespace

GroupElement compose(const GroupElement& g1, const GroupElement& g2) {
  GroupElement g = GroupElement::make(g1.lambda + g2.lambda, g1.sigma * g2.sigma, g1.M * g2.M);
  if (!g1.f && !g2.f) return g;
  // u -> s1 E1(p2) (s2 E2(p) (u + f2(p)) + f1(p2)) gives
  // f(p) = f2(p) + f1(p2) / (s2 E2(p)).
  std::optional<SolutionExpr> f1 = g1.f, f2 = g2.f;
  GroupElement e2 = g2;
  e2.f.reset();
  SolutionExpr f;
  f.name = "compose(" + (f1 ? f1->name : "0") + "," + (f2 ? f2->name : "0") + ")";
  f.fn = [f1, f2, e2](const Jetd& t, const Jetd& x, const Jetd& y) {
    Jetd acc = Jetd::constant(t.arity(), t.order(), 0.0, t.base());
    if (f2) acc += (*f2)(t, x, y);
    if (f1) {
      Moved m = move_jets(e2, t, x, y);
      acc += (*f1)(m.t, m.x, m.y) * recip(m.mult) / e2.sigma;
    }
    return acc;
  };
  f.locus = "transported loci";
  g.f = std::move(f);
  return g;
}

GroupElement inverse(const GroupElement& g) {
  if (g.f) throw std::invalid_argument("inverse: elements with an additive solution part are not supported");
  Mat2d inv;
  inv << g.delta(), -g.beta(), -g.gamma(), g.alpha();
  return GroupElement::make(-g.lambda, 1.0 / g.sigma, inv / g.det());
}

PointU act_point(const GroupElement& g, const PointU& p) {
  const double den = g.gamma() * p.y + g.delta();
  check_denominator(den, g);
  PointU q;
  q.t = p.t + g.lambda;
  q.x = g.det() * p.x / (den * den);
  q.y = (g.alpha() * p.y + g.beta()) / den;
  const double add = g.f ? g.f->value(p.t, p.x, p.y) : 0.0;
  q.u = g.sigma * std::exp(g.gamma() * p.x / den) * (p.u + add);
  return q;
}

SolutionExpr act_solution(const GroupElement& g, const SolutionExpr& h) {
  SolutionExpr r;
  r.name = describe(g) + " . " + h.name;
  const GroupElement e = g;
  r.fn = [e, h](const Jetd& t, const Jetd& x, const Jetd& y) {
    // u~(t,x,y) = sigma exp(gamma x/(alpha - gamma y)) (h + f)(t - lambda, det x/(alpha - gamma y)^2, (delta y - beta)/(alpha - gamma y))
    Jetd den = e.alpha() - e.gamma() * y;
    check_denominator(den.value(), e);
    Jetd inv = recip(den);
    Jetd tt = t - e.lambda, xx = e.det() * x * inv * inv, yy = (e.delta() * y - e.beta()) * inv;
    Jetd v = h(tt, xx, yy);
    if (e.f) v += (*e.f)(tt, xx, yy);
    return e.sigma * exp(e.gamma() * x * inv) * v;
  };
  auto hr = h.regular;
  r.regular = [e, hr](double t, double x, double y) {
    const double den = e.alpha() - e.gamma() * y;
    if (den == 0) return false;
    if (!hr) return true;
    return hr(t - e.lambda, e.det() * x / (den * den), (e.delta() * y - e.beta()) / den);
  };
  r.locus = "y = alpha/gamma or transported " + (h.locus.empty() ? std::string("(none)") : h.locus);
  return r;
}

GroupElement one_param(OneParam id, double eps) {
  Mat2d M = Mat2d::Identity();
  switch (id) {
    case OneParam::Py: M << 1, eps, 0, 1; break;
    case OneParam::D: M << std::exp(eps / 2), 0, 0, std::exp(-eps / 2); break;
    case OneParam::K: M << 1, 0, -eps, 1; break;
    case OneParam::Pt: return GroupElement::make(eps, 1, M);
    case OneParam::I: return GroupElement::make(0, std::exp(eps), M);
    case OneParam::Qplus: M << std::cos(eps), std::sin(eps), -std::sin(eps), std::cos(eps); break;
  }
  return GroupElement::make(0, 1, M);
}

OneParam parse_one_param(const std::string& name) {
  if (name == "Py") return OneParam::Py;
  if (name == "D") return OneParam::D;
  if (name == "K") return OneParam::K;
  if (name == "Pt") return OneParam::Pt;
  if (name == "I") return OneParam::I;
  if (name == "Qplus" || name == "Q+") return OneParam::Qplus;
  throw std::invalid_argument("unknown one-parameter subgroup '" + name + "'");
}

GroupElement discrete(Discrete which) {
  if (which == Discrete::Iprime) return GroupElement::make(0, -1, Mat2d::Identity());
  Mat2d J;
  J << -1, 0, 0, 1;
  return GroupElement::make(0, 1, J);
}

SlpmFactor factor_slpm(const Mat2d& M) {
  const double det = M.determinant();
  if (std::abs(std::abs(det) - 1) > 1e-12)
    throw std::invalid_argument("factor_slpm: |det M| = " + std::to_string(std::abs(det)) + " is not 1");
  if (det > 0) return {M, 0};
  Mat2d s;
  s << 1, 0, 0, -1;
  return {M * s, 1};
}

GessDecomposition gess_decompose(const GroupElement& g) {
  if (g.f) throw std::invalid_argument("gess_decompose: element has an additive solution part");
  GessDecomposition d;
  d.f_part = GroupElement::make(0, 1, g.M);
  d.z_part = GroupElement::make(g.lambda, g.sigma, Mat2d::Identity());
  d.h_part = GroupElement::make(0, std::abs(g.sigma), g.M);
  d.p_part = GroupElement::make(g.lambda, g.sigma > 0 ? 1.0 : -1.0, Mat2d::Identity());
  return d;
}

EssVector<double> pushforward(const GroupElement& g, const EssVector<double>& a) {
  if (g.f) throw std::invalid_argument("pushforward: element has an additive solution part");
  return pushforward<double>(g.M, a);
}

std::string describe(const GroupElement& g) {
  std::ostringstream os;
  os.precision(12);
  os << "elem(lambda=" << g.lambda << ",sigma=" << g.sigma << ",a=" << g.alpha() << ",b=" << g.beta()
     << ",c=" << g.gamma() << ",d=" << g.delta() << (g.f ? ",f=" + g.f->name : std::string()) << ")";
  return os.str();
}

}  // namespace fkbe
