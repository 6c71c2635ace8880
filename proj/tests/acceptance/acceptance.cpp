// Acceptance run: one PASS/FAIL line per criterion. `--only N` runs a single
// criterion; the exit status is nonzero when any selected criterion fails.
#include "fkbe/group.hpp"
#include "fkbe/lie_algebra.hpp"
#include "fkbe/op_algebra.hpp"
#include "fkbe/reductions.hpp"
#include "fkbe/solutions.hpp"
#include "fkbe/verify.hpp"

#include <CLI11.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>

using namespace fkbe;

namespace {

struct Outcome {
  bool pass = true;
  int checks = 0, failures = 0;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    ++checks;
    if (!ok) {
      ++failures;
      pass = false;
      if (failures <= 8) notes.push_back(what);
    }
  }
  void note(const std::string& s) { notes.push_back(s); }
};

std::string num(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3g", v);
  return b;
}

EssVector<double> d5(double py, double d, double k, double pt = 0, double i = 0) {
  EssVector<double> v;
  v << py, d, k, pt, i;
  return v;
}

RVec e(int g) { return ess_basis<Rational>(g); }

Mat2d mat(double a, double b, double c, double d) {
  Mat2d M;
  M << a, b, c, d;
  return M;
}

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t s) : gen(s) {}
  double operator()(double lo = -1, double hi = 1) { return std::uniform_real_distribution<double>(lo, hi)(gen); }
  GroupElement element() {
    Mat2d M;
    do M = mat((*this)(), (*this)(), (*this)(), (*this)());
    while (std::abs(M.determinant()) < 0.2);
    const double s = (*this)(0.5, 2) * ((*this)() < 0 ? -1 : 1);
    return GroupElement::make((*this)(), s, M);
  }
};

// ------------------------------------------------------------------ 1
Outcome c1() {
  Outcome o;
  o.check(bracket(e(Py), e(Dil)) == e(Py), "[Py,D] != Py");
  o.check(bracket(e(Py), e(Kgen)) == RVec(2 * e(Dil)), "[Py,K] != 2D");
  o.check(bracket(e(Dil), e(Kgen)) == e(Kgen), "[D,K] != K");
  for (int a = 0; a < 5; ++a)
    for (int b = a + 1; b < 5; ++b) {
      const bool listed = (a == Py && (b == Dil || b == Kgen)) || (a == Dil && b == Kgen);
      if (!listed) o.check(bracket(e(a), e(b)) == RVec::Zero(), "nonzero bracket of basis pair " + std::to_string(a) + "," + std::to_string(b));
      o.check(bracket(e(b), e(a)) == RVec(-bracket(e(a), e(b))), "antisymmetry");
    }
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b)
      for (int c = 0; c < 5; ++c)
        o.check(bracket(e(a), bracket(e(b), e(c))) + bracket(e(b), bracket(e(c), e(a))) +
                        bracket(e(c), bracket(e(a), e(b))) ==
                    RVec::Zero(),
                "Jacobi fails");
  o.note("10 brackets exact, Jacobi on 125 triples");
  return o;
}

// ------------------------------------------------------------------ 2
Outcome c2() {
  Outcome o;
  struct Row {
    std::string text;
    GroupElement (*g)(double);
    EssVector<double> in;
    std::function<EssVector<double>(double)> closed;
  };
  auto Pyg = [](double s) { return one_param(OneParam::Py, s); };
  auto Dg = [](double s) { return one_param(OneParam::D, s); };
  auto Kg = [](double s) { return one_param(OneParam::K, s); };
  auto Qg = [](double s) { return one_param(OneParam::Qplus, s); };
  auto Jg = [](double) { return discrete(Discrete::Jprime); };
  const std::vector<Row> rows = {
      {"Py(e)_* D = D - 2e Py", +Pyg, d5(0, 1, 0), [](double s) { return d5(-2 * s, 1, 0); }},
      {"K(e)_* D = D + 2e K", +Kg, d5(0, 1, 0), [](double s) { return d5(0, 1, 2 * s); }},
      {"D(e)_* Py = e^{2e} Py", +Dg, d5(1, 0, 0), [](double s) { return d5(std::exp(2 * s), 0, 0); }},
      {"Py(e)_* K = K - e D + e^2 Py", +Pyg, d5(0, 0, 1), [](double s) { return d5(s * s, -s, 1); }},
      {"K(e)_* Py = Py + e D + e^2 K", +Kg, d5(1, 0, 0), [](double s) { return d5(1, s, s * s); }},
      {"D(e)_* K = e^{-2e} K", +Dg, d5(0, 0, 1), [](double s) { return d5(0, 0, std::exp(-2 * s)); }},
      {"J'_* Py = -Py", +Jg, d5(1, 0, 0), [](double) { return d5(-1, 0, 0); }},
      {"J'_* K = -K", +Jg, d5(0, 0, 1), [](double) { return d5(0, 0, -1); }},
      {"Q+(e)_* Py", +Qg, d5(1, 0, 0),
       [](double s) { return d5(std::cos(s) * std::cos(s), std::sin(2 * s), std::sin(s) * std::sin(s)); }},
      {"Q+(e)_* D", +Qg, d5(0, 1, 0),
       [](double s) { return d5(-0.5 * std::sin(2 * s), std::cos(2 * s), 0.5 * std::sin(2 * s)); }},
      {"Q+(e)_* K", +Qg, d5(0, 0, 1),
       [](double s) { return d5(std::sin(s) * std::sin(s), -std::sin(2 * s), std::cos(s) * std::cos(s)); }},
  };
  int ok_rows = 0;
  for (const auto& r : rows) {
    double worst = 0;
    for (double s : {-1.0, -0.3, 0.2, 1.0}) worst = std::max(worst, (pushforward(r.g(s), r.in) - r.closed(s)).cwiseAbs().maxCoeff());
    o.check(worst <= 1e-12, r.text + ": max deviation " + num(worst));
    if (worst <= 1e-12) ++ok_rows;
  }
  o.note(std::to_string(ok_rows) + "/" + std::to_string(rows.size()) + " closed-form rows reproduced");

  // The failing closed-form rows are not Lie-algebra automorphisms, so no
  // adjoint action can produce them: with e = 0.2,
  // [Py(e)_*Py, Py(e)_*K] must equal 2 Py(e)_*D.
  const double s = 0.2;
  const EssVector<double> lhs = bracket(d5(1, 0, 0), rows[3].closed(s)), rhs = 2 * rows[0].closed(s);
  o.note("bracket defect of the closed-form Py(e) rows at e=0.2: [Py, K - eD + e^2 Py] has Py-coefficient " +
         num(lhs[Py]) + ", 2(D - 2e Py) has " + num(rhs[Py]));
  const EssVector<double> lk = bracket(rows[4].closed(s), d5(0, 0, 1)), rk = 2 * rows[1].closed(s);
  o.note("bracket defect of the closed-form K(e) rows at e=0.2: [Py + eD + e^2 K, K] has K-coefficient " + num(lk[Kgen]) +
         ", 2(D + 2e K) has " + num(rk[Kgen]));
  return o;
}

// ------------------------------------------------------------------ 3
Outcome c3() {
  Outcome o;
  const std::vector<RVec> all = {e(Py), e(Dil), e(Kgen), e(Pt), e(Iden)};
  const std::vector<RVec> pdpi = {e(Py), e(Dil), e(Pt), e(Iden)};
  const std::vector<RVec> ppi = {e(Py), e(Pt), e(Iden)};
  const std::vector<RVec> dpi = {e(Dil), e(Pt), e(Iden)};
  const std::vector<RVec> qpi = {RVec(e(Py) + e(Kgen)), e(Pt), e(Iden)};
  const std::vector<std::pair<std::string, std::vector<RVec>>> cases = {
      {"s1.1:mu=0", all},           {"s1.1:mu=-3/4", all},         {"s1.3:mu=0", ppi},
      {"s1.3:mu=5/2", ppi},         {"s1.4:0", pdpi},              {"s1.4:1", ppi},
      {"s1.5:nu=1,mu=0", dpi},      {"s1.5:nu=2/3,mu=-1", dpi},    {"s1.6:nu=1/2", dpi},
      {"s1.7:nu=1,mu=1/2", qpi},    {"s1.7:nu=3,mu=-2", qpi},      {"s1.7:zero=0,nu=1", qpi}};
  for (const auto& [id, expect] : cases)
    o.check(span_equal(normalizer(instantiate(id)).basis, expect), "normalizer of " + id + " is " +
                                                                      format_span(normalizer(instantiate(id)).basis));
  o.note(std::to_string(cases.size()) + " normalizers equal as exact spans");
  return o;
}

// ------------------------------------------------------------------ 4
Outcome c4() {
  Outcome o;
  const std::vector<Rational> draws = {Rational(0), Rational(1), Rational(-3, 7), Rational(5, 2), Rational(2, 9)};
  int families = 0;
  for (const auto& fam : catalog_families()) {
    int tried = 0;
    for (std::size_t a = 0; a < draws.size() && tried < 3; ++a)
      for (std::size_t b = 0; b < draws.size() && tried < 3; ++b) {
        std::vector<Rational> vals;
        for (std::size_t i = 0; i < fam.params.size(); ++i) vals.push_back(i == 0 ? draws[a] : draws[(a + b + 1) % draws.size()]);
        SubalgebraSpan s;
        try {
          s = instantiate(fam, vals);
        } catch (const std::invalid_argument&) {
          continue;
        }
        ++tried;
        o.check(is_closed(s.basis), fam.label + " not closed at " + s.label);
        o.check(rank(s.basis) == fam.dim, fam.label + " has wrong rank at " + s.label);
        if (fam.params.empty()) tried = 3;
      }
    o.check(tried >= 1, fam.label + ": no admissible draw");
    ++families;
  }
  for (const auto& id : equivalence_pairs()) {
    const EquivalenceWitness w = equivalence_witness(id);
    std::vector<RVec> mapped;
    for (const auto& b : w.source.basis) mapped.push_back(pushforward(w.matrix, b));
    o.check(w.verified && span_equal(mapped, w.target.basis), "witness " + id + " does not map source onto target");
  }
  o.note(std::to_string(families) + " families closed, " + std::to_string(equivalence_pairs().size()) +
         " equivalence witnesses exact");
  return o;
}

// ------------------------------------------------------------------ 5
Outcome c5() {
  Outcome o;
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> letter(0, 2), len(0, 7);
  for (int k = 0; k < 200; ++k) {
    Word w(len(rng));
    for (auto& c : w) c = static_cast<std::uint8_t>(letter(rng));
    const OpPoly a = normal_order(w, RewriteStrategy::Leftmost);
    o.check(a == normal_order(w, RewriteStrategy::Rightmost), "leftmost and rightmost normal forms differ");
    o.check(a == normal_order(w, RewriteStrategy::Random, k), "random-strategy normal form differs");
  }
  for (int n = 1; n <= 5; ++n) o.check(lemma_product(n) == lemma_rhs(n), "lemma fails at n = " + std::to_string(n));
  const OpPoly c = casimir();
  const auto monos = monomials_up_to(4);
  for (const auto& m : monos) o.check(commutator(c, OpPoly(m)).is_zero(), "Casimir does not commute with a monomial");
  o.note("200 words confluent, lemma n=1..5 exact, Casimir central on " + std::to_string(monos.size()) + " monomials");
  return o;
}

// ------------------------------------------------------------------ 6
Jetd test_function(int which, const Jetd& t, const Jetd& x, const Jetd& y) {
  switch (which) {
    case 0: return exp(0.3 * t + x - 0.5 * y);
    case 1: return sin(x * y) + t * t;
    case 2: return x * x * x * y + cos(t);
    case 3: return log(2.0 + x * x + y * y) * t;
    default: return sqrt(1.0 + x * x + t * t) * y;
  }
}

Outcome c6() {
  Outcome o;
  const ConcreteOperator L = realize(Letter::Pt) + Rational(-1) * (realize(Letter::D) * realize(Letter::D)) +
                             Rational(1, 2) * (realize(Letter::Py) * realize(Letter::K) +
                                               realize(Letter::K) * realize(Letter::Py));
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1, 1);
  double worst = 0;
  for (int which = 0; which < 5; ++which)
    for (int k = 0; k < 20; ++k) {
      const Jetd::Point pt{u(rng), u(rng), u(rng)};
      const Jetd t = Jetd::variable(3, 4, 0, pt), x = Jetd::variable(3, 4, 1, pt), y = Jetd::variable(3, 4, 2, pt);
      const Jetd f = test_function(which, t, x, y);
      const double ft = f.derivative({1, 0, 0}), fy = f.derivative({0, 0, 1}), fxx = f.derivative({0, 2, 0});
      const double direct = ft + pt[1] * fy - pt[1] * pt[1] * fxx;
      const double scale = std::max(std::abs(ft) + std::abs(pt[1] * fy) + std::abs(pt[1] * pt[1] * fxx), 1e-300);
      const double rel = std::abs(apply(L, f).value() - direct) / scale;
      worst = std::max(worst, rel);
      o.check(rel <= 1e-10, "L identity off by " + num(rel));
    }
  o.note("5 functions x 20 points, max relative deviation " + num(worst));
  return o;
}

// ------------------------------------------------------------------ 7
Outcome c7() {
  Outcome o;
  const IndependenceReport r = symbol_independence_test(3, 200);
  o.check(r.independent && r.min_singular > 1e-8, "rank deficient");
  o.note(std::to_string(r.monomials) + " monomials, " + std::to_string(r.samples) + " samples, smallest singular value " +
         num(r.min_singular));
  return o;
}

// ------------------------------------------------------------------ 8
Outcome c8() {
  Outcome o;
  const auto grid = default_grid();
  std::vector<std::pair<std::string, std::vector<SolutionExpr>>> fams = {
      {"sol_heat1", {sol_heat1(heat_kernel(1, 0)), sol_heat1(heat_poly(3))}},
      {"sol_heat2", {sol_heat2(heat_kernel(1, 0)), sol_heat2(heat_poly(3))}},
      {"sol_invsq mu=0", {sol_invsq(0, invsq_kernel(0.75, 1, 1)), sol_invsq(0, invsq_kernel(0.75, 2, -1))}},
      {"sol_invsq mu=-3/16", {sol_invsq(-3.0 / 16, heat_kernel(1, 0)), sol_invsq(-3.0 / 16, heat_poly(2))}},
      {"sol_invsq mu=0.5", {sol_invsq(0.5, invsq_kernel(2.75, 1, 1)), sol_invsq(0.5, invsq_kernel(2.75, 2, -1))}},
      {"gensol1 n=1", {gen_solution1(1, heat_kernel(1, 0)), gen_solution1(1, heat_poly(3))}},
      {"gensol1 n=2", {gen_solution1(2, heat_kernel(1, 0)), gen_solution1(2, heat_poly(3))}},
      {"gensol1 n=3", {gen_solution1(3, heat_kernel(1, 0)), gen_solution1(3, heat_poly(3))}},
      {"gensol2", {gen_solution2(radial(1)), gen_solution2(radialpoly())}},
  };
  double worst = 0;
  for (const auto& [label, us] : fams)
    for (const auto& u : us) {
      const VerificationReport r = verify_solution(u, grid, 1e-9);
      worst = std::max(worst, r.max_relative_residual);
      o.check(r.pass && r.points_evaluated == 48, label + " [" + u.name + "] max relative residual " +
                                                      num(r.max_relative_residual));
    }
  o.note(std::to_string(fams.size()) + " families x 2 seeds on the 48-point grid, worst relative residual " + num(worst));
  return o;
}

// ------------------------------------------------------------------ 9
Outcome c9() {
  Outcome o;
  for (int n = 1; n <= 3; ++n)
    for (const auto& th : {heat_kernel(1, 0), heat_poly(3)}) {
      const SolutionExpr u = gen_solution1(n, th);
      for (const auto& p : default_grid({6, 9})) {
        const Jetd j = u.jet(p.t, p.x, p.y, n);
        o.check(j.derivative({0, 0, n}) == 0.0, "d_y^n u != 0 for n = " + std::to_string(n));
      }
    }
  // the top y-power survives: degree is exactly n - 1
  const Jetd top = gen_solution1(3, heat_poly(3)).jet(0.2, 0.7, 0.1, 2);
  o.check(top.derivative({0, 0, 2}) != 0.0, "gensol1(3) has y-degree below 2");

  double worst = 0;
  for (int eps : {1, -1})
    for (int n : {1, 2, 3}) {
      const auto w = hn_tuple(n, heat_kernel(1, 0.1), eps);
      for (double z1 : {-0.2, 0.4})
        for (double z2 : {-0.7, 0.5, 1.1})
          for (int s = 0; s < n; ++s) {
            const Jetd a = w[s].jet(z1, z2, 2);
            const double w1 = a.derivative({1, 0, 0}), w22 = a.derivative({0, 2, 0});
            const double next = s + 1 < n ? eps * std::exp(z2) * w[s + 1].value(z1, z2) : 0.0;
            const double rel = std::abs(w1 - w22 + next) / std::max(std::abs(w1) + std::abs(w22) + std::abs(next), 1e-300);
            worst = std::max(worst, rel);
            o.check(rel <= 1e-9, "H_n relation off by " + num(rel));
          }
    }
  o.note("d_y^n u = 0 exactly for n = 1..3; H_n relations max relative " + num(worst));
  return o;
}

// ------------------------------------------------------------------ 10
Outcome c10() {
  Outcome o;
  const auto grid = default_grid();
  double pos = 0, neg = 0, neg_raw = 0;
  for (int n = 1; n <= 3; ++n)
    for (const auto& th : {heat_kernel(1, 0), heat_poly(3)}) {
      ConcreteOperator Kn = identity_operator();
      for (int k = 1; k < n; ++k) Kn = realize(Letter::K) * Kn;
      const SolutionExpr a = apply_to_solution(Kn, sol_heat2(th)), b = gen_solution1(n, th);
      for (const auto& p : grid) {
        const double va = a.value(p.t, p.x, p.y), vb = b.value(p.t, p.x, p.y);
        const double scale = std::max(std::abs(vb), 1.0);
        if (p.x > 0) {
          pos = std::max(pos, std::abs(va - vb) / scale);
          o.check(std::abs(va - vb) <= 1e-8 * scale, "x > 0 mismatch at n = " + std::to_string(n));
        } else {
          const double sg = (n - 1) % 2 ? -1.0 : 1.0;
          neg = std::max(neg, std::abs(va - sg * vb) / scale);
          neg_raw = std::max(neg_raw, std::abs(va - vb) / scale);
          o.check(std::abs(va - sg * vb) <= 1e-8 * scale, "x < 0 mismatch at n = " + std::to_string(n));
        }
      }
    }
  o.note("x>0: max deviation " + num(pos) + "; x<0 up to sgn(x)^(n-1): " + num(neg) + " (without the sign: " +
         num(neg_raw) + ")");
  return o;
}

// ------------------------------------------------------------------ 11
Outcome c11() {
  Outcome o;
  Rng r(2);
  const GroupElement id = GroupElement::identity();
  for (int k = 0; k < 100; ++k) {
    const GroupElement a = r.element(), b = r.element(), c = r.element();
    o.check(compose(compose(a, b), c).approx_equal(compose(a, compose(b, c))), "associativity");
    o.check(compose(a, id).approx_equal(a) && compose(id, a).approx_equal(a), "identity");
    o.check(compose(inverse(a), a).approx_equal(id) && compose(a, inverse(a)).approx_equal(id), "inverse");
  }

  const std::vector<SolutionExpr> fams = {sol_heat1(heat_kernel(1, 0)), sol_heat2(heat_poly(3)),
                                          sol_invsq(0.5, invsq_kernel(2.75, 1, 1)), gen_solution1(2, heat_kernel(1, 0)),
                                          gen_solution2(radialpoly())};
  Rng rg(4);
  double worst = 0;
  for (int k = 0; k < 20; ++k) {
    const GroupElement g = rg.element();
    for (const auto& u : fams) {
      const VerificationReport rep = verify_solution(act_solution(g, u), default_grid({6, 42 + std::uint64_t(k)}), 1e-9);
      worst = std::max(worst, rep.max_relative_residual);
      o.check(rep.points_evaluated > 0 && rep.max_relative_residual <= 1e-9,
              "transformed " + u.name + " residual " + num(rep.max_relative_residual));
    }
  }

  Rng rp(5);
  const SolutionExpr h = sol_heat1(heat_kernel(1, 0.3));
  int graph = 0;
  for (int k = 0; k < 60 && graph < 20; ++k) {
    GroupElement g = rp.element();
    if (k % 3 == 0) g.f = constant_solution(0.25);
    const PointU p{rp(), rp(0.3, 1.5) * (k % 2 ? -1 : 1), rp(), 0};
    try {
      const PointU q = act_point(g, {p.t, p.x, p.y, h.value(p.t, p.x, p.y)});
      const double v = act_solution(g, h).value(q.t, q.x, q.y);
      o.check(std::abs(v - q.u) <= 1e-10 * std::max(1.0, std::abs(q.u)), "graph inconsistency");
      ++graph;
    } catch (const DomainError&) {
    }
  }
  o.check(graph == 20, "fewer than 20 graph points");
  o.note("axioms on 100 triples; 20 elements x 5 families, worst residual " + num(worst) + "; " +
         std::to_string(graph) + " graph points");
  return o;
}

// ------------------------------------------------------------------ 12
Outcome c12() {
  Outcome o;
  const Mat2d S = mat(1, 0, 0, -1);
  Rng r(6);
  auto random_pm = [&] {
    Mat2d M;
    do M = mat(r(), r(), r(), r());
    while (std::abs(M.determinant()) < 0.2);
    return Mat2d(M / std::sqrt(std::abs(M.determinant())));
  };
  for (int k = 0; k < 100; ++k) {
    const Mat2d M1 = random_pm(), M2 = random_pm();
    const SlpmFactor f1 = factor_slpm(M1), f2 = factor_slpm(M2);
    const Mat2d back = f1.d ? Mat2d(f1.sl * S) : f1.sl;
    o.check((back - M1).cwiseAbs().maxCoeff() == 0.0, "factorization does not round-trip exactly");
    o.check(std::abs(f1.sl.determinant() - 1) <= 1e-12, "SL factor has det != 1");
    o.check(factor_slpm(M1 * M2).d == (f1.d + f2.d) % 2, "d is not additive mod 2");
    const Mat2d phi = S * M1 * S;
    o.check((phi - mat(M1(0, 0), -M1(0, 1), -M1(1, 0), M1(1, 1))).cwiseAbs().maxCoeff() == 0.0,
            "involution formula fails");
    o.check(((S * phi * S) - M1).cwiseAbs().maxCoeff() == 0.0, "involution is not an involution");
  }
  o.note("100 random +-1-determinant matrices");
  return o;
}

// ------------------------------------------------------------------ 13
struct BranchRun {
  double fine = 0, canonical = 0;
  std::string error;
};

BranchRun run_branch(const CanonicalMap& m, MapForm f) {
  BranchRun out;
  const ReductionCase& c = m.rcase;
  CanonicalSeed seed;
  if (m.is_free_heat()) {
    seed = [](int) { return heat_kernel(1, 0); };
  } else if (c.id == CaseId::C11) {
    const double mt = 4 * c.mu + 0.75;
    seed = [mt](int) { return invsq_kernel(mt, 1, 1); };
  } else if (m.form(f).autonomous) {
    seed = [m, f](int side) { return canonical_mode(m, f, 0.5, side); };
  } else {
    out.error = "potential depends on z~1, no separable canonical seed";
    out.fine = out.canonical = INFINITY;
    return out;
  }
  const SolutionExpr u = ansatz_lift(c, canonical_pull(m, seed, f));
  auto side_of = [&](const GridPoint& p) {
    if (!c.regular(p.t, p.x, p.y)) return 0;
    const Jetd T = Jetd::constant(3, 0, p.t), X = Jetd::constant(3, 0, p.x), Y = Jetd::constant(3, 0, p.y);
    const double z2 = c.z2(T, X, Y).value();
    if (!m.in_branch(z2) || m.margin(z2) < 0.05) return 0;
    return z2 > 0 ? 1 : -1;
  };
  const auto pts = filtered_grid({24, 42}, side_of, m.sides);
  out.fine = verify_solution(u, pts, 1e-9).max_relative_residual;
  for (const auto& p : pts) {
    const Jetd T = Jetd::constant(3, 0, p.t), X = Jetd::constant(3, 0, p.x), Y = Jetd::constant(3, 0, p.y);
    const double z1 = c.z1(T, X, Y).value(), z2 = c.z2(T, X, Y).value();
    const int side = z2 > 0 ? 1 : -1;
    out.canonical = std::max(
        out.canonical, canonical_residual(m, f, seed(side), m.z1_factor(f, side) * z1, m.forward(z2), side).relative);
  }
  return out;
}

Outcome c13() {
  Outcome o;
  int branches = 0;
  std::vector<std::string> corrected;
  for (const auto& e : case_table())
    for (const auto& m : e.maps) {
      ++branches;
      const BranchRun d = run_branch(m, MapForm::Display);
      o.check(d.error.empty() && d.fine <= 1e-9 && d.canonical <= 1e-9,
              m.id() + " (as displayed): " + (d.error.empty() ? "fine residual " + num(d.fine) : d.error));
      if (!m.anomaly.empty()) {
        const BranchRun cr = run_branch(m, MapForm::Corrected);
        corrected.push_back(m.id() + " corrected form: fine residual " + num(cr.fine));
      }
    }
  o.note(std::to_string(branches) + " canonical branches");
  for (const auto& s : corrected) o.note(s);

  const HeatSolution th = heat_kernel(1, 0);
  const CanonicalMap m11 = canonical_map(make_case(CaseId::C11, -0.1875), "");
  const CanonicalMap m14 = canonical_map(make_case(CaseId::C14, 0, 0), "");
  const SolutionExpr a = ansatz_lift(m11.rcase, canonical_pull(m11, th)), b = sol_heat1(th);
  const SolutionExpr c = ansatz_lift(m14.rcase, canonical_pull(m14, th)), d = sol_heat2(th);
  double chain = 0;
  for (const auto& p : default_grid()) {
    const double vb = b.value(p.t, p.x, p.y), vd = d.value(p.t, p.x, p.y);
    chain = std::max(chain, std::abs(a.value(p.t, p.x, p.y) - vb) / std::max(std::abs(vb), 1e-300));
    chain = std::max(chain, std::abs(c.value(p.t, p.x, p.y) - vd) / std::max(std::abs(vd), 1e-300));
  }
  o.check(chain <= 1e-9, "chains deviate by " + num(chain));

  double inv = 0;
  for (const auto& e : case_table())
    for (const auto& m : e.maps)
      for (int side : m.sides)
        for (double u = 0.06; u < 3.0; u += 0.0137) {
          const double z2 = side * u;
          if (!m.in_branch(z2) || m.margin(z2) < 0.05) continue;
          const double zt2 = m.forward(z2);
          inv = std::max(inv, std::abs(m.forward(m.inverse(zt2, side)) - zt2) / std::max(1.0, std::abs(zt2)));
        }
  o.check(inv <= 1e-12, "inverse error " + num(inv));
  o.note("chains to sol_heat1/sol_heat2 deviate by " + num(chain) + "; inverse error " + num(inv));
  return o;
}

// ------------------------------------------------------------------ 14
#ifndef FKBE_CLI
#define FKBE_CLI "fkbe"
#endif

std::string run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + FKBE_CLI + "\" " + args + " 2>&1";
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return "<popen failed>";
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
  const int st = pclose(p);
  return out + "\n<status " + std::to_string(st) + ">";
}

Outcome c14() {
  Outcome o;
  const std::vector<std::string> invocations = {
      "verify --family sol-heat2 --seed 'kernel(1,0)'",
      "verify --family gensol1 --n 3 --seed 'poly(3)' --grid-seed 7 --points 10",
      "verify --family witness-y",
      "generate --by 'K(0.3)' --seed 'sol-heat2:kernel(1,0)'",
      "generate --by-op K --seed 'sol-heat2:kernel(1,0)' --compare 'gensol1:kernel(1,0)' --n 2",
      "algebra independence --degree 3 --samples 200 --seed 11",
      "algebra normal-order 'Py*K*D'",
      "classify quadruple s3.6",
      "reduce 1.5:nu=1,mu=0.5 --branch hi --canonical-seed 'mode(0.5)'",
  };
  for (const auto& args : invocations) {
    const std::string a = run_cli(args), b = run_cli(args);
    o.check(a == b && a.size() > 12, "output differs or is empty: fkbe " + args);
  }
  o.note(std::to_string(invocations.size()) + " invocations byte-identical across two runs");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  app.add_option("--only", only, "run a single criterion (1-14)")->check(CLI::Range(1, 14));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"algebra table", c1},
      {"pushforward oracle", c2},
      {"normalizers", c3},
      {"catalog integrity", c4},
      {"PBW engine", c5},
      {"operator realization of L", c6},
      {"PBW independence", c7},
      {"solution residuals", c8},
      {"generalized-constraint structure", c9},
      {"K iteration", c10},
      {"group engine", c11},
      {"semidirect factorization", c12},
      {"reductions", c13},
      {"determinism", c14},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int k = static_cast<int>(i) + 1;
    if (only && only != k) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& err) {
      o.check(false, std::string("exception: ") + err.what());
    }
    if (!o.pass) ++failed;
    std::cout << "criterion " << k << ": " << (o.pass ? "PASS" : "FAIL") << "  " << criteria[i].first << " ("
              << o.checks - o.failures << "/" << o.checks << " checks)\n";
    for (const auto& n : o.notes) std::cout << "    " << n << "\n";
  }
  return failed ? 1 : 0;
}
