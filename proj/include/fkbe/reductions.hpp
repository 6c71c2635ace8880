// Codimension-one Lie reductions u = A(t,x,y) w(z1, z2) and the point
// transformations taking each reduced equation to a heat equation with
// potential, w~_1 = w~_22 + V(z~2) w~.
#pragma once

#include "fkbe/lie_algebra.hpp"
#include "fkbe/op_algebra.hpp"
#include "fkbe/solutions.hpp"

#include <functional>
#include <string>
#include <vector>

namespace fkbe {

enum class CaseId { C11, C13, C14, C15, C17 };

struct ReductionCase {
  CaseId id = CaseId::C11;
  double mu = 0, delta = 0, nu = 0;

  std::string label() const;  // e.g. "1.5:nu=1,mu=0.5"
  Jetd z1(const Jetd& t, const Jetd& x, const Jetd& y) const;
  Jetd z2(const Jetd& t, const Jetd& x, const Jetd& y) const;
  Jetd multiplier(const Jetd& t, const Jetd& x, const Jetd& y) const;
  bool regular(double t, double x, double y) const;
  std::string locus() const;
  // Generator of the subalgebra whose invariants are (z1, z2, u/A).
  EssVector<double> generator() const;
};

// Validates delta in {0, 1}, nu >= 0 and mu >= 0 when nu = 0 (1.5, 1.7).
ReductionCase make_case(CaseId id, double mu = 0, double delta = 0, double nu = 0);
// "1.1:mu=-0.1875", "1.4:delta=0", "1.5:nu=1,mu=0.5"
ReductionCase parse_case(const std::string& text);
std::string case_name(CaseId id);

SolutionExpr ansatz_lift(const ReductionCase& c, const PlaneSolution& w);
// Reduced equation of the case, written as an expression that vanishes on solutions.
Jetd reduced_operator(const ReductionCase& c, const Jetd& w);  // w: jet in (z1, z2), order >= 2
Residual reduced_residual(const ReductionCase& c, const PlaneSolution& w, double z1, double z2);

// Realized symmetry operator of a generator; Q u = 0 expresses invariance.
ConcreteOperator realize_generator(const EssVector<double>& v);

enum class MapForm { Display, Corrected };
enum class Z1Rule { Same, Flip, SignZ2 };

struct CanonicalForm {
  Z1Rule z1_rule = Z1Rule::Same;
  // V in terms of the original (z1, z2) and of z~2.
  std::function<Jetd(const Jetd& z1, const Jetd& z2, const Jetd& zt2)> potential;
  bool autonomous = true;
  std::string text;
};

struct CanonicalMap {
  ReductionCase rcase;
  std::string branch;  // "", "lo", "hi" or "nu0"
  CanonicalForm display, corrected;
  std::string anomaly;  // empty when the display verifies

  std::function<Jetd(const Jetd&)> Z;   // z~2 = Z(z2)
  std::function<Jetd(const Jetd&)> dZ;  // dZ/dz2
  std::function<Jetd(const Jetd&, const Jetd&)> W;  // w~ = W(z1, z2) w
  std::vector<int> sides;  // admissible values of sgn z2

  std::string id() const;
  const CanonicalForm& form(MapForm f) const { return f == MapForm::Display ? display : corrected; }
  bool in_branch(double z2) const;
  double margin(double z2) const;  // distance of z2 to the branch boundary
  double z1_factor(MapForm f, int side) const;

  double forward(double z2) const { return Z(Jetd::constant(1, 0, z2)).value(); }
  // Bracketed bisection then Newton polish; |Z(z2) - zt2| <= 1e-12.
  double inverse(double zt2, int side) const;
  // z2 as a jet in the variables of zt2 (Newton iteration on jets).
  Jetd inverse_jet(const Jetd& zt2, int side) const;
  bool is_free_heat() const;
};

std::vector<CanonicalMap> canonical_maps(const ReductionCase& c);
CanonicalMap canonical_map(const ReductionCase& c, const std::string& branch);

struct CaseTemplate {
  CaseId id;
  std::vector<CanonicalMap> maps;
};
std::vector<CaseTemplate> case_table();

// A canonical-form solution may depend on the sign side of z2.
using CanonicalSeed = std::function<PlaneSolution(int side)>;

PlaneSolution canonical_pull(const CanonicalMap& m, const CanonicalSeed& seed, MapForm f = MapForm::Display);
PlaneSolution canonical_pull(const CanonicalMap& m, const PlaneSolution& seed, MapForm f = MapForm::Display);
PlaneSolution canonical_push(const CanonicalMap& m, const PlaneSolution& w, int side, MapForm f = MapForm::Display);

// w~_1 - w~_22 - V w~
Residual canonical_residual(const CanonicalMap& m, MapForm f, const PlaneSolution& wt, double zt1, double zt2, int side);

// y'' = p(x) y' + q(x) y integrated by Taylor series from (x0, y0, y0');
// returns the normalized Taylor coefficients of y at x1 up to `order`.
struct LinearOde2 {
  std::function<Jetd(const Jetd&)> p, q;  // univariate jets
};
std::vector<double> ode_series(const LinearOde2& ode, double x0, double y0, double dy0, double x1, int order);

// e^{lambda z1} g(z2) solving the reduced equation, g(side) = 1, g'(side) = 1/4.
PlaneSolution reduced_mode(const ReductionCase& c, double lambda, int side);
// e^{lambda z~1} g(z~2) solving the canonical equation on one side; needs an
// autonomous potential.
PlaneSolution canonical_mode(const CanonicalMap& m, MapForm f, double lambda, int side);

}  // namespace fkbe
