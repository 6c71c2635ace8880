// Closed-form solution families: free heat, heat with inverse-square
// potential, and the fine Kolmogorov backward equation u_t + x u_y = x^2 u_xx.
#pragma once

#include "fkbe/solution_expr.hpp"

#include <string>
#include <vector>

namespace fkbe {

// Solution of w_1 = w_22 - mu_tilde z2^{-2} w in (z1, z2); mu_tilde = 0 is
// the free heat equation.
struct PlaneSolution {
  std::string name;
  double mu_tilde = 0;
  Field2 fn;
  std::function<bool(double, double)> regular;
  std::string locus;

  void check(double z1, double z2) const {
    if (regular && !regular(z1, z2))
      throw DomainError(name + ": point (" + std::to_string(z1) + ", " + std::to_string(z2) +
                        ") lies on the singular locus " + locus);
  }
  Jetd operator()(const Jetd& z1, const Jetd& z2) const {
    check(z1.value(), z2.value());
    return fn(z1, z2);
  }
  Jetd jet(double z1, double z2, int order) const {
    check(z1, z2);
    return taylor2(fn, z1, z2, order);
  }
  double value(double z1, double z2) const { return jet(z1, z2, 0).value(); }
};

using HeatSolution = PlaneSolution;
using InvSqSolution = PlaneSolution;

struct Residual {
  double raw = 0;
  double relative = 0;
  double scale = 0;
};

// Relative residual |raw| / scale with 0/0 -> 0.
Residual make_residual(double raw, double scale);

// w_1 - w_22 + mu_tilde z2^{-2} w
Residual residual(const PlaneSolution& w, double z1, double z2);
// u_t + x u_y - x^2 u_xx
Residual residual(const SolutionExpr& u, double t, double x, double y);

// Free heat.
HeatSolution heat_kernel(double s0, double x0);
HeatSolution heat_poly(int k);
HeatSolution heat_expmode(double lambda);
HeatSolution heat_shift(const HeatSolution& th, double dz1, double dz2);
HeatSolution heat_scale(const HeatSolution& th, double a);  // th(a^2 z1, a z2)

// Inverse-square potential.
InvSqSolution stationary_power(double mu_tilde, int branch);
InvSqSolution invsq_kernel(double mu_tilde, double s0, int branch);
InvSqSolution radial(double s0);
InvSqSolution radialpoly();
InvSqSolution darboux_from(const InvSqSolution& v);

PlaneSolution combine(double a, const PlaneSolution& f, double b, const PlaneSolution& g);
PlaneSolution plane_zero(double mu_tilde = 0);
// d/dz_{which} of a plane function (potential bookkeeping dropped)
PlaneSolution plane_partial(const PlaneSolution& f, int which);

// Fine-equation families; epsilon = sgn x on the branch of the base point.
SolutionExpr sol_heat1(const HeatSolution& th);
SolutionExpr sol_heat2(const HeatSolution& th);
SolutionExpr sol_invsq(double mu, const InvSqSolution& th);
SolutionExpr gen_solution1(int n, const HeatSolution& th);
SolutionExpr gen_solution2(const InvSqSolution& v);
std::vector<PlaneSolution> hn_tuple(int n, const HeatSolution& th, int eps = 1);

SolutionExpr constant_solution(double c);
SolutionExpr coordinate_solution(int which);  // t, x or y
SolutionExpr combine(double a, const SolutionExpr& f, double b, const SolutionExpr& g);

}  // namespace fkbe
