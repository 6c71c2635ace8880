// The essential point-symmetry group: elements (lambda, sigma, M, f) act by
//   t~ = t + lambda,  x~ = det(M) x / (gamma y + delta)^2,
//   y~ = (alpha y + beta) / (gamma y + delta),
//   u~ = sigma exp(gamma x / (gamma y + delta)) (u + f(t, x, y)),
// with M = [[alpha, beta], [gamma, delta]], det M = +-1, and M ~ -M.
#pragma once

#include "fkbe/lie_algebra.hpp"
#include "fkbe/solution_expr.hpp"

#include <Eigen/LU>

#include <optional>
#include <string>

namespace fkbe {

using Mat2d = Mat2<double>;

struct SingularLocus {
  double gamma = 0, delta = 1;
  bool empty() const { return gamma == 0; }
  std::string describe() const;
};

struct GroupElement {
  double lambda = 0;
  double sigma = 1;
  Mat2d M = Mat2d::Identity();
  std::optional<SolutionExpr> f;

  // Validates sigma != 0 and |det M| > 0, rescales to |det M| = 1 and fixes
  // the sign of M.
  static GroupElement make(double lambda, double sigma, const Mat2d& M, std::optional<SolutionExpr> f = std::nullopt);
  static GroupElement identity() { return {}; }

  double alpha() const { return M(0, 0); }
  double beta() const { return M(0, 1); }
  double gamma() const { return M(1, 0); }
  double delta() const { return M(1, 1); }
  double det() const { return M.determinant(); }
  SingularLocus singular_locus() const { return {gamma(), delta()}; }

  bool approx_equal(const GroupElement& o, double tol = 1e-12) const;
};

// Canonical representative of +-M: first entry (row-major) with |m| > 1e-12
// is positive.
Mat2d canonical_matrix(Mat2d M);

GroupElement compose(const GroupElement& g1, const GroupElement& g2);  // g1 after g2
GroupElement inverse(const GroupElement& g);

struct PointU {
  double t = 0, x = 0, y = 0, u = 0;
};

PointU act_point(const GroupElement& g, const PointU& p);
SolutionExpr act_solution(const GroupElement& g, const SolutionExpr& h);

enum class OneParam { Py, D, K, Pt, I, Qplus };
GroupElement one_param(OneParam id, double eps);
OneParam parse_one_param(const std::string& name);

enum class Discrete { Iprime, Jprime };
GroupElement discrete(Discrete which);

struct SlpmFactor {
  Mat2d sl;
  int d = 0;
};
SlpmFactor factor_slpm(const Mat2d& M);

struct GessDecomposition {
  GroupElement f_part, z_part;  // g = f_part * z_part
  GroupElement h_part, p_part;  // g = h_part * p_part
};
GessDecomposition gess_decompose(const GroupElement& g);

EssVector<double> pushforward(const GroupElement& g, const EssVector<double>& a);

std::string describe(const GroupElement& g);

}  // namespace fkbe
