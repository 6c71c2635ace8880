// The enveloping algebra of f = <P^y, D, K> in the PBW basis
// K^a (P^y)^b D^c, and its realization by Lie-symmetry operators of the
// fine Kolmogorov backward equation.
#pragma once

#include "fkbe/rational.hpp"
#include "fkbe/solution_expr.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace fkbe {

struct OpMonomial {
  int k = 0, py = 0, d = 0;  // K^k (P^y)^py D^d
  int degree() const { return k + py + d; }
  friend auto operator<=>(const OpMonomial&, const OpMonomial&) = default;
};

class OpPoly {
 public:
  using Terms = std::map<OpMonomial, Rational>;

  OpPoly() = default;
  explicit OpPoly(const Rational& c) { add(OpMonomial{}, c); }
  OpPoly(OpMonomial m, const Rational& c = 1) { add(m, c); }

  static OpPoly gen_K() { return OpPoly(OpMonomial{1, 0, 0}); }
  static OpPoly gen_Py() { return OpPoly(OpMonomial{0, 1, 0}); }
  static OpPoly gen_D() { return OpPoly(OpMonomial{0, 0, 1}); }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;
  Rational coeff(const OpMonomial& m) const;

  void add(const OpMonomial& m, const Rational& c);

  OpPoly& operator+=(const OpPoly& o);
  OpPoly& operator-=(const OpPoly& o);
  OpPoly& operator*=(const Rational& s);
  friend OpPoly operator+(OpPoly a, const OpPoly& b) { return a += b; }
  friend OpPoly operator-(OpPoly a, const OpPoly& b) { return a -= b; }
  friend OpPoly operator*(OpPoly a, const Rational& s) { return a *= s; }
  friend OpPoly operator*(const Rational& s, OpPoly a) { return a *= s; }
  friend OpPoly operator*(const OpPoly& a, const OpPoly& b);
  friend bool operator==(const OpPoly&, const OpPoly&) = default;

 private:
  Terms terms_;
};

OpPoly op_multiply(const OpPoly& p, const OpPoly& q);
OpPoly op_pow(const OpPoly& p, int n);
OpPoly commutator(const OpPoly& p, const OpPoly& q);

// D^2 - D - K P^y
OpPoly casimir();

// (prod_{k=1..n} (P^y K + 2k D + k^2 + k)) P^y; n = 0 gives P^y.
OpPoly lemma_product(int n);
// (P^y)^{n+1} K^n
OpPoly lemma_rhs(int n);

// Words over {K = 0, P^y = 1, D = 2} and the rewrite system
//   P^y K -> K P^y + 2D,  D K -> K D + K,  D P^y -> P^y D - P^y.
using Word = std::vector<std::uint8_t>;
enum class RewriteStrategy { Leftmost, Rightmost, Random };
OpPoly normal_order(const Word& w, RewriteStrategy s = RewriteStrategy::Leftmost, std::uint64_t seed = 0);

// Text syntax: Py, D, K, integers, p/q, +, -, *, ^n, parentheses.
OpPoly parse_op(const std::string& text);
std::string to_string(const OpPoly& p);

// Concrete operators acting on functions of (t, x, y).
enum class Letter : std::uint8_t { Py, D, K, Pt, L };

struct ConcreteOperator {
  std::vector<std::pair<Rational, std::vector<Letter>>> terms;  // words act right to left

  int degree() const;
  friend ConcreteOperator operator*(const ConcreteOperator& a, const ConcreteOperator& b);
  friend ConcreteOperator operator+(ConcreteOperator a, const ConcreteOperator& b);
  friend ConcreteOperator operator*(const Rational& s, ConcreteOperator a);
};

ConcreteOperator identity_operator();
ConcreteOperator realize(Letter g);
ConcreteOperator realize(const OpPoly& p);

// Applies op to a jet in (t, x, y); the result loses degree() orders.
Jetd apply(const ConcreteOperator& op, const Jetd& f);
Jetd apply(const ConcreteOperator& op, const SolutionExpr& f, double t, double x, double y, int out_order);
SolutionExpr apply_to_solution(const ConcreteOperator& op, const SolutionExpr& f, std::string name = {});

struct IndependenceReport {
  bool independent = false;
  int monomials = 0;
  int samples = 0;
  double min_singular = 0;  // after column normalization
  double max_singular = 0;
};

// Evaluates every K^a P^y^b D^c with a+b+c <= max_degree on e^{mu x + nu y}
// at random (x, y, mu, nu); full column rank certifies independence.
IndependenceReport symbol_independence_test(int max_degree, int samples, std::uint64_t seed = 20240611,
                                            bool duplicate_column = false);

std::vector<OpMonomial> monomials_up_to(int degree);

}  // namespace fkbe
