// The essential Lie invariance algebra <P^y, D, K, P^t, I>: brackets, the
// sl(2,R) realization of f = <P^y, D, K>, adjoint action of Moebius
// matrices, exact linear algebra on spans and the subalgebra catalog.
#pragma once

#include "fkbe/rational.hpp"

#include <Eigen/Core>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fkbe {

enum Generator : int { Py = 0, Dil = 1, Kgen = 2, Pt = 3, Iden = 4 };

template <class S>
using EssVector = Eigen::Matrix<S, 5, 1>;
template <class S>
using Mat2 = Eigen::Matrix<S, 2, 2>;

template <class S>
EssVector<S> ess_basis(int g) {
  EssVector<S> v = EssVector<S>::Zero();
  v[g] = S(1);
  return v;
}

// [P^y,D] = P^y, [P^y,K] = 2D, [D,K] = K; P^t and I are central.
template <class S>
EssVector<S> bracket(const EssVector<S>& a, const EssVector<S>& b) {
  EssVector<S> r = EssVector<S>::Zero();
  r[Py] = a[Py] * b[Dil] - a[Dil] * b[Py];
  r[Dil] = S(2) * (a[Py] * b[Kgen] - a[Kgen] * b[Py]);
  r[Kgen] = a[Dil] * b[Kgen] - a[Kgen] * b[Dil];
  return r;
}

// P^y -> e, D -> -h/2, K -> -f.
template <class S>
Mat2<S> sl2_realize(const EssVector<S>& a) {
  if (!is_zero(a[Pt]) || !is_zero(a[Iden]))
    throw std::invalid_argument("sl2_realize: vector has a nonzero central (P^t, I) part");
  Mat2<S> m;
  m << -a[Dil] / S(2), a[Py], -a[Kgen], a[Dil] / S(2);
  return m;
}

template <class S>
EssVector<S> sl2_unrealize(const Mat2<S>& m) {
  EssVector<S> a = EssVector<S>::Zero();
  a[Py] = m(0, 1);
  a[Kgen] = -m(1, 0);
  a[Dil] = m(1, 1) - m(0, 0);
  return a;
}

// Plain 2x2 product; Eigen's operator* overload set does not instantiate
// cleanly for Boost rationals.
template <class S>
Mat2<S> mul2(const Mat2<S>& A, const Mat2<S>& B) {
  Mat2<S> C;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) C(i, j) = A(i, 0) * B(0, j) + A(i, 1) * B(1, j);
  return C;
}

// Adjoint action of the Moebius part of a point symmetry with matrix M on
// f; the centre is fixed. Conjugation runs through N = S M S with
// S = diag(1, -1), which turns the left Moebius action into the realization's
// orientation (N X N^{-1} is the vector-field pushforward).
template <class S>
EssVector<S> pushforward(const Mat2<S>& M, const EssVector<S>& a) {
  Mat2<S> N = M;
  N(0, 1) = -N(0, 1);
  N(1, 0) = -N(1, 0);
  const S det = N(0, 0) * N(1, 1) - N(0, 1) * N(1, 0);
  Mat2<S> Ninv;
  Ninv << N(1, 1) / det, -N(0, 1) / det, -N(1, 0) / det, N(0, 0) / det;
  EssVector<S> f = a;
  f[Pt] = S(0);
  f[Iden] = S(0);
  EssVector<S> r = sl2_unrealize<S>(mul2<S>(mul2<S>(N, sl2_realize(f)), Ninv));
  r[Pt] = a[Pt];
  r[Iden] = a[Iden];
  return r;
}

using RVec = EssVector<Rational>;

// Reduced row echelon form of the rows; returns the nonzero rows.
template <class S>
std::vector<EssVector<S>> row_reduce(std::vector<EssVector<S>> rows) {
  std::size_t r = 0;
  for (int col = 0; col < 5 && r < rows.size(); ++col) {
    std::size_t piv = r;
    for (std::size_t i = r; i < rows.size(); ++i) {
      using std::abs;
      if (abs(rows[i][col]) > abs(rows[piv][col])) piv = i;
    }
    if (is_zero(rows[piv][col])) continue;
    std::swap(rows[r], rows[piv]);
    const S lead = rows[r][col];
    for (int k = 0; k < 5; ++k) rows[r][k] = rows[r][k] / lead;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || is_zero(rows[i][col])) continue;
      const S c = rows[i][col];
      for (int k = 0; k < 5; ++k) rows[i][k] = rows[i][k] - c * rows[r][k];
    }
    ++r;
  }
  rows.resize(r);
  return rows;
}

template <class S>
int rank(const std::vector<EssVector<S>>& rows) {
  return static_cast<int>(row_reduce(rows).size());
}

template <class S>
bool in_span(const EssVector<S>& v, const std::vector<EssVector<S>>& basis) {
  auto ext = basis;
  ext.push_back(v);
  return rank(ext) == rank(basis);
}

template <class S>
bool span_equal(const std::vector<EssVector<S>>& a, const std::vector<EssVector<S>>& b) {
  auto ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  const int r = rank(ab);
  return r == rank(a) && r == rank(b);
}

template <class S>
bool is_closed(const std::vector<EssVector<S>>& basis) {
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = i + 1; j < basis.size(); ++j)
      if (!in_span(bracket(basis[i], basis[j]), basis)) return false;
  return true;
}

struct SubalgebraSpan {
  std::vector<RVec> basis;
  std::string label;  // catalog id with parameters, e.g. "s1.5:nu=1,mu=0"; may be empty
};

// {x : [x, b] in span(s) for all b in s}, exact.
SubalgebraSpan normalizer(const SubalgebraSpan& s);

struct Quadruple {
  int n = 0, n_hat = 0, n_check = 0, m = 0;
  friend bool operator==(const Quadruple&, const Quadruple&) = default;
};

Quadruple invariant_quadruple(const SubalgebraSpan& s);

std::string format_vector(const RVec& v);
std::string format_span(const std::vector<RVec>& basis);

// Subalgebra catalog.

enum class Domain { Real, Positive, NonNegative, ZeroOne, Zero };

struct ParamSpec {
  std::string name;
  Domain domain;
};

struct CatalogFamily {
  std::string id;     // "s1.5"
  std::string label;  // "s1.5^{nu',mu}"
  int dim;
  std::vector<ParamSpec> params;
  std::function<std::vector<RVec>(const std::vector<Rational>&)> build;
};

const std::vector<CatalogFamily>& catalog_families();
std::vector<const CatalogFamily*> catalog(std::optional<int> dim = std::nullopt);

// Instantiates a family at concrete parameters; throws std::invalid_argument
// on a domain violation.
SubalgebraSpan instantiate(const CatalogFamily& fam, const std::vector<Rational>& values);

// Parses "s1.1:mu=0.5", "s1.4:0", "s2.8:nu=1,mu=0"; named or positional.
SubalgebraSpan instantiate(const std::string& id);

struct EquivalenceWitness {
  std::string pair_id;
  std::string transform;  // "J'" or "identity"
  Mat2<Rational> matrix;
  SubalgebraSpan source, target;
  bool verified = false;
};

const std::vector<std::string>& equivalence_pairs();

// pair_id is one of equivalence_pairs() or "identity:<catalog id>".
EquivalenceWitness equivalence_witness(const std::string& pair_id, const Rational& mu = Rational(7, 10),
                                       const Rational& mu2 = Rational(-3, 10));

}  // namespace fkbe
