#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "sral/linalg.hpp"
#include "sral/radical.hpp"

namespace sral {
namespace elem {

struct ElemTerm {
  CMatrix a;  // m x m left coefficient
  CMatrix b;  // n x n right coefficient
  bool a_compact = false;
  bool b_compact = false;
};

// x -> sum_i a_i x b_i on m x n matrices.
struct ElementaryOperator {
  Eigen::Index m = 0;
  Eigen::Index n = 0;
  std::vector<ElemTerm> terms;
};

inline void validate(const ElementaryOperator& t) {
  if (t.m < 1 || t.n < 1) throw ShapeMismatch("ElementaryOperator: empty bimodule");
  for (const ElemTerm& term : t.terms) {
    if (term.a.rows() != t.m || term.a.cols() != t.m || term.b.rows() != t.n ||
        term.b.cols() != t.n)
      throw ShapeMismatch("ElementaryOperator: coefficient shape");
    linalg::require_finite(term.a, "ElementaryOperator");
    linalg::require_finite(term.b, "ElementaryOperator");
  }
}

inline CMatrix elem_apply(const ElementaryOperator& t, const CMatrix& x) {
  validate(t);
  if (x.rows() != t.m || x.cols() != t.n) throw ShapeMismatch("elem_apply: argument shape");
  CMatrix y = CMatrix::Zero(t.m, t.n);
  for (const ElemTerm& term : t.terms) y += term.a * x * term.b;
  return y;
}

inline CMatrix elem_matrix(const ElementaryOperator& t) {
  validate(t);
  CMatrix l = CMatrix::Zero(t.m * t.n, t.m * t.n);
  for (const ElemTerm& term : t.terms) l += linalg::kron_lift(term.a, term.b, t.m, t.n);
  return l;
}

inline linalg::SpectrumSet elem_spectrum(const ElementaryOperator& t) {
  return linalg::spectrum(elem_matrix(t));
}

// sum ||a_i|| ||b_i|| for the representation as given (no infimum over
// rewritings is attempted).
inline double elem_norm_bound(const ElementaryOperator& t) {
  validate(t);
  double acc = 0.0;
  for (const ElemTerm& term : t.terms) acc += linalg::op_norm(term.a) * linalg::op_norm(term.b);
  return acc;
}

inline Complex elem_trace(const ElementaryOperator& t) {
  validate(t);
  Complex acc = 0.0;
  for (const ElemTerm& term : t.terms) acc += term.a.trace() * term.b.trace();
  return acc;
}

// Splits off the terms carrying a compact flag on either side.
inline std::pair<ElementaryOperator, ElementaryOperator> semicompact_split(
    const ElementaryOperator& t) {
  validate(t);
  ElementaryOperator small{t.m, t.n, {}}, rest{t.m, t.n, {}};
  for (const ElemTerm& term : t.terms)
    (term.a_compact || term.b_compact ? small : rest).terms.push_back(term);
  return {small, rest};
}

inline double one_sided_hausdorff(const std::vector<Complex>& from,
                                  const std::vector<Complex>& to) {
  double worst = 0.0;
  for (const Complex& x : from) {
    double best = std::numeric_limits<double>::infinity();
    for (const Complex& y : to) best = std::min(best, std::abs(x - y));
    worst = std::max(worst, best);
  }
  return worst;
}

struct InclusionReport {
  bool hypothesis_satisfied = false;
  double sum_distance = 0.0;   // sup over sigma(u+v) of dist to sigma(u)+sigma(v)
  double prod_distance = 0.0;  // sup over sigma(uv) of dist to sigma(u)sigma(v)
  bool sum_ok = false;
  bool prod_ok = false;
  std::vector<double> sum_eigen_distances;
  std::vector<double> prod_eigen_distances;
};

// Checks sigma(u+v) against sigma(u)+sigma(v) and sigma(uv) against
// sigma(u)sigma(v). The hypothesis is that cross-commutators of left
// coefficients and of right coefficients land in the radical of the
// respective generated (unital) coefficient algebras.
inline InclusionReport spectral_inclusion_check(const ElementaryOperator& u,
                                                const ElementaryOperator& v,
                                                double tol = 1e-7) {
  validate(u);
  validate(v);
  if (u.m != v.m || u.n != v.n) throw ShapeMismatch("spectral_inclusion_check: bimodule dims");

  InclusionReport rep;
  auto commutators_in_radical = [](const std::vector<CMatrix>& lhs,
                                   const std::vector<CMatrix>& rhs) {
    std::vector<CMatrix> gens = lhs;
    gens.insert(gens.end(), rhs.begin(), rhs.end());
    radical::MatrixAlgebra alg = radical::algebra_closure(gens, true);
    radical::IdealSubspace rad = radical::jacobson_radical(alg);
    for (const CMatrix& x : lhs)
      for (const CMatrix& y : rhs) {
        CMatrix c = x * y - y * x;
        double res = rad.basis.empty() ? linalg::frobenius(c)
                                       : linalg::subspace_distance(c, rad.basis);
        if (res > 1e-8 * std::max(1.0, linalg::frobenius(c))) return false;
      }
    return true;
  };
  std::vector<CMatrix> ua, uc, ub, ud;
  for (const ElemTerm& term : u.terms) {
    ua.push_back(term.a);
    ub.push_back(term.b);
  }
  for (const ElemTerm& term : v.terms) {
    uc.push_back(term.a);
    ud.push_back(term.b);
  }
  rep.hypothesis_satisfied =
      commutators_in_radical(ua, uc) && commutators_in_radical(ub, ud);

  CMatrix lu = elem_matrix(u), lv = elem_matrix(v);
  std::vector<Complex> su = linalg::spectrum(lu).eigenvalues;
  std::vector<Complex> sv = linalg::spectrum(lv).eigenvalues;
  std::vector<Complex> ssum = linalg::spectrum(CMatrix(lu + lv)).eigenvalues;
  std::vector<Complex> sprod = linalg::spectrum(CMatrix(lu * lv)).eigenvalues;

  std::vector<Complex> minkowski_sum, minkowski_prod;
  minkowski_sum.reserve(su.size() * sv.size());
  minkowski_prod.reserve(su.size() * sv.size());
  for (const Complex& x : su)
    for (const Complex& y : sv) {
      minkowski_sum.push_back(x + y);
      minkowski_prod.push_back(x * y);
    }

  for (const Complex& lam : ssum) {
    double best = std::numeric_limits<double>::infinity();
    for (const Complex& y : minkowski_sum) best = std::min(best, std::abs(lam - y));
    rep.sum_eigen_distances.push_back(best);
    rep.sum_distance = std::max(rep.sum_distance, best);
  }
  for (const Complex& lam : sprod) {
    double best = std::numeric_limits<double>::infinity();
    for (const Complex& y : minkowski_prod) best = std::min(best, std::abs(lam - y));
    rep.prod_eigen_distances.push_back(best);
    rep.prod_distance = std::max(rep.prod_distance, best);
  }
  rep.sum_ok = rep.sum_distance <= tol;
  rep.prod_ok = rep.prod_distance <= tol;
  return rep;
}

struct StrongEngelReport {
  bool hypothesis_satisfied = false;
  double hausdorff = 0.0;  // sup over sigma(T) of dist to sigma(sum a_i b_i)
  bool inclusion_ok = false;
};

// sigma(sum L_a R_b) against sigma(sum a_i b_i) for square bimodules whose
// coefficients all have quasinilpotent inner derivations on the algebra
// they generate.
inline StrongEngelReport strong_engel_check(const ElementaryOperator& t, double tol = 1e-7) {
  validate(t);
  if (t.m != t.n) throw ShapeMismatch("strong_engel_check: bimodule must be square");

  std::vector<CMatrix> gens;
  for (const ElemTerm& term : t.terms) {
    gens.push_back(term.a);
    gens.push_back(term.b);
  }
  if (gens.empty()) gens.push_back(CMatrix::Zero(t.m, t.m));
  radical::MatrixAlgebra alg = radical::algebra_closure(gens, true);

  StrongEngelReport rep;
  rep.hypothesis_satisfied = true;
  for (const CMatrix& g : gens)
    if (!radical::engel_check(g, alg).engel) rep.hypothesis_satisfied = false;

  CMatrix ab = CMatrix::Zero(t.m, t.m);
  for (const ElemTerm& term : t.terms) ab += term.a * term.b;
  std::vector<Complex> lhs = elem_spectrum(t).eigenvalues;
  std::vector<Complex> rhs = linalg::spectrum(ab).eigenvalues;
  rep.hausdorff = one_sided_hausdorff(lhs, rhs);
  rep.inclusion_ok = rep.hausdorff <= tol;
  return rep;
}

struct OperatorValuedCurve {
  std::function<CMatrix(double)> sample;
  double alpha = 0.0;
  double beta = 1.0;
};

// Composite midpoint discretization of x -> integral a(t) x b(t) dt; the
// quadrature weight is split as a square root onto each side.
inline ElementaryOperator quadrature_lift(const OperatorValuedCurve& a,
                                          const OperatorValuedCurve& b, int nodes) {
  if (nodes <= 0) throw NodeCountZero("quadrature_lift: nodes must be positive");
  if (a.alpha != b.alpha || a.beta != b.beta)
    throw ParseError("quadrature_lift: curves on different intervals");
  if (!(a.beta > a.alpha)) throw ParseError("quadrature_lift: empty interval");

  double h = (a.beta - a.alpha) / nodes;
  double w = std::sqrt(h);
  ElementaryOperator t;
  for (int k = 0; k < nodes; ++k) {
    double tk = a.alpha + (k + 0.5) * h;
    ElemTerm term;
    term.a = w * a.sample(tk);
    term.b = w * b.sample(tk);
    if (k == 0) {
      t.m = term.a.rows();
      t.n = term.b.rows();
    }
    t.terms.push_back(std::move(term));
  }
  validate(t);
  return t;
}

// Operator matrix [T_ij] acting on q-tuples of m x n matrices.
struct BlockElementaryOperator {
  Eigen::Index q = 0;  // block grid is q x q
  Eigen::Index m = 0;
  Eigen::Index n = 0;
  std::vector<ElementaryOperator> blocks;  // row-major, q*q entries
};

inline void validate(const BlockElementaryOperator& b) {
  if (b.q < 1) throw ShapeMismatch("BlockElementaryOperator: empty grid");
  if (b.blocks.size() != static_cast<std::size_t>(b.q * b.q))
    throw ShapeMismatch("BlockElementaryOperator: expected q*q blocks");
  for (const ElementaryOperator& t : b.blocks) {
    if (t.m != b.m || t.n != b.n) throw ShapeMismatch("BlockElementaryOperator: block dims");
    validate(t);
  }
}

inline CMatrix block_lift(const BlockElementaryOperator& b) {
  validate(b);
  Eigen::Index cell = b.m * b.n;
  CMatrix l = CMatrix::Zero(b.q * cell, b.q * cell);
  for (Eigen::Index i = 0; i < b.q; ++i)
    for (Eigen::Index j = 0; j < b.q; ++j)
      l.block(i * cell, j * cell, cell, cell) = elem_matrix(b.blocks[i * b.q + j]);
  return l;
}

inline linalg::SpectrumSet block_spectrum(const BlockElementaryOperator& b) {
  return linalg::spectrum(block_lift(b));
}

}  // namespace elem
}  // namespace sral
