#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "sral/families.hpp"
#include "sral/linalg.hpp"

namespace sral {
namespace radical {

struct MatrixAlgebra {
  Eigen::Index ambient = 0;    // matrices are ambient x ambient
  bool unital = false;
  std::vector<CMatrix> basis;  // orthonormal in the Frobenius inner product

  std::size_t dimension() const { return basis.size(); }
};

struct IdealSubspace {
  MatrixAlgebra parent;
  std::vector<CMatrix> basis;  // orthonormal
};

struct QmodReport {
  std::vector<double> rates;  // rates[n-1] = dist(a^n, J)^(1/n)
  double inf_rate = 0.0;
  std::vector<std::pair<double, int>> epsilon_certificate;  // (eps, n0)
};

inline CVector coordinates(const MatrixAlgebra& a, const CMatrix& x, double* residual = nullptr) {
  CVector vx = linalg::vec(x);
  CVector c(a.basis.size());
  CVector rem = vx;
  for (std::size_t i = 0; i < a.basis.size(); ++i) {
    CVector q = linalg::vec(a.basis[i]);
    c(i) = q.dot(vx);
    rem -= q * c(i);
  }
  if (residual) *residual = rem.norm();
  return c;
}

inline void require_member(const MatrixAlgebra& a, const CMatrix& x, const char* who) {
  if (x.rows() != a.ambient || x.cols() != a.ambient)
    throw ShapeMismatch(std::string(who) + ": ambient size mismatch");
  double res = 0.0;
  coordinates(a, x, &res);
  if (res > 1e-9 * std::max(1.0, linalg::frobenius(x)))
    throw NotInAlgebra(std::string(who) + ": residual " + std::to_string(res));
}

// Span of all products of the generators (plus the identity if unital),
// grown by rank stabilization.  Basis elements are unit Frobenius, so a
// product of two of them has norm at most one; product content below the
// 1e-7 floor counts as zero.  The floor must sit above sqrt(eps): a
// direction extracted at residual r carries relative noise eps/r, and its
// products present that noise as new content, so with a floor F the junk
// per generation is at most eps/F.  F = 1e-7 keeps that an order of
// magnitude below F, which stops noise directions from entering the basis
// and snowballing the closure to the full matrix algebra.
inline MatrixAlgebra algebra_closure(const std::vector<CMatrix>& generators, bool unital) {
  Eigen::Index d = families::dim_of(generators, "algebra_closure");
  MatrixAlgebra a;
  a.ambient = d;
  a.unital = unital;

  auto try_add = [&](const CMatrix& x, double floor) {
    CVector v = linalg::vec(x);
    double scale = v.norm();
    if (scale <= floor) return false;
    for (int pass = 0; pass < 2; ++pass)
      for (const CMatrix& b : a.basis) {
        CVector q = linalg::vec(b);
        v -= q * q.dot(v);
      }
    // The genuinely new content must clear the floor in absolute terms: a
    // small product carries absolute rounding noise, so a relative test
    // against the candidate's own (possibly tiny) scale is meaningless.
    if (v.norm() <= std::max(floor, 1e-10 * scale)) return false;
    v /= v.norm();
    a.basis.push_back(linalg::unvec(v, d, d));
    return true;
  };

  if (unital) try_add(CMatrix::Identity(d, d), 0.0);
  for (const CMatrix& g : generators) try_add(g, 0.0);

  std::size_t settled = 0;
  while (settled < a.basis.size()) {
    std::size_t upto = a.basis.size();
    for (std::size_t i = 0; i < upto; ++i)
      for (std::size_t j = (i < settled) ? settled : 0; j < upto; ++j)
        try_add(a.basis[i] * a.basis[j], 1e-7);
    settled = upto;
  }
  return a;
}

// Matrix of x -> a*x in basis coordinates (left regular representation).
inline CMatrix left_regular(const MatrixAlgebra& alg, const CMatrix& a) {
  CMatrix l(alg.basis.size(), alg.basis.size());
  for (std::size_t j = 0; j < alg.basis.size(); ++j) {
    double res = 0.0;
    l.col(j) = coordinates(alg, a * alg.basis[j], &res);
    if (res > 1e-9 * std::max(1.0, linalg::frobenius(a)))
      throw ClosureViolated("left_regular: product leaves the algebra, residual " +
                            std::to_string(res));
  }
  return l;
}

// A d x d matrix is nilpotent iff its d-th power vanishes, so the residual
// norm(xn^d) with xn = x / norm(x) certifies nilpotency directly.  Dense
// eigensolvers are the wrong tool here: a defective nilpotent picks up
// eigenvalue scatter of order eps^(1/k) from rounding alone.
inline double nilpotency_residual(const CMatrix& x) {
  double nrm = linalg::frobenius(x);
  if (nrm == 0.0) return 0.0;
  CMatrix xn = x / nrm;
  CMatrix p = xn;
  for (Eigen::Index i = 1; i < x.rows(); ++i) p = xn * p;
  return linalg::frobenius(p);
}

// Kernel of the trace form tr(L_x L_y) on the algebra; for matrix algebras
// over the complex numbers this kernel is exactly the set of elements
// generating a nil ideal, which is verified on the way out.
inline IdealSubspace jacobson_radical(const MatrixAlgebra& alg) {
  const std::size_t n = alg.dimension();
  IdealSubspace rad;
  rad.parent = alg;
  if (n == 0) return rad;

  std::vector<CMatrix> lmats;
  lmats.reserve(n);
  for (const CMatrix& b : alg.basis) lmats.push_back(left_regular(alg, b));

  CMatrix gram(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) gram(i, j) = (lmats[i] * lmats[j]).trace();

  Eigen::JacobiSVD<CMatrix> svd(gram, Eigen::ComputeFullV);
  double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  const Eigen::Index d = alg.ambient;
  for (Eigen::Index c = 0; c < svd.matrixV().cols(); ++c) {
    if (smax > 0.0 && svd.singularValues()(c) > 1e-9 * smax) continue;
    CMatrix x = CMatrix::Zero(d, d);
    for (std::size_t i = 0; i < n; ++i) x += svd.matrixV()(i, c) * alg.basis[i];
    double nrm = linalg::frobenius(x);
    if (nrm > 0) rad.basis.push_back(x / nrm);
  }

  for (const CMatrix& x : rad.basis) {
    if (nilpotency_residual(x) > 1e-8)
      throw Error("jacobson_radical: kernel element not nilpotent");
    for (const CMatrix& b : alg.basis) {
      if (linalg::subspace_distance(x * b, rad.basis) > 1e-8 ||
          linalg::subspace_distance(b * x, rad.basis) > 1e-8)
        throw Error("jacobson_radical: kernel is not a two-sided ideal");
    }
  }
  return rad;
}

// Frobenius distance of powers of a to the ideal, as n-th roots.
inline QmodReport qmod_rate(const CMatrix& a, const IdealSubspace& ideal, int n_max) {
  if (n_max < 1) throw ParseError("qmod_rate: n_max must be >= 1");
  require_member(ideal.parent, a, "qmod_rate");
  QmodReport rep;
  rep.inf_rate = std::numeric_limits<double>::infinity();
  CMatrix p = CMatrix::Identity(a.rows(), a.cols());
  for (int n = 1; n <= n_max; ++n) {
    p = p * a;
    double dist = ideal.basis.empty() ? linalg::frobenius(p)
                                      : linalg::subspace_distance(p, ideal.basis);
    double rate = std::pow(dist, 1.0 / n);
    rep.rates.push_back(rate);
    rep.inf_rate = std::min(rep.inf_rate, rate);
  }
  std::vector<double> grid;
  if (rep.inf_rate > 1e-12)
    grid = {rep.inf_rate * 1.05, rep.inf_rate * 1.2, rep.inf_rate * 2.0};
  else
    grid = {1e-9, 1e-6, 1e-3};
  for (double eps : grid) {
    int n0 = -1;
    for (int n = n_max; n >= 1; --n) {
      if (rep.rates[n - 1] < eps)
        n0 = n;
      else
        break;
    }
    if (n0 > 0) rep.epsilon_certificate.emplace_back(eps, n0);
  }
  return rep;
}

// Bracket for the summability radius of the family taken modulo a nil
// ideal: the upper edge uses the quotient (projection) seminorm, which is
// submultiplicative because the subspace is an ideal; the lower edge is
// inherited from the plain bracket since a nil ideal does not move it.
inline families::RadiusBracket tsr_mod_ideal(const families::SummableFamily& m,
                                             const IdealSubspace& ideal, int depth,
                                             long long budget = families::kDefaultBudget) {
  families::validate(m);
  if (depth < 1) throw ParseError("tsr_mod_ideal: depth must be >= 1");
  const std::size_t k = m.members.size();
  const Eigen::Index d = families::dim(m);

  for (const CMatrix& x : ideal.basis) {
    if (x.rows() != d || x.cols() != d) throw ShapeMismatch("tsr_mod_ideal: ideal shape");
    if (nilpotency_residual(x) > 1e-8)
      throw IdealNotNil("tsr_mod_ideal: ideal element with nilpotency residual " +
                        std::to_string(nilpotency_residual(x)));
    for (const CMatrix& a : m.members) {
      double scale = std::max(1.0, linalg::frobenius(a));
      if (linalg::subspace_distance(a * x, ideal.basis) > 1e-8 * scale ||
          linalg::subspace_distance(x * a, ideal.basis) > 1e-8 * scale)
        throw ClosureViolated("tsr_mod_ideal: subspace is not invariant under the family");
    }
  }

  if (families::detail::node_count(k, depth) > static_cast<double>(budget))
    throw BudgetExceeded("tsr_mod_ideal: word count exceeds budget");

  std::vector<double> eta_q(depth, 0.0);
  std::function<void(int, const CMatrix&, double)> rec = [&](int j, const CMatrix& prod,
                                                             double weight) {
    if (j == depth) return;
    for (std::size_t i = 0; i < k; ++i) {
      CMatrix p = j == 0 ? m.members[i] : CMatrix(prod * m.members[i]);
      double w = weight * static_cast<double>(families::multiplicity(m, i));
      double dist = ideal.basis.empty() ? linalg::frobenius(p)
                                        : linalg::subspace_distance(p, ideal.basis);
      eta_q[j] += w * dist;
      rec(j + 1, p, w);
    }
  };
  rec(0, CMatrix::Identity(d, d), 1.0);

  families::RadiusBracket full = families::tsr_bracket(m, depth, families::NormKind::Frobenius,
                                                       budget);
  families::RadiusBracket b;
  b.lower = full.lower;
  b.lower_witness = full.lower_witness;
  b.upper = std::numeric_limits<double>::infinity();
  for (int j = 0; j < depth; ++j) {
    double root = std::pow(eta_q[j], 1.0 / (j + 1));
    if (root < b.upper) {
      b.upper = root;
      b.upper_depth = j + 1;
    }
  }
  b.certified = true;
  return b;
}

struct EngelReport {
  double ad_radius = 0.0;
  bool engel = false;
};

// Spectral radius of ad_a = L_a - R_a in the regular representation.
inline EngelReport engel_check(const CMatrix& a, const MatrixAlgebra& alg, double tol = 1e-8) {
  require_member(alg, a, "engel_check");
  const std::size_t n = alg.dimension();
  CMatrix ad(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double res = 0.0;
    ad.col(j) = coordinates(alg, a * alg.basis[j] - alg.basis[j] * a, &res);
    if (res > 1e-8 * std::max(1.0, linalg::frobenius(a)))
      throw ClosureViolated("engel_check: commutator leaves the algebra");
  }
  EngelReport rep;
  rep.ad_radius = linalg::rho(ad);
  rep.engel = rep.ad_radius <= tol;
  return rep;
}

struct CommModRadReport {
  bool all_pass = true;
  double worst_residual = 0.0;
};

// Do all commutators of basis elements fall into the radical?
inline CommModRadReport comm_mod_rad_check(const MatrixAlgebra& alg, double tol = 1e-8) {
  IdealSubspace rad = jacobson_radical(alg);
  CommModRadReport rep;
  for (std::size_t i = 0; i < alg.basis.size(); ++i)
    for (std::size_t j = i + 1; j < alg.basis.size(); ++j) {
      CMatrix c = alg.basis[i] * alg.basis[j] - alg.basis[j] * alg.basis[i];
      double res = rad.basis.empty() ? linalg::frobenius(c)
                                     : linalg::subspace_distance(c, rad.basis);
      double rel = res / std::max(1.0, linalg::frobenius(c));
      rep.worst_residual = std::max(rep.worst_residual, rel);
      if (rel > tol) rep.all_pass = false;
    }
  return rep;
}

}  // namespace radical
}  // namespace sral
