#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "sral/linalg.hpp"
#include "sral/radical.hpp"

namespace sral {
namespace tri {

struct SubspaceChain {
  Eigen::Index dimension = 0;
  std::vector<CMatrix> bases;  // bases[j]: dimension x k_j, orthonormal, prefix-nested
};

struct ChainBlockBounds {
  double alpha = 0.0;  // max operator norm of the factors
  double beta = 0.0;   // max slice-compression norm (gaps of the chain, top included)
  int k = 0;           // number of chain subspaces
};

inline void validate(const SubspaceChain& c) {
  if (c.dimension < 1) throw ParseError("SubspaceChain: dimension must be positive");
  if (c.bases.empty()) throw ParseError("SubspaceChain: empty chain");
  Eigen::Index prev = 0;
  for (std::size_t j = 0; j < c.bases.size(); ++j) {
    const CMatrix& q = c.bases[j];
    if (q.rows() != c.dimension) throw ShapeMismatch("SubspaceChain: basis row count");
    if (q.cols() <= prev)
      throw ParseError("SubspaceChain: dimensions must increase strictly");
    CMatrix gram = q.adjoint() * q;
    if ((gram - CMatrix::Identity(q.cols(), q.cols())).norm() > 1e-10)
      throw ParseError("SubspaceChain: basis not orthonormal");
    if (j > 0 && (q.leftCols(prev) - c.bases[j - 1]).norm() > 1e-10)
      throw ParseError("SubspaceChain: bases are not prefix-nested");
    prev = q.cols();
  }
  if (prev >= c.dimension) throw ParseError("SubspaceChain: top subspace must be proper");
}

// Orthogonal projector onto X_j (1-based; j = 0 gives the zero projector).
inline CMatrix chain_projector(const SubspaceChain& c, std::size_t j) {
  if (j == 0) return CMatrix::Zero(c.dimension, c.dimension);
  const CMatrix& q = c.bases[j - 1];
  return q * q.adjoint();
}

// Orthonormal basis of the slice X_j (-) X_{j-1}; j = k+1 is the
// complement of the top subspace.
inline CMatrix slice_basis(const SubspaceChain& c, std::size_t j) {
  const Eigen::Index d = c.dimension;
  CMatrix full = CMatrix::Identity(d, d);
  std::vector<CVector> vs;
  for (Eigen::Index i = 0; i < c.bases.back().cols(); ++i)
    vs.push_back(c.bases.back().col(i));
  for (Eigen::Index i = 0; i < d; ++i) vs.push_back(full.col(i));
  std::vector<CVector> q = linalg::orthonormalize(vs);
  CMatrix ext(d, d);
  for (Eigen::Index i = 0; i < d; ++i) ext.col(i) = q[i];

  Eigen::Index lo = j >= 2 ? c.bases[j - 2].cols() : 0;
  Eigen::Index hi = j <= c.bases.size() ? c.bases[j - 1].cols() : d;
  return ext.block(0, lo, d, hi - lo);
}

// A family is nil exactly when every basis element of its (non-unital)
// multiplicative closure is quasinilpotent: all basis traces then vanish,
// which rules out any nonzero idempotent in the closure.
inline bool is_nil_family(const std::vector<CMatrix>& gens, double tol = 1e-8) {
  radical::MatrixAlgebra a = radical::algebra_closure(gens, false);
  for (const CMatrix& b : a.basis)
    if (radical::nilpotency_residual(b) > tol) return false;
  return true;
}

namespace detail {

// Orthonormal basis of the span through singular values: directions below
// 1e-9 of the leading singular value (or below an absolute floor) are
// cancellation residue, not rank.  Plain Gram-Schmidt with a tight cutoff
// promotes such residue to fake dimensions, which stalls the descent
// below or inflates a chain level to the full space.
inline std::vector<CVector> svd_span(const std::vector<CVector>& vs, double abs_floor = 0.0) {
  if (vs.empty()) return {};
  CMatrix m(vs.front().size(), static_cast<Eigen::Index>(vs.size()));
  for (std::size_t i = 0; i < vs.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = vs[i];
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU);
  std::vector<CVector> q;
  for (Eigen::Index c = 0; c < svd.singularValues().size(); ++c)
    if (svd.singularValues()(c) > std::max(1e-9 * svd.singularValues()(0), abs_floor))
      q.push_back(svd.matrixU().col(c));
  return q;
}

inline SubspaceChain chain_from_descent(const std::vector<CMatrix>& span_mats, Eigen::Index d) {
  // W_0 = C^d, W_{j+1} = span(A W_j); the reversed proper tail of the
  // descent is the invariant chain.  The descent carries scale: level
  // vectors are singular directions weighted by their singular values, so
  // genuine decay drives them under the absolute floor and the cascade
  // terminates.  Renormalizing per level instead would divide rounding
  // noise by the same shrinking scale until, past the true terminal
  // level, amplified noise presents as a healthy subspace.
  std::vector<CMatrix> ms;
  for (const CMatrix& m : span_mats) {
    double nrm = linalg::frobenius(m);
    if (nrm > 0.0) ms.push_back(m / nrm);
  }
  const double floor = 1e-10;
  std::vector<std::vector<CVector>> w;  // unit bases per nonzero level
  std::vector<CVector> cur;
  {
    CMatrix id = CMatrix::Identity(d, d);
    for (Eigen::Index i = 0; i < d; ++i) cur.push_back(id.col(i));
  }
  while (!cur.empty()) {
    std::vector<CVector> cols;
    for (const CMatrix& m : ms)
      for (const CVector& v : cur) {
        CVector c = m * v;
        if (c.norm() > floor) cols.push_back(c);
      }
    std::vector<CVector> units, scaled;
    if (!cols.empty()) {
      CMatrix img(d, static_cast<Eigen::Index>(cols.size()));
      for (std::size_t i = 0; i < cols.size(); ++i)
        img.col(static_cast<Eigen::Index>(i)) = cols[i];
      Eigen::JacobiSVD<CMatrix> svd(img, Eigen::ComputeThinU);
      for (Eigen::Index c = 0; c < svd.singularValues().size(); ++c) {
        double sv = svd.singularValues()(c);
        if (sv > std::max(1e-9 * svd.singularValues()(0), floor)) {
          units.push_back(svd.matrixU().col(c));
          scaled.push_back(sv * svd.matrixU().col(c));
        }
      }
    }
    if (units.size() >= cur.size() && !w.empty())
      throw NotNilFamily("triangularize: descent stalled");
    if (units.empty()) break;
    w.push_back(units);
    cur = scaled;
  }

  SubspaceChain chain;
  chain.dimension = d;
  // w = [W_1, ..., W_{s-1}] with W_s = 0 dropped already.
  std::vector<std::vector<CVector>>& proper = w;
  if (proper.empty()) {
    // Everything is annihilated; any line is a valid (trivial) chain.
    CMatrix e1 = CMatrix::Zero(d, 1);
    e1(0, 0) = 1.0;
    chain.bases.push_back(e1);
    return chain;
  }

  // Prefix-nested assembly: each level keeps the previous columns verbatim
  // and appends an orthonormal basis of what the next descent level adds.
  std::vector<CVector> xbasis;
  std::vector<CMatrix> bases;
  for (auto it = proper.rbegin(); it != proper.rend(); ++it) {
    std::vector<CVector> resid;
    for (const CVector& v : *it) {
      CVector r = v;
      for (int pass = 0; pass < 2; ++pass)
        for (const CVector& u : xbasis) r -= u * u.dot(r);
      resid.push_back(r);
    }
    for (const CVector& f : svd_span(resid, 1e-9)) xbasis.push_back(f);
    CMatrix basis(d, static_cast<Eigen::Index>(xbasis.size()));
    for (std::size_t i = 0; i < xbasis.size(); ++i)
      basis.col(static_cast<Eigen::Index>(i)) = xbasis[i];
    bases.push_back(basis);
  }
  chain.bases = bases;
  return chain;
}

inline void verify_strict_lowering(const std::vector<CMatrix>& ops, const SubspaceChain& c,
                                   const char* who) {
  const Eigen::Index d = c.dimension;
  CMatrix id = CMatrix::Identity(d, d);
  for (const CMatrix& g : ops) {
    double scale = std::max(1.0, linalg::op_norm(g));
    for (std::size_t j = 0; j <= c.bases.size(); ++j) {
      CMatrix into = j == c.bases.size() ? id : CMatrix(id * chain_projector(c, j + 1));
      CMatrix below = chain_projector(c, j);
      // g X_{j+1} must fall inside X_j (top level: g C^d inside X_k).
      double res = linalg::op_norm((id - below) * g * into);
      if (res > 1e-9 * scale)
        throw Error(std::string(who) + ": strict lowering residual " + std::to_string(res));
    }
  }
}

}  // namespace detail

// Invariant chain with strict lowering for a nil family.  The descent runs
// over the generators directly: a word's range sits inside the range of
// its first letter, so length-j generator words span the same subspace
// A^j C^d as the generated algebra, and the raw generators carry none of
// the normalization noise a computed closure basis would add.
inline SubspaceChain triangularize(const std::vector<CMatrix>& gens) {
  Eigen::Index d = families::dim_of(gens, "triangularize");
  if (!is_nil_family(gens)) throw NotNilFamily("triangularize: family is not nil");
  SubspaceChain chain = detail::chain_from_descent(gens, d);
  validate(chain);
  detail::verify_strict_lowering(gens, chain, "triangularize");
  return chain;
}

namespace detail {

// Two-sided ideal generated by k_gens inside the unital closure of all
// generators; returned as an orthonormal basis.
inline std::vector<CMatrix> ideal_generated(const std::vector<CMatrix>& k_gens,
                                            const radical::MatrixAlgebra& alg) {
  std::vector<CVector> vs;
  for (const CMatrix& k : k_gens) vs.push_back(linalg::vec(k));
  std::vector<CVector> q = linalg::orthonormalize(vs);
  Eigen::Index d = alg.ambient;
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<CVector> candidates;
    for (const CVector& v : q) {
      CMatrix x = linalg::unvec(v, d, d);
      for (const CMatrix& b : alg.basis) {
        candidates.push_back(linalg::vec(CMatrix(b * x)));
        candidates.push_back(linalg::vec(CMatrix(x * b)));
      }
    }
    std::size_t before = q.size();
    std::vector<CVector> all = q;
    all.insert(all.end(), candidates.begin(), candidates.end());
    q = linalg::orthonormalize(all);
    if (q.size() > before) grew = true;
  }
  std::vector<CMatrix> out;
  for (const CVector& v : q) out.push_back(linalg::unvec(v, d, d));
  return out;
}

}  // namespace detail

// Chain for a split family: the k_gens act strictly lowering, the f_gens
// are only required to leave the chain invariant.
inline SubspaceChain triangularize(const std::vector<CMatrix>& k_gens,
                                   const std::vector<CMatrix>& f_gens) {
  Eigen::Index d = families::dim_of(k_gens, "triangularize");
  std::vector<CMatrix> all = k_gens;
  all.insert(all.end(), f_gens.begin(), f_gens.end());
  radical::MatrixAlgebra alg = radical::algebra_closure(all, true);
  std::vector<CMatrix> ideal = detail::ideal_generated(k_gens, alg);
  for (const CMatrix& x : ideal)
    if (radical::nilpotency_residual(x) > 1e-8)
      throw NotNilFamily("triangularize: ideal generated by the lowering set is not nil");

  SubspaceChain chain = detail::chain_from_descent(ideal, d);
  validate(chain);
  detail::verify_strict_lowering(k_gens, chain, "triangularize");
  // f_gens: invariance only.
  CMatrix id = CMatrix::Identity(d, d);
  for (const CMatrix& f : f_gens) {
    double scale = std::max(1.0, linalg::op_norm(f));
    for (std::size_t j = 1; j <= chain.bases.size(); ++j) {
      CMatrix p = chain_projector(chain, j);
      if (linalg::op_norm((id - p) * f * p) > 1e-9 * scale)
        throw ChainNotInvariant("triangularize: bounded factor breaks invariance");
    }
  }
  return chain;
}

struct CepochkaReport {
  ChainBlockBounds bounds;
  double product_norm = 0.0;
  double bound_value = 0.0;
  bool ok = false;
  double worst_f80_gap = 0.0;  // max of lhs - rhs over adjacent pairs
  bool f80_ok = false;
};

// Certifies ||a_1...a_m|| <= 2^m C(m,k) alpha^k beta^(m-k) for chain
// invariant factors, with beta taken over all gaps of the chain including
// the quotient above the top subspace.
inline CepochkaReport cepochka_check(const std::vector<CMatrix>& ops, const SubspaceChain& c,
                                     double tol = 1e-9) {
  validate(c);
  if (ops.empty()) throw TooFewFactors("cepochka_check: no factors");
  const Eigen::Index d = c.dimension;
  const int k = static_cast<int>(c.bases.size());
  const int m = static_cast<int>(ops.size());
  if (m < k) throw TooFewFactors("cepochka_check: m < k");

  CMatrix id = CMatrix::Identity(d, d);
  for (const CMatrix& x : ops) {
    if (x.rows() != d || x.cols() != d) throw ShapeMismatch("cepochka_check: operator shape");
    double scale = std::max(1.0, linalg::op_norm(x));
    for (int j = 1; j <= k; ++j) {
      CMatrix p = chain_projector(c, j);
      if (linalg::op_norm((id - p) * x * p) > 1e-8 * scale)
        throw ChainNotInvariant("cepochka_check: factor does not preserve the chain");
    }
  }

  CepochkaReport rep;
  rep.bounds.k = k;
  for (const CMatrix& x : ops)
    rep.bounds.alpha = std::max(rep.bounds.alpha, linalg::op_norm(x));
  for (const CMatrix& x : ops)
    for (int j = 1; j <= k + 1; ++j) {
      CMatrix q = slice_basis(c, j);
      rep.bounds.beta = std::max(rep.bounds.beta, linalg::op_norm(CMatrix(q.adjoint() * x * q)));
    }

  CMatrix prod = ops.front();
  for (int i = 1; i < m; ++i) prod = prod * ops[i];
  rep.product_norm = linalg::op_norm(prod);

  double binom = 1.0;
  for (int i = 0; i < k; ++i) binom = binom * (m - i) / (i + 1);
  rep.bound_value = std::pow(2.0, m) * binom * std::pow(rep.bounds.alpha, k) *
                    std::pow(rep.bounds.beta, m - k);
  rep.ok = rep.product_norm <= rep.bound_value + tol;

  // Two-term splitting bound through the first subspace for adjacent pairs.
  CMatrix p1 = chain_projector(c, 1);
  rep.worst_f80_gap = -std::numeric_limits<double>::infinity();
  for (int i = 0; i + 1 < m; ++i) {
    const CMatrix& x = ops[i];
    const CMatrix& y = ops[i + 1];
    double lhs = linalg::op_norm(CMatrix(x * y));
    double rhs = 2.0 * linalg::op_norm(CMatrix(x * p1)) * linalg::op_norm(y) +
                 linalg::op_norm(x) * linalg::op_norm(CMatrix((id - p1) * y * (id - p1)));
    rep.worst_f80_gap = std::max(rep.worst_f80_gap, lhs - rhs);
  }
  if (m < 2) rep.worst_f80_gap = 0.0;
  rep.f80_ok = rep.worst_f80_gap <= tol;
  return rep;
}

struct DecayRow {
  int m = 0;
  long long count_enumerated = 0;
  double max_norm = 0.0;
  double root = 0.0;
};

// Largest norm over words of length m with at least ceil(lambda*m) factors
// from k_gens, for each m up to m_max. Subtrees whose prefix product is
// exactly zero are counted combinatorially instead of being walked.
inline std::vector<DecayRow> product_decay(const std::vector<CMatrix>& k_gens,
                                           const std::vector<CMatrix>& f_gens, double lambda,
                                           int m_max,
                                           long long budget = families::kDefaultBudget) {
  Eigen::Index d = families::dim_of(k_gens, "product_decay");
  if (!f_gens.empty() && families::dim_of(f_gens, "product_decay") != d)
    throw DimMismatch("product_decay: mixed dimensions");
  if (!(lambda > 0.0) || lambda > 1.0) throw ParseError("product_decay: lambda in (0,1]");
  if (m_max < 1) throw ParseError("product_decay: m_max must be >= 1");

  std::vector<CMatrix> all = k_gens;
  all.insert(all.end(), f_gens.begin(), f_gens.end());
  radical::MatrixAlgebra alg = radical::algebra_closure(all, true);
  std::vector<CMatrix> ideal = detail::ideal_generated(k_gens, alg);
  for (const CMatrix& x : ideal)
    if (radical::nilpotency_residual(x) > 1e-8)
      throw RadicalHypothesisViolated(
          "product_decay: ideal generated by the decaying set is not nil");
  for (const CMatrix& kg : k_gens)
    if (radical::nilpotency_residual(kg) > 1e-8)
      throw RadicalHypothesisViolated("product_decay: lowering generator not nilpotent");

  const int nk = static_cast<int>(k_gens.size());
  const int nf = static_cast<int>(f_gens.size());

  // words_with_quota[r][q]: words of length r over the alphabet with at
  // least q K-letters.
  std::vector<std::vector<double>> binom(m_max + 1, std::vector<double>(m_max + 1, 0.0));
  for (int r = 0; r <= m_max; ++r) {
    binom[r][0] = 1.0;
    for (int q = 1; q <= r; ++q)
      binom[r][q] = binom[r - 1][q - 1] + (q <= r - 1 ? binom[r - 1][q] : 0.0);
  }
  auto tail_count = [&](int r, int q) {
    if (q < 0) q = 0;
    double acc = 0.0;
    for (int j = q; j <= r; ++j)
      acc += binom[r][j] * std::pow(static_cast<double>(nk), j) *
             std::pow(static_cast<double>(nf), r - j);
    return acc;
  };

  long long evals = 0;
  std::vector<DecayRow> rows;
  for (int m = 1; m <= m_max; ++m) {
    int quota = static_cast<int>(std::ceil(lambda * m - 1e-9));
    DecayRow row;
    row.m = m;
    double count = 0.0;

    std::function<void(int, int, const CMatrix&)> rec = [&](int len, int havek,
                                                            const CMatrix& prod) {
      int remaining = m - len;
      if (havek + remaining < quota) return;  // quota unreachable
      if (len == m) {
        count += 1.0;
        row.max_norm = std::max(row.max_norm, linalg::op_norm(prod));
        return;
      }
      for (int i = 0; i < nk + nf; ++i) {
        const CMatrix& g = i < nk ? k_gens[i] : f_gens[i - nk];
        CMatrix p = len == 0 ? g : CMatrix(prod * g);
        ++evals;
        if (evals > budget) throw BudgetExceeded("product_decay: norm evaluation budget");
        int hk = havek + (i < nk ? 1 : 0);
        if (p.norm() == 0.0) {
          // All completions vanish; count the quota-meeting ones.
          count += tail_count(m - len - 1, quota - hk);
          continue;
        }
        rec(len + 1, hk, p);
      }
    };
    rec(0, 0, CMatrix::Identity(d, d));
    row.count_enumerated = static_cast<long long>(count);
    row.root = row.max_norm > 0.0 ? std::pow(row.max_norm, 1.0 / m) : 0.0;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace tri
}  // namespace sral
