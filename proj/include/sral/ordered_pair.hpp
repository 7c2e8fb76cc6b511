#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sral/elementary.hpp"
#include "sral/linalg.hpp"
#include "sral/rng.hpp"

namespace sral {
namespace opair {

// Coarse metric: operator norm. Fine metric: Schatten-p with p in (0,1]
// (p = 1 is the nuclear norm); every matrix then has ||y||_X <= ||y||_Y.
struct OrderedPairNorm {
  double p = 1.0;
  Eigen::Index m = 0;
  Eigen::Index n = 0;
};

inline void validate(const OrderedPairNorm& pr) {
  if (std::isnan(pr.p) || pr.p <= 0.0 || pr.p > 1.0)
    throw InvalidP("OrderedPairNorm: p must be in (0,1]");
  if (pr.m < 1 || pr.n < 1) throw ShapeMismatch("OrderedPairNorm: carrier dims");
}

inline double x_norm(const CMatrix& y) { return linalg::op_norm(y); }

inline double y_norm(const CMatrix& y, const OrderedPairNorm& pr) {
  return linalg::schatten_norm(y, pr.p);
}

struct PairNormBracket {
  double lower = 0.0;
  double upper = 0.0;
  double x_lower = 0.0, x_upper = 0.0;
  double y_lower = 0.0, y_upper = 0.0;
};

namespace detail {

inline double equivalence_ceiling(double sigma, double p, Eigen::Index m, Eigen::Index n) {
  double r = static_cast<double>(std::min(m, n));
  return std::pow(r, 1.0 / p - 0.5) * sigma;
}

// Best ratio ||T x|| / ||x|| found by seeded restarts followed by power
// iteration of the lifted matrix; a valid lower bound in either metric.
template <typename NormFn>
inline double sampled_ratio(const CMatrix& t, Eigen::Index m, Eigen::Index n, NormFn&& nf,
                            std::uint64_t tag) {
  double best = 0.0;
  Rng rng = Rng::stream(0x0a17, tag);
  for (int restart = 0; restart < 10; ++restart) {
    CMatrix x = rng.gaussian(m, n);
    for (int iter = 0; iter < 25; ++iter) {
      double nx = nf(x);
      if (!(nx > 0.0)) break;
      CMatrix tx = linalg::unvec(CVector(t * linalg::vec(x)), m, n);
      best = std::max(best, nf(tx) / nx);
      double ntx = tx.norm();
      if (!(ntx > 0.0)) break;
      x = tx / ntx;
    }
  }
  return best;
}

}  // namespace detail

// Bracket for max(||T||_{B(X)}, ||T||_{B(Y)}) of a lifted operator:
// sampled lower edges, norm-equivalence upper edges.
inline PairNormBracket pair_norm(const CMatrix& t, const OrderedPairNorm& pr) {
  validate(pr);
  if (t.rows() != pr.m * pr.n || t.cols() != pr.m * pr.n)
    throw ShapeMismatch("pair_norm: lift size");
  linalg::require_finite(t, "pair_norm");

  double sigma = linalg::op_norm(t);
  PairNormBracket b;
  b.x_lower = detail::sampled_ratio(t, pr.m, pr.n, [](const CMatrix& x) { return x_norm(x); },
                                    1);
  b.y_lower = detail::sampled_ratio(
      t, pr.m, pr.n, [&](const CMatrix& x) { return y_norm(x, pr); }, 2);
  double r = static_cast<double>(std::min(pr.m, pr.n));
  b.x_upper = std::sqrt(r) * sigma;
  b.y_upper = detail::equivalence_ceiling(sigma, pr.p, pr.m, pr.n);
  b.lower = std::max(b.x_lower, b.y_lower);
  b.upper = std::max(b.x_upper, b.y_upper);
  if (!std::isfinite(b.lower) || !std::isfinite(b.upper) || b.lower > b.upper * (1.0 + 1e-9))
    throw YNotInvariant("pair_norm: sampled ratio escaped the equivalence ceiling");
  return b;
}

struct SpectralSubspaceRun {
  CMatrix t_power_m;  // lift(T)^m
  CMatrix s_part;     // semifinite part of the power
  CMatrix p_part;     // remainder of the power
  double t = 0.0;
  double epsilon = 0.0;
  CMatrix z;
  std::vector<double> series_partial_sums;    // Y-norms of the partial sums
  std::vector<double> partial_sum_residuals;  // X-norm distances to z
  double z_x_norm = 0.0;
  double z_y_norm = 0.0;
  double bound_constant = 0.0;  // (t^m / (1 - eps^m t^m)) * ||S||_{X->Y} upper
  double y_norm_bound = 0.0;    // bound_constant * ||z||_X
  bool verdict = false;
};

// Splits lift(T)^m = S + P with P the m-th power of the non-designated
// part, solves T^m z_{k+1} = z_k inside the invariant subspace, and sums
// z = S z_1 + P S z_2 + P^2 S z_3 + ...; the Y-norm of z is then bounded
// through the X-norm of z.
inline SpectralSubspaceRun reconstruct_series(const elem::ElementaryOperator& t_op, int m_pow,
                                              const elem::ElementaryOperator& small_part,
                                              const std::vector<CMatrix>& subspace,
                                              const CMatrix& z, double t, double epsilon,
                                              const OrderedPairNorm& pr) {
  validate(pr);
  elem::validate(t_op);
  elem::validate(small_part);
  if (t_op.m != pr.m || t_op.n != pr.n || small_part.m != t_op.m || small_part.n != t_op.n)
    throw ShapeMismatch("reconstruct_series: dims");
  if (m_pow < 1) throw ParseError("reconstruct_series: m must be >= 1");
  if (!(t > 0.0) || !(epsilon >= 0.0)) throw ParseError("reconstruct_series: t, epsilon");
  if (epsilon * t >= 1.0)
    throw ContractionFails("reconstruct_series: epsilon * t >= 1");

  const Eigen::Index mn = t_op.m * t_op.n;
  CMatrix lift_t = elem::elem_matrix(t_op);
  CMatrix lift_e = lift_t - elem::elem_matrix(small_part);

  SpectralSubspaceRun run;
  run.t = t;
  run.epsilon = epsilon;
  run.z = z;
  run.t_power_m = CMatrix::Identity(mn, mn);
  run.p_part = CMatrix::Identity(mn, mn);
  for (int i = 0; i < m_pow; ++i) {
    run.t_power_m = run.t_power_m * lift_t;
    run.p_part = run.p_part * lift_e;
  }
  run.s_part = run.t_power_m - run.p_part;

  double p_ceiling = detail::equivalence_ceiling(linalg::op_norm(run.p_part), pr.p, pr.m, pr.n);
  if (p_ceiling > std::pow(epsilon, m_pow))
    throw ContractionFails("reconstruct_series: certified Y-norm of the remainder " +
                           std::to_string(p_ceiling) + " exceeds epsilon^m");

  // Orthonormal basis of the subspace in lifted coordinates.
  std::vector<CVector> vs;
  for (const CMatrix& b : subspace) {
    if (b.rows() != t_op.m || b.cols() != t_op.n)
      throw ShapeMismatch("reconstruct_series: subspace element shape");
    vs.push_back(linalg::vec(b));
  }
  std::vector<CVector> onb = linalg::orthonormalize(vs);
  if (onb.empty()) throw NotSurjectiveOnSubspace("reconstruct_series: empty subspace");
  const Eigen::Index dz = static_cast<Eigen::Index>(onb.size());
  CMatrix q(mn, dz);
  for (Eigen::Index i = 0; i < dz; ++i) q.col(i) = onb[i];

  auto in_span_residual = [&](const CVector& v) {
    CVector rem = v - q * (q.adjoint() * v);
    return rem.norm();
  };
  CVector vz = linalg::vec(z);
  if (in_span_residual(vz) > 1e-8 * std::max(1.0, vz.norm()))
    throw NotSurjectiveOnSubspace("reconstruct_series: z not in the subspace");
  for (Eigen::Index i = 0; i < dz; ++i)
    if (in_span_residual(CVector(run.t_power_m * q.col(i))) > 1e-8)
      throw NotSurjectiveOnSubspace("reconstruct_series: subspace not invariant");

  CMatrix r = q.adjoint() * run.t_power_m * q;
  Eigen::JacobiSVD<CMatrix> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  double smin = svd.singularValues()(svd.singularValues().size() - 1);
  if (!(smin > 0.0))
    throw NotSurjectiveOnSubspace("reconstruct_series: power is singular on the subspace");

  run.z_x_norm = x_norm(z);
  run.z_y_norm = y_norm(z, pr);
  double tm = std::pow(t, m_pow);
  double em = std::pow(epsilon, m_pow);
  double s_xy_upper = std::pow(static_cast<double>(std::min(pr.m, pr.n)), 1.0 / pr.p) *
                      linalg::op_norm(run.s_part);
  run.bound_constant = tm / (1.0 - em * tm) * s_xy_upper;
  run.y_norm_bound = run.bound_constant * run.z_x_norm;

  // z_k: repeated restricted solves; terms P^(k-1) S z_k.
  CVector zk = vz;
  CVector partial = CVector::Zero(mn);
  CMatrix p_power = CMatrix::Identity(mn, mn);
  for (int k = 1; k <= 400; ++k) {
    CVector ck = q.adjoint() * zk;
    CVector sol = svd.solve(ck);
    CVector zk1 = q * sol;
    double prev_x = x_norm(linalg::unvec(zk, pr.m, pr.n));
    double next_x = x_norm(linalg::unvec(zk1, pr.m, pr.n));
    if (next_x > tm * prev_x * (1.0 + 1e-9))
      throw NotSurjectiveOnSubspace("reconstruct_series: solve exceeded t^m growth");
    CVector term = p_power * (run.s_part * zk1);
    partial += term;
    CMatrix pm = linalg::unvec(partial, pr.m, pr.n);
    run.series_partial_sums.push_back(y_norm(pm, pr));
    run.partial_sum_residuals.push_back(x_norm(CMatrix(pm - z)));
    zk = zk1;
    p_power = p_power * run.p_part;
    double term_y = y_norm(linalg::unvec(term, pr.m, pr.n), pr);
    if (term_y <= 1e-12 * std::max(1.0, run.series_partial_sums.back())) break;
  }

  double x_res = run.partial_sum_residuals.back();
  bool converged = x_res <= 1e-9 * std::max(1.0, run.z_x_norm);
  bool bounded = run.z_y_norm <= run.y_norm_bound * (1.0 + 1e-9) + 1e-12;
  run.verdict = converged && bounded;
  return run;
}

struct EigenspaceIdealReport {
  int eigencount = 0;
  bool apply_ok = true;  // quasinorm bound on the operator applied to eigenmatrices
  bool rank_ok = true;   // rank-weighted comparison against the nuclear norm
  double worst_apply_ratio = 0.0;
  double worst_rank_ratio = 0.0;
};

// For eigenmatrices of the lift at lambda: checks
//   ||T x||_p <= n_terms^((1-p)/p) (sum ||a_i|| ||b_i||) ||x||_p
// and ||x||_p <= rank(x)^((1-p)/p) ||x||_nuclear.
inline EigenspaceIdealReport eigenspace_ideal_check(const elem::ElementaryOperator& t_op,
                                                    Complex lambda, double p,
                                                    double tol = 1e-7) {
  elem::validate(t_op);
  if (std::isnan(p) || p <= 0.0 || p > 1.0) throw InvalidP("eigenspace_ideal_check: p");
  if (std::abs(lambda) <= tol)
    throw LambdaNotInSpectrum("eigenspace_ideal_check: lambda too close to zero");

  CMatrix lift = elem::elem_matrix(t_op);
  Eigen::ComplexEigenSolver<CMatrix> es(lift, true);
  if (es.info() != Eigen::Success) throw Error("eigenspace_ideal_check: eigensolver failed");

  EigenspaceIdealReport rep;
  double coeff_sum = elem::elem_norm_bound(t_op);
  double nterms = static_cast<double>(std::max<std::size_t>(t_op.terms.size(), 1));
  double apply_factor = std::pow(nterms, (1.0 - p) / p) * coeff_sum;

  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (std::abs(es.eigenvalues()(i) - lambda) > tol * std::max(1.0, std::abs(lambda)))
      continue;
    ++rep.eigencount;
    CMatrix x = linalg::unvec(es.eigenvectors().col(i), t_op.m, t_op.n);
    double xp = linalg::schatten_norm(x, p);
    double tx = linalg::schatten_norm(elem::elem_apply(t_op, x), p);
    double apply_ratio = tx / (apply_factor * xp);
    rep.worst_apply_ratio = std::max(rep.worst_apply_ratio, apply_ratio);
    if (apply_ratio > 1.0 + 1e-9) rep.apply_ok = false;

    // Rank must use the same artifact cutoff as the p-quasinorm, or the
    // two sides of the rank bound disagree about which singular values
    // exist.
    std::vector<double> sv = linalg::singular_values(x);
    double smax = sv.empty() ? 0.0 : sv.front();
    int rank = 0;
    for (double s : sv)
      if (s > linalg::sv_cutoff(x, smax)) ++rank;
    double nuclear = linalg::schatten_norm(x, 1.0);
    double rank_bound = std::pow(static_cast<double>(std::max(rank, 1)), (1.0 - p) / p) * nuclear;
    double rank_ratio = xp / rank_bound;
    rep.worst_rank_ratio = std::max(rep.worst_rank_ratio, rank_ratio);
    if (rank_ratio > 1.0 + 1e-9) rep.rank_ok = false;
  }
  if (rep.eigencount == 0)
    throw LambdaNotInSpectrum("eigenspace_ideal_check: no eigenvalue within tolerance");
  return rep;
}

}  // namespace opair
}  // namespace sral
