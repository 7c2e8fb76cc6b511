#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "sral/errors.hpp"

namespace sral {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

namespace linalg {

inline bool is_finite(const CMatrix& a) {
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      const Complex& z = a(i, j);
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
  return true;
}

inline void require_finite(const CMatrix& a, const char* who) {
  if (!is_finite(a)) throw ParseError(std::string(who) + ": non-finite entry");
}

inline void require_square(const CMatrix& a, const char* who) {
  if (a.rows() != a.cols())
    throw NonSquare(std::string(who) + ": " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()));
}

inline double frobenius(const CMatrix& a) { return a.norm(); }

// Largest singular value; closed forms for 1x1 and 2x2 keep word
// enumeration off the SVD path.
inline double op_norm(const CMatrix& a) {
  require_finite(a, "op_norm");
  if (a.rows() == 1 && a.cols() == 1) return std::abs(a(0, 0));
  if (a.rows() == 2 && a.cols() == 2) {
    double f = a.squaredNorm();
    double g = std::abs(a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0));
    double disc = f * f - 4.0 * g * g;
    if (disc < 0) disc = 0;
    return std::sqrt(0.5 * (f + std::sqrt(disc)));
  }
  Eigen::JacobiSVD<CMatrix> svd(a);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

// Spectral radius. Closed form for 1x1/2x2, dense eigensolve otherwise.
inline double rho(const CMatrix& a) {
  if (a.rows() != a.cols()) throw NonSquare("rho");
  if (a.rows() == 0) return 0.0;
  if (a.rows() == 1) return std::abs(a(0, 0));
  if (a.rows() == 2) {
    Complex tr = a(0, 0) + a(1, 1);
    Complex det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    Complex s = std::sqrt(tr * tr - 4.0 * det);
    return 0.5 * std::max(std::abs(tr + s), std::abs(tr - s));
  }
  Eigen::ComplexEigenSolver<CMatrix> es(a, false);
  if (es.info() != Eigen::Success) throw Error("rho: eigensolver failed");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

struct SpectrumSet {
  std::vector<Complex> eigenvalues;
  double match_tolerance = 1e-7;
};

inline SpectrumSet spectrum(const CMatrix& a) {
  require_square(a, "spectrum");
  require_finite(a, "spectrum");
  Eigen::ComplexEigenSolver<CMatrix> es(a, false);
  if (es.info() != Eigen::Success) throw Error("spectrum: eigensolver failed");
  SpectrumSet s;
  s.eigenvalues.assign(es.eigenvalues().data(),
                       es.eigenvalues().data() + es.eigenvalues().size());
  Complex sum = 0;
  for (const Complex& z : s.eigenvalues) sum += z;
  double scale = std::max(1.0, op_norm(a));
  if (std::abs(sum - a.trace()) > 1e-9 * scale * static_cast<double>(std::max<Eigen::Index>(a.rows(), 1)))
    throw Error("spectrum: eigenvalue sum inconsistent with trace");
  return s;
}

// Greedy minimal-distance matching between two eigenvalue multisets;
// returns the largest matched distance (infinity on size mismatch).
inline double match_distance(const std::vector<Complex>& u, const std::vector<Complex>& v) {
  if (u.size() != v.size()) return std::numeric_limits<double>::infinity();
  const std::size_t n = u.size();
  std::vector<bool> used_u(n, false), used_v(n, false);
  double worst = 0.0;
  for (std::size_t step = 0; step < n; ++step) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (used_u[i]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (used_v[j]) continue;
        double d = std::abs(u[i] - v[j]);
        if (d < best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    }
    used_u[bi] = used_v[bj] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

inline bool spectra_match(const SpectrumSet& a, const SpectrumSet& b, double tol = -1.0) {
  if (tol < 0) tol = std::min(a.match_tolerance, b.match_tolerance);
  return match_distance(a.eigenvalues, b.eigenvalues) <= tol;
}

// Cutoff below which a computed singular value is a rounding artifact of
// the matrix rather than resolvable structure.
inline double sv_cutoff(const CMatrix& a, double smax) {
  return static_cast<double>(std::max(a.rows(), a.cols())) *
         std::numeric_limits<double>::epsilon() * smax;
}

inline double schatten_norm(const CMatrix& a, double p) {
  require_finite(a, "schatten_norm");
  if (std::isnan(p) || p <= 0.0) throw InvalidP("schatten_norm: p must be in (0, inf]");
  if (std::isinf(p)) return op_norm(a);
  Eigen::JacobiSVD<CMatrix> svd(a);
  if (svd.singularValues().size() == 0) return 0.0;
  // Artifact singular values must be dropped: raising them to p < 1
  // amplifies them far above double resolution (eps^(1/4) is 1e-4).
  const double cut = sv_cutoff(a, svd.singularValues()(0));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > cut) acc += std::pow(svd.singularValues()(i), p);
  return acc == 0.0 ? 0.0 : std::pow(acc, 1.0 / p);
}

inline std::vector<double> singular_values(const CMatrix& a) {
  Eigen::JacobiSVD<CMatrix> svd(a);
  return {svd.singularValues().data(),
          svd.singularValues().data() + svd.singularValues().size()};
}

// Column-major vectorization: vec(x) stacks the columns of x.
inline CVector vec(const CMatrix& x) {
  return Eigen::Map<const CVector>(x.data(), x.size());
}

inline CMatrix unvec(const CVector& v, Eigen::Index m, Eigen::Index n) {
  if (v.size() != m * n) throw ShapeMismatch("unvec: size mismatch");
  return Eigen::Map<const CMatrix>(v.data(), m, n);
}

// Matrix of x -> a x b on column-major vectorizations: kron(b^T, a).
inline CMatrix kron_lift(const CMatrix& a, const CMatrix& b, Eigen::Index m, Eigen::Index n) {
  if (a.rows() != m || a.cols() != m || b.rows() != n || b.cols() != n)
    throw DimMismatch("kron_lift: coefficients do not match bimodule dims");
  require_finite(a, "kron_lift");
  require_finite(b, "kron_lift");
  CMatrix k(m * n, m * n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      k.block(i * m, j * m, m, m) = b(j, i) * a;
  return k;
}

struct Contour {
  Complex center;
  double radius = 1.0;
  int nodes = 16;
};

inline void validate(const Contour& c) {
  if (!(c.radius > 0.0) || !std::isfinite(c.radius) || !std::isfinite(c.center.real()) ||
      !std::isfinite(c.center.imag()))
    throw ParseError("contour: center/radius must be finite, radius > 0");
  if (c.nodes < 16) throw ParseError("contour: at least 16 nodes");
}

// Spectral projection onto the eigenvalues enclosed by the contour,
// via trapezoid quadrature of the resolvent with node doubling.
inline CMatrix riesz_projection(const CMatrix& a, const Contour& gamma) {
  require_square(a, "riesz_projection");
  require_finite(a, "riesz_projection");
  validate(gamma);
  const Eigen::Index d = a.rows();

  Eigen::ComplexEigenSolver<CMatrix> es(a, false);
  if (es.info() != Eigen::Success) throw Error("riesz_projection: eigensolver failed");
  Eigen::Index enclosed = 0;
  for (Eigen::Index i = 0; i < d; ++i) {
    double dist = std::abs(es.eigenvalues()(i) - gamma.center);
    if (std::abs(dist - gamma.radius) < gamma.radius * 1e-6)
      throw EigenvalueOnContour("riesz_projection: eigenvalue within radius*1e-6 of contour");
    if (dist < gamma.radius) ++enclosed;
  }

  auto quad = [&](int nn) {
    CMatrix acc = CMatrix::Zero(d, d);
    CMatrix id = CMatrix::Identity(d, d);
    for (int j = 0; j < nn; ++j) {
      double th = 2.0 * M_PI * j / nn;
      Complex e(std::cos(th), std::sin(th));
      Complex lambda = gamma.center + gamma.radius * e;
      Eigen::FullPivLU<CMatrix> lu(lambda * id - a);
      if (!lu.isInvertible())
        throw SingularResolvent("riesz_projection: resolvent solve failed on a node");
      acc += e * lu.inverse();
    }
    return CMatrix((gamma.radius / nn) * acc);
  };

  int n = std::max(gamma.nodes, 16);
  CMatrix p = quad(n);
  for (;;) {
    if (n > (1 << 22))
      throw SingularResolvent("riesz_projection: quadrature failed to converge");
    CMatrix p2 = quad(2 * n);
    double diff = frobenius(p2 - p);
    p = p2;
    n *= 2;
    if (diff < 1e-10) break;
  }

  if (frobenius(p * p - p) > 1e-8) throw Error("riesz_projection: not idempotent");
  if (frobenius(p * a - a * p) > 1e-8) throw Error("riesz_projection: does not commute");
  double tr = p.trace().real();
  if (std::abs(tr - static_cast<double>(enclosed)) > 1e-6)
    throw Error("riesz_projection: rank disagrees with enclosed eigenvalue count");
  return p;
}

// Modified Gram-Schmidt on vectorized matrices; drops directions with
// residual below 1e-12 relative to the largest input norm.
inline std::vector<CVector> orthonormalize(const std::vector<CVector>& vs) {
  double scale = 0.0;
  for (const auto& v : vs) scale = std::max(scale, v.norm());
  std::vector<CVector> q;
  if (scale == 0.0) return q;
  for (const auto& v0 : vs) {
    CVector v = v0;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& u : q) v -= u * u.dot(v);
    double nrm = v.norm();
    if (nrm > 1e-12 * scale) q.push_back(v / nrm);
  }
  return q;
}

inline double subspace_distance(const CMatrix& a, const std::vector<CMatrix>& basis) {
  require_finite(a, "subspace_distance");
  std::vector<CVector> vs;
  vs.reserve(basis.size());
  for (const CMatrix& b : basis) {
    if (b.rows() != a.rows() || b.cols() != a.cols())
      throw ShapeMismatch("subspace_distance: basis shape mismatch");
    require_finite(b, "subspace_distance");
    vs.push_back(vec(b));
  }
  std::vector<CVector> q = orthonormalize(vs);
  CVector va = vec(a);
  for (const auto& u : q) va -= u * u.dot(va);
  return va.norm();
}

}  // namespace linalg
}  // namespace sral
