#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "sral/io.hpp"
#include "sral/rng.hpp"
#include "sral/triangularize.hpp"

using namespace sral;
using tri::SubspaceChain;

namespace {

CMatrix unit(Eigen::Index d, Eigen::Index i, Eigen::Index j) {
  CMatrix e = CMatrix::Zero(d, d);
  e(i, j) = 1.0;
  return e;
}

CMatrix jordan(Eigen::Index d) {
  CMatrix n = CMatrix::Zero(d, d);
  for (Eigen::Index i = 0; i + 1 < d; ++i) n(i, i + 1) = 1.0;
  return n;
}

CMatrix strict_upper(Rng& rng, Eigen::Index d) {
  CMatrix a = CMatrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i + 1; j < d; ++j) a(i, j) = rng.cnormal();
  return a;
}

// Independent lowering certificate: projector algebra redone from the raw
// chain columns, no library helpers.
double lowering_residual(const std::vector<CMatrix>& gens, const SubspaceChain& c) {
  const Eigen::Index d = c.dimension;
  CMatrix id = CMatrix::Identity(d, d);
  double worst = 0.0;
  for (const CMatrix& g : gens) {
    for (std::size_t j = 0; j <= c.bases.size(); ++j) {
      CMatrix pj_into = id;
      if (j < c.bases.size()) pj_into = c.bases[j] * c.bases[j].adjoint();
      CMatrix pj_below = CMatrix::Zero(d, d);
      if (j > 0) pj_below = c.bases[j - 1] * c.bases[j - 1].adjoint();
      worst = std::max(worst, linalg::op_norm((id - pj_below) * g * pj_into));
    }
  }
  return worst;
}

double binomial(int m, int k) {
  double b = 1.0;
  for (int i = 0; i < k; ++i) b = b * (m - i) / (i + 1);
  return b;
}

double span_gap(const CMatrix& basis, const std::vector<CVector>& target) {
  std::vector<CVector> t = linalg::orthonormalize(target);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < basis.cols(); ++i) {
    CVector v = basis.col(i);
    for (const CVector& q : t) v -= q * (q.dot(v));
    worst = std::max(worst, v.norm());
  }
  return worst;
}

}  // namespace

TEST(IsNilFamily, ClassifiesGenerators) {
  EXPECT_TRUE(tri::is_nil_family({unit(3, 0, 1), unit(3, 0, 2)}));
  EXPECT_FALSE(tri::is_nil_family({CMatrix::Identity(2, 2)}));

  Rng rng = Rng::stream(808, 1);
  CMatrix s = CMatrix::Identity(3, 3) + 0.3 * rng.gaussian(3, 3);
  CMatrix si = s.inverse();
  EXPECT_TRUE(tri::is_nil_family({s * strict_upper(rng, 3) * si, s * strict_upper(rng, 3) * si}));
  // Nilpotent generators whose algebra is not nil.
  EXPECT_FALSE(tri::is_nil_family({unit(2, 0, 1), unit(2, 1, 0)}));
}

TEST(Triangularize, JordanBlockYieldsTheCoordinateFlag) {
  SubspaceChain c = tri::triangularize({jordan(3)});
  ASSERT_EQ(c.bases.size(), 2u);
  EXPECT_EQ(c.bases[0].cols(), 1);
  EXPECT_EQ(c.bases[1].cols(), 2);
  EXPECT_NEAR(std::abs(c.bases[0](0, 0)), 1.0, 1e-12);
  EXPECT_LE(lowering_residual({jordan(3)}, c), 1e-9);
}

TEST(Triangularize, CommutingStrictlyUpperPairLowersStrictly) {
  std::vector<CMatrix> gens = {unit(3, 0, 1) + 2.0 * unit(3, 1, 2), unit(3, 0, 2)};
  SubspaceChain c = tri::triangularize(gens);
  tri::validate(c);
  EXPECT_LE(lowering_residual(gens, c), 1e-9);
}

TEST(Triangularize, SimilarityCovariance) {
  Rng rng = Rng::stream(808, 2);
  std::vector<CMatrix> canon = {jordan(4), CMatrix(jordan(4) * jordan(4))};
  CMatrix s = CMatrix::Identity(4, 4) + 0.4 * rng.gaussian(4, 4);
  std::vector<CMatrix> conj;
  CMatrix si = s.inverse();
  for (const CMatrix& g : canon) conj.push_back(s * g * si);

  SubspaceChain cc = tri::triangularize(canon);
  SubspaceChain cj = tri::triangularize(conj);
  ASSERT_EQ(cc.bases.size(), cj.bases.size());
  for (std::size_t j = 0; j < cc.bases.size(); ++j) {
    ASSERT_EQ(cc.bases[j].cols(), cj.bases[j].cols());
    std::vector<CVector> mapped;
    for (Eigen::Index i = 0; i < cc.bases[j].cols(); ++i)
      mapped.push_back(CVector(s * cc.bases[j].col(i)));
    EXPECT_LE(span_gap(cj.bases[j], mapped), 1e-7) << "level " << j;
  }
}

TEST(Triangularize, RejectsFamiliesThatAreNotNil) {
  EXPECT_THROW(tri::triangularize({CMatrix::Identity(3, 3)}), NotNilFamily);
  EXPECT_THROW(tri::triangularize({unit(2, 0, 1), unit(2, 1, 0)}), NotNilFamily);
}

TEST(Triangularize, LongProductsOfNilFamiliesVanish) {
  Rng rng = Rng::stream(808, 3);
  CMatrix s = CMatrix::Identity(4, 4) + 0.3 * rng.gaussian(4, 4);
  CMatrix si = s.inverse();
  std::vector<CMatrix> gens = {s * strict_upper(rng, 4) * si, s * strict_upper(rng, 4) * si};
  double alpha = 0.0;
  for (const CMatrix& g : gens) alpha = std::max(alpha, linalg::op_norm(g));
  for (int trial = 0; trial < 10; ++trial) {
    CMatrix p = CMatrix::Identity(4, 4);
    for (int i = 0; i < 4; ++i) p = p * gens[rng.index(gens.size())];
    EXPECT_LE(linalg::op_norm(p), 1e-8 * std::pow(alpha, 4));
  }
}

TEST(TriangularizeSplit, FrameFactorsPreserveTheChain) {
  CMatrix f = CMatrix::Zero(3, 3);
  f(0, 0) = 0.9;
  f(1, 1) = 0.5;
  f(2, 2) = 0.2;
  std::vector<CMatrix> k_gens = {jordan(3)};
  std::vector<CMatrix> f_gens = {f};
  SubspaceChain c = tri::triangularize(k_gens, f_gens);
  tri::validate(c);
  EXPECT_LE(lowering_residual(k_gens, c), 1e-9);
  CMatrix id = CMatrix::Identity(3, 3);
  for (std::size_t j = 1; j <= c.bases.size(); ++j) {
    CMatrix p = tri::chain_projector(c, j);
    EXPECT_LE(linalg::op_norm((id - p) * f * p), 1e-9);
  }
}

TEST(TriangularizeSplit, NonNilIdealIsRejected) {
  // k alone is nilpotent but the ideal it generates against f contains
  // a rank-one idempotent direction.
  EXPECT_THROW(tri::triangularize({unit(2, 0, 1)}, {unit(2, 1, 0)}), NotNilFamily);
}

TEST(ChainValidate, ContractViolations) {
  CMatrix e1 = CMatrix::Zero(3, 1);
  e1(0, 0) = 1.0;
  CMatrix e12 = CMatrix::Zero(3, 2);
  e12(0, 0) = 1.0;
  e12(1, 1) = 1.0;

  SubspaceChain ok{3, {e1, e12}};
  EXPECT_NO_THROW(tri::validate(ok));

  SubspaceChain shrinking{3, {e12, e12}};
  EXPECT_THROW(tri::validate(shrinking), ParseError);

  CMatrix skewed = e12;
  skewed(2, 1) = 0.5;
  SubspaceChain not_orthonormal{3, {e1, skewed}};
  EXPECT_THROW(tri::validate(not_orthonormal), ParseError);

  CMatrix swapped(3, 2);
  swapped.setZero();
  swapped(1, 0) = 1.0;
  swapped(0, 1) = 1.0;
  SubspaceChain not_nested{3, {e1, swapped}};
  EXPECT_THROW(tri::validate(not_nested), ParseError);

  SubspaceChain full{3, {CMatrix::Identity(3, 3)}};
  EXPECT_THROW(tri::validate(full), ParseError);

  SubspaceChain empty{3, {}};
  EXPECT_THROW(tri::validate(empty), ParseError);
}

TEST(ChainGeometry, ProjectorAndSliceBases) {
  SubspaceChain c = tri::triangularize({jordan(3)});
  CMatrix p1 = tri::chain_projector(c, 1);
  EXPECT_NEAR(p1.trace().real(), 1.0, 1e-12);
  EXPECT_LE((p1 * p1 - p1).norm(), 1e-12);
  EXPECT_LE((tri::chain_projector(c, 0)).norm(), 0.0);

  // Slices tile C^3: 1 + 1 + 1 columns, mutually orthogonal.
  CMatrix s1 = tri::slice_basis(c, 1), s2 = tri::slice_basis(c, 2), s3 = tri::slice_basis(c, 3);
  EXPECT_EQ(s1.cols() + s2.cols() + s3.cols(), 3);
  EXPECT_LE((s1.adjoint() * s2).norm(), 1e-12);
  EXPECT_LE((s2.adjoint() * s3).norm(), 1e-12);
}

TEST(Cepochka, SquareZeroNilpotentSaturatesAtZero) {
  CMatrix n = unit(2, 0, 1);
  SubspaceChain c{2, {CMatrix(CMatrix::Identity(2, 2).leftCols(1))}};
  tri::CepochkaReport rep = tri::cepochka_check({n, n}, c);
  EXPECT_EQ(rep.bounds.k, 1);
  EXPECT_NEAR(rep.bounds.alpha, 1.0, 1e-12);
  EXPECT_NEAR(rep.bounds.beta, 0.0, 1e-12);
  EXPECT_NEAR(rep.product_norm, 0.0, 1e-15);
  EXPECT_NEAR(rep.bound_value, 0.0, 1e-12);
  EXPECT_TRUE(rep.ok);
  EXPECT_TRUE(rep.f80_ok);
}

TEST(Cepochka, RandomChainPreservingFactorsRespectTheBound) {
  Rng rng = Rng::stream(808, 4);
  const Eigen::Index d = 4;
  CMatrix id = CMatrix::Identity(d, d);
  SubspaceChain c{d, {CMatrix(id.leftCols(1)), CMatrix(id.leftCols(3))}};
  for (int trial = 0; trial < 30; ++trial) {
    int m = 2 + static_cast<int>(rng.index(5));
    std::vector<CMatrix> ops;
    for (int i = 0; i < m; ++i) {
      // Block upper-triangular with respect to dims 1 | 2 | 1.
      CMatrix a = rng.gaussian(d, d);
      a(1, 0) = a(2, 0) = a(3, 0) = 0.0;
      a(3, 1) = a(3, 2) = 0.0;
      ops.push_back(a);
    }
    tri::CepochkaReport rep = tri::cepochka_check(ops, c);
    EXPECT_TRUE(rep.ok) << "trial " << trial << ": " << rep.product_norm << " vs "
                        << rep.bound_value;
    EXPECT_TRUE(rep.f80_ok) << "trial " << trial << ": gap " << rep.worst_f80_gap;
    EXPECT_LE(rep.bounds.beta, rep.bounds.alpha + 1e-12);
    double recomputed = std::pow(2.0, m) * binomial(m, rep.bounds.k) *
                        std::pow(rep.bounds.alpha, rep.bounds.k) *
                        std::pow(rep.bounds.beta, m - rep.bounds.k);
    EXPECT_NEAR(rep.bound_value, recomputed, 1e-12 * std::max(1.0, recomputed));
  }
}

TEST(Cepochka, GuardsInvarianceAndFactorCount) {
  SubspaceChain c{2, {CMatrix(CMatrix::Identity(2, 2).leftCols(1))}};
  EXPECT_THROW(tri::cepochka_check({unit(2, 1, 0)}, c), ChainNotInvariant);
  EXPECT_THROW(tri::cepochka_check({}, c), TooFewFactors);

  SubspaceChain c2{3,
                   {CMatrix(CMatrix::Identity(3, 3).leftCols(1)),
                    CMatrix(CMatrix::Identity(3, 3).leftCols(2))}};
  EXPECT_THROW(tri::cepochka_check({CMatrix::Identity(3, 3)}, c2), TooFewFactors);
}

TEST(ProductDecay, SingleNilpotentDropsToExactZero) {
  std::vector<tri::DecayRow> rows = tri::product_decay({jordan(3)}, {}, 0.5, 5);
  ASSERT_EQ(rows.size(), 5u);
  for (const tri::DecayRow& r : rows) EXPECT_EQ(r.count_enumerated, 1);
  EXPECT_GT(rows[0].max_norm, 0.0);
  EXPECT_GT(rows[1].max_norm, 0.0);
  for (int m = 3; m <= 5; ++m) {
    EXPECT_EQ(rows[m - 1].max_norm, 0.0);
    EXPECT_EQ(rows[m - 1].root, 0.0);
  }
}

TEST(ProductDecay, QuotaCountsMatchTheBinomialFormula) {
  const int m_max = 12;
  std::vector<tri::DecayRow> rows = tri::product_decay({jordan(4)}, {CMatrix::Identity(4, 4)},
                                                       0.5, m_max);
  ASSERT_EQ(rows.size(), static_cast<std::size_t>(m_max));
  for (int m = 1; m <= m_max; ++m) {
    int quota = static_cast<int>(std::ceil(0.5 * m - 1e-9));
    double expected = 0.0;
    for (int j = quota; j <= m; ++j) expected += binomial(m, j);
    EXPECT_EQ(rows[m - 1].count_enumerated, static_cast<long long>(expected)) << "m=" << m;
  }
  // The identity commutes with the Jordan block, so any word with at least
  // four lowering letters is exactly zero; the quota reaches four at m=7.
  for (int m = 1; m <= 6; ++m) EXPECT_NEAR(rows[m - 1].max_norm, 1.0, 1e-12);
  for (int m = 7; m <= m_max; ++m) EXPECT_EQ(rows[m - 1].max_norm, 0.0);
}

TEST(ProductDecay, SnapshotFixtureStaysBitStable) {
  families::BoundedFamily kf =
      io::bounded_from_json(io::load_json(std::string(SRAL_FIXTURE_DIR) + "/decay_k.json"));
  families::BoundedFamily ff =
      io::bounded_from_json(io::load_json(std::string(SRAL_FIXTURE_DIR) + "/decay_f.json"));
  std::vector<tri::DecayRow> rows =
      tri::product_decay(kf.members, ff.members, 0.333333333333333, 10);
  std::ifstream in(std::string(SRAL_FIXTURE_DIR) + "/decay_snapshot.csv");
  ASSERT_TRUE(in.good());
  std::stringstream frozen;
  frozen << in.rdbuf();
  EXPECT_EQ(io::decay_csv(rows), frozen.str());
}

TEST(ProductDecay, HypothesisAndArgumentGuards) {
  EXPECT_THROW(tri::product_decay({CMatrix::Identity(2, 2)}, {}, 0.5, 4),
               RadicalHypothesisViolated);
  EXPECT_THROW(tri::product_decay({unit(2, 0, 1)}, {unit(2, 1, 0)}, 0.5, 4),
               RadicalHypothesisViolated);
  EXPECT_THROW(tri::product_decay({jordan(3)}, {}, 0.0, 4), ParseError);
  EXPECT_THROW(tri::product_decay({jordan(3)}, {}, 1.5, 4), ParseError);
  EXPECT_THROW(tri::product_decay({jordan(3)}, {}, 0.5, 0), ParseError);
  EXPECT_THROW(
      tri::product_decay({jordan(4)}, {CMatrix::Identity(4, 4)}, 0.25, 14, 50),
      BudgetExceeded);
}
