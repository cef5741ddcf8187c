#include <gtest/gtest.h>

#include <random>

#include "pmor/affine/affine_family.hpp"
#include "pmor/zoo/gyro.hpp"
#include "support.hpp"

using namespace pmor;
using pmor::testing::random_complex;
using pmor::testing::random_sparse;

namespace {

AffineFamily random_family(Index n, Index terms, std::mt19937_64& rng) {
  std::vector<SparseMatrix> t;
  for (Index k = 0; k < terms; ++k) t.push_back(random_sparse(n, 0.2, rng));
  return AffineFamily(std::move(t));
}

ExpansionPoint random_point(Index len, std::mt19937_64& rng) {
  ExpansionPoint p;
  for (Index k = 0; k < len; ++k) p.values.push_back(random_complex(rng));
  return p;
}

}  // namespace

TEST(AffineFamily, ZeroCoefficientsGiveConstantTerm) {
  std::mt19937_64 rng(1);
  const auto f = random_family(12, 3, rng);
  const auto a = f.evaluate(ExpansionPoint{{0.0, 0.0}, ""});
  EXPECT_EQ((to_dense(a) - to_dense(f.term(0))).norm(), 0.0);
}

TEST(AffineFamily, UnitCoefficientAddsTerm) {
  std::mt19937_64 rng(2);
  const auto f = random_family(10, 2, rng);
  const auto a = f.evaluate(ExpansionPoint{{1.0}, ""});
  EXPECT_LE((to_dense(a) - to_dense(f.term(0)) - to_dense(f.term(1))).norm(), 1e-15);
}

TEST(AffineFamily, MatchesDenseSum) {
  std::mt19937_64 rng(3);
  const auto f = random_family(30, 3, rng);
  const auto p = random_point(2, rng);
  DenseMatrix expect = to_dense(f.term(0));
  for (Index j = 0; j < 2; ++j) expect += p.values[static_cast<std::size_t>(j)] * to_dense(f.term(j + 1));
  EXPECT_LE(pmor::testing::relative_error(to_dense(f.evaluate(p)), expect), 1e-14);
}

TEST(AffineFamily, PrunesExactCancellation) {
  const auto i = SparseMatrix::identity(4);
  const AffineFamily f({i, i});
  const auto a = f.evaluate(ExpansionPoint{{-1.0}, ""});
  EXPECT_EQ(a.nnz(), 0);
}

TEST(AffineFamily, RejectsBadShapes) {
  const auto i3 = SparseMatrix::identity(3);
  const auto i4 = SparseMatrix::identity(4);
  EXPECT_THROW(AffineFamily({i3}), DimensionError);
  EXPECT_THROW(AffineFamily({i3, i4}), DimensionError);
  EXPECT_THROW(AffineFamily({i3, i3}, DenseBlock::Ones(4, 1)), DimensionError);
  const AffineFamily f({i3, i3});
  EXPECT_THROW(f.evaluate(ExpansionPoint{{1.0, 2.0}, ""}), DimensionError);
}

TEST(AffineFamily, DefaultLabels) {
  const auto i = SparseMatrix::identity(2);
  const AffineFamily f({i, i, i});
  EXPECT_EQ(f.term_labels(), (std::vector<std::string>{"A0", "A1", "A2"}));
}

TEST(AffineFamilyProperty, EvaluateIsAffine) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = random_family(15, 4, rng);
    const auto p = random_point(3, rng), q = random_point(3, rng);
    const DenseMatrix lhs = to_dense(f.evaluate(p)) + to_dense(f.evaluate(q)) - to_dense(f.term(0));
    EXPECT_LE(pmor::testing::relative_error(to_dense(f.evaluate(p + q)), lhs), 1e-13);
  }
}

TEST(AffineFamilyProperty, DifferenceBoundedByTriangleInequality) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = random_family(15, 4, rng);
    const auto p = random_point(3, rng), q = random_point(3, rng);
    double bound = 0.0;
    for (std::size_t j = 0; j < 3; ++j)
      bound += std::abs(p.values[j] - q.values[j]) * frobenius_norm(f.term(static_cast<Index>(j) + 1));
    EXPECT_LE(frobenius_norm(subtract(f.evaluate(p), f.evaluate(q))), bound * (1 + 1e-12));
  }
}

TEST(GyroPoint, UnitGeometry) {
  const auto p = gyro_point(RawGyroParams{Complex(0.0, 1.0), 0.1, 0.0, 0.0, 1.0});
  ASSERT_EQ(p.size(), 11);
  EXPECT_EQ(p.values[9], Complex(1.0));
  EXPECT_EQ(p.values[10], Complex(1.0));
}

TEST(GyroPoint, DoubledGeometry) {
  const auto p = gyro_point(RawGyroParams{Complex(0.0, 1.0), 0.1, 0.0, 0.0, 2.0});
  EXPECT_EQ(p.values[9], Complex(0.5));
  EXPECT_EQ(p.values[10], Complex(2.0));
}

TEST(GyroPoint, ZeroFrequency) {
  const auto p = gyro_point(RawGyroParams{Complex(0.0), 0.3, 0.2, 0.1, 4.0});
  for (std::size_t k = 0; k < 9; ++k) EXPECT_EQ(p.values[k], Complex(0.0));
  EXPECT_EQ(p.values[9], Complex(0.25));
  EXPECT_EQ(p.values[10], Complex(4.0));
}

TEST(GyroPoint, RejectsZeroGeometry) {
  EXPECT_THROW(gyro_point(RawGyroParams{Complex(1.0), 0.0, 0.0, 0.0, 0.0}), std::invalid_argument);
}

TEST(GyroPoint, InactiveComponentsVanish) {
  const auto p = gyro_point(RawGyroParams{Complex(0.3, 1.1), 0.2, 0.0, 0.0, 1.7});
  for (std::size_t k = 4; k < 9; ++k) EXPECT_EQ(p.values[k], Complex(0.0));
  EXPECT_EQ(gyro_active_point(RawGyroParams{Complex(0.3, 1.1), 0.2, 0.0, 0.0, 1.7}).size(), 6);
  EXPECT_THROW(gyro_active_point(RawGyroParams{Complex(1.0), 0.0, 0.1, 0.0, 1.0}), std::invalid_argument);
}

TEST(GyroPointProperty, ProductRelations) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.25, 4.0);
  for (int trial = 0; trial < 100; ++trial) {
    RawGyroParams r{random_complex(rng), u(rng), u(rng), u(rng), u(rng)};
    const auto p = gyro_point(r);
    EXPECT_EQ(p.values[1], p.values[0] * p.values[10]);
    EXPECT_EQ(p.values[3], p.values[2] * p.values[10]);
    // 1/d rounded then multiplied by d is exact for powers of two only, so
    // the product is checked to one rounding.
    EXPECT_NEAR(std::abs(p.values[9] * p.values[10] - 1.0), 0.0, 2.3e-16);
  }
}

TEST(GyroPointProperty, ReciprocalExactForDyadicGeometry) {
  for (const double d : {0.25, 0.5, 1.0, 2.0, 8.0}) {
    const auto p = gyro_point(RawGyroParams{Complex(0.0, 1.0), 0.1, 0.0, 0.0, d});
    EXPECT_EQ(p.values[9] * p.values[10], Complex(1.0));
  }
}

TEST(DifferenceNorms, SinglePoint) {
  std::mt19937_64 rng(7);
  const auto f = random_family(8, 2, rng);
  const auto rows = pairwise_difference_norms(f, {ExpansionPoint{{0.5}, "a"}});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].label, "a");
  EXPECT_EQ(rows[0].reference_gap, 0.0);
}

TEST(DifferenceNorms, IdenticalPoints) {
  std::mt19937_64 rng(8);
  const auto f = random_family(8, 2, rng);
  const ExpansionPoint p{{0.5}, ""};
  const auto rows = pairwise_difference_norms(f, {p, p});
  EXPECT_EQ(rows[1].reference_gap, 0.0);
  EXPECT_EQ(rows[0].identity_gap, rows[1].identity_gap);
  EXPECT_EQ(rows[1].label, "point2");
}

TEST(DifferenceNorms, MatchesDirectComputation) {
  std::mt19937_64 rng(9);
  const auto f = random_family(10, 3, rng);
  const ExpansionPoint p{{0.5, 1.0}, ""}, q{{0.25, -1.0}, ""};
  const auto rows = pairwise_difference_norms(f, {p, q});
  const DenseMatrix a1 = to_dense(f.evaluate(p)), a2 = to_dense(f.evaluate(q));
  EXPECT_NEAR(rows[1].identity_gap, (DenseMatrix::Identity(10, 10) - a2).norm(), 1e-12);
  EXPECT_NEAR(rows[1].reference_gap, (a1 - a2).norm(), 1e-12);
}

TEST(DifferenceNorms, GyroAnalogReferenceGapBelowIdentityGap) {
  GyroAnalogSpec spec;
  spec.n = 400;
  const auto g = gen_gyro_analog(spec);
  const auto rows = pairwise_difference_norms(g.model, g.points);
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& r : rows) EXPECT_LT(r.reference_gap, r.identity_gap) << r.label;
}
