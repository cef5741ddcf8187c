#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <Eigen/QR>

#include "pmor/sparse/dense.hpp"
#include "pmor/sparse/matrix_market.hpp"
#include "pmor/sparse/sparse_matrix.hpp"
#include "support.hpp"

using namespace pmor;
using pmor::testing::random_dense;
using pmor::testing::random_sparse;
using pmor::testing::relative_error;

namespace {

SparseMatrix small(std::initializer_list<std::initializer_list<double>> rows) {
  std::vector<Triplet> t;
  Index i = 0, ncols = 0;
  for (const auto& r : rows) {
    Index j = 0;
    for (const auto v : r) {
      t.push_back({i, j, Complex(v)});
      ++j;
    }
    ncols = std::max(ncols, j);
    ++i;
  }
  return SparseMatrix::from_triplets(i, ncols, std::move(t));
}

std::filesystem::path temp_file(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "pmor_sparse_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(SparseMatrixTest, ConstructionSortsSumsAndPrunes) {
  const auto a = SparseMatrix::from_triplets(
      2, 3, {{1, 2, 1.0}, {0, 1, 2.0}, {0, 1, 3.0}, {1, 0, 0.0}, {0, 0, 4.0}, {1, 1, 1.0}, {1, 1, -1.0}});
  ASSERT_EQ(a.nnz(), 3);
  EXPECT_EQ(a.coeff(0, 1), Complex(5.0));
  EXPECT_EQ(a.coeff(1, 1), Complex(0.0));
  const auto rp = a.row_ptr();
  ASSERT_EQ(rp.size(), 3u);
  EXPECT_EQ(rp[0], 0);
  EXPECT_EQ(rp[2], a.nnz());
  for (Index r = 0; r < a.rows(); ++r)
    for (Index k = rp[r] + 1; k < rp[r + 1]; ++k) EXPECT_LT(a.col_idx()[k - 1], a.col_idx()[k]);
  for (const auto& v : a.values()) EXPECT_NE(v, Complex(0.0));
}

TEST(SparseMatrixTest, FromCsrRejectsUnsortedColumns) {
  EXPECT_THROW(SparseMatrix::from_csr(1, 3, {0, 2}, {2, 1}, {Complex(1), Complex(2)}), DimensionError);
  EXPECT_THROW(SparseMatrix::from_csr(2, 2, {0, 1}, {0}, {Complex(1)}), DimensionError);
}

TEST(SpmvTest, IdentityReproducesInput) {
  const Vector x = (Vector(3) << 1.0, 2.0, 3.0).finished();
  EXPECT_EQ(spmv(SparseMatrix::identity(3), x), x);
}

TEST(SpmvTest, ZeroMatrixGivesZero) {
  const auto z = SparseMatrix::from_triplets(4, 4, {});
  std::mt19937_64 rng(1);
  const Vector x = random_dense(4, 1, rng).col(0);
  EXPECT_EQ(spmv(z, x), Vector::Zero(4));
}

TEST(SpmvTest, MatchesDenseProduct) {
  std::mt19937_64 rng(2);
  const auto a = random_sparse(50, 0.1, rng);
  const Vector x = random_dense(50, 1, rng).col(0);
  EXPECT_LE(relative_error(spmv(a, x), to_dense(a) * x), 1e-14);
}

TEST(SpmvTest, DimensionMismatchThrows) {
  EXPECT_THROW(spmv(SparseMatrix::identity(3), Vector::Zero(4)), DimensionError);
  EXPECT_THROW(spmm(SparseMatrix::identity(3), DenseBlock::Zero(2, 2)), DimensionError);
}

TEST(SpmvTest, DenseOracleAcrossSizes) {
  std::mt19937_64 rng(3);
  for (Index n : {1, 7, 40, 120, 200}) {
    const auto a = random_sparse(n, 0.05, rng);
    const Vector x = random_dense(n, 1, rng).col(0);
    EXPECT_LE(relative_error(spmv(a, x), to_dense(a) * x), 1e-13) << "n=" << n;
  }
}

TEST(SpmmTest, IdentityAndRepeatedColumns) {
  std::mt19937_64 rng(4);
  const DenseBlock x = random_dense(6, 3, rng);
  EXPECT_EQ(spmm(SparseMatrix::identity(6), x), x);
  const auto a = random_sparse(6, 0.4, rng);
  DenseBlock xx(6, 2);
  xx.col(0) = x.col(0);
  xx.col(1) = x.col(0);
  const DenseBlock y = spmm(a, xx);
  EXPECT_EQ(y.col(0), y.col(1));
  EXPECT_EQ(y.col(0), spmv(a, x.col(0)));
}

TEST(SpmmTest, MatchesDenseProduct) {
  std::mt19937_64 rng(5);
  const auto a = random_sparse(60, 0.08, rng);
  const DenseBlock x = random_dense(60, 5, rng);
  EXPECT_LE(relative_error(spmm(a, x), to_dense(a) * x), 1e-14);
}

TEST(FrobeniusNormTest, SmallCases) {
  EXPECT_DOUBLE_EQ(frobenius_norm(small({{3, 4}, {0, 0}})), 5.0);
  EXPECT_DOUBLE_EQ(frobenius_norm(SparseMatrix::identity(4)), 2.0);
}

TEST(FrobeniusNormTest, MatchesDenseNormAndStoredSum) {
  std::mt19937_64 rng(6);
  const auto a = random_sparse(80, 0.05, rng);
  const double f = frobenius_norm(a);
  EXPECT_LE(std::abs(f - to_dense(a).norm()) / f, 1e-14);
  double sum = 0.0;
  for (const auto& v : a.values()) sum += std::norm(v);
  // Squaring a correctly rounded square root is exact up to two roundings.
  EXPECT_LE(std::abs(f * f - sum), 4.0 * std::numeric_limits<double>::epsilon() * sum);
}

TEST(KronTest, IdentityGivesBlockDiagonal) {
  const auto a = small({{1, 2}, {3, 4}});
  const auto k = kron(SparseMatrix::identity(2), a);
  ASSERT_EQ(k.rows(), 4);
  DenseMatrix expected = DenseMatrix::Zero(4, 4);
  expected.topLeftCorner(2, 2) = to_dense(a);
  expected.bottomRightCorner(2, 2) = to_dense(a);
  EXPECT_EQ(to_dense(k), expected);
}

TEST(KronTest, NilpotentTimesScalar) {
  const auto k = kron(small({{0, 1}, {0, 0}}), small({{2}}));
  EXPECT_EQ(to_dense(k), to_dense(small({{0, 2}, {0, 0}})));
  EXPECT_EQ(k.nnz(), 1);
}

TEST(KronTest, VecIdentityForLyapunovOperator) {
  std::mt19937_64 rng(7);
  const DenseMatrix aa = random_dense(4, 4, rng);
  const DenseMatrix ee = random_dense(4, 4, rng);
  const DenseMatrix z = random_dense(4, 4, rng);
  const DenseMatrix lhs = aa * z * ee.transpose() + ee * z * aa.transpose();
  const auto op = add(kron(from_dense(ee), from_dense(aa)), kron(from_dense(aa), from_dense(ee)));
  const Vector vz = z.reshaped();
  const Vector rhs = spmv(op, vz);
  EXPECT_LE((rhs - Vector(lhs.reshaped())).norm(), 1e-12 * lhs.norm());
}

TEST(KronTest, MixedProductProperty) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = from_dense(random_dense(3, 3, rng));
    const auto b = from_dense(random_dense(3, 3, rng));
    const auto c = from_dense(random_dense(3, 3, rng));
    const auto d = from_dense(random_dense(3, 3, rng));
    const DenseMatrix lhs = to_dense(multiply(kron(a, b), kron(c, d)));
    const DenseMatrix rhs = to_dense(kron(multiply(a, c), multiply(b, d)));
    EXPECT_LE((lhs - rhs).norm(), 1e-12 * rhs.norm());
  }
}

TEST(KronTest, IndexOverflowIsRejected) {
  const auto big = SparseMatrix::from_triplets(1, Index(1) << 40, {});  // wide, cheap to store
  EXPECT_THROW(kron(big, big), DimensionError);
}

TEST(MgsTest, OrthonormalInputUnchanged) {
  std::mt19937_64 rng(9);
  const DenseBlock q = random_dense(30, 5, rng).householderQr().householderQ() * DenseMatrix::Identity(30, 5);
  const DenseBlock out = mgs_orthonormalize(q);
  ASSERT_EQ(out.cols(), 5);
  EXPECT_LE((out - q).norm(), 1e-12);
}

TEST(MgsTest, DependentColumnDropped) {
  std::mt19937_64 rng(10);
  const Vector v = random_dense(12, 1, rng).col(0);
  DenseBlock vv(12, 2);
  vv.col(0) = v;
  vv.col(1) = 2.0 * v;
  const DenseBlock out = mgs_orthonormalize(vv);
  ASSERT_EQ(out.cols(), 1);
  EXPECT_LE((out.col(0) - v / v.norm()).norm(), 1e-14);
}

TEST(MgsTest, RandomBlockIsOrthonormal) {
  std::mt19937_64 rng(11);
  const DenseBlock out = mgs_orthonormalize(random_dense(100, 8, rng));
  ASSERT_EQ(out.cols(), 8);
  EXPECT_LE((out.adjoint() * out - DenseMatrix::Identity(8, 8)).norm(), 1e-12);
}

TEST(MgsTest, OrthonormalityUpToSixtyFourColumns) {
  std::mt19937_64 rng(12);
  for (Index k : {1, 16, 40, 64}) {
    // Nearly dependent columns stress the re-orthogonalization pass.
    DenseBlock v = random_dense(150, k, rng);
    for (Index j = 1; j < k; ++j) v.col(j) += 1e3 * v.col(0);
    const DenseBlock out = mgs_orthonormalize(v);
    const DenseMatrix g = out.adjoint() * out - DenseMatrix::Identity(out.cols(), out.cols());
    EXPECT_LE(g.norm(), 1e-10) << "k=" << k;
  }
}

TEST(DenseLuTest, IdentityAndDiagonal) {
  const Vector b = Vector::Constant(5, Complex(1.0));
  EXPECT_EQ(dense_lu_solve(DenseMatrix::Identity(5, 5), b), b);
  DenseMatrix d = DenseMatrix::Zero(5, 5);
  for (Index i = 0; i < 5; ++i) d(i, i) = double(i + 1);
  const DenseBlock x = dense_lu_solve(d, b);
  for (Index i = 0; i < 5; ++i) EXPECT_NEAR(std::abs(x(i, 0) - 1.0 / double(i + 1)), 0.0, 1e-15);
}

TEST(DenseLuTest, RandomWellConditionedResidual) {
  std::mt19937_64 rng(13);
  DenseMatrix a = random_dense(100, 100, rng);
  a += 20.0 * DenseMatrix::Identity(100, 100);
  const DenseBlock b = random_dense(100, 3, rng);
  const DenseBlock x = dense_lu_solve(a, b);
  EXPECT_LE((b - a * x).norm() / b.norm(), 1e-10);
}

TEST(DenseLuTest, SingularPivotThrows) {
  DenseMatrix a = DenseMatrix::Zero(3, 3);
  a(0, 0) = 1.0;
  a(1, 1) = 1.0;
  EXPECT_THROW(dense_lu_solve(a, DenseBlock::Ones(3, 1)), NumericalError);
}

TEST(MatrixMarketTest, ReadsIdentity) {
  std::istringstream in(
      "%%MatrixMarket matrix coordinate real general\n% comment\n2 2 2\n1 1 1.0\n2 2 1.0\n");
  EXPECT_EQ(read_matrix_market(in), SparseMatrix::identity(2));
}

TEST(MatrixMarketTest, SymmetricExpandedToGeneral) {
  std::istringstream in(
      "%%MatrixMarket matrix coordinate real symmetric\n3 3 3\n1 1 2.0\n2 1 -1.0\n3 2 5.0\n");
  const auto a = read_matrix_market(in);
  EXPECT_EQ(a.nnz(), 5);
  EXPECT_EQ(a.coeff(0, 1), Complex(-1.0));
  EXPECT_EQ(a.coeff(1, 0), Complex(-1.0));
  EXPECT_EQ(a.coeff(1, 2), Complex(5.0));
}

TEST(MatrixMarketTest, ComplexValuesAndHermitian) {
  std::istringstream in(
      "%%MatrixMarket matrix coordinate complex hermitian\n2 2 2\n1 1 1.0 0.0\n2 1 0.5 -2.0\n");
  const auto a = read_matrix_market(in);
  EXPECT_EQ(a.coeff(1, 0), Complex(0.5, -2.0));
  EXPECT_EQ(a.coeff(0, 1), Complex(0.5, 2.0));
}

TEST(MatrixMarketTest, MalformedInputsRejected) {
  const char* bad[] = {
      "%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n",
      "%%NotMarket matrix coordinate real general\n1 1 1\n1 1 1\n",
      "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n",
      "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n",
      "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 abc\n",
  };
  for (const auto* text : bad) {
    std::istringstream in(text);
    EXPECT_THROW(read_matrix_market(in), MatrixMarketError) << text;
  }
}

TEST(MatrixMarketTest, RoundTripIsExact) {
  std::mt19937_64 rng(14);
  const auto a = random_sparse(40, 0.1, rng);
  const auto path = temp_file("roundtrip.mtx");
  write_matrix_market(a, path);
  EXPECT_EQ(read_matrix_market(path), a);

  const auto r = SparseMatrix::from_triplets(3, 2, {{0, 0, 0.1}, {2, 1, -1.0 / 3.0}});
  write_matrix_market(r, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_NE(header.find("real"), std::string::npos);
  EXPECT_EQ(read_matrix_market(path), r);
}

TEST(MatrixMarketTest, DenseRoundTrip) {
  std::mt19937_64 rng(15);
  const DenseBlock b = random_dense(7, 3, rng);
  const auto path = temp_file("dense.mtx");
  write_matrix_market(b, path);
  EXPECT_EQ(read_dense_matrix_market(path), b);
}
