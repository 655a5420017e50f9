#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"

using namespace pidlrsc;

TEST(Matmul, IdentityLeavesMatrixUnchanged) {
    const Matrix m = testutil::random_matrix(3, 4, 1);
    EXPECT_EQ(matmul(Matrix::identity(3), m), m);
}

TEST(Matmul, HandExample) {
    const Matrix a{{1, 2}, {3, 4}};
    const Matrix b{{0}, {1}};
    EXPECT_EQ(matmul(a, b), (Matrix{{2}, {4}}));
}

TEST(Matmul, MatchesTripleLoop) {
    const Matrix a = testutil::random_matrix(5, 4, 2);
    const Matrix b = testutil::random_matrix(4, 3, 3);
    const Matrix c = matmul(a, b);
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < 4; ++k) s += a(i, k) * b(k, j);
            EXPECT_NEAR(c(i, j), s, 1e-12);
        }
    }
}

TEST(Matmul, DimensionMismatchThrows) {
    EXPECT_THROW(matmul(Matrix(2, 3), Matrix(2, 3)), DimensionError);
}

TEST(MatrixType, ValueCountMustMatchShape) {
    EXPECT_THROW(Matrix(2, 2, std::vector<double>(3)), DimensionError);
    EXPECT_THROW((Matrix{{1, 2}, {3}}), DimensionError);
}

TEST(MatrixType, NonFiniteRejected) {
    Matrix m(2, 2, 1.0);
    m(1, 0) = std::nan("");
    EXPECT_THROW(require_finite(m, "test"), NumericalError);
    EXPECT_THROW(singular_values(m), NumericalError);
}

TEST(SingularValues, Diagonal) {
    const Vector s = singular_values(Matrix{{3, 0}, {0, 2}});
    ASSERT_EQ(s.size(), 2u);
    EXPECT_NEAR(s[0], 3.0, 1e-14);
    EXPECT_NEAR(s[1], 2.0, 1e-14);
}

TEST(SingularValues, ZeroMatrix) {
    for (double x : singular_values(Matrix(4, 3))) EXPECT_EQ(x, 0.0);
}

TEST(SingularValues, FrobeniusIdentity) {
    const Matrix m = testutil::random_matrix(6, 4, 4);
    const Vector s = singular_values(m);
    double sum = 0.0;
    for (double x : s) sum += x * x;
    EXPECT_NEAR(sum, frobenius_sq(m), 1e-9);
    for (std::size_t i = 1; i < s.size(); ++i) EXPECT_GE(s[i - 1], s[i]);
}

TEST(SingularValues, WideMatrixUsesTranspose) {
    const Matrix m = testutil::random_matrix(3, 7, 5);
    const Vector a = singular_values(m);
    const Vector b = singular_values(transpose(m));
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
}

TEST(FiniteDiff, Square) {
    const Vector x{2.0};
    auto f = [](std::span<const double> v) { return v[0] * v[0]; };
    EXPECT_NEAR(finite_diff(f, x, 0, 1e-6), 4.0, 1e-6);
}

TEST(FiniteDiff, Constant) {
    const Vector x{1.0, 2.0};
    EXPECT_EQ(finite_diff([](std::span<const double>) { return 7.0; }, x, 1, 1e-6), 0.0);
}

TEST(FiniteDiff, Bilinear) {
    const Vector x{3.0, 5.0};
    auto f = [](std::span<const double> v) { return v[0] * v[1]; };
    EXPECT_NEAR(finite_diff(f, x, 0, 1e-6), 5.0, 1e-6);
}

TEST(FiniteDiff, NonFiniteThrows) {
    const Vector x{0.0};
    auto f = [](std::span<const double> v) { return 1.0 / (v[0] * 0.0); };
    EXPECT_THROW(finite_diff(f, x, 0, 1e-6), NumericalError);
}

TEST(RelativeError, Definition) {
    EXPECT_DOUBLE_EQ(relative_error(0.5, 0.25), 0.25);
    EXPECT_DOUBLE_EQ(relative_error(10.0, 8.0), 0.2);
    EXPECT_DOUBLE_EQ(relative_error(-4.0, 4.0), 2.0);
    EXPECT_GE(relative_error(1e-3, -1e-3), 0.0);
}

TEST(Linalg, ColumnMeanOfEmptyThrows) { EXPECT_THROW(column_mean(Matrix(0, 3)), EmptySetError); }

TEST(Rng, DerivedSeedsAreDistinctAndStable) {
    EXPECT_EQ(derive_seed(1, {2, 3}), derive_seed(1, {2, 3}));
    EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(1, {3, 2}));
    EXPECT_NE(derive_seed(1, {2}), derive_seed(2, {2}));
    Rng a(5), b(5);
    for (int i = 0; i < 10; ++i) EXPECT_EQ(normal(a, 0, 1), normal(b, 0, 1));
}
