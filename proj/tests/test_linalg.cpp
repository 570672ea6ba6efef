#include <wcdr/linalg.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>
#include <vector>

using namespace wcdr;

TEST(ConvolutionMatrix, IdentityFilter)
{
    const std::vector<double> f{1.0};
    EXPECT_TRUE(convolution_matrix(f, 3).isApprox(Matrix::Identity(3, 3)));
}

TEST(ConvolutionMatrix, TwoTapFilter)
{
    const std::vector<double> f{1.0, 1.0};
    Matrix expected(3, 2);
    expected << 1, 0, 1, 1, 0, 1;
    EXPECT_EQ(convolution_matrix(f, 2), expected);
}

TEST(ConvolutionMatrix, ExperimentShapeIsTall)
{
    const std::vector<double> f(31, 0.5);
    const auto m = convolution_matrix(f, 90);
    EXPECT_EQ(m.rows(), 120);
    EXPECT_EQ(m.cols(), 90);
}

TEST(ConvolutionMatrix, MatchesDirectConvolution)
{
    std::mt19937_64 rng(7);
    const std::vector<double> f{0.3, -1.0, 2.0, 0.25};
    const Vector x = oracle::random_vector(rng, 6);
    const Vector y = convolution_matrix(f, 6) * x;
    for (int i = 0; i < 9; ++i) {
        double acc = 0.0;
        for (int k = 0; k < 4; ++k)
            if (i - k >= 0 && i - k < 6) acc += f[k] * x[i - k];
        EXPECT_NEAR(y[i], acc, 1e-14);
    }
}

TEST(ConvolutionMatrix, ColumnsAreShiftedCopies)
{
    const std::vector<double> f{1.0, -0.5, 0.25, 2.0};
    const auto m = convolution_matrix(f, 7);
    for (Eigen::Index j = 1; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            EXPECT_EQ(m(i, j), i - j >= 0 ? m(i - j, 0) : 0.0);
}

TEST(ConvolutionMatrix, RejectsBadFilters)
{
    const std::vector<double> empty;
    const std::vector<double> zeros{0.0, 0.0};
    try {
        convolution_matrix(empty, 3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::invalid_filter);
    }
    try {
        convolution_matrix(zeros, 3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::invalid_filter);
    }
}

TEST(LinearMap, ApplyAndAdjoint)
{
    Matrix h(3, 2);
    h << 1, 1, 1, 1, 0, 1;
    const LinearMap map(h);
    EXPECT_EQ(apply(map, Vector::Constant(2, 1.0)), Vector::Constant(3, 2.0).eval() - Vector::Unit(3, 2));
    Vector x(2);
    x << 1, 2;
    Vector expected(3);
    expected << 3, 3, 2;
    EXPECT_EQ(apply(map, x), expected);
    Vector e0 = Vector::Unit(3, 0);
    Vector adj(2);
    adj << 1, 1;
    EXPECT_EQ(adjoint_apply(map, e0), adj);

    const auto id = LinearMap::identity(4);
    const Vector v = Vector::LinSpaced(4, -1, 2);
    EXPECT_EQ(apply(id, v), v);
}

TEST(LinearMap, DimensionMismatch)
{
    const LinearMap map(Matrix::Ones(3, 2));
    EXPECT_THROW(map.apply(Vector::Zero(3)), Error);
    EXPECT_THROW(map.adjoint_apply(Vector::Zero(2)), Error);
}

TEST(LinearMap, AdjointConsistencyProperty)
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const LinearMap map(oracle::random_matrix(rng, 8, 5));
        const Vector x = oracle::random_vector(rng, 5);
        const Vector v = oracle::random_vector(rng, 8);
        const double lhs = map.apply(x).dot(v);
        const double rhs = x.dot(map.adjoint_apply(v));
        EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(lhs)));
    }
}

TEST(GramExtremes, DiagonalCases)
{
    auto e = gram_extreme_eigenvalues(LinearMap::identity(3));
    EXPECT_DOUBLE_EQ(e.s, 1.0);
    EXPECT_DOUBLE_EQ(e.sigma, 1.0);

    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 1;
    d(1, 1) = 2;
    e = gram_extreme_eigenvalues(LinearMap(d));
    EXPECT_NEAR(e.s, 1.0, 1e-14);
    EXPECT_NEAR(e.sigma, 4.0, 1e-14);
}

TEST(GramExtremes, MatchCharacteristicPolynomialRoots)
{
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix h = oracle::random_matrix(rng, 6, 4);
        const Matrix gram = h.transpose() * h;
        const auto coeffs = oracle::characteristic_polynomial(gram);
        const auto roots = oracle::real_roots(coeffs, 0.0, gram.trace() * 1.01);
        ASSERT_EQ(roots.size(), 4u);
        const auto e = gram_extreme_eigenvalues(LinearMap(h));
        const double lo = *std::min_element(roots.begin(), roots.end());
        const double hi = *std::max_element(roots.begin(), roots.end());
        EXPECT_NEAR(e.s, lo, 1e-10 * lo);
        EXPECT_NEAR(e.sigma, hi, 1e-10 * hi);
    }
}

TEST(GramExtremes, RayleighQuotientSandwich)
{
    std::mt19937_64 rng(5);
    const std::vector<double> f{1.0, 0.6, 0.36, 0.2};
    const LinearMap map(convolution_matrix(f, 20));
    const auto e = gram_extreme_eigenvalues(map);
    for (int i = 0; i < 500; ++i) {
        Vector w = oracle::random_vector(rng, 20);
        w.normalize();
        const double q = map.apply(w).squaredNorm();
        EXPECT_GE(q, e.s - 1e-8);
        EXPECT_LE(q, e.sigma + 1e-8);
    }
}

TEST(GramExtremes, RankDeficientRejected)
{
    Matrix h(3, 2);
    h << 1, 2, 2, 4, 3, 6;
    try {
        gram_extreme_eigenvalues(LinearMap(h));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::not_strongly_convex);
    }
}

TEST(SolveSpd, SimpleCases)
{
    const Vector b = Vector::LinSpaced(3, 1, 3);
    EXPECT_TRUE(solve_spd(Matrix::Identity(3, 3), b).isApprox(b));
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = 2;
    a(1, 1) = 4;
    Vector rhs(2);
    rhs << 2, 8;
    const Vector z = solve_spd(a, rhs);
    EXPECT_NEAR(z[0], 1.0, 1e-15);
    EXPECT_NEAR(z[1], 2.0, 1e-15);
}

TEST(SolveSpd, ResidualOnRandomSpd)
{
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix m = oracle::random_matrix(rng, 5, 5);
        const Matrix a = m * m.transpose() + 0.1 * Matrix::Identity(5, 5);
        const Vector b = oracle::random_vector(rng, 5);
        const Vector z = solve_spd(a, b);
        EXPECT_LE((a * z - b).norm(), 1e-10 * (1 + b.norm()));
    }
}

TEST(SolveSpd, RejectsIndefinite)
{
    Matrix a(2, 2);
    a << 1, 2, 2, 1;
    try {
        solve_spd(a, Vector::Ones(2));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::factorization_failed);
    }
    Matrix nonsym(2, 2);
    nonsym << 2, 1, 0, 2;
    EXPECT_THROW(solve_spd(nonsym, Vector::Ones(2)), Error);
}
