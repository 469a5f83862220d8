#include "swdrem/linalg.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <random>

using namespace swdrem;

namespace {

DenseMatrix randomMatrix(std::mt19937_64& rng, std::size_t side, double scale = 1.0)
{
    std::uniform_real_distribution<double> dist(-scale, scale);
    DenseMatrix m(side, side);
    for (double& v : m.values())
        v = dist(rng);
    return m;
}

Eigen::MatrixXd toEigen(const DenseMatrix& m)
{
    Eigen::MatrixXd e(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c)
            e(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m(r, c);
    return e;
}

// Sum over permutations of sign(p) * prod m(i, p(i)).
double leibniz(const DenseMatrix& m)
{
    std::vector<std::size_t> p(m.rows());
    std::iota(p.begin(), p.end(), 0);
    double total = 0.0;
    do {
        int inversions = 0;
        for (std::size_t i = 0; i < p.size(); ++i)
            for (std::size_t j = i + 1; j < p.size(); ++j)
                inversions += p[i] > p[j] ? 1 : 0;
        double term = inversions % 2 == 0 ? 1.0 : -1.0;
        for (std::size_t i = 0; i < p.size(); ++i)
            term *= m(i, p[i]);
        total += term;
    } while (std::next_permutation(p.begin(), p.end()));
    return total;
}

double maxRealEigenvalue(const DenseMatrix& m)
{
    Eigen::EigenSolver<Eigen::MatrixXd> solver(toEigen(m), false);
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& ev : solver.eigenvalues())
        best = std::max(best, ev.real());
    return best;
}

DenseMatrix gainMatrix(double a, double b, double c)
{
    return DenseMatrix{{a}, {b}, {c}};
}

const DenseMatrix kChuaA{{-10, 10, 0}, {1, -1, 1}, {0, -16, -0.0385}};
const DenseMatrix kChuaC{{1, 0, 0}};

} // namespace

TEST_CASE("determinant matches the permutation expansion on random 5x5 matrices")
{
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        const DenseMatrix m = randomMatrix(rng, 5, 3.0);
        const double expected = leibniz(m);
        CHECK(determinant(m) == doctest::Approx(expected).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("determinant of small known matrices")
{
    CHECK(determinant(DenseMatrix{{4.0}}) == 4.0);
    CHECK(determinant(DenseMatrix{{1, 2}, {3, 4}}) == doctest::Approx(-2.0));
    CHECK(determinant(DenseMatrix::identity(8)) == doctest::Approx(1.0));
    CHECK(determinant(DenseMatrix{{1, 2, 3}, {2, 4, 6}, {0, 1, 1}}) == doctest::Approx(0.0));
}

TEST_CASE("adjugate times matrix is the determinant times identity")
{
    std::mt19937_64 rng(7);
    for (std::size_t side = 1; side <= 6; ++side) {
        for (int trial = 0; trial < 20; ++trial) {
            const DenseMatrix m = randomMatrix(rng, side, 2.0);
            const DenseMatrix adj = adjugate(m);
            const double det = determinant(m);
            const DenseMatrix left = adj * m;
            const DenseMatrix right = m * adj;
            for (std::size_t r = 0; r < side; ++r) {
                for (std::size_t c = 0; c < side; ++c) {
                    const double target = r == c ? det : 0.0;
                    CHECK(std::abs(left(r, c) - target) <= 1e-10 * std::max(1.0, std::abs(det)) * 10);
                    CHECK(std::abs(right(r, c) - target) <= 1e-10 * std::max(1.0, std::abs(det)) * 10);
                }
            }
        }
    }
}

TEST_CASE("adjugate agrees with det * inverse from Eigen and commutes with transpose")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const DenseMatrix m = randomMatrix(rng, 5);
        const Eigen::MatrixXd e = toEigen(m);
        const Eigen::MatrixXd expected = e.determinant() * e.inverse();
        const DenseMatrix adj = adjugate(m);
        const DenseMatrix adjT = adjugate(m.transposed());
        for (std::size_t r = 0; r < 5; ++r) {
            for (std::size_t c = 0; c < 5; ++c) {
                CHECK(adj(r, c) == doctest::Approx(expected(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)))
                                       .epsilon(1e-8)
                                       .scale(1.0));
                CHECK(adjT(c, r) == doctest::Approx(adj(r, c)).epsilon(1e-12).scale(1.0));
            }
        }
    }
}

TEST_CASE("adjugate of a singular matrix is still defined")
{
    const DenseMatrix m{{1, 2}, {2, 4}};
    const DenseMatrix adj = adjugate(m);
    CHECK(adj == DenseMatrix{{4, -2}, {-2, 1}});
    const DenseMatrix zero = adj * m;
    CHECK(maxAbs(zero) == 0.0);
}

TEST_CASE("kernels reject non-square and oversized inputs")
{
    CHECK_THROWS_AS((void)determinant(DenseMatrix(2, 3)), DimensionError);
    CHECK_THROWS_AS((void)adjugate(DenseMatrix(3, 2)), DimensionError);
    CHECK_THROWS_AS((void)determinant(DenseMatrix::identity(kMaxKernelSide + 1)), DimensionError);
    CHECK_THROWS_AS((void)(DenseMatrix(2, 3) * DenseMatrix(2, 3)), DimensionError);
    CHECK_THROWS_AS((void)(DenseMatrix(2, 3) * DenseVector(2)), DimensionError);
    CHECK_THROWS_AS((void)dot(DenseVector(2), DenseVector(3)), DimensionError);
    CHECK_THROWS_AS((void)(DenseMatrix(2, 2) + DenseMatrix(2, 3)), DimensionError);
}

TEST_CASE("characteristic polynomial evaluates to det(lambda I - M)")
{
    std::mt19937_64 rng(3);
    for (std::size_t side = 1; side <= 6; ++side) {
        const DenseMatrix m = randomMatrix(rng, side);
        const auto coeffs = characteristicPolynomial(m);
        REQUIRE(coeffs.size() == side + 1);
        CHECK(coeffs[0] == 1.0);
        for (double lambda : {-1.7, 0.0, 0.4, 2.3}) {
            double value = 0.0;
            for (double c : coeffs)
                value = value * lambda + c;
            const Eigen::MatrixXd shifted =
                lambda * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(side), static_cast<Eigen::Index>(side))
                - toEigen(m);
            CHECK(value == doctest::Approx(shifted.determinant()).epsilon(1e-10).scale(1.0));
        }
    }
}

TEST_CASE("Routh table on known polynomials")
{
    const double stable[] = {1, 2, 3, 1};
    CHECK(routhHurwitz(stable).hurwitz);
    const double unstable[] = {1, 1, 1, 5};
    CHECK_FALSE(routhHurwitz(unstable).hurwitz);
    const double negativeCoeff[] = {1, -1, 2};
    CHECK_FALSE(routhHurwitz(negativeCoeff).hurwitz);
    const double first[] = {1, 0.5};
    CHECK(routhHurwitz(first).hurwitz);
}

TEST_CASE("imaginary-axis eigenvalues are indeterminate and not Hurwitz")
{
    const auto result = isHurwitz(DenseMatrix{{0, 1}, {-1, 0}});
    CHECK_FALSE(result.hurwitz);
    CHECK(result.indeterminate);
    CHECK_FALSE(static_cast<bool>(result));
}

TEST_CASE("documented Chua gains give Hurwitz A - K C")
{
    const DenseMatrix gains[] = {gainMatrix(0, -1, -15), gainMatrix(-2, 2.5, 20), gainMatrix(-2, 0.1, 1),
                                 gainMatrix(-0.4, -0.4, -8), gainMatrix(-8, 6.5, 18)};
    for (const auto& k : gains) {
        const DenseMatrix closed = kChuaA - k * kChuaC;
        CHECK(maxRealEigenvalue(closed) < 0.0);
        CHECK(isHurwitz(closed).hurwitz);
    }
    CHECK(isHurwitz(kChuaA).hurwitz == (maxRealEigenvalue(kChuaA) < 0.0));
    const DenseMatrix destabilised = kChuaA - gainMatrix(-20, 0, 0) * kChuaC;
    CHECK(maxRealEigenvalue(destabilised) > 0.0);
    CHECK_FALSE(isHurwitz(destabilised).hurwitz);
}

TEST_CASE("Hurwitz test agrees with eigenvalues on random 3x3 matrices")
{
    std::mt19937_64 rng(99);
    int agreed = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const DenseMatrix m = randomMatrix(rng, 3, 2.0) - 0.5 * DenseMatrix::identity(3);
        const double re = maxRealEigenvalue(m);
        if (std::abs(re) < 1e-9)
            continue;
        CHECK(isHurwitz(m).hurwitz == (re < 0.0));
        ++agreed;
    }
    CHECK(agreed > 90);
}

TEST_CASE("norms")
{
    CHECK(norm2(DenseVector{3, 4}) == doctest::Approx(5.0));
    const DenseMatrix m{{1, -2}, {3, 4}};
    CHECK(normInf(m) == 7.0);
    CHECK(maxAbs(m) == 4.0);
    CHECK(m.transposed() == DenseMatrix{{1, 3}, {-2, 4}});
    CHECK(m.transposed().transposed() == m);
}

TEST_CASE("finiteness guards")
{
    DenseVector v{1.0, std::nan("")};
    CHECK_FALSE(v.allFinite());
    CHECK_THROWS_AS(requireFinite(v, "v"), NonFiniteError);
    DenseMatrix m{{1.0, std::numeric_limits<double>::infinity()}};
    CHECK_THROWS_AS(requireFinite(m, "m"), NonFiniteError);
    CHECK_NOTHROW(requireFinite(DenseMatrix::identity(2), "I"));
}
