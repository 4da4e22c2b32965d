#include "oracles.hpp"

#include <polyharm/lattice.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace polyharm;

namespace {

constexpr double kPi = std::numbers::pi;

Mat hexagonal_basis() {
    Mat b(2, 2);
    b << 2 * kPi, 0.0, kPi, std::sqrt(3.0) * kPi;
    return b;
}

}  // namespace

TEST(DualLattice, SquareIsIdentity) {
    const Mat dual = dual_lattice(2 * kPi * Mat::Identity(2, 2));
    EXPECT_NEAR((dual - Mat::Identity(2, 2)).norm(), 0.0, 1e-14);
}

TEST(DualLattice, Diagonal) {
    Mat b = Mat::Zero(2, 2);
    b(0, 0) = 2 * kPi;
    b(1, 1) = 4 * kPi;
    const Mat dual = dual_lattice(b);
    EXPECT_NEAR(dual(0, 0), 1.0, 1e-14);
    EXPECT_NEAR(dual(1, 1), 0.5, 1e-14);
    EXPECT_NEAR(dual(0, 1), 0.0, 1e-14);
}

TEST(DualLattice, HexagonalMatchesCramer) {
    const Mat b = hexagonal_basis();
    const Mat dual = dual_lattice(b);
    const Eigen::Matrix2d ref = oracle::dual_2x2(b);
    EXPECT_NEAR((dual - Mat(ref)).norm(), 0.0, 1e-13);
    EXPECT_NEAR(dual(0, 0), 1.0, 1e-13);
    EXPECT_NEAR(dual(0, 1), -1.0 / std::sqrt(3.0), 1e-13);
    EXPECT_NEAR(dual(1, 0), 0.0, 1e-13);
    EXPECT_NEAR(dual(1, 1), 2.0 / std::sqrt(3.0), 1e-13);
}

TEST(DualLattice, PairingAndDoubleDual) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int d = 2; d <= 4; ++d) {
        for (int trial = 0; trial < 10; ++trial) {
            Mat b(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) b(i, j) = u(rng) + (i == j ? 4.0 : 0.0);
            const Mat g = dual_lattice(b);
            const Mat pairing = g * b.transpose();
            EXPECT_NEAR((pairing - 2 * kPi * Mat::Identity(d, d)).norm() / (2 * kPi), 0.0, 1e-10);
            const Mat back = dual_lattice(g);
            EXPECT_NEAR((back - b).norm() / b.norm(), 0.0, 1e-12);
        }
    }
}

TEST(DualLattice, SingularBasisRejected) {
    Mat b(2, 2);
    b << 1.0, 2.0, 2.0, 4.0;
    try {
        dual_lattice(b);
        FAIL() << "expected SingularBasis";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::SingularBasis);
    }
}

TEST(Lattice, CellVolumes) {
    const Lattice hex(hexagonal_basis());
    EXPECT_NEAR(hex.cell_volume(), std::abs(hexagonal_basis().determinant()), 1e-12);
    EXPECT_NEAR(hex.cell_volume() * hex.dual_cell_volume(), std::pow(2 * kPi, 2), 1e-9);
    EXPECT_TRUE(Lattice::cubic(2).integral());
    EXPECT_FALSE(hex.integral());
}

TEST(EnumerateBall, SmallRadii) {
    const Lattice z2 = Lattice::cubic(2);
    EXPECT_TRUE(z2.enumerate_ball(0.5, true).empty());
    EXPECT_EQ(z2.enumerate_ball(1.2, true).size(), 4u);
    EXPECT_EQ(z2.enumerate_ball(2.3, true).size(), 20u);
    EXPECT_EQ(z2.enumerate_ball(0.5, false).size(), 1u);
}

TEST(EnumerateBall, MatchesBruteForceAndIsSorted) {
    const Lattice z2 = Lattice::cubic(2);
    for (double r : {1.0, 2.0, 2.3, 3.7, 5.0}) {
        const auto got = z2.enumerate_ball(r, true);
        const auto ref = oracle::brute_ball_zd(2, static_cast<int>(r) + 2, r, true);
        EXPECT_EQ(got.size(), ref.size()) << "r = " << r;
        for (std::size_t i = 1; i < got.size(); ++i) {
            const double a = got[i - 1].gamma.squaredNorm(), b = got[i].gamma.squaredNorm();
            EXPECT_TRUE(a < b || (a == b && got[i - 1].n < got[i].n));
        }
    }
    const Lattice z3 = Lattice::cubic(3);
    EXPECT_EQ(z3.enumerate_ball(2.5, true).size(), oracle::brute_ball_zd(3, 4, 2.5, true).size());
}

TEST(EnumerateBall, StrictBoundary) {
    const Lattice z2 = Lattice::cubic(2);
    for (const auto& g : z2.enumerate_ball(2.0, true)) EXPECT_LT(g.gamma.squaredNorm(), 4.0);
    EXPECT_EQ(z2.enumerate_ball(std::sqrt(2.0), true).size(), 4u);
}

TEST(EnumerateBall, NestedInRadius) {
    const Lattice hex(hexagonal_basis());
    const auto small = hex.enumerate_ball(3.0, true);
    const auto big = hex.enumerate_ball(4.5, true);
    for (const auto& g : small) {
        bool found = false;
        for (const auto& h : big) found = found || h.n == g.n;
        EXPECT_TRUE(found);
    }
}

TEST(EnumerateBall, CountTracksVolume) {
    const Lattice z2 = Lattice::cubic(2);
    for (double r : {20.0, 40.0}) {
        const double expected = kPi * r * r / z2.dual_cell_volume();
        const double got = static_cast<double>(z2.enumerate_ball(r, true).size());
        EXPECT_NEAR(got / expected, 1.0, 0.1);
    }
}

TEST(EnumerateBall, EmbeddingRecomputable) {
    const Lattice hex(hexagonal_basis());
    for (const auto& g : hex.enumerate_ball(3.0, false)) EXPECT_EQ((hex.embed(g.n) - g.gamma).norm(), 0.0);
}

TEST(Reduce, Origin) {
    const auto [g, t] = Lattice::cubic(2).reduce(Vec::Zero(2));
    EXPECT_TRUE(is_zero(g.n));
    EXPECT_EQ(t.t.norm(), 0.0);
}

TEST(Reduce, SquareExample) {
    Vec x(2);
    x << 5.3, -4.2;
    const auto [g, t] = Lattice::cubic(2).reduce(x);
    EXPECT_EQ(g.n, (IntCoords{5, -5}));
    EXPECT_NEAR(t.t(0), 0.3, 1e-12);
    EXPECT_NEAR(t.t(1), 0.8, 1e-12);
    EXPECT_NEAR((g.gamma + t.t - x).norm(), 0.0, 1e-12);
}

TEST(Reduce, HexagonalExactLatticePart) {
    const Lattice hex(hexagonal_basis());
    const Vec g1 = hex.dual_basis().row(0).transpose();
    const Vec g2 = hex.dual_basis().row(1).transpose();
    const auto [g, t] = hex.reduce(g1 + 0.25 * g2);
    EXPECT_EQ(g.n, (IntCoords{1, 0}));
    EXPECT_NEAR((t.t - 0.25 * g2).norm(), 0.0, 1e-12);
}

TEST(Reduce, IdempotentAndInsideCell) {
    const Lattice hex(hexagonal_basis());
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int i = 0; i < 200; ++i) {
        Vec x(2);
        x << u(rng), u(rng);
        const auto [g, t] = hex.reduce(x);
        EXPECT_LE((g.gamma + t.t - x).norm(), 1e-12 * std::max(1.0, x.norm()));
        const Vec c = hex.coordinates(t.t);
        for (int a = 0; a < 2; ++a) {
            EXPECT_GE(c(a), -1e-12);
            EXPECT_LT(c(a), 1.0);
        }
        const auto [g2, t2] = hex.reduce(t.t);
        EXPECT_TRUE(is_zero(g2.n));
        EXPECT_NEAR((t2.t - t.t).norm(), 0.0, 1e-14);
    }
}
