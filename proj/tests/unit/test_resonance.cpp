#include <polyharm/resonance.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace polyharm;

namespace {

Vec vec2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

ParameterCascade scaled(int d, double rho, std::vector<double> thresholds, double pool, int l = 1) {
    ScaledOverrides o;
    o.thresholds = std::move(thresholds);
    o.pool_radius = pool;
    return derive_parameters(d, l, cascade_s0(d), rho, CascadeMode::Scaled, o);
}

Vec random_in_shell(std::mt19937_64& rng, int d, double rho) {
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0.55, 1.45);
    Vec x(d);
    for (int i = 0; i < d; ++i) x(i) = g(rng);
    return x.normalized() * (rho * u(rng));
}

// Rank of {b in pool : gap < thr} by floating SVD, independent of the integer routine.
int member_rank(const Vec& x, const std::vector<LatticeVector>& pool, int l, double thr) {
    std::vector<Vec> rows;
    for (const auto& b : pool)
        if (std::abs(std::pow(x.squaredNorm(), l) - std::pow((x + b.gamma).squaredNorm(), l)) < thr) rows.push_back(b.gamma);
    if (rows.empty()) return 0;
    Mat m(static_cast<Eigen::Index>(rows.size()), x.size());
    for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    Eigen::JacobiSVD<Mat> svd(m);
    svd.setThreshold(1e-9);
    return static_cast<int>(svd.rank());
}

}  // namespace

TEST(InV, Examples) {
    const auto a = in_V(vec2(10, 0.05), vec2(0, 1), 1, 2.0, 10.0);
    EXPECT_TRUE(a.member);
    EXPECT_NEAR(a.margin, 1.1 - 2.0, 1e-12);
    const auto b = in_V(vec2(10, 5), vec2(0, 1), 1, 2.0, 10.0);
    EXPECT_FALSE(b.member);
    EXPECT_NEAR(b.margin, 11.0 - 2.0, 1e-12);
    const auto c = in_V(vec2(10, 0.5), vec2(0, -1), 1, 0.3, 10.0);
    EXPECT_TRUE(c.member);
    EXPECT_NEAR(c.margin, -0.3, 1e-12);
    EXPECT_FALSE(in_V(vec2(1, 0.05), vec2(0, 1), 1, 2.0, 10.0).in_shell);
}

TEST(InV, HigherDegreeImpliesDegreeOne) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> u(-3, 3);
    std::normal_distribution<double> offset(0.0, 1.0);
    const double rho = 20.0;
    const double thr = 2.0;
    int hits = 0;
    int misses = 0;
    for (int l : {2, 3}) {
        for (int i = 0; i < 4000; ++i) {
            const Vec b = vec2(u(rng), u(rng));
            if (b.isZero()) continue;
            Vec x = random_in_shell(rng, 2, rho);
            // project onto the bisector plane of -b, then step off it along b
            x -= (x.dot(b) + 0.5 * b.squaredNorm()) / b.squaredNorm() * b;
            x += offset(rng) * std::pow(rho, 1 - 2 * l) * b.normalized();
            const auto high = in_V(x, b, l, thr, rho);
            if (!high.in_shell) continue;
            if (high.member) {
                ++hits;
                EXPECT_TRUE(in_V(x, b, 1, thr, rho).member);
            } else {
                ++misses;
            }
        }
    }
    EXPECT_GT(hits, 100);
    EXPECT_GT(misses, 100);
}

TEST(IntegerRank, Basic) {
    EXPECT_EQ(integer_rank({}), 0);
    EXPECT_EQ(integer_rank({{0, 0}}), 0);
    EXPECT_EQ(integer_rank({{1, 2}, {2, 4}}), 1);
    EXPECT_EQ(integer_rank({{1, 2}, {2, 5}}), 2);
    EXPECT_EQ(integer_rank({{1, 0, 1}, {0, 1, 1}, {1, 1, 2}}), 2);
    EXPECT_EQ(integer_rank({{3, 5, 7}, {2, 11, 13}, {17, 19, 23}}), 3);
}

TEST(Classify, NonResonantFarFromPlanes) {
    const auto c = scaled(2, 50.0, {2.0, 5.0}, 3.0);
    const auto r = classify(vec2(50 * 0.61, 50 * 0.48), Lattice::cubic(2), c);
    EXPECT_EQ(r.level, 0);
    EXPECT_FALSE(r.resonant());
    EXPECT_GT(r.min_margin, 0.0);
}

TEST(Classify, NearOnePlane) {
    const auto c = scaled(2, 50.0, {2.0, 5.0}, 3.0);
    const auto r = classify(vec2(50, 0.01), Lattice::cubic(2), c);
    EXPECT_EQ(r.level, 1);
    ASSERT_EQ(r.directions.size(), 1u);
    EXPECT_EQ(std::abs(r.directions[0].n[1]), 1);
    EXPECT_EQ(r.directions[0].n[0], 0);
    EXPECT_LT(r.margins[0], 0.0);
    EXPECT_FALSE(r.beyond_regime);
}

TEST(Classify, ShellViolation) {
    const auto c = scaled(2, 50.0, {2.0, 5.0}, 3.0);
    try {
        classify(vec2(10, 0), Lattice::cubic(2), c);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ShellViolation);
    }
}

TEST(Classify, PlaneNeverReachesTopLevel) {
    const auto c = scaled(2, 50.0, {2.0, 5.0}, 3.0);
    std::mt19937_64 rng(3);
    const auto pool = direction_pool(Lattice::cubic(2), c);
    for (int i = 0; i < 3000; ++i) EXPECT_LT(classify(random_in_shell(rng, 2, 50.0), pool, c).level, 2);
}

TEST(Classify, PartitionAgreesWithIndependentRank) {
    for (int d : {2, 3}) {
        const auto c = scaled(d, 12.0, {3.0, 9.0, 20.0}, 2.5);
        const auto pool = direction_pool(Lattice::cubic(d), c);
        std::mt19937_64 rng(static_cast<std::uint64_t>(d));
        for (int i = 0; i < 1500; ++i) {
            const Vec x = random_in_shell(rng, d, 12.0);
            const auto r = classify(x, pool, c);
            int expected = 0;
            for (int k = 1; k <= d; ++k) {
                if (member_rank(x, pool, 1, c.threshold(k)) < k) break;
                expected = k;
            }
            EXPECT_EQ(r.level, expected);
            EXPECT_EQ(r.directions.size(), static_cast<std::size_t>(r.level));
            std::vector<IntCoords> ns;
            for (const auto& g : r.directions) ns.push_back(g.n);
            EXPECT_EQ(integer_rank(ns), r.level);
            for (double m : r.margins) EXPECT_LT(m, 0.0);
        }
    }
}

TEST(Classify, NestingAtCommonThreshold) {
    const auto c = scaled(3, 12.0, {15.0, 15.0, 15.0}, 2.5);
    const auto pool = direction_pool(Lattice::cubic(3), c);
    std::mt19937_64 rng(21);
    for (int i = 0; i < 1000; ++i) {
        const Vec x = random_in_shell(rng, 3, 12.0);
        const int level = classify(x, pool, c).level;
        EXPECT_EQ(level, std::min(member_rank(x, pool, 1, 15.0), 3));
    }
}

TEST(ProjectionBound, SinglePlane) {
    const auto c = scaled(2, 10.0, {2.0, 5.0}, 3.0);
    const Lattice z2 = Lattice::cubic(2);
    const double delta = 0.3;
    ASSERT_TRUE(in_V(vec2(10, delta), vec2(0, 1), 1, 2.0, 10.0).member);
    const auto pb = projection_bound(vec2(10, delta), {z2.vector({0, 1})}, c);
    EXPECT_NEAR(std::abs(pb.components(0)), delta, 1e-14);
    EXPECT_LE(std::abs(pb.components(0)), (2.0 + 1.0) / 2.0);
}

TEST(ProjectionBound, OrthogonalAndDiagonal) {
    const auto c = scaled(2, 10.0, {2.0, 5.0}, 3.0);
    const Lattice z2 = Lattice::cubic(2);
    EXPECT_NEAR(projection_bound(vec2(10, 0), {z2.vector({0, 1})}, c).components(0), 0.0, 1e-15);
    // margin zero for b = (1,1): 2 x.b + 2 = 0
    const Vec x = vec2(7.0, -8.0);
    const auto pb = projection_bound(x, {z2.vector({1, 1})}, c);
    EXPECT_NEAR(pb.components(0), x.dot(vec2(1, 1)) / std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(pb.components(0), -std::sqrt(2.0) / 2.0, 1e-14);
}
