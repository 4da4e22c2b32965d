#include <polyharm/resonant_block.hpp>
#include <polyharm/series.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace polyharm;

namespace {

const Lattice& z2() {
    static const Lattice lattice = Lattice::cubic(2);
    return lattice;
}

Vec vec2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

ResonantIndexSet two_point_set(const Vec& v) {
    const auto [gamma, qm] = z2().reduce(v);
    ResonantIndexSet set;
    set.v = v;
    set.t = qm.t;
    set.center = gamma.n;
    set.offsets = {{0, 0}, {1, 0}};
    return set;
}

}  // namespace

TEST(IndexSet, AxisDirectionExample) {
    const Vec v = vec2(3.3, 20.2);
    const auto [gamma, qm] = z2().reduce(v);
    const auto narrow = build_index_set(z2(), v, qm.t, {z2().vector({0, 1})}, 1.5, 1.2);
    EXPECT_EQ(narrow.inner.size(), 3u);
    EXPECT_EQ(narrow.shift_count, 5u);
    EXPECT_EQ(narrow.size(), 11u);
    std::set<IntCoords> expected{{0, -2}, {0, -1}, {0, 0}, {0, 1}, {0, 2}};
    for (int s : {-1, 1})
        for (int n = -1; n <= 1; ++n) expected.insert({s, n});
    EXPECT_EQ(std::set<IntCoords>(narrow.offsets.begin(), narrow.offsets.end()), expected);
    EXPECT_EQ(narrow.offsets.front(), (IntCoords{0, 0}));

    // with |a| < 1.5 the diagonal shifts (+-1,+-1) enter as well
    const auto wide = build_index_set(z2(), v, qm.t, {z2().vector({0, 1})}, 1.5, 1.5);
    EXPECT_EQ(wide.shift_count, 9u);
    EXPECT_EQ(wide.size(), 15u);
    EXPECT_LE(wide.size(), wide.inner.size() * wide.shift_count);
}

TEST(IndexSet, SmallBlockRadiusIsShiftBall) {
    const Vec v = vec2(3.3, 20.2);
    const auto [gamma, qm] = z2().reduce(v);
    const auto s = build_index_set(z2(), v, qm.t, {z2().vector({0, 1})}, 0.9, 2.1);
    EXPECT_EQ(s.inner.size(), 1u);
    EXPECT_EQ(s.size(), z2().enumerate_ball(2.1, false).size());
    const auto idx = s.indices();
    EXPECT_TRUE(std::find(idx.begin(), idx.end(), gamma.n) != idx.end());
}

TEST(IndexSet, DistinctAndSorted) {
    const Lattice z3 = Lattice::cubic(3);
    Vec v(3);
    v << 4.1, -7.3, 12.6;
    const auto [gamma, qm] = z3.reduce(v);
    const auto s = build_index_set(z3, v, qm.t, {z3.vector({1, 0, 0}), z3.vector({0, 1, 1})}, 2.5, 1.8);
    std::set<IntCoords> unique(s.offsets.begin(), s.offsets.end());
    EXPECT_EQ(unique.size(), s.size());
    for (std::size_t i = 1; i < s.size(); ++i) {
        const double a = z3.norm2(s.offsets[i - 1]);
        const double b = z3.norm2(s.offsets[i]);
        EXPECT_TRUE(a < b || (a == b && s.offsets[i - 1] < s.offsets[i]));
    }
}

TEST(IndexSet, Errors) {
    const Vec v = vec2(3.3, 20.2);
    const auto [gamma, qm] = z2().reduce(v);
    try {
        build_index_set(z2(), v, qm.t, {}, 1.5, 1.5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyDirections);
    }
    EXPECT_THROW(build_index_set(z2(), v, qm.t, {z2().vector({0, 1}), z2().vector({0, 2})}, 1.5, 1.5), Error);
    ScaledOverrides o;
    o.thresholds = {2.0, 5.0};
    const auto c = derive_parameters(2, 1, 45.0, 20.0, CascadeMode::Scaled, o);
    EXPECT_THROW(build_index_set(z2(), v, qm.t, {z2().vector({0, 1}), z2().vector({1, 0})}, c), Error);
}

TEST(Block, SymmetricCrossing) {
    const auto q = cosine_potential(z2(), {{1, 0}}, 1.0);
    const auto block = assemble_block(two_point_set(vec2(-0.5, std::sqrt(99.75))), z2(), 1, q);
    ASSERT_EQ(block.eigenvalues.size(), 2);
    EXPECT_NEAR(block.eigenvalues(0), 99.0, 1e-12);
    EXPECT_NEAR(block.eigenvalues(1), 101.0, 1e-12);
    EXPECT_EQ((block.matrix - block.matrix.adjoint()).norm(), 0.0);
}

TEST(Block, DetunedPair) {
    const auto q = cosine_potential(z2(), {{1, 0}}, 1.0);
    const auto block = assemble_block(two_point_set(vec2(1.5, std::sqrt(97.75))), z2(), 1, q);
    EXPECT_NEAR(block.eigenvalues(0), 102.0 - std::sqrt(5.0), 1e-12);
    EXPECT_NEAR(block.eigenvalues(1), 102.0 + std::sqrt(5.0), 1e-12);
    EXPECT_NEAR(block.eigenvalues(0), 99.7639, 1e-4);
    EXPECT_NEAR(block.eigenvalues(1), 104.2361, 1e-4);
}

TEST(Block, FreeIsSortedDiagonal) {
    const Vec v = vec2(3.3, 20.2);
    const auto [gamma, qm] = z2().reduce(v);
    const auto set = build_index_set(z2(), v, qm.t, {z2().vector({0, 1})}, 2.5, 1.5);
    const auto block = assemble_block(set, z2(), 2, FourierPotential(z2(), {}));
    std::vector<double> diag;
    for (const auto& h : set.indices()) diag.push_back(std::pow((z2().embed(h) + qm.t).squaredNorm(), 2));
    std::sort(diag.begin(), diag.end());
    for (std::size_t i = 0; i < diag.size(); ++i)
        EXPECT_NEAR(block.eigenvalues(static_cast<Eigen::Index>(i)), diag[i], 1e-9 * diag[i]);
    EXPECT_TRUE(gershgorin_check(block).ok);
}

TEST(Block, GershgorinRandom) {
    const auto q = random_potential(31, z2(), 2.2, 1.0, 2.0);
    const Vec v = vec2(0.5, 14.3);
    const auto [gamma, qm] = z2().reduce(v);
    const auto set = build_index_set(z2(), v, qm.t, {z2().vector({1, 0})}, 3.0, 2.0);
    const auto g = gershgorin_check(assemble_block(set, z2(), 1, q));
    EXPECT_TRUE(g.ok);
    EXPECT_GT(g.radius, 0.0);
}

TEST(ResonantMatch, FreeCase) {
    const Vec v = vec2(0.5, 10.3);
    const auto [gamma, qm] = z2().reduce(v);
    const auto set = build_index_set(z2(), v, qm.t, {z2().vector({1, 0})}, 1.5, 1.2);
    const auto block = assemble_block(set, z2(), 1, FourierPotential(z2(), {}));
    const auto spec = bloch_solve(1, FourierPotential(z2(), {}), z2(), qm.t, v, 4.0);
    const auto N = select_resonant_eigenpair(spec, set, 1.0);
    const auto m = match_resonant(spec, block, N);
    EXPECT_NEAR(m.deviation, 0.0, 1e-10);
}

TEST(ResonantMatch, BlockBeatsFreeGuessOnPlane) {
    const auto q = cosine_potential(z2(), {{1, 0}, {0, 1}}, 0.2);
    for (double rho : {10.0, 20.0}) {
        const Vec v = vec2(0.5, rho + 0.3);
        EXPECT_THROW(known_part_sequence(v, 1, q, 1), Error);
        const auto [gamma, qm] = z2().reduce(v);
        const auto set = build_index_set(z2(), v, qm.t, {z2().vector({1, 0})}, 1.5, 1.2);
        const auto block = assemble_block(set, z2(), 1, q);
        const auto spec = bloch_solve(1, q, z2(), qm.t, v, 6.0);
        const auto N = select_resonant_eigenpair(spec, set, 1.0);
        const auto m = match_resonant(spec, block, N);
        const double naive = std::abs(spec.shifted(static_cast<Eigen::Index>(N)));
        EXPECT_LT(std::abs(m.deviation), 0.05 * naive) << rho;
        EXPECT_LE(std::abs(m.deviation), q.l1_norm());
    }
}

TEST(ResonantMatch, LargerOracleWindowDoesNotHurt) {
    const auto q = cosine_potential(z2(), {{1, 0}, {0, 1}}, 0.2);
    const Vec v = vec2(0.5, 12.3);
    const auto [gamma, qm] = z2().reduce(v);
    const auto set = build_index_set(z2(), v, qm.t, {z2().vector({1, 0})}, 1.5, 1.2);
    const auto block = assemble_block(set, z2(), 1, q);
    double prev = std::numeric_limits<double>::infinity();
    for (double R : {4.0, 6.0, 8.0}) {
        const auto spec = bloch_solve(1, q, z2(), qm.t, v, R, {false});
        const double dev = std::abs(match_resonant(spec, block, select_resonant_eigenpair(spec, set, 1.0)).deviation);
        EXPECT_LE(dev, prev * (1.0 + 1e-6) + 1e-12);
        prev = dev;
    }
}

TEST(Separation, ReportsDiagnostics) {
    ScaledOverrides o;
    o.thresholds = {2.0, 6.0};
    const auto c = derive_parameters(2, 1, 45.0, 20.0, CascadeMode::Scaled, o);
    const auto q = cosine_potential(z2(), {{1, 0}, {0, 1}}, 0.2);
    const Vec v = vec2(0.5, 20.3);
    const auto [gamma, qm] = z2().reduce(v);
    const auto set = build_index_set(z2(), v, qm.t, {z2().vector({1, 0})}, 1.5, 1.2);
    const auto d = separation_diagnostics(set, z2(), q, c);
    EXPECT_GT(d.checked, 0u);
    EXPECT_GT(d.min_ratio, 0.0);
    EXPECT_LE(d.violations, d.checked);
}
