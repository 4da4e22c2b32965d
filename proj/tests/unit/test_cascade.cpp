#include <polyharm/cascade.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace polyharm;

TEST(Cascade, PlaneExponents) {
    const auto c = derive_parameters(2, 1, 45.0, 10.0);
    EXPECT_EQ(c.m, 13);
    EXPECT_DOUBLE_EQ(c.alpha, 1.0 / 13.0);
    EXPECT_DOUBLE_EQ(c.alpha_k[1], 3.0 / 13.0);
    EXPECT_DOUBLE_EQ(c.alpha_k[2], 9.0 / 13.0);
    EXPECT_EQ(c.k1, 10);
    EXPECT_DOUBLE_EQ(c.p, 43.0);
    EXPECT_EQ(c.p1, 15);
    EXPECT_TRUE(c.all_checks_pass());
}

TEST(Cascade, SpaceExponents) {
    EXPECT_EQ(cascade_m(3), 32);
    EXPECT_EQ(cascade_k1(3), 34);
    const auto c = derive_parameters(3, 1, cascade_s0(3), 10.0);
    EXPECT_DOUBLE_EQ(c.alpha, 1.0 / 32.0);
    EXPECT_TRUE(c.all_checks_pass());
}

TEST(Cascade, SmoothnessThreshold) {
    EXPECT_DOUBLE_EQ(cascade_s0(2), 45.0);
    EXPECT_DOUBLE_EQ(cascade_s0(3), 157.25);
    for (int d = 2; d <= 5; ++d) {
        const auto checks = cascade_checks(d, cascade_s0(d));
        EXPECT_TRUE(std::all_of(checks.begin(), checks.end(), [](const CascadeCheck& c) { return c.ok; })) << d;
    }
}

TEST(Cascade, FailureNamesInequality) {
    try {
        derive_parameters(2, 1, 30.0, 10.0);
        FAIL() << "expected CascadeInequalityViolated";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::CascadeInequalityViolated);
        EXPECT_NE(std::string(e.what()).find("I3"), std::string::npos);
    }
    const auto c = derive_parameters(2, 1, 30.0, 10.0, CascadeMode::Scaled);
    EXPECT_FALSE(c.all_checks_pass());
}

TEST(Cascade, RejectsBadInputs) {
    EXPECT_THROW(derive_parameters(1, 1, 45.0, 10.0), Error);
    EXPECT_THROW(derive_parameters(2, 0, 45.0, 10.0), Error);
    EXPECT_THROW(derive_parameters(2, 1, 45.0, 1.0), Error);
}

TEST(Cascade, DerivedRadii) {
    const auto c = derive_parameters(2, 1, 45.0, 20.0);
    EXPECT_DOUBLE_EQ(c.epsilon1(), std::pow(20.0, -2.0 - 2.0 / 13.0));
    EXPECT_DOUBLE_EQ(c.threshold(1), std::pow(20.0, 3.0 / 13.0));
    EXPECT_DOUBLE_EQ(c.pool_radius(), 43.0 * std::pow(20.0, 1.0 / 13.0));
    EXPECT_DOUBLE_EQ(c.shift_radius(), 15.0 * std::pow(20.0, 1.0 / 13.0));
    EXPECT_DOUBLE_EQ(c.block_radius(1), 0.5 * std::pow(20.0, 4.5 / 13.0));
    EXPECT_EQ(c.known_part_index(), 6);
    EXPECT_TRUE(std::isinf(c.series_pool_radius()));
}

TEST(Cascade, ScaledOverrides) {
    ScaledOverrides o;
    o.thresholds = {2.0, 5.0};
    o.pool_radius = 3.0;
    o.epsilon1 = 1e-4;
    o.known_part_order = 3;
    const auto c = derive_parameters(2, 1, 45.0, 20.0, CascadeMode::Scaled, o);
    EXPECT_EQ(c.threshold(1), 2.0);
    EXPECT_EQ(c.threshold(2), 5.0);
    EXPECT_EQ(c.pool_radius(), 3.0);
    EXPECT_EQ(c.epsilon1(), 1e-4);
    EXPECT_EQ(c.known_part_index(), 2);

    ScaledOverrides e;
    e.alpha = 0.2;
    const auto ce = derive_parameters(2, 1, 45.0, 20.0, CascadeMode::Scaled, e);
    EXPECT_DOUBLE_EQ(ce.effective_alpha_k(1), 0.6);
    EXPECT_DOUBLE_EQ(ce.threshold(1), std::pow(20.0, 0.6));
}

TEST(Cascade, ConstantsDefaultToOne) {
    const auto c = derive_parameters(2, 1, 45.0, 20.0, CascadeMode::Theory, {}, {{"threshold", 0.5}});
    EXPECT_EQ(c.constant("pool"), 1.0);
    EXPECT_DOUBLE_EQ(c.threshold(1), 0.5 * std::pow(20.0, 3.0 / 13.0));
}
