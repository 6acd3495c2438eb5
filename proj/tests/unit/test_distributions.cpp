// SPDX-License-Identifier: MIT
#include "gudr/distributions.hpp"
#include "gudr/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using gudr::Distribution;
using gudr::InputSpace;

TEST(Distributions, CentralMomentClosedForms) {
    EXPECT_DOUBLE_EQ(Distribution::normal(0, 1).central_moment(4), 3.0);
    EXPECT_DOUBLE_EQ(Distribution::uniform(0, 1).central_moment(2), 1.0 / 12.0);
    EXPECT_DOUBLE_EQ(Distribution::normal(2, 0.5).central_moment(2), 0.25);
    const double a = -1.5, b = 2.5;
    EXPECT_NEAR(Distribution::uniform(a, b).central_moment(4), std::pow(b - a, 4) / 80.0, 1e-14);
    EXPECT_EQ(Distribution::normal(0, 1).central_moment(0), 1.0);
}

TEST(Distributions, OddCentralMomentsAreExactlyZero) {
    for (int n : {1, 3, 5, 7}) {
        EXPECT_EQ(Distribution::normal(1.3, 0.7).central_moment(n), 0.0);
        EXPECT_EQ(Distribution::uniform(-2, 5).central_moment(n), 0.0);
    }
}

TEST(Distributions, InvalidParametersThrow) {
    EXPECT_THROW(Distribution::normal(0, 0), gudr::InvalidArgument);
    EXPECT_THROW(Distribution::normal(0, -1), gudr::InvalidArgument);
    EXPECT_THROW(Distribution::uniform(1, 1), gudr::InvalidArgument);
    EXPECT_THROW(Distribution::uniform(2, 1), gudr::InvalidArgument);
    EXPECT_THROW(Distribution::normal(0, 1).central_moment(-1), gudr::InvalidArgument);
}

TEST(Distributions, SampleMeanOfStandardNormal) {
    gudr::Rng rng(7);
    const auto xs = Distribution::normal(0, 1).sample(rng, 100000);
    double s = 0.0;
    for (double x : xs) s += x;
    EXPECT_NEAR(s / xs.size(), 0.0, 0.02);
}

TEST(Distributions, UniformDrawsStayInSupport) {
    gudr::Rng rng(11);
    for (double x : Distribution::uniform(3, 5).sample(rng, 10000)) {
        EXPECT_GE(x, 3.0);
        EXPECT_LE(x, 5.0);
    }
}

TEST(Distributions, SamplingIsDeterministicPerSeed) {
    for (const auto& d : {Distribution::normal(1, 2), Distribution::uniform(-1, 4)}) {
        gudr::Rng a(7), b(7);
        EXPECT_EQ(d.sample(a, 100), d.sample(b, 100));
    }
}

TEST(Distributions, MakeRuleClosedForms) {
    auto r = Distribution::normal(2, 0.5).make_rule(1);
    EXPECT_NEAR(r.nodes[0], 2.0, 1e-14);
    EXPECT_NEAR(r.weights[0], 1.0, 1e-14);

    r = Distribution::normal(0, 1).make_rule(2);
    EXPECT_NEAR(r.nodes[0], -1.0, 1e-14);
    EXPECT_NEAR(r.nodes[1], 1.0, 1e-14);
    EXPECT_NEAR(r.weights[0], 0.5, 1e-14);

    r = Distribution::uniform(-1, 1).make_rule(2);
    EXPECT_NEAR(r.nodes[0], -1.0 / std::sqrt(3.0), 1e-14);
    EXPECT_NEAR(r.nodes[1], 1.0 / std::sqrt(3.0), 1e-14);
    EXPECT_NEAR(r.weights[1], 0.5, 1e-14);
}

TEST(Distributions, RulesMatchMeanAndCentralMoments) {
    std::mt19937 gen(2024);
    std::uniform_real_distribution<double> loc(-5, 5), scale(0.1, 3);
    for (int trial = 0; trial < 50; ++trial) {
        const double m = loc(gen), s = scale(gen);
        const Distribution dists[] = {Distribution::normal(m, s), Distribution::uniform(m, m + s)};
        for (const auto& d : dists) {
            for (std::size_t k = 1; k <= 12; ++k) {
                const auto r = d.make_rule(k);
                double sw = 0.0, su = 0.0;
                for (std::size_t i = 0; i < k; ++i) {
                    sw += r.weights[i];
                    su += r.weights[i] * r.nodes[i];
                }
                EXPECT_NEAR(sw, 1.0, 1e-13);
                EXPECT_NEAR(su, d.mean(), 1e-12 * std::max(1.0, std::abs(d.mean())));
            }
            const int n = 2 * std::uniform_int_distribution<int>(1, 4)(gen);
            const auto r = d.make_rule(static_cast<std::size_t>(n / 2 + 1));
            double cm = 0.0;
            for (std::size_t i = 0; i < r.size(); ++i) cm += r.weights[i] * std::pow(r.nodes[i] - d.mean(), n);
            const double want = d.central_moment(n);
            EXPECT_LE(std::abs(cm - want) / want, 1e-10) << d.to_string() << " n=" << n;
        }
    }
}

TEST(Distributions, LiteralRoundTrip) {
    const auto n = Distribution::parse(" N( 2 , 0.2 ) ");
    EXPECT_EQ(n, Distribution::normal(2, 0.2));
    EXPECT_EQ(Distribution::parse(n.to_string()), n);
    const auto u = Distribution::parse("U(-1,3.5)");
    EXPECT_EQ(u, Distribution::uniform(-1, 3.5));
    EXPECT_EQ(Distribution::parse(u.to_string()), u);
    EXPECT_EQ(Distribution::normal(0.1, 1.0 / 3.0), Distribution::parse(Distribution::normal(0.1, 1.0 / 3.0).to_string()));
    for (const char* bad : {"", "N(1)", "N(1,2,3)", "X(0,1)", "N(0,-1)", "U(2,1)", "N(a,1)", "N(0,1)x"}) {
        EXPECT_THROW(Distribution::parse(bad), gudr::InvalidArgument) << bad;
    }
}

TEST(InputSpace, ParseAndAccessors) {
    const auto s = InputSpace::parse("N(0,1), U(-1,1),N(3,0.5)");
    ASSERT_EQ(s.dim(), 3u);
    EXPECT_EQ(s.mean_vector(), (std::vector<double>{0.0, 0.0, 3.0}));
    EXPECT_EQ(InputSpace::parse(s.to_string()).dims(), s.dims());
    EXPECT_EQ(s.rules(4).size(), 3u);
    EXPECT_EQ(InputSpace::iid(Distribution::normal(2, 1), 4).dim(), 4u);
    EXPECT_THROW(InputSpace::parse(""), gudr::InvalidArgument);
    EXPECT_THROW(InputSpace(std::vector<Distribution>{}), gudr::InvalidArgument);
}
