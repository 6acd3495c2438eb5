// SPDX-License-Identifier: MIT
#include "gudr/builtin_models.hpp"
#include "gudr/errors.hpp"
#include "gudr/estimators.hpp"
#include "gudr/grid_eval.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace gudr;
using test_support::rel_diff;

namespace {

InputSpace std_normals(std::size_t d, double sigma = 1.0) { return InputSpace::iid(Distribution::normal(0, sigma), d); }

}  // namespace

TEST(Udr, AdditiveModelMeanIsExact) {
    const auto r = udr_moments(parse_model("x1^2 + x2^2"), std_normals(2), 3);
    EXPECT_NEAR(r.mean, 2.0, 1e-12);
    EXPECT_NEAR(r.std, 2.0, 1e-12);  // Var = 2 Var(Z^2) = 4
    EXPECT_EQ(r.method, Method::Udr);
    EXPECT_EQ(r.settings.k, 3u);
}

TEST(Gudr, BilinearMomentsAreExact) {
    const auto r = gudr_moments(parse_model("x1*x2"), std_normals(2), 3);
    EXPECT_NEAR(r.mean, 0.0, 1e-12);
    EXPECT_NEAR(r.std, 1.0, 1e-12);
}

TEST(Gudr, SurrogateMomentsMatchFullGridInsideExactnessClass) {
    const auto g = parse_model("x1*x2^2 + sin(x1) + (x2 - 1)*exp(0.3*x1)");
    const InputSpace inputs = InputSpace::iid(Distribution::normal(1, 0.5), 2);
    for (std::size_t k : {3u, 5u, 9u}) {
        const auto a = gudr_moments(g, inputs, k, 4);
        const auto b = full_grid_reference(g, inputs, k, 4);
        EXPECT_LE(rel_diff(a.mean, b.mean), 1e-12);
        for (int p = 2; p <= 4; ++p) EXPECT_LE(rel_diff(a.central_moments.at(p), b.central_moments.at(p)), 1e-10) << p;
    }
}

TEST(MeanEquality, UdrAndGudrAgreeOnBuiltinModels) {
    for (std::size_t k : {3u, 5u, 9u, 19u}) {
        for (double sigma : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6}) {
            const auto y1 = builtin_model("y1", std::nullopt, sigma);
            EXPECT_LE(rel_diff(udr_moments(y1.graph, y1.inputs, k).mean, gudr_moments(y1.graph, y1.inputs, k).mean),
                      1e-10);
            if (sigma > 0.5) continue;
            const auto y2 = builtin_model("y2", std::nullopt, sigma);
            EXPECT_LE(rel_diff(udr_moments(y2.graph, y2.inputs, k).mean, gudr_moments(y2.graph, y2.inputs, k).mean),
                      1e-10);
        }
        const auto y3 = builtin_model("y3", 5);
        EXPECT_LE(rel_diff(udr_moments(y3.graph, y3.inputs, k).mean, gudr_moments(y3.graph, y3.inputs, k).mean),
                  1e-10);
    }
}

TEST(MeanError, ProductOfSquaresShowsLeadingTerm) {
    const auto g = parse_model("x1^2*x2^2");
    for (double sigma : {0.5, 1.0}) {
        for (std::size_t k : {3u, 5u, 8u}) {
            const auto inputs = std_normals(2, sigma);
            const auto udr = udr_moments(g, inputs, k);
            const auto gudr = gudr_moments(g, inputs, k);
            const auto truth = full_grid_reference(g, inputs, k);
            EXPECT_NEAR(udr.mean, 0.0, 1e-15);
            EXPECT_NEAR(gudr.mean, 0.0, 1e-15);
            EXPECT_NEAR(udr.std, 0.0, 1e-15);
            EXPECT_NEAR(gudr.std, 0.0, 1e-15);
            const double s4 = std::pow(sigma, 4);
            EXPECT_NEAR(truth.mean, s4, 1e-12);
            EXPECT_NEAR(truth.mean - udr.mean, s4, 1e-10);
            EXPECT_NEAR(truth.mean - gudr.mean, s4, 1e-10);
        }
    }
}

TEST(Taylor, LinearModelIsExact) {
    const auto g = parse_model("3 + 2*x1 - 0.5*x2 + 4*x3");
    const auto inputs = InputSpace::parse("N(1,0.3),U(-1,3),N(-2,2)");
    for (Method m : {Method::Sosm, Method::Tosm}) {
        const auto r = taylor_moments(g, inputs, m == Method::Sosm ? 2 : 3);
        EXPECT_EQ(r.method, m);
        EXPECT_NEAR(r.mean, 3 + 2 * 1 - 0.5 * 1 + 4 * -2, 1e-12);
        EXPECT_NEAR(r.central_moments.at(2), 4 * 0.09 + 0.25 * 16.0 / 12.0 + 16 * 4, 1e-12);
    }
}

TEST(Taylor, QuadraticMoments) {
    const auto r = taylor_moments(parse_model("x1^2"), std_normals(1), 2);
    EXPECT_NEAR(r.mean, 1.0, 1e-12);
    EXPECT_NEAR(r.central_moments.at(2), 2.0, 1e-12);
    EXPECT_EQ(r.cost.function_evals, 1u);
    EXPECT_EQ(r.cost.gradient_evals, 1u);
    EXPECT_EQ(r.cost.hessian_evals, 1u);
    EXPECT_EQ(r.cost.third_order_evals, 0u);
}

TEST(Taylor, CubicSurrogateReproducesCubicPolynomial) {
    const auto g = parse_model("x1^3 + 2*x1*x2*x3 - x2^2*x3 + 0.5*x3^3 + x1 - 4");
    const std::vector<double> mu{0.4, -1.1, 0.7};
    CostLedger ledger;
    const auto poly = taylor_surrogate(g, mu, 3, {}, ledger);
    EXPECT_EQ(ledger.third_order_evals, 1u);
    std::mt19937 gen(1);
    std::uniform_real_distribution<double> coord(-3, 3);
    for (int p = 0; p < 20; ++p) {
        std::vector<double> x{coord(gen), coord(gen), coord(gen)};
        EXPECT_NEAR(poly.evaluate(x), g.evaluate(x), 1e-11 * std::max(1.0, std::abs(g.evaluate(x))));
    }
    const auto inputs = InputSpace::parse("N(0.4,0.5),N(-1.1,0.2),U(0,1.4)");
    const auto t = taylor_moments(g, inputs, 3, 3);
    const auto f = full_grid_reference(g, inputs, 8, 3);
    EXPECT_LE(rel_diff(t.mean, f.mean), 1e-12);
    EXPECT_LE(rel_diff(t.central_moments.at(2), f.central_moments.at(2)), 1e-12);
    EXPECT_LE(rel_diff(t.central_moments.at(3), f.central_moments.at(3)), 1e-11);
}

TEST(Taylor, FiniteDifferenceCoefficientsAgree) {
    const auto y1 = builtin_model("y1", std::nullopt, 0.3);
    EstimatorOptions fd;
    fd.hessian = DerivativeMethod::FiniteDifference;
    fd.third_order = DerivativeMethod::FiniteDifference;
    const auto a = taylor_moments(y1.graph, y1.inputs, 3);
    const auto b = taylor_moments(y1.graph, y1.inputs, 3, 2, fd);
    EXPECT_LE(rel_diff(a.std, b.std), 1e-5);
    EXPECT_THROW(taylor_moments(y1.graph, y1.inputs, 4), InvalidArgument);
}

TEST(MonteCarlo, StandardNormalMean) {
    const auto r = monte_carlo_moments(parse_model("x1"), std_normals(1), 100000, 2024);
    EXPECT_LT(std::abs(r.mean), 0.02);
    ASSERT_TRUE(r.standard_error.has_value());
    EXPECT_NEAR(*r.standard_error, r.std / std::sqrt(100000.0), 1e-15);
    EXPECT_EQ(r.cost.function_evals, 100000u);
}

TEST(MonteCarlo, SeededRunsAreBitIdentical) {
    const auto y2 = builtin_model("y2");
    const auto a = monte_carlo_moments(y2.graph, y2.inputs, 5000, 99, 4);
    const auto b = monte_carlo_moments(y2.graph, y2.inputs, 5000, 99, 4);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.central_moments, b.central_moments);
    EXPECT_EQ(*a.standard_error, *b.standard_error);
    EXPECT_NE(a.mean, monte_carlo_moments(y2.graph, y2.inputs, 5000, 100).mean);
}

TEST(MonteCarlo, AgreesWithFullGridWithinFourStandardErrors) {
    const auto y2 = builtin_model("y2", std::nullopt, 0.2);
    const auto mc = monte_carlo_moments(y2.graph, y2.inputs, 100000, 7);
    const auto ref = full_grid_reference(y2.graph, y2.inputs, 25);
    EXPECT_LE(std::abs(mc.mean - ref.mean), 4 * *mc.standard_error);
}

TEST(MonteCarlo, ErrorDecaysLikeInverseSquareRoot) {
    const auto y2 = builtin_model("y2", std::nullopt, 0.2);
    const double truth = full_grid_reference(y2.graph, y2.inputs, 25).mean;
    std::vector<double> logn, logerr;
    for (std::size_t n : {100u, 1000u, 10000u, 100000u}) {
        double sq = 0.0;
        const int seeds = 16;
        for (int s = 0; s < seeds; ++s) {
            const double e = (monte_carlo_moments(y2.graph, y2.inputs, n, 1000 + s).mean - truth) / truth;
            sq += e * e;
        }
        logn.push_back(std::log(static_cast<double>(n)));
        logerr.push_back(0.5 * std::log(sq / seeds));
    }
    const double mx = (logn[0] + logn[1] + logn[2] + logn[3]) / 4, my = (logerr[0] + logerr[1] + logerr[2] + logerr[3]) / 4;
    double sxy = 0.0, sxx = 0.0;
    for (int i = 0; i < 4; ++i) {
        sxy += (logn[i] - mx) * (logerr[i] - my);
        sxx += (logn[i] - mx) * (logn[i] - mx);
    }
    EXPECT_NEAR(sxy / sxx, -0.5, 0.2);
}

TEST(FullGrid, ExamplesAndBudget) {
    auto r = full_grid_reference(parse_model("x1 + x2"), std_normals(2), 2, 4);
    EXPECT_NEAR(r.mean, 0.0, 1e-12);
    EXPECT_NEAR(r.central_moments.at(2), 2.0, 1e-12);
    EXPECT_EQ(r.cost.function_evals, 4u);

    const auto g = parse_model("cos(x1) + exp(-x2)");
    r = full_grid_reference(g, std_normals(2), 7);
    std::vector<std::uint64_t> counts;
    for (std::size_t n = 0; n < g.size(); ++n)
        if (g.node(n).op != Op::Input) counts.push_back(r.node_evals[n]);
    EXPECT_EQ(counts, (std::vector<std::uint64_t>{7, 7, 7, 49}));

    EstimatorOptions tight;
    tight.max_grid_points = 100;
    EXPECT_THROW(full_grid_reference(g, std_normals(2), 11, 2, tight), MemoryBudgetExceeded);
}

TEST(FullGrid, ReferenceIsStableInK) {
    const auto y1 = builtin_model("y1", std::nullopt, 0.4);
    const auto a = full_grid_reference(y1.graph, y1.inputs, 40);
    const auto b = full_grid_reference(y1.graph, y1.inputs, 50);
    EXPECT_LE(rel_diff(a.mean, b.mean), 1e-8);
    EXPECT_LE(rel_diff(a.std, b.std), 1e-8);
}

TEST(Accuracy, GudrBeatsUdrOnY1) {
    const auto y1 = builtin_model("y1", std::nullopt, 0.4);
    const double ref = full_grid_reference(y1.graph, y1.inputs, 40).std;
    const double udr = std::abs(udr_moments(y1.graph, y1.inputs, 19).std - ref) / ref;
    const double gudr = std::abs(gudr_moments(y1.graph, y1.inputs, 19).std - ref) / ref;
    EXPECT_LT(gudr, udr);
}

TEST(Ledger, EvaluationCounts) {
    for (std::size_t d = 1; d <= 10; ++d) {
        const auto y3 = builtin_model("y3", d);
        for (std::size_t k : {3u, 5u, 19u}) {
            if (std::pow(static_cast<double>(k), static_cast<double>(d)) > 2e6) continue;
            const auto u = udr_moments(y3.graph, y3.inputs, k);
            EXPECT_EQ(u.cost.function_evals, k * d + 1);
            EXPECT_EQ(u.cost.gradient_evals, 0u);
            const auto g = gudr_moments(y3.graph, y3.inputs, k);
            EXPECT_EQ(g.cost.function_evals, k * d + 1);
            EXPECT_EQ(g.cost.gradient_evals, k * d + 1);
            EXPECT_EQ(g.cost.hessian_evals, 1u);
            EXPECT_LE(g.cost.paper_equivalent_evals(), 4.0 * k * d + 3.0 * d + 4.0);
        }
    }
    const auto y3 = builtin_model("y3", 4);
    EXPECT_EQ(udr_moments(y3.graph, y3.inputs, 5).cost.function_evals, 21u);
    EXPECT_EQ(gudr_moments(y3.graph, y3.inputs, 5).cost.paper_equivalent_evals(), 96.0);
}

TEST(Estimators, HigherMomentsAndArgumentChecks) {
    const auto r = gudr_moments(parse_model("x1 + 2*x2"), std_normals(2, 0.5), 4, 4);
    EXPECT_NEAR(r.central_moments.at(2), 1.25, 1e-12);
    EXPECT_NEAR(r.central_moments.at(3), 0.0, 1e-12);
    EXPECT_NEAR(r.central_moments.at(4), 3 * 1.25 * 1.25, 1e-12);
    EXPECT_THROW(udr_moments(parse_model("x1 + x2"), std_normals(3), 3), InvalidArgument);
    EXPECT_THROW(udr_moments(parse_model("x1"), std_normals(1), 0), InvalidArgument);
    EXPECT_THROW(gudr_moments(parse_model("x1"), std_normals(1), 3, 1), InvalidArgument);
    EXPECT_THROW(monte_carlo_moments(parse_model("x1"), std_normals(1), 1, 0), InvalidArgument);
}

TEST(Estimators, StreamingCombinationGivesSameMoments) {
    const auto y2 = builtin_model("y2", std::nullopt, 0.3);
    EstimatorOptions small;
    small.max_buffer_values = 50;
    const auto a = gudr_moments(y2.graph, y2.inputs, 9, 4);
    const auto b = gudr_moments(y2.graph, y2.inputs, 9, 4, small);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.central_moments, b.central_moments);
}

TEST(MethodNames, RoundTrip) {
    for (Method m : {Method::Udr, Method::Gudr, Method::Sosm, Method::Tosm, Method::MonteCarlo, Method::FullGrid}) {
        EXPECT_EQ(parse_method(method_name(m)), m);
    }
    EXPECT_THROW(parse_method("pce"), InvalidArgument);
}

TEST(RiskReport, Examples) {
    const auto x = parse_model("x1");
    EXPECT_NEAR(risk_report(x, std_normals(1), 10, 0.0, 0.9).exceedance_probability, 0.5, 1e-12);
    EXPECT_EQ(risk_report(x, std_normals(1), 10, -100.0, 0.9).exceedance_probability, 1.0);

    const auto y1 = builtin_model("y1", std::nullopt, 0.2);
    Rng rng(31);
    const auto a = y1.inputs[0].sample(rng, 100000);
    const auto b = y1.inputs[1].sample(rng, 100000);
    std::vector<double> ys(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) ys[i] = y1.graph.evaluate(std::vector<double>{a[i], b[i]});
    std::nth_element(ys.begin(), ys.begin() + 90000, ys.end());
    const double q90 = ys[90000];
    const auto risk = risk_report(y1.graph, y1.inputs, 19, q90, 0.9);
    EXPECT_NEAR(risk.exceedance_probability, 0.1, 0.03);
    EXPECT_GT(risk.cvar_upper, q90);
}
