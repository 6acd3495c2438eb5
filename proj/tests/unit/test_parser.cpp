// SPDX-License-Identifier: MIT
#include "gudr/builtin_models.hpp"
#include "gudr/errors.hpp"
#include "gudr/model_graph.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using gudr::Op;
using gudr::parse_model;

namespace {

double eval(const std::string& text, std::vector<double> x) { return parse_model(text).evaluate(x); }

}  // namespace

TEST(Parser, CosPlusExpOfNegHasSixNodes) {
    const auto g = parse_model("cos(x1) + exp(-x2)");
    ASSERT_EQ(g.size(), 6u);
    const Op want[] = {Op::Input, Op::Cos, Op::Input, Op::Neg, Op::Exp, Op::Add};
    for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(g.node(i).op, want[i]) << i;
    EXPECT_EQ(g.node(0).input, 0u);
    EXPECT_EQ(g.node(2).input, 1u);
    EXPECT_EQ(g.output(), 5u);
}

TEST(Parser, DependencySetsOfCosPlusExp) {
    const auto g = parse_model("cos(x1) + exp(-x2)");
    const auto& deps = g.dep_sets();
    EXPECT_EQ(deps[1], (gudr::DepSet{0}));
    EXPECT_EQ(deps[3], (gudr::DepSet{1}));
    EXPECT_EQ(deps[4], (gudr::DepSet{1}));
    EXPECT_EQ(deps[5], (gudr::DepSet{0, 1}));
    EXPECT_EQ(gudr::dependency_sets(g), deps);
}

TEST(Parser, ConstantGraphHasEmptyDependencySets) {
    const auto g = parse_model("2*pi + exp(1)", 0);
    for (const auto& d : g.dep_sets()) EXPECT_TRUE(d.empty());
    EXPECT_NEAR(g.evaluate({}), 2 * std::numbers::pi + std::numbers::e, 1e-15);
}

TEST(Parser, BuiltinModelsMatchTheirExpressions) {
    const auto y1 = gudr::builtin_model("y1");
    EXPECT_EQ(y1.graph.to_string(), parse_model("1/(1 + x1^4 + 2*x2^2 + x2^4)").to_string());
    EXPECT_NEAR(y1.graph.evaluate(std::vector<double>{2, 2}), 1.0 / 41.0, 1e-16);

    const auto y2 = gudr::builtin_model("y2");
    EXPECT_EQ(y2.graph.to_string(), parse_model("exp(1 + 0.5*x1^2 + 0.5*x2^2 + 0.5*x3^2)").to_string());
    EXPECT_NEAR(y2.graph.evaluate(std::vector<double>{3, 3, 3}) / std::exp(14.5), 1.0, 1e-15);
    EXPECT_NEAR(y2.graph.evaluate(std::vector<double>{3, 3, 3}), 1.9827593e6, 1.0);

    const auto y3 = gudr::builtin_model("y3", 1);
    EXPECT_NEAR(y3.graph.evaluate(std::vector<double>{3}), 244.6919, 1e-4);
    EXPECT_EQ(gudr::builtin_model("y3", 5).graph.dep_sets()[gudr::builtin_model("y3", 5).graph.output()],
              (gudr::DepSet{0, 1, 2, 3, 4}));
}

TEST(Parser, BuiltinInputSpaces) {
    const auto y1 = gudr::builtin_model("y1", std::nullopt, 0.3);
    EXPECT_EQ(y1.inputs.dims(), gudr::InputSpace::iid(gudr::Distribution::normal(2, 0.3), 2).dims());
    const auto y3 = gudr::builtin_model("y3", 4);
    EXPECT_EQ(y3.inputs.dims(), gudr::InputSpace::iid(gudr::Distribution::normal(3, 1), 4).dims());
    EXPECT_THROW(gudr::builtin_model("y9"), gudr::UnknownModel);
    EXPECT_THROW(gudr::builtin_model("y3"), gudr::DimensionError);
}

TEST(Parser, Precedence) {
    EXPECT_DOUBLE_EQ(eval("1 + 2*3", {}), 7.0);
    EXPECT_DOUBLE_EQ(eval("2*3^2", {}), 18.0);
    EXPECT_DOUBLE_EQ(eval("2^3^2", {}), 512.0);
    EXPECT_DOUBLE_EQ(eval("8/4/2", {}), 1.0);
    EXPECT_DOUBLE_EQ(eval("8-4-2", {}), 2.0);
    EXPECT_DOUBLE_EQ(eval("(1 + 2)*3", {}), 9.0);
    // Unary minus binds tighter than ^.
    EXPECT_DOUBLE_EQ(eval("-x1^2", {3.0}), 9.0);
    EXPECT_DOUBLE_EQ(eval("-(x1^2)", {3.0}), -9.0);
    EXPECT_DOUBLE_EQ(eval("2^-1", {}), 0.5);
    EXPECT_DOUBLE_EQ(eval("x1 - -x1", {1.5}), 3.0);
    EXPECT_DOUBLE_EQ(eval("1.5e2 + .5", {}), 150.5);
}

TEST(Parser, PowersAndFunctions) {
    EXPECT_NEAR(eval("x1^0.5", {4.0}), 2.0, 1e-15);
    EXPECT_NEAR(eval("x1^x2", {2.0, 3.0}), 8.0, 1e-14);
    EXPECT_NEAR(eval("sqrt(x1) + log(e) + sin(pi/2) + cos(0)", {9.0}), 6.0, 1e-15);
    EXPECT_DOUBLE_EQ(eval("x1^-2", {2.0}), 0.25);
    EXPECT_EQ(parse_model("x1^3").node(1).op, Op::PowInt);
    EXPECT_EQ(parse_model("x1^2.5").node(1).op, Op::PowReal);
}

TEST(Parser, CommonSubexpressionsAreShared) {
    const auto g = parse_model("sin(x1)*sin(x1) + sin(x1)");
    std::size_t sines = 0;
    for (const auto& n : g.nodes()) sines += n.op == Op::Sin;
    EXPECT_EQ(sines, 1u);
}

TEST(Parser, Errors) {
    EXPECT_THROW(parse_model("foo(x1)"), gudr::UnknownIdentifier);
    EXPECT_THROW(parse_model("x0"), gudr::UnknownIdentifier);
    EXPECT_THROW(parse_model("y + 1"), gudr::UnknownIdentifier);
    EXPECT_THROW(parse_model("1 +"), gudr::SyntaxError);
    EXPECT_THROW(parse_model("(x1"), gudr::SyntaxError);
    EXPECT_THROW(parse_model("x1 x2"), gudr::SyntaxError);
    EXPECT_THROW(parse_model("2 $ 3"), gudr::SyntaxError);
    EXPECT_THROW(parse_model("exp(x1, x2)"), gudr::ArityError);
    EXPECT_THROW(parse_model("exp()"), gudr::ArityError);
    EXPECT_THROW(parse_model("x1 + x3"), gudr::DimensionError);
    EXPECT_THROW(parse_model("x1 + x3", 2), gudr::DimensionError);
    EXPECT_NO_THROW(parse_model("x1 + x3", 3));
    try {
        parse_model("1 + * 2");
        FAIL();
    } catch (const gudr::SyntaxError& e) {
        EXPECT_EQ(e.position(), 4u);
    }
}

TEST(Evaluate, DomainErrors) {
    EXPECT_THROW(eval("x1/x2", {1.0, 0.0}), gudr::EvaluationError);
    EXPECT_THROW(eval("log(x1)", {0.0}), gudr::EvaluationError);
    EXPECT_THROW(eval("sqrt(x1)", {-1.0}), gudr::EvaluationError);
    EXPECT_THROW(eval("x1^0.5", {-1.0}), gudr::EvaluationError);
    EXPECT_THROW(eval("exp(x1)", {1000.0}), gudr::EvaluationError);
    EXPECT_THROW(parse_model("x1 + x2").evaluate(std::vector<double>{1.0}), gudr::InvalidArgument);
}

TEST(ParserProperty, PrintedGraphReparsesToEquivalentGraph) {
    std::mt19937 gen(99);
    std::uniform_real_distribution<double> coord(-1.5, 1.5);
    for (unsigned trial = 0; trial < 200; ++trial) {
        const std::size_t d = 1 + trial % 4;
        gudr::test_support::ExpressionGenerator make(d, trial);
        const auto g = parse_model(make.make(6));
        const auto again = parse_model(g.to_string(), d);
        for (int p = 0; p < 5; ++p) {
            std::vector<double> x(d);
            for (double& v : x) v = coord(gen);
            EXPECT_LE(gudr::test_support::rel_diff(g.evaluate(x), again.evaluate(x)), 1e-14) << g.to_string();
        }
    }
}

TEST(ParserProperty, PerturbingInputsOutsideDepSetKeepsNodeValue) {
    std::mt19937 gen(5);
    std::uniform_real_distribution<double> coord(-1.5, 1.5);
    for (unsigned trial = 0; trial < 100; ++trial) {
        const std::size_t d = 2 + trial % 3;
        gudr::test_support::ExpressionGenerator make(d, 1000 + trial);
        const auto g = parse_model(make.make(6));
        std::vector<double> x(d);
        for (double& v : x) v = coord(gen);
        std::vector<double> base(g.size()), moved(g.size());
        g.evaluate_all(x, base);
        for (std::size_t axis = 0; axis < d; ++axis) {
            auto y = x;
            y[axis] = coord(gen);
            g.evaluate_all(y, moved);
            for (std::size_t n = 0; n < g.size(); ++n) {
                const auto& deps = g.dep_sets()[n];
                if (std::find(deps.begin(), deps.end(), axis) == deps.end()) {
                    EXPECT_EQ(base[n], moved[n]);
                }
            }
        }
    }
}
