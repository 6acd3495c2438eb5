// SPDX-License-Identifier: MIT
#include "gudr/estimators.hpp"

#include "gudr/errors.hpp"
#include "gudr/grid_eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace gudr {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_common(const ModelGraph& graph, const InputSpace& inputs, int max_order) {
    if (graph.input_count() != inputs.dim()) {
        throw InvalidArgument("model has " + std::to_string(graph.input_count()) + " inputs but " +
                              std::to_string(inputs.dim()) + " distributions were given");
    }
    if (max_order < 2) throw InvalidArgument("max_order must be >= 2");
}

void check_k(std::size_t k) {
    if (k == 0) throw InvalidArgument("k must be >= 1");
}

GridMode pick_mode(const TensorGrid& grid, const EstimatorOptions& options) {
    return grid.total_points() <= options.max_buffer_values ? GridMode::Materialized : GridMode::Streaming;
}

// Copies grid moments into the report, clamping a roundoff-negative variance.
void fill_central(MomentReport& r, const GridMoments& m, int max_order) {
    for (int p = 2; p <= max_order; ++p) r.central_moments[p] = m.central[static_cast<std::size_t>(p)];
    if (r.central_moments[2] < 0.0) {
        r.central_moments[2] = 0.0;
        r.variance_clamped = true;
    }
    r.std = std::sqrt(r.central_moments[2]);
}

}  // namespace

std::string method_name(Method m) {
    switch (m) {
        case Method::Udr: return "udr";
        case Method::Gudr: return "gudr";
        case Method::Sosm: return "sosm";
        case Method::Tosm: return "tosm";
        case Method::MonteCarlo: return "mc";
        case Method::FullGrid: return "fullgrid";
    }
    return "?";
}

Method parse_method(std::string_view name) {
    for (Method m : {Method::Udr, Method::Gudr, Method::Sosm, Method::Tosm, Method::MonteCarlo, Method::FullGrid})
        if (method_name(m) == name) return m;
    throw InvalidArgument("unknown method '" + std::string(name) + "' (expected udr|gudr|sosm|tosm|mc|fullgrid)");
}

MomentReport udr_moments(const ModelGraph& graph, const InputSpace& inputs, std::size_t k, int max_order,
                         const EstimatorOptions& options) {
    check_common(graph, inputs, max_order);
    check_k(k);
    const auto start = Clock::now();
    MomentReport r;
    r.method = Method::Udr;
    r.settings.k = k;
    r.settings.max_order = max_order;
    r.cost.dim = inputs.dim();

    const std::vector<QuadratureRule1D> rules = inputs.rules(k);
    const std::vector<double> mu = inputs.mean_vector();
    const auto eval_start = Clock::now();
    const GudrComponents c = univariate_values(graph, mu, rules, r.cost);
    r.cost.eval_wall_time = seconds_since(eval_start);

    double mean = 0.0;
    for (std::size_t i = 0; i < rules.size(); ++i) {
        double axis_mean = 0.0;
        for (std::size_t q = 0; q < rules[i].size(); ++q) axis_mean += rules[i].weights[q] * c.univariate_values[i][q];
        mean += axis_mean;
    }
    r.mean = mean - static_cast<double>(inputs.dim() - 1) * c.mu_value;

    const TensorGrid grid(rules);
    const GridValues values = combine_udr(c, grid, pick_mode(grid, options), options.max_buffer_values);
    fill_central(r, weighted_moments(values, grid, max_order), max_order);
    r.cost.wall_time = seconds_since(start);
    return r;
}

MomentReport gudr_moments(const ModelGraph& graph, const InputSpace& inputs, std::size_t k, int max_order,
                          const EstimatorOptions& options) {
    check_common(graph, inputs, max_order);
    check_k(k);
    const auto start = Clock::now();
    MomentReport r;
    r.method = Method::Gudr;
    r.settings.k = k;
    r.settings.max_order = max_order;
    r.cost.dim = inputs.dim();

    const std::vector<QuadratureRule1D> rules = inputs.rules(k);
    const std::vector<double> mu = inputs.mean_vector();
    const auto eval_start = Clock::now();
    const GudrComponents c = univariate_curves(graph, mu, rules, r.cost, options.hessian);
    r.cost.eval_wall_time = seconds_since(eval_start);

    const TensorGrid grid(rules);
    const GridValues values = combine_gudr(c, grid, pick_mode(grid, options), options.max_buffer_values);
    const GridMoments m = weighted_moments(values, grid, max_order);
    r.mean = m.mean;
    fill_central(r, m, max_order);
    r.cost.wall_time = seconds_since(start);
    return r;
}

ModelGraph taylor_surrogate(const ModelGraph& graph, std::span<const double> mu, int order,
                            const EstimatorOptions& options, CostLedger& ledger) {
    if (order != 2 && order != 3) throw InvalidArgument("Taylor order must be 2 or 3");
    const std::size_t d = graph.input_count();

    std::vector<double> grad(d);
    GradientWorkspace ws;
    const double f0 = value_and_gradient(graph, mu, grad, ws);
    ledger.function_evals += 1;
    ledger.gradient_evals += 1;
    ledger.ad_sweeps += 2;

    const std::vector<double> diag = hessian_diagonal(graph, mu);
    const UpperTriangle off = hessian_offdiag(graph, mu, options.hessian);
    ledger.hessian_evals += 1;
    ledger.ad_sweeps += d + (options.hessian == DerivativeMethod::Exact ? 2 * (d > 0 ? d - 1 : 0) : 4 * d);

    ThirdOrderTable third;
    if (order == 3) {
        third = third_order_derivatives(graph, mu, options.third_order);
        ledger.third_order_evals += 1;
        ledger.ad_sweeps += options.third_order == DerivativeMethod::Exact ? third.size() : 2 * d * (2 * d + 1);
    }

    GraphBuilder b;
    std::vector<std::size_t> delta(d);
    for (std::size_t i = 0; i < d; ++i) delta[i] = b.binary(Op::Sub, b.input(i), b.constant(mu[i]));

    std::size_t sum = b.constant(f0);
    auto add_term = [&](double coef, std::initializer_list<std::size_t> axes) {
        if (coef == 0.0) return;
        std::size_t term = b.constant(coef);
        for (std::size_t a : axes) term = b.binary(Op::Mul, term, delta[a]);
        sum = b.binary(Op::Add, sum, term);
    };
    for (std::size_t i = 0; i < d; ++i) add_term(grad[i], {i});
    for (std::size_t i = 0; i < d; ++i) add_term(0.5 * diag[i], {i, i});
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) add_term(off.at(i, j), {i, j});
    for (const auto& [idx, value] : third) {
        const auto [i, j, l] = idx;
        // Ordered permutations of (i, j, l) divided by 3!.
        const double weight = (i == j && j == l) ? 1.0 / 6.0 : (i == j || j == l) ? 0.5 : 1.0;
        add_term(weight * value, {i, j, l});
    }
    return std::move(b).finish(sum, d);
}

MomentReport taylor_moments(const ModelGraph& graph, const InputSpace& inputs, int order, int max_order,
                            const EstimatorOptions& options) {
    check_common(graph, inputs, max_order);
    const auto start = Clock::now();
    MomentReport r;
    r.method = order == 2 ? Method::Sosm : Method::Tosm;
    r.settings.max_order = max_order;
    r.settings.taylor_order = order;
    r.cost.dim = inputs.dim();

    const std::vector<double> mu = inputs.mean_vector();
    const auto eval_start = Clock::now();
    const ModelGraph poly = taylor_surrogate(graph, mu, order, options, r.cost);
    r.cost.eval_wall_time = seconds_since(eval_start);

    // Gauss rules with k points integrate T^p exactly once order * p <= 2k - 1.
    const std::size_t k = std::max<std::size_t>(4, static_cast<std::size_t>(order * max_order + 2) / 2);
    r.settings.k = k;
    const TensorGrid grid(inputs.rules(k));
    if (grid.total_points() > options.max_grid_points) {
        throw MemoryBudgetExceeded(grid.total_points(), options.max_grid_points);
    }
    GridEvalOptions ge;
    ge.max_buffer_values = options.max_buffer_values;
    ge.allow_streaming = true;
    const GridEvaluation eval = evaluate_graph_on_grid(poly, grid, ge);
    const GridMoments m = weighted_moments(eval.values, grid, max_order);
    r.mean = m.mean;
    fill_central(r, m, max_order);
    r.cost.wall_time = seconds_since(start);
    return r;
}

MomentReport monte_carlo_moments(const ModelGraph& graph, const InputSpace& inputs, std::size_t n,
                                 std::uint64_t seed, int max_order) {
    check_common(graph, inputs, max_order);
    if (n < 2) throw InvalidArgument("Monte Carlo needs n >= 2");
    const auto start = Clock::now();
    MomentReport r;
    r.method = Method::MonteCarlo;
    r.settings.n = n;
    r.settings.seed = seed;
    r.settings.max_order = max_order;
    r.cost.dim = inputs.dim();

    const std::size_t d = inputs.dim();
    Rng rng(seed);
    std::vector<std::vector<double>> draws;
    draws.reserve(d);
    for (std::size_t i = 0; i < d; ++i) draws.push_back(inputs[i].sample(rng, n));

    const auto eval_start = Clock::now();
    std::vector<double> outputs(n);
    std::vector<double> point(d), work(graph.size());
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t i = 0; i < d; ++i) point[i] = draws[i][s];
        graph.evaluate_all(point, work);
        outputs[s] = work[graph.output()];
    }
    r.cost.function_evals = n;
    r.cost.eval_wall_time = seconds_since(eval_start);

    double sum = 0.0;
    for (double v : outputs) sum += v;
    r.mean = sum / static_cast<double>(n);
    std::vector<double> sums(static_cast<std::size_t>(max_order) + 1, 0.0);
    for (double v : outputs) {
        const double dev = v - r.mean;
        double power = dev * dev;
        for (int p = 2; p <= max_order; ++p) {
            sums[static_cast<std::size_t>(p)] += power;
            power *= dev;
        }
    }
    const double nn = static_cast<double>(n);
    r.central_moments[2] = sums[2] / (nn - 1.0);
    for (int p = 3; p <= max_order; ++p) r.central_moments[p] = sums[static_cast<std::size_t>(p)] / nn;
    r.std = std::sqrt(r.central_moments[2]);
    r.standard_error = r.std / std::sqrt(nn);
    r.cost.wall_time = seconds_since(start);
    return r;
}

MomentReport full_grid_reference(const ModelGraph& graph, const InputSpace& inputs, std::size_t k, int max_order,
                                 const EstimatorOptions& options) {
    check_common(graph, inputs, max_order);
    check_k(k);
    const auto start = Clock::now();
    MomentReport r;
    r.method = Method::FullGrid;
    r.settings.k = k;
    r.settings.max_order = max_order;
    r.cost.dim = inputs.dim();

    const TensorGrid grid(inputs.rules(k));
    if (grid.total_points() > options.max_grid_points) {
        throw MemoryBudgetExceeded(grid.total_points(), options.max_grid_points);
    }
    GridEvalOptions ge;
    ge.max_buffer_values = options.max_buffer_values;
    ge.allow_streaming = true;
    const auto eval_start = Clock::now();
    GridEvaluation eval = evaluate_graph_on_grid(graph, grid, ge);
    r.cost.eval_wall_time = seconds_since(eval_start);
    r.cost.function_evals = grid.total_points();
    r.node_evals = std::move(eval.node_evals);

    const GridMoments m = weighted_moments(eval.values, grid, max_order);
    r.mean = m.mean;
    fill_central(r, m, max_order);
    r.cost.wall_time = seconds_since(start);
    return r;
}

RiskMeasures risk_report(const ModelGraph& graph, const InputSpace& inputs, std::size_t k, double threshold,
                         double alpha, const EstimatorOptions& options) {
    check_common(graph, inputs, 2);
    check_k(k);
    const std::vector<QuadratureRule1D> rules = inputs.rules(k);
    CostLedger ledger;
    const GudrComponents c = univariate_curves(graph, inputs.mean_vector(), rules, ledger, options.hessian);
    const TensorGrid grid(rules);
    return risk_measures(combine_gudr(c, grid, pick_mode(grid, options), options.max_buffer_values), grid, threshold,
                         alpha);
}

}  // namespace gudr
