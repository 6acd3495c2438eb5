// SPDX-License-Identifier: MIT
#pragma once

#include "gudr/autodiff.hpp"
#include "gudr/cost_ledger.hpp"
#include "gudr/distributions.hpp"
#include "gudr/model_graph.hpp"
#include "gudr/tensor_grid.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gudr {

enum class Method { Udr, Gudr, Sosm, Tosm, MonteCarlo, FullGrid };

/// "udr", "gudr", "sosm", "tosm", "mc", "fullgrid".
std::string method_name(Method m);
Method parse_method(std::string_view name);

struct MomentReport {
    Method method = Method::Udr;
    double mean = 0.0;
    double std = 0.0;
    std::map<int, double> central_moments;  // orders 2..max_order
    CostLedger cost;

    struct Settings {
        std::optional<std::size_t> k;
        std::optional<std::size_t> n;
        std::optional<std::uint64_t> seed;
        int max_order = 2;
        int taylor_order = 0;
    } settings;

    /// Monte Carlo only: std / sqrt(n).
    std::optional<double> standard_error;
    /// Set when roundoff produced a slightly negative variance that was clamped to 0.
    bool variance_clamped = false;
    /// Full-grid only: per-node evaluation counts of the deduplicated grid pass.
    std::vector<std::uint64_t> node_evals;
};

struct EstimatorOptions {
    /// Largest buffer any grid stage may materialize before streaming.
    std::size_t max_buffer_values = kDefaultMaxBufferValues;
    /// Largest tensor grid a full-grid reference may traverse.
    std::uint64_t max_grid_points = kDefaultMaxBufferValues;
    DerivativeMethod hessian = DerivativeMethod::Exact;
    DerivativeMethod third_order = DerivativeMethod::Exact;
};

/// Univariate dimension reduction: kd + 1 model evaluations. The mean is the
/// sum of 1-D quadratures minus (d-1) f(mu); higher moments come from the
/// surrogate on the full tensor grid (combination only).
MomentReport udr_moments(const ModelGraph& graph, const InputSpace& inputs, std::size_t k, int max_order = 2,
                         const EstimatorOptions& options = {});

/// Gradient-enhanced dimension reduction: kd + 1 values and gradients plus one
/// off-diagonal Hessian at the mean, combined on the tensor grid.
MomentReport gudr_moments(const ModelGraph& graph, const InputSpace& inputs, std::size_t k, int max_order = 2,
                          const EstimatorOptions& options = {});

/// Method of moments on the degree-`order` (2 or 3) Taylor polynomial at the
/// mean, integrated exactly by tensor-grid quadrature on the polynomial.
MomentReport taylor_moments(const ModelGraph& graph, const InputSpace& inputs, int order, int max_order = 2,
                            const EstimatorOptions& options = {});

/// Plain Monte Carlo with n i.i.d. draws; variance uses 1/(n-1).
MomentReport monte_carlo_moments(const ModelGraph& graph, const InputSpace& inputs, std::size_t n,
                                 std::uint64_t seed, int max_order = 2);

/// The model itself on the full k^d tensor grid (deduplicated graph pass).
MomentReport full_grid_reference(const ModelGraph& graph, const InputSpace& inputs, std::size_t k, int max_order = 2,
                                 const EstimatorOptions& options = {});

/// Exceedance probability and upper CVaR of the gradient-enhanced surrogate grid.
RiskMeasures risk_report(const ModelGraph& graph, const InputSpace& inputs, std::size_t k, double threshold,
                         double alpha, const EstimatorOptions& options = {});

/// Degree-`order` Taylor polynomial of `graph` at `mu` as a new graph over the
/// same inputs (coefficients from jets, or FD per `options`).
ModelGraph taylor_surrogate(const ModelGraph& graph, std::span<const double> mu, int order,
                            const EstimatorOptions& options, CostLedger& ledger);

}  // namespace gudr
