// SPDX-License-Identifier: MIT
#pragma once

#include "gudr/distributions.hpp"
#include "gudr/model_graph.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace gudr {

inline constexpr double kDefaultSigma = 0.2;

struct BuiltinModel {
    std::string name;
    std::string expression;
    ModelGraph graph;
    InputSpace inputs;
};

/// Registry of the analytic test problems.
///
///   y1 = 1 / (1 + x1^4 + 2 x2^2 + x2^4),     X_i ~ N(2, sigma)
///   y2 = exp(1 + 0.5 (x1^2 + x2^2 + x3^2)),  X_i ~ N(3, sigma)
///   y3 = exp(1 + sum_{i<=d} 0.5 x_i^2),      X_i ~ N(3, 1), d required
///
/// `sigma` applies to y1 and y2 only.
BuiltinModel builtin_model(std::string_view name, std::optional<std::size_t> dim = std::nullopt,
                           double sigma = kDefaultSigma);

bool is_builtin_model(std::string_view name) noexcept;

}  // namespace gudr
