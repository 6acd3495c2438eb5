// SPDX-License-Identifier: MIT
#pragma once

#include <cstddef>
#include <vector>

namespace gudr {

/// One-dimensional quadrature rule with probability-normalized weights.
///
/// Nodes are strictly increasing and weights are positive and sum to one, so
/// `sum(w * g(x))` approximates the expectation of `g` under the rule's law.
struct QuadratureRule1D {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const noexcept { return nodes.size(); }
};

inline constexpr std::size_t kMaxQuadraturePoints = 64;

/// Probabilists' Gauss-Hermite rule (standard normal weight), exact through
/// polynomial degree 2k-1.
QuadratureRule1D gauss_hermite(std::size_t k);

/// Gauss-Legendre rule on (-1, 1) for the Uniform(-1, 1) density
/// (standard weights halved), exact through degree 2k-1.
QuadratureRule1D gauss_legendre(std::size_t k);

}  // namespace gudr
