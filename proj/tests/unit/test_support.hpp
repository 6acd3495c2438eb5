// SPDX-License-Identifier: MIT
// Helpers shared by the unit tests: a random expression generator and
// brute-force reference computations.
#pragma once

#include "gudr/model_graph.hpp"
#include "gudr/quadrature.hpp"
#include "gudr/tensor_grid.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace gudr::test_support {

// Random well-conditioned expression over x1..x_dim. Every variable appears
// at least once so the parser infers the full dimension.
class ExpressionGenerator {
public:
    ExpressionGenerator(std::size_t dim, unsigned seed) : dim_(dim), rng_(seed) {}

    std::string make(int max_depth) {
        std::string e = node(max_depth);
        for (std::size_t i = 1; i <= dim_; ++i) e = "(" + e + ") + 0.25*x" + std::to_string(i);
        return e;
    }

private:
    std::string leaf() {
        if (pick(3) == 0) return constant();
        return "x" + std::to_string(1 + pick(static_cast<int>(dim_)));
    }

    std::string constant() {
        std::uniform_real_distribution<double> c(-2.0, 2.0);
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", c(rng_));
        return buf;
    }

    std::string node(int depth) {
        if (depth <= 0 || pick(4) == 0) return leaf();
        const std::string a = node(depth - 1);
        switch (pick(10)) {
            case 0: return "(" + a + " + " + node(depth - 1) + ")";
            case 1: return "(" + a + " - " + node(depth - 1) + ")";
            case 2: return "(" + a + " * " + node(depth - 1) + ")";
            case 3: return "(" + a + ") / (1.5 + sin(" + node(depth - 1) + "))";
            case 4: return "sin(" + a + ")";
            case 5: return "cos(" + a + ")";
            case 6: return "exp(sin(" + a + "))";
            case 7: return "log(2 + cos(" + a + "))";
            case 8: return "sqrt(1 + (" + a + ")^2)";
            default: return "-(" + a + ")";
        }
    }

    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

    std::size_t dim_;
    std::mt19937 rng_;
};

inline double rel_diff(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

// Model values at every grid point by direct per-point evaluation.
inline std::vector<double> naive_grid_values(const ModelGraph& g, const TensorGrid& grid) {
    std::vector<double> out(grid.total_points());
    std::vector<std::size_t> multi(grid.dim());
    std::vector<double> x(grid.dim());
    for (std::uint64_t f = 0; f < grid.total_points(); ++f) {
        grid.multi_index(f, multi);
        grid.point(multi, x);
        out[f] = g.evaluate(x);
    }
    return out;
}

}  // namespace gudr::test_support
