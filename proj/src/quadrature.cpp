// SPDX-License-Identifier: MIT
#include "gudr/quadrature.hpp"

#include "gudr/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <functional>
#include <string>

namespace gudr {
namespace {

// Symmetric orthonormal family: p_{n+1} = (x p_n - b_n p_{n-1}) / b_{n+1},
// with zero diagonal recurrence coefficients. `b(n)` is defined for n >= 1.
using OffDiagonal = std::function<double(std::size_t)>;

struct PolyValue {
    double value;
    double derivative;
};

PolyValue orthonormal_poly(std::size_t degree, double x, const OffDiagonal& b) {
    double p_prev = 0.0, p = 1.0;
    double dp_prev = 0.0, dp = 0.0;
    for (std::size_t n = 0; n < degree; ++n) {
        const double b_n = n == 0 ? 0.0 : b(n);
        const double b_next = b(n + 1);
        const double p_next = (x * p - b_n * p_prev) / b_next;
        const double dp_next = (p + x * dp - b_n * dp_prev) / b_next;
        p_prev = p;
        p = p_next;
        dp_prev = dp;
        dp = dp_next;
    }
    return {p, dp};
}

// Christoffel number 1 / sum_{j<k} p_j(x)^2 for a probability measure.
double christoffel_weight(std::size_t k, double x, const OffDiagonal& b) {
    double p_prev = 0.0, p = 1.0;
    double sum = 1.0;
    for (std::size_t n = 0; n + 1 < k; ++n) {
        const double b_n = n == 0 ? 0.0 : b(n);
        const double p_next = (x * p - b_n * p_prev) / b(n + 1);
        p_prev = p;
        p = p_next;
        sum += p * p;
    }
    return 1.0 / sum;
}

void check_size(std::size_t k) {
    if (k == 0 || k > kMaxQuadraturePoints) {
        throw InvalidArgument("quadrature rule size must be in [1, " +
                              std::to_string(kMaxQuadraturePoints) + "], got " +
                              std::to_string(k));
    }
}

// Golub-Welsch eigenvalues as starting guesses, Newton polish on p_k, and
// Christoffel weights. The result is mirrored so it is exactly symmetric.
QuadratureRule1D symmetric_gauss_rule(std::size_t k, const OffDiagonal& b) {
    check_size(k);
    QuadratureRule1D rule;
    rule.nodes.assign(k, 0.0);
    rule.weights.assign(k, 0.0);
    if (k == 1) {
        rule.weights[0] = 1.0;
        return rule;
    }

    Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
    Eigen::VectorXd sub(static_cast<Eigen::Index>(k - 1));
    for (std::size_t n = 1; n < k; ++n) sub[static_cast<Eigen::Index>(n - 1)] = b(n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd& eig = solver.eigenvalues();  // ascending

    const std::size_t half = k / 2;
    for (std::size_t i = 0; i < half; ++i) {
        // Positive root paired with the mirrored negative one.
        double x = 0.5 * (eig[static_cast<Eigen::Index>(k - 1 - i)] -
                          eig[static_cast<Eigen::Index>(i)]);
        for (int iter = 0; iter < 8; ++iter) {
            const PolyValue pv = orthonormal_poly(k, x, b);
            const double step = pv.value / pv.derivative;
            x -= step;
            if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
        }
        const double w = christoffel_weight(k, x, b);
        rule.nodes[k - 1 - i] = x;
        rule.nodes[i] = -x;
        rule.weights[k - 1 - i] = w;
        rule.weights[i] = w;
    }
    if (k % 2 == 1) {
        rule.nodes[half] = 0.0;
        rule.weights[half] = christoffel_weight(k, 0.0, b);
    }

    double total = 0.0;
    for (double w : rule.weights) total += w;
    for (double& w : rule.weights) w /= total;
    return rule;
}

}  // namespace

QuadratureRule1D gauss_hermite(std::size_t k) {
    return symmetric_gauss_rule(k, [](std::size_t n) { return std::sqrt(static_cast<double>(n)); });
}

QuadratureRule1D gauss_legendre(std::size_t k) {
    return symmetric_gauss_rule(k, [](std::size_t n) {
        const double nn = static_cast<double>(n);
        return nn / std::sqrt(4.0 * nn * nn - 1.0);
    });
}

}  // namespace gudr
