// SPDX-License-Identifier: MIT
#pragma once

#include "gudr/cost_ledger.hpp"
#include "gudr/model_graph.hpp"
#include "gudr/quadrature.hpp"

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <vector>

namespace gudr {

/// Truncated multivariate Taylor number in N seeded directions.
///
/// Component `c[S]` for a subset S of {0..N-1} (bitmask) holds the mixed
/// derivative along the directions in S; products drop every term where a
/// direction repeats. N = 1 is a dual number, N = 2 a hyper-dual number and
/// N = 3 carries the mixed third derivative.
template <int N>
struct TaylorJet {
    static_assert(N >= 1 && N <= 3);
    static constexpr std::size_t kSize = std::size_t{1} << N;
    std::array<double, kSize> c{};

    double value() const noexcept { return c[0]; }
    double first(int direction) const noexcept { return c[std::size_t{1} << direction]; }
    double mixed() const noexcept { return c[kSize - 1]; }
};

/// Propagates TaylorJet<N> through `graph` at `point`, seeding direction s with
/// `directions[s]` (each a d-vector). Returns the output jet.
template <int N>
TaylorJet<N> propagate_jet(const ModelGraph& graph, std::span<const double> point,
                           const std::array<std::span<const double>, N>& directions);

/// Propagation along coordinate axes (direction s = e_{axes[s]}).
template <int N>
TaylorJet<N> propagate_axes(const ModelGraph& graph, std::span<const double> point,
                            const std::array<std::size_t, N>& axes);

/// Reusable buffers for gradient evaluation.
struct GradientWorkspace {
    std::vector<double> values;
    std::vector<double> adjoints;
};

/// f(point) and its full gradient: one value sweep and one adjoint sweep.
double value_and_gradient(const ModelGraph& graph, std::span<const double> point, std::span<double> gradient,
                          GradientWorkspace& ws);

std::vector<double> gradient(const ModelGraph& graph, std::span<const double> point);

/// Strict upper triangle of a d x d symmetric matrix, row-major (i < j).
class UpperTriangle {
public:
    UpperTriangle() = default;
    explicit UpperTriangle(std::size_t d) : d_(d), data_(d * (d > 0 ? d - 1 : 0) / 2, 0.0) {}

    std::size_t dim() const noexcept { return d_; }
    double& at(std::size_t i, std::size_t j) { return data_[offset(i, j)]; }
    double at(std::size_t i, std::size_t j) const { return data_[offset(i, j)]; }
    std::span<const double> data() const noexcept { return data_; }

private:
    std::size_t offset(std::size_t i, std::size_t j) const;
    std::size_t d_ = 0;
    std::vector<double> data_;
};

enum class DerivativeMethod { Exact, FiniteDifference };

/// All d(d-1)/2 mixed second partials at `point`. Exact: one tangent sweep and
/// one adjoint sweep per row. FiniteDifference: central differences of analytic gradients with step
/// cbrt(eps) * max(1, |x_i|), symmetrized.
UpperTriangle hessian_offdiag(const ModelGraph& graph, std::span<const double> point,
                              DerivativeMethod method = DerivativeMethod::Exact);

/// Hessian diagonal via hyper-dual passes seeded twice on the same axis.
std::vector<double> hessian_diagonal(const ModelGraph& graph, std::span<const double> point);

/// Distinct third partials keyed by sorted (i <= j <= l).
using ThirdOrderTable = std::map<std::array<std::size_t, 3>, double>;

/// Exact: one jet pass per sorted triple. FiniteDifference: central
/// differences of jet Hessians along the first index, step cbrt(eps)*max(1,|x_i|).
ThirdOrderTable third_order_derivatives(const ModelGraph& graph, std::span<const double> point,
                                        DerivativeMethod method = DerivativeMethod::Exact);

/// Every evaluated piece of the gradient-enhanced surrogate.
struct GudrComponents {
    std::size_t dim = 0;
    std::vector<double> mu;
    double mu_value = 0.0;
    std::vector<double> grad_mu;
    UpperTriangle hess_offdiag;
    std::vector<std::vector<double>> nodes;              // [axis][q]
    std::vector<std::vector<double>> univariate_values;  // [axis][q] = f_i(node_q)
    std::vector<std::vector<double>> univariate_grads;   // [axis][q * dim + j] = df/du_j on the slice

    double univariate_grad(std::size_t axis, std::size_t q, std::size_t j) const {
        return univariate_grads[axis][q * dim + j];
    }
};

/// Univariate slices f_i on every axis node, plus f(mu) (no derivatives).
/// Records kd + 1 function evaluations. Only `mu_value`, `nodes` and
/// `univariate_values` are filled.
GudrComponents univariate_values(const ModelGraph& graph, std::span<const double> mu,
                                 std::span<const QuadratureRule1D> axis_rules, CostLedger& ledger);

/// Full gradient-enhanced components: slice values and gradients on every axis
/// node, f(mu), grad f(mu) and the off-diagonal Hessian at mu. Records kd + 1
/// function, kd + 1 gradient and 1 Hessian evaluation.
GudrComponents univariate_curves(const ModelGraph& graph, std::span<const double> mu,
                                 std::span<const QuadratureRule1D> axis_rules, CostLedger& ledger,
                                 DerivativeMethod hessian_method = DerivativeMethod::Exact);

}  // namespace gudr
