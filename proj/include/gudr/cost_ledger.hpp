// SPDX-License-Identifier: MIT
#pragma once

#include <cstddef>
#include <cstdint>

namespace gudr {

/// Evaluation accounting for one estimator run.
///
/// `function_evals`, `gradient_evals` and `hessian_evals` follow the
/// reverse-mode cost model (a gradient is worth 3 model evaluations, a Hessian
/// 3d). `ad_sweeps` counts the value, tangent, adjoint and jet sweeps this
/// implementation actually made.
struct CostLedger {
    std::uint64_t function_evals = 0;
    std::uint64_t gradient_evals = 0;
    std::uint64_t hessian_evals = 0;
    std::uint64_t third_order_evals = 0;
    std::uint64_t ad_sweeps = 0;
    std::size_t dim = 0;
    double wall_time = 0.0;       // seconds, whole estimator
    double eval_wall_time = 0.0;  // seconds spent evaluating the model and its derivatives

    /// function + 3 gradient + 3d Hessian (+ 3d^2 per third-order tensor).
    double paper_equivalent_evals() const noexcept {
        const double d = static_cast<double>(dim);
        return static_cast<double>(function_evals) + 3.0 * static_cast<double>(gradient_evals) +
               3.0 * d * static_cast<double>(hessian_evals) + 3.0 * d * d * static_cast<double>(third_order_evals);
    }
};

}  // namespace gudr
