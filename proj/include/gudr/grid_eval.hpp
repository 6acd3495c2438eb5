// SPDX-License-Identifier: MIT
#pragma once

#include "gudr/model_graph.hpp"
#include "gudr/tensor_grid.hpp"

#include <cstdint>
#include <vector>

namespace gudr {

struct GridEvalOptions {
    std::size_t max_buffer_values = kDefaultMaxBufferValues;
    /// Evaluate nodes whose sub-grid exceeds the cap pointwise during traversal
    /// instead of failing with MemoryBudgetExceeded.
    bool allow_streaming = false;
};

struct GridEvaluation {
    GridValues values;
    /// Evaluations per node. A node is evaluated once per point of the sub-grid
    /// spanned by its dependency set (constants once). Streamed nodes report
    /// one traversal of the full grid.
    std::vector<std::uint64_t> node_evals;
    std::uint64_t naive_evals_per_node = 0;  // total grid points
};

/// Evaluates `graph` on every point of `grid`, computing each operation only on
/// the distinct points of its own input space and broadcasting smaller buffers
/// along absent axes when they feed larger ones.
GridEvaluation evaluate_graph_on_grid(const ModelGraph& graph, const TensorGrid& grid,
                                      const GridEvalOptions& options = {});

}  // namespace gudr
