// SPDX-License-Identifier: MIT
#include "gudr/grid_eval.hpp"

#include "gudr/errors.hpp"

#include <memory>

namespace gudr {
namespace {

struct GridState {
    ModelGraph graph;
    std::size_t dim = 0;
    std::vector<std::vector<double>> buffers;       // per node, over its own sub-grid
    std::vector<std::vector<std::uint64_t>> stride;  // per node, per grid axis (0 when absent)
    std::vector<bool> streamed;
    std::vector<std::size_t> streamed_nodes;

    std::uint64_t offset(std::size_t node, std::span<const std::size_t> multi) const {
        std::uint64_t off = 0;
        const auto& s = stride[node];
        for (std::size_t a = 0; a < dim; ++a) off += multi[a] * s[a];
        return off;
    }
};

// Evaluates node `m` on every point of its own sub-grid.
void evaluate_node(GridState& st, const TensorGrid& grid, std::size_t m) {
    const ModelGraph& g = st.graph;
    const Node& n = g.nodes()[m];
    const DepSet& deps = g.dep_sets()[m];
    std::vector<double>& out = st.buffers[m];

    if (n.op == Op::Constant) {
        out.assign(1, n.value);
        return;
    }
    if (n.op == Op::Input) {
        const auto& nodes = grid.axis(n.input).nodes;
        out.resize(nodes.size());
        for (std::size_t q = 0; q < nodes.size(); ++q) out[q] = apply_op(n, nodes[q], 0.0, m);
        return;
    }

    std::uint64_t size = 1;
    for (std::size_t a : deps) size *= grid.axis_size(a);
    out.resize(size);

    const bool two = n.rhs != kNoOperand;
    const std::vector<double>& lhs = st.buffers[n.lhs];
    const std::vector<double>& rhs = two ? st.buffers[n.rhs] : lhs;
    const auto& ls = st.stride[n.lhs];
    const auto& rs = two ? st.stride[n.rhs] : ls;

    // Odometer over the node's own axes, tracking both operand offsets.
    std::vector<std::size_t> counter(deps.size(), 0);
    std::uint64_t lo = 0, ro = 0;
    for (std::uint64_t i = 0; i < size; ++i) {
        out[i] = apply_op(n, lhs[lo], two ? rhs[ro] : 0.0, m);
        for (std::size_t p = deps.size(); p-- > 0;) {
            const std::size_t a = deps[p];
            if (++counter[p] < grid.axis_size(a)) {
                lo += ls[a];
                ro += rs[a];
                break;
            }
            const std::uint64_t back = grid.axis_size(a) - 1;
            lo -= back * ls[a];
            ro -= back * rs[a];
            counter[p] = 0;
        }
    }
}

}  // namespace

GridEvaluation evaluate_graph_on_grid(const ModelGraph& graph, const TensorGrid& grid, const GridEvalOptions& options) {
    const std::size_t d = grid.dim();
    if (graph.input_count() != d) {
        throw InvalidArgument("model has " + std::to_string(graph.input_count()) + " inputs but the grid has " +
                              std::to_string(d) + " axes");
    }
    const std::size_t count = graph.size();
    const std::uint64_t total = grid.total_points();
    const std::size_t cap = options.max_buffer_values;

    auto st = std::make_shared<GridState>();
    st->graph = graph;
    st->dim = d;
    st->buffers.resize(count);
    st->stride.assign(count, std::vector<std::uint64_t>(d, 0));
    st->streamed.assign(count, false);

    GridEvaluation result;
    result.node_evals.resize(count);
    result.naive_evals_per_node = total;

    std::vector<std::uint64_t> sizes(count, 1);
    for (std::size_t m = 0; m < count; ++m) {
        const DepSet& deps = graph.dep_sets()[m];
        std::uint64_t stride = 1;
        for (std::size_t p = deps.size(); p-- > 0;) {
            st->stride[m][deps[p]] = stride;
            stride *= grid.axis_size(deps[p]);
        }
        sizes[m] = stride;
        if (stride > cap) {
            if (!options.allow_streaming) throw MemoryBudgetExceeded(stride, cap);
            st->streamed[m] = true;
            st->streamed_nodes.push_back(m);
        }
    }

    // Last materialized consumer of each node; operands of streamed nodes stay alive.
    std::vector<std::size_t> last_use(count, 0);
    std::vector<bool> pinned(count, false);
    pinned[graph.output()] = true;
    for (std::size_t m = 0; m < count; ++m) {
        const Node& n = graph.nodes()[m];
        for (std::size_t o : {n.lhs, n.rhs}) {
            if (o == kNoOperand) continue;
            if (st->streamed[m]) pinned[o] = true;
            else last_use[o] = m;
        }
    }

    for (std::size_t m = 0; m < count; ++m) {
        if (st->streamed[m]) {
            result.node_evals[m] = total;
            continue;
        }
        evaluate_node(*st, grid, m);
        result.node_evals[m] = sizes[m];
        const Node& n = graph.nodes()[m];
        for (std::size_t o : {n.lhs, n.rhs}) {
            if (o != kNoOperand && !pinned[o] && last_use[o] == m) {
                std::vector<double>().swap(st->buffers[o]);
            }
        }
    }

    const std::size_t out = graph.output();
    if (!st->streamed[out] && sizes[out] == total) {
        result.values = GridValues::materialized(std::move(st->buffers[out]));
        return result;
    }
    if (!st->streamed[out] && total <= cap) {
        std::vector<double> expanded;
        expanded.reserve(total);
        const auto& buffer = st->buffers[out];
        GridValues::streaming([&]() -> GridValues::PointFn {
            return [&](std::span<const std::size_t> q) { return buffer[st->offset(out, q)]; };
        }).for_each(grid, [&](auto, std::uint64_t, double, double v) { expanded.push_back(v); });
        result.values = GridValues::materialized(std::move(expanded));
        return result;
    }
    if (!options.allow_streaming) throw MemoryBudgetExceeded(total, cap);

    result.values = GridValues::streaming([st, out]() -> GridValues::PointFn {
        std::vector<double> scratch(st->graph.size());
        return [st, out, scratch = std::move(scratch)](std::span<const std::size_t> q) mutable {
            const ModelGraph& g = st->graph;
            auto operand = [&](std::size_t o) {
                return st->streamed[o] ? scratch[o] : st->buffers[o][st->offset(o, q)];
            };
            for (std::size_t m : st->streamed_nodes) {
                const Node& n = g.nodes()[m];
                scratch[m] = apply_op(n, operand(n.lhs), n.rhs == kNoOperand ? 0.0 : operand(n.rhs), m);
            }
            return operand(out);
        };
    });
    return result;
}

}  // namespace gudr
