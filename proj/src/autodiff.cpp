// SPDX-License-Identifier: MIT
#include "gudr/autodiff.hpp"

#include "gudr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace gudr {
namespace {

template <int N>
using Jet = TaylorJet<N>;

template <int N>
Jet<N> jet_mul(const Jet<N>& a, const Jet<N>& b) {
    Jet<N> r;
    for (std::size_t s = 0; s < Jet<N>::kSize; ++s) {
        double sum = 0.0;
        // Every split of s into disjoint (t, s ^ t).
        for (std::size_t t = s;; t = (t - 1) & s) {
            sum += a.c[t] * b.c[s ^ t];
            if (t == 0) break;
        }
        r.c[s] = sum;
    }
    return r;
}

// g(x) for x = x0 + n with nilpotent n, given g and its first N derivatives at x0.
template <int N>
Jet<N> jet_compose(const Jet<N>& x, const std::array<double, 4>& derivs) {
    Jet<N> n = x;
    n.c[0] = 0.0;
    Jet<N> r;
    r.c[0] = derivs[0];
    Jet<N> power = n;
    double factorial = 1.0;
    for (int m = 1; m <= N; ++m) {
        factorial *= m;
        const double coef = derivs[static_cast<std::size_t>(m)] / factorial;
        for (std::size_t s = 1; s < Jet<N>::kSize; ++s) r.c[s] += coef * power.c[s];
        if (m < N) power = jet_mul(power, n);
    }
    return r;
}

template <int N>
Jet<N> jet_int_pow(const Jet<N>& base, std::int64_t exponent) {
    std::uint64_t e = exponent < 0 ? static_cast<std::uint64_t>(-exponent) : static_cast<std::uint64_t>(exponent);
    Jet<N> result;
    result.c[0] = 1.0;
    Jet<N> b = base;
    while (e) {
        if (e & 1u) result = jet_mul(result, b);
        e >>= 1u;
        if (e) b = jet_mul(b, b);
    }
    if (exponent < 0) {
        const double v = result.c[0];
        result = jet_compose<N>(result, {1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v), -6.0 / (v * v * v * v)});
    }
    return result;
}

template <int N>
Jet<N> jet_apply(const Node& n, const Jet<N>& a, const Jet<N>& b, std::size_t index) {
    const double value = apply_op(n, a.c[0], b.c[0], index);
    Jet<N> r;
    switch (n.op) {
        case Op::Neg:
            for (std::size_t s = 0; s < Jet<N>::kSize; ++s) r.c[s] = -a.c[s];
            break;
        case Op::Add:
            for (std::size_t s = 0; s < Jet<N>::kSize; ++s) r.c[s] = a.c[s] + b.c[s];
            break;
        case Op::Sub:
            for (std::size_t s = 0; s < Jet<N>::kSize; ++s) r.c[s] = a.c[s] - b.c[s];
            break;
        case Op::Mul: r = jet_mul(a, b); break;
        case Op::Div: {
            const double v = b.c[0];
            r = jet_mul(a, jet_compose<N>(b, {1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v), -6.0 / (v * v * v * v)}));
            break;
        }
        case Op::PowInt: r = jet_int_pow(a, n.exponent); break;
        case Op::PowReal: {
            const double x = a.c[0], p = n.value;
            r = jet_compose<N>(a, {value, p * std::pow(x, p - 1), p * (p - 1) * std::pow(x, p - 2),
                                   p * (p - 1) * (p - 2) * std::pow(x, p - 3)});
            break;
        }
        case Op::Exp: r = jet_compose<N>(a, {value, value, value, value}); break;
        case Op::Log: {
            const double x = a.c[0];
            r = jet_compose<N>(a, {value, 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x)});
            break;
        }
        case Op::Sqrt: {
            const double x = a.c[0];
            r = jet_compose<N>(a, {value, 0.5 / value, -0.25 / (value * x), 0.375 / (value * x * x)});
            break;
        }
        case Op::Sin: {
            const double s = value, c = std::cos(a.c[0]);
            r = jet_compose<N>(a, {s, c, -s, -c});
            break;
        }
        case Op::Cos: {
            const double c = value, s = std::sin(a.c[0]);
            r = jet_compose<N>(a, {c, -s, -c, s});
            break;
        }
        case Op::Input:
        case Op::Constant: break;
    }
    r.c[0] = value;
    for (double v : r.c) {
        if (!std::isfinite(v)) {
            throw EvaluationError(index, std::string("non-finite derivative from ") + op_name(n.op) + " at node " +
                                             std::to_string(index));
        }
    }
    return r;
}

double int_power(double base, std::int64_t exponent) {
    std::uint64_t e = exponent < 0 ? static_cast<std::uint64_t>(-exponent) : static_cast<std::uint64_t>(exponent);
    double result = 1.0;
    for (double b = base; e; e >>= 1u, b *= b)
        if (e & 1u) result *= b;
    return exponent < 0 ? 1.0 / result : result;
}

// d value / d operand for first-order propagation.
struct Partials {
    double da = 0.0;
    double db = 0.0;
};

Partials op_partials(const Node& n, double a, double b, double value) {
    switch (n.op) {
        case Op::Neg: return {-1.0, 0.0};
        case Op::Add: return {1.0, 1.0};
        case Op::Sub: return {1.0, -1.0};
        case Op::Mul: return {b, a};
        case Op::Div: return {1.0 / b, -value / b};
        case Op::PowInt:
            if (n.exponent == 0) return {0.0, 0.0};
            return {static_cast<double>(n.exponent) * int_power(a, n.exponent - 1), 0.0};
        case Op::PowReal: return {n.value * std::pow(a, n.value - 1.0), 0.0};
        case Op::Exp: return {value, 0.0};
        case Op::Log: return {1.0 / a, 0.0};
        case Op::Sqrt: return {0.5 / value, 0.0};
        case Op::Sin: return {std::cos(a), 0.0};
        case Op::Cos: return {-std::sin(a), 0.0};
        case Op::Input:
        case Op::Constant: break;
    }
    return {};
}

void check_point(const ModelGraph& graph, std::span<const double> point) {
    if (point.size() != graph.input_count()) {
        throw InvalidArgument("point has " + std::to_string(point.size()) + " coordinates, model expects " +
                              std::to_string(graph.input_count()));
    }
}

// d^2 value / d operand^2 terms for forward-over-reverse Hessian rows.
struct SecondPartials {
    double aa = 0.0;
    double ab = 0.0;
    double bb = 0.0;
};

SecondPartials op_second_partials(const Node& n, double a, double b, double value) {
    switch (n.op) {
        case Op::Mul: return {0.0, 1.0, 0.0};
        case Op::Div: return {0.0, -1.0 / (b * b), 2.0 * value / (b * b)};
        case Op::PowInt: {
            const auto p = n.exponent;
            if (p == 0 || p == 1) return {};
            return {static_cast<double>(p) * static_cast<double>(p - 1) * int_power(a, p - 2), 0.0, 0.0};
        }
        case Op::PowReal: return {n.value * (n.value - 1.0) * std::pow(a, n.value - 2.0), 0.0, 0.0};
        case Op::Exp: return {value, 0.0, 0.0};
        case Op::Log: return {-1.0 / (a * a), 0.0, 0.0};
        case Op::Sqrt: return {-0.25 / (value * a), 0.0, 0.0};
        case Op::Sin: return {-value, 0.0, 0.0};
        case Op::Cos: return {-value, 0.0, 0.0};
        default: return {};
    }
}

Partials checked_partials(const Node& n, std::size_t m, const double* values) {
    const double a = values[n.lhs];
    const double b = n.rhs == kNoOperand ? 0.0 : values[n.rhs];
    const Partials p = op_partials(n, a, b, values[m]);
    if (!std::isfinite(p.da) || !std::isfinite(p.db)) {
        throw EvaluationError(m, std::string("non-finite derivative from ") + op_name(n.op) + " at node " +
                                     std::to_string(m));
    }
    return p;
}

// Adjoint sweep from the output: grad[j] = d output / d x_j. `adj` is scratch
// of graph size.
void reverse_sweep(const ModelGraph& graph, const double* values, double* adj, double* grad) {
    const std::size_t d = graph.input_count();
    std::fill(adj, adj + graph.size(), 0.0);
    std::fill(grad, grad + d, 0.0);
    adj[graph.output()] = 1.0;
    for (std::size_t m = graph.output() + 1; m-- > 0;) {
        const double w = adj[m];
        if (w == 0.0) continue;
        const Node& n = graph.nodes()[m];
        if (n.op == Op::Input) {
            grad[n.input] += w;
            continue;
        }
        if (n.op == Op::Constant) continue;
        const Partials p = checked_partials(n, m, values);
        adj[n.lhs] += p.da * w;
        if (n.rhs != kNoOperand) adj[n.rhs] += p.db * w;
    }
}

[[noreturn]] void throw_non_finite(const Node& n, std::size_t m) {
    throw EvaluationError(m, std::string("non-finite derivative from ") + op_name(n.op) + " at node " +
                                 std::to_string(m));
}

// Local first and second partials of every node at one point, plus the
// output adjoints there. Non-finite partials only raise once they carry weight.
struct Linearization {
    std::vector<Partials> p;
    std::vector<SecondPartials> q;
    std::vector<double> adj;
};

Linearization linearize(const ModelGraph& graph, const double* values) {
    const std::size_t size = graph.size();
    Linearization lin;
    lin.p.resize(size);
    lin.q.resize(size);
    lin.adj.assign(size, 0.0);
    const auto& nodes = graph.nodes();
    for (std::size_t m = 0; m < size; ++m) {
        const Node& n = nodes[m];
        if (n.op == Op::Input || n.op == Op::Constant) continue;
        const double a = values[n.lhs];
        const double b = n.rhs == kNoOperand ? 0.0 : values[n.rhs];
        lin.p[m] = op_partials(n, a, b, values[m]);
        lin.q[m] = op_second_partials(n, a, b, values[m]);
    }
    lin.adj[graph.output()] = 1.0;
    for (std::size_t m = graph.output() + 1; m-- > 0;) {
        const double w = lin.adj[m];
        const Node& n = nodes[m];
        if (w == 0.0 || n.op == Op::Input || n.op == Op::Constant) continue;
        const Partials& pm = lin.p[m];
        if (!std::isfinite(pm.da) || !std::isfinite(pm.db)) throw_non_finite(n, m);
        lin.adj[n.lhs] += pm.da * w;
        if (n.rhs != kNoOperand) lin.adj[n.rhs] += pm.db * w;
    }
    return lin;
}

struct HessianScratch {
    std::vector<double> dot, adj_dot;
};

// Row `axis` of the Hessian: a tangent sweep along e_axis over the nodes that
// depend on it, then an adjoint sweep carrying tangents. `axis_nodes` is the
// ascending list of nodes depending on x_axis.
void hessian_row(const ModelGraph& graph, const Linearization& lin, std::span<const std::size_t> axis_nodes,
                 std::size_t axis, HessianScratch& s, double* row) {
    const std::size_t size = graph.size();
    const auto& nodes = graph.nodes();
    s.dot.assign(size, 0.0);
    s.adj_dot.assign(size, 0.0);
    for (std::size_t m : axis_nodes) {
        const Node& n = nodes[m];
        if (n.op == Op::Input) {
            s.dot[m] = n.input == axis ? 1.0 : 0.0;
            continue;
        }
        const Partials& p = lin.p[m];
        const double a_dot = s.dot[n.lhs];
        const double b_dot = n.rhs == kNoOperand ? 0.0 : s.dot[n.rhs];
        if ((a_dot != 0.0 && !std::isfinite(p.da)) || (b_dot != 0.0 && !std::isfinite(p.db))) throw_non_finite(n, m);
        s.dot[m] = (a_dot != 0.0 ? p.da * a_dot : 0.0) + (b_dot != 0.0 ? p.db * b_dot : 0.0);
    }
    std::fill(row, row + graph.input_count(), 0.0);
    for (std::size_t m = graph.output() + 1; m-- > 0;) {
        const Node& n = nodes[m];
        const double w_dot = s.adj_dot[m];
        if (n.op == Op::Input) {
            row[n.input] += w_dot;
            continue;
        }
        if (n.op == Op::Constant) continue;
        const double w = lin.adj[m];
        const bool two = n.rhs != kNoOperand;
        const double a_dot = s.dot[n.lhs], b_dot = two ? s.dot[n.rhs] : 0.0;
        const bool curved = w != 0.0 && (a_dot != 0.0 || b_dot != 0.0);
        if (w_dot == 0.0 && !curved) continue;
        const Partials& p = lin.p[m];
        double ga = w_dot != 0.0 ? p.da * w_dot : 0.0;
        double gb = w_dot != 0.0 ? p.db * w_dot : 0.0;
        if (curved) {
            const SecondPartials& q = lin.q[m];
            ga += (q.aa * a_dot + q.ab * b_dot) * w;
            gb += (q.ab * a_dot + q.bb * b_dot) * w;
        }
        if (!std::isfinite(ga) || !std::isfinite(gb)) throw_non_finite(n, m);
        s.adj_dot[n.lhs] += ga;
        if (two) s.adj_dot[n.rhs] += gb;
    }
}

std::vector<std::vector<std::size_t>> nodes_by_axis(const ModelGraph& graph) {
    std::vector<std::vector<std::size_t>> by_axis(graph.input_count());
    const auto& deps = graph.dep_sets();
    for (std::size_t m = 0; m < graph.size(); ++m)
        for (std::size_t axis : deps[m]) by_axis[axis].push_back(m);
    return by_axis;
}

}  // namespace

template <int N>
TaylorJet<N> propagate_jet(const ModelGraph& graph, std::span<const double> point,
                           const std::array<std::span<const double>, N>& directions) {
    check_point(graph, point);
    for (const auto& dir : directions) {
        if (dir.size() != graph.input_count()) throw InvalidArgument("direction length must equal the dimension");
    }
    std::vector<Jet<N>> work(graph.size());
    const Jet<N> zero{};
    for (std::size_t i = 0; i < graph.size(); ++i) {
        const Node& n = graph.nodes()[i];
        Jet<N>& r = work[i];
        if (n.op == Op::Input) {
            r = zero;
            r.c[0] = point[n.input];
            for (int s = 0; s < N; ++s) r.c[std::size_t{1} << s] = directions[static_cast<std::size_t>(s)][n.input];
        } else if (n.op == Op::Constant) {
            r = zero;
            r.c[0] = n.value;
        } else {
            r = jet_apply<N>(n, work[n.lhs], n.rhs == kNoOperand ? zero : work[n.rhs], i);
        }
    }
    return work[graph.output()];
}

template <int N>
TaylorJet<N> propagate_axes(const ModelGraph& graph, std::span<const double> point,
                            const std::array<std::size_t, N>& axes) {
    const std::size_t d = graph.input_count();
    std::vector<double> seeds(static_cast<std::size_t>(N) * d, 0.0);
    std::array<std::span<const double>, N> dirs;
    for (int s = 0; s < N; ++s) {
        const std::size_t us = static_cast<std::size_t>(s);
        if (axes[us] >= d) throw InvalidArgument("axis out of range");
        seeds[us * d + axes[us]] = 1.0;
        dirs[us] = std::span<const double>(seeds).subspan(us * d, d);
    }
    return propagate_jet<N>(graph, point, dirs);
}

template TaylorJet<1> propagate_jet<1>(const ModelGraph&, std::span<const double>,
                                       const std::array<std::span<const double>, 1>&);
template TaylorJet<2> propagate_jet<2>(const ModelGraph&, std::span<const double>,
                                       const std::array<std::span<const double>, 2>&);
template TaylorJet<3> propagate_jet<3>(const ModelGraph&, std::span<const double>,
                                       const std::array<std::span<const double>, 3>&);
template TaylorJet<1> propagate_axes<1>(const ModelGraph&, std::span<const double>, const std::array<std::size_t, 1>&);
template TaylorJet<2> propagate_axes<2>(const ModelGraph&, std::span<const double>, const std::array<std::size_t, 2>&);
template TaylorJet<3> propagate_axes<3>(const ModelGraph&, std::span<const double>, const std::array<std::size_t, 3>&);

double value_and_gradient(const ModelGraph& graph, std::span<const double> point, std::span<double> grad,
                          GradientWorkspace& ws) {
    check_point(graph, point);
    if (grad.size() != graph.input_count()) throw InvalidArgument("gradient buffer must have one entry per input");
    ws.values.resize(graph.size());
    ws.adjoints.resize(graph.size());
    graph.evaluate_all(point, ws.values);
    reverse_sweep(graph, ws.values.data(), ws.adjoints.data(), grad.data());
    return ws.values[graph.output()];
}

std::vector<double> gradient(const ModelGraph& graph, std::span<const double> point) {
    GradientWorkspace ws;
    std::vector<double> g(graph.input_count());
    value_and_gradient(graph, point, g, ws);
    return g;
}

std::size_t UpperTriangle::offset(std::size_t i, std::size_t j) const {
    if (i >= j || j >= d_) throw InvalidArgument("upper-triangle index requires i < j < d");
    // Rows 0..i-1 hold (d-1) + (d-2) + ... + (d-i) entries.
    return i * (2 * d_ - i - 1) / 2 + (j - i - 1);
}

namespace {

double fd_step(double x) { return std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(x)); }

// Full Hessian, row-major d x d, one forward-over-reverse row per input.
std::vector<double> full_hessian(const ModelGraph& graph, std::span<const double> point) {
    const std::size_t d = graph.input_count();
    std::vector<double> values(graph.size());
    graph.evaluate_all(point, values);
    const Linearization lin = linearize(graph, values.data());
    const auto by_axis = nodes_by_axis(graph);
    std::vector<double> h(d * d);
    HessianScratch scratch;
    for (std::size_t i = 0; i < d; ++i) hessian_row(graph, lin, by_axis[i], i, scratch, h.data() + i * d);
    return h;
}

}  // namespace

UpperTriangle hessian_offdiag(const ModelGraph& graph, std::span<const double> point, DerivativeMethod method) {
    check_point(graph, point);
    const std::size_t d = graph.input_count();
    UpperTriangle h(d);
    if (method == DerivativeMethod::Exact) {
        std::vector<double> values(graph.size()), row(d);
        graph.evaluate_all(point, values);
        const Linearization lin = linearize(graph, values.data());
        const auto by_axis = nodes_by_axis(graph);
        HessianScratch scratch;
        for (std::size_t i = 0; i + 1 < d; ++i) {
            hessian_row(graph, lin, by_axis[i], i, scratch, row.data());
            for (std::size_t j = i + 1; j < d; ++j) h.at(i, j) = row[j];
        }
        return h;
    }
    // Central differences of analytic gradients; row i comes from perturbing x_i.
    std::vector<double> diff(d * d);
    std::vector<double> x(point.begin(), point.end());
    std::vector<double> gp(d), gm(d);
    GradientWorkspace ws;
    for (std::size_t i = 0; i < d; ++i) {
        const double step = fd_step(point[i]);
        x[i] = point[i] + step;
        value_and_gradient(graph, x, gp, ws);
        x[i] = point[i] - step;
        value_and_gradient(graph, x, gm, ws);
        x[i] = point[i];
        for (std::size_t j = 0; j < d; ++j) diff[i * d + j] = (gp[j] - gm[j]) / (2.0 * step);
    }
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) h.at(i, j) = 0.5 * (diff[i * d + j] + diff[j * d + i]);
    return h;
}

std::vector<double> hessian_diagonal(const ModelGraph& graph, std::span<const double> point) {
    check_point(graph, point);
    std::vector<double> diag(graph.input_count());
    for (std::size_t i = 0; i < diag.size(); ++i) diag[i] = propagate_axes<2>(graph, point, {i, i}).mixed();
    return diag;
}

ThirdOrderTable third_order_derivatives(const ModelGraph& graph, std::span<const double> point,
                                        DerivativeMethod method) {
    check_point(graph, point);
    const std::size_t d = graph.input_count();
    ThirdOrderTable table;
    if (method == DerivativeMethod::Exact) {
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i; j < d; ++j)
                for (std::size_t l = j; l < d; ++l) table[{i, j, l}] = propagate_axes<3>(graph, point, {i, j, l}).mixed();
        return table;
    }
    std::vector<double> x(point.begin(), point.end());
    for (std::size_t i = 0; i < d; ++i) {
        const double step = fd_step(point[i]);
        x[i] = point[i] + step;
        const std::vector<double> hp = full_hessian(graph, x);
        x[i] = point[i] - step;
        const std::vector<double> hm = full_hessian(graph, x);
        x[i] = point[i];
        for (std::size_t j = i; j < d; ++j)
            for (std::size_t l = j; l < d; ++l) table[{i, j, l}] = (hp[j * d + l] - hm[j * d + l]) / (2.0 * step);
    }
    return table;
}

namespace {

void check_rules(const ModelGraph& graph, std::span<const double> mu, std::span<const QuadratureRule1D> rules) {
    check_point(graph, mu);
    if (rules.size() != graph.input_count()) {
        throw InvalidArgument("need one quadrature rule per input, got " + std::to_string(rules.size()));
    }
}

// Re-raises an evaluation failure with the slice location attached.
[[noreturn]] void rethrow_at(const EvaluationError& e, std::size_t axis, std::size_t q, double node) {
    throw EvaluationError(e.node(), std::string(e.what()) + " (axis " + std::to_string(axis) + ", node " +
                                        std::to_string(q) + ", u = " + std::to_string(node) + ")");
}

}  // namespace

GudrComponents univariate_values(const ModelGraph& graph, std::span<const double> mu,
                                 std::span<const QuadratureRule1D> axis_rules, CostLedger& ledger) {
    check_rules(graph, mu, axis_rules);
    const std::size_t d = graph.input_count();
    GudrComponents c;
    c.dim = d;
    c.mu.assign(mu.begin(), mu.end());

    std::vector<double> base(graph.size());
    graph.evaluate_all(mu, base);
    c.mu_value = base[graph.output()];
    ledger.function_evals += 1;

    // Only nodes that depend on the slice axis change along the slice.
    const auto by_axis = nodes_by_axis(graph);
    std::vector<double> slice = base;
    c.nodes.resize(d);
    c.univariate_values.resize(d);
    for (std::size_t axis = 0; axis < d; ++axis) {
        const QuadratureRule1D& rule = axis_rules[axis];
        c.nodes[axis] = rule.nodes;
        c.univariate_values[axis].resize(rule.size());
        for (std::size_t q = 0; q < rule.size(); ++q) {
            try {
                for (std::size_t m : by_axis[axis]) {
                    const Node& n = graph.nodes()[m];
                    if (n.op == Op::Input) {
                        slice[m] = apply_op(n, rule.nodes[q], 0.0, m);
                        continue;
                    }
                    const double a = slice[n.lhs];
                    const double b = n.rhs == kNoOperand ? 0.0 : slice[n.rhs];
                    slice[m] = apply_op(n, a, b, m);
                }
            } catch (const EvaluationError& e) {
                rethrow_at(e, axis, q, rule.nodes[q]);
            }
            c.univariate_values[axis][q] = slice[graph.output()];
            ledger.function_evals += 1;
        }
        for (std::size_t m : by_axis[axis]) slice[m] = base[m];
    }
    return c;
}

namespace {

// Gradient of every node at the linearization point, sparse over its
// dependency set (entries aligned with dep_sets()[m]).
std::vector<std::vector<double>> node_gradients(const ModelGraph& graph, const Linearization& lin) {
    const auto& nodes = graph.nodes();
    const auto& deps = graph.dep_sets();
    std::vector<std::vector<double>> grad(graph.size());
    for (std::size_t m = 0; m < graph.size(); ++m) {
        const Node& n = nodes[m];
        grad[m].assign(deps[m].size(), 0.0);
        if (n.op == Op::Input) {
            grad[m][0] = 1.0;
            continue;
        }
        if (n.op == Op::Constant) continue;
        auto scatter = [&](std::size_t operand, double partial) {
            const auto& from = deps[operand];
            const auto& gfrom = grad[operand];
            std::size_t k = 0;
            for (std::size_t e = 0; e < from.size(); ++e) {
                while (deps[m][k] != from[e]) ++k;
                grad[m][k] += partial * gfrom[e];
            }
        };
        scatter(n.lhs, lin.p[m].da);
        if (n.rhs != kNoOperand) scatter(n.rhs, lin.p[m].db);
    }
    return grad;
}

// Per-axis plan for slice gradients. Along the slice only `changing` nodes move;
// the rest keep their mean-point values and gradients, so the adjoint sweep
// stops at `frontier`, the fixed operands of changing nodes.
struct SlicePlan {
    std::vector<std::size_t> changing;
    std::vector<std::size_t> frontier;
};

SlicePlan slice_plan(const ModelGraph& graph, std::vector<std::size_t> changing, std::vector<char>& mark) {
    SlicePlan plan;
    for (std::size_t m : changing) mark[m] = 1;
    for (std::size_t m : changing) {
        const Node& n = graph.nodes()[m];
        if (n.op == Op::Input) continue;
        for (std::size_t o : {n.lhs, n.rhs}) {
            if (o == kNoOperand || mark[o]) continue;
            if (graph.nodes()[o].op == Op::Constant) continue;
            mark[o] = 2;
            plan.frontier.push_back(o);
        }
    }
    for (std::size_t m : changing) mark[m] = 0;
    for (std::size_t m : plan.frontier) mark[m] = 0;
    plan.changing = std::move(changing);
    return plan;
}

}  // namespace

GudrComponents univariate_curves(const ModelGraph& graph, std::span<const double> mu,
                                 std::span<const QuadratureRule1D> axis_rules, CostLedger& ledger,
                                 DerivativeMethod hessian_method) {
    check_rules(graph, mu, axis_rules);
    const std::size_t d = graph.input_count();
    const std::size_t out = graph.output();
    const auto& nodes = graph.nodes();
    const auto& deps = graph.dep_sets();
    GudrComponents c;
    c.dim = d;
    c.mu.assign(mu.begin(), mu.end());
    c.grad_mu.assign(d, 0.0);

    std::vector<double> base(graph.size());
    graph.evaluate_all(mu, base);
    c.mu_value = base[out];
    const Linearization lin = linearize(graph, base.data());
    for (std::size_t m = 0; m < graph.size(); ++m)
        if (nodes[m].op == Op::Input) c.grad_mu[nodes[m].input] += lin.adj[m];
    ledger.function_evals += 1;
    ledger.gradient_evals += 1;
    ledger.ad_sweeps += 2;

    const std::vector<std::vector<double>> node_grad = node_gradients(graph, lin);
    auto by_axis = nodes_by_axis(graph);
    std::vector<char> mark(graph.size(), 0);
    std::vector<double> slice = base;
    std::vector<double> adj(graph.size(), 0.0);
    c.nodes.resize(d);
    c.univariate_values.resize(d);
    c.univariate_grads.resize(d);
    for (std::size_t axis = 0; axis < d; ++axis) {
        const QuadratureRule1D& rule = axis_rules[axis];
        const SlicePlan plan = slice_plan(graph, by_axis[axis], mark);
        const bool moves = !deps[out].empty() && std::binary_search(deps[out].begin(), deps[out].end(), axis);
        c.nodes[axis] = rule.nodes;
        c.univariate_values[axis].resize(rule.size());
        c.univariate_grads[axis].resize(rule.size() * d);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            double* grad = c.univariate_grads[axis].data() + q * d;
            try {
                for (std::size_t m : plan.changing) {
                    const Node& n = nodes[m];
                    if (n.op == Op::Input) {
                        slice[m] = apply_op(n, rule.nodes[q], 0.0, m);
                        continue;
                    }
                    slice[m] = apply_op(n, slice[n.lhs], n.rhs == kNoOperand ? 0.0 : slice[n.rhs], m);
                }
                if (!moves) {
                    std::copy(c.grad_mu.begin(), c.grad_mu.end(), grad);
                } else {
                    std::fill(grad, grad + d, 0.0);
                    adj[out] = 1.0;
                    for (std::size_t idx = plan.changing.size(); idx-- > 0;) {
                        const std::size_t m = plan.changing[idx];
                        const double w = adj[m];
                        adj[m] = 0.0;
                        if (w == 0.0) continue;
                        const Node& n = nodes[m];
                        if (n.op == Op::Input) {
                            grad[n.input] += w;
                            continue;
                        }
                        const Partials p = checked_partials(n, m, slice.data());
                        adj[n.lhs] += p.da * w;
                        if (n.rhs != kNoOperand) adj[n.rhs] += p.db * w;
                    }
                    for (std::size_t f : plan.frontier) {
                        const double w = adj[f];
                        adj[f] = 0.0;
                        if (w == 0.0) continue;
                        const auto& fd = deps[f];
                        const auto& fg = node_grad[f];
                        for (std::size_t e = 0; e < fd.size(); ++e) grad[fd[e]] += w * fg[e];
                    }
                    for (std::size_t j = 0; j < d; ++j)
                        if (!std::isfinite(grad[j])) throw EvaluationError(out, "non-finite slice gradient");
                }
            } catch (const EvaluationError& e) {
                for (std::size_t m : plan.changing) adj[m] = 0.0;
                for (std::size_t m : plan.frontier) adj[m] = 0.0;
                rethrow_at(e, axis, q, rule.nodes[q]);
            }
            c.univariate_values[axis][q] = slice[out];
            ledger.function_evals += 1;
            ledger.gradient_evals += 1;
            ledger.ad_sweeps += 2;
        }
        for (std::size_t m : plan.changing) slice[m] = base[m];
    }

    if (hessian_method == DerivativeMethod::Exact) {
        c.hess_offdiag = UpperTriangle(d);
        HessianScratch scratch;
        std::vector<double> row(d);
        for (std::size_t i = 0; i + 1 < d; ++i) {
            hessian_row(graph, lin, by_axis[i], i, scratch, row.data());
            for (std::size_t j = i + 1; j < d; ++j) c.hess_offdiag.at(i, j) = row[j];
        }
    } else {
        c.hess_offdiag = hessian_offdiag(graph, mu, hessian_method);
    }
    ledger.hessian_evals += 1;
    ledger.ad_sweeps += hessian_method == DerivativeMethod::Exact ? 2 * (d > 0 ? d - 1 : 0) : 4 * d;
    return c;
}

}  // namespace gudr
