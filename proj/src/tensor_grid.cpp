// SPDX-License-Identifier: MIT
#include "gudr/tensor_grid.hpp"

#include "gudr/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <utility>

namespace gudr {

TensorGrid::TensorGrid(std::vector<QuadratureRule1D> axes) : axes_(std::move(axes)) {
    for (const auto& a : axes_) {
        if (a.size() == 0 || a.weights.size() != a.nodes.size()) {
            throw InvalidArgument("tensor grid axes need matching, non-empty node and weight lists");
        }
        if (total_ > std::numeric_limits<std::uint64_t>::max() / a.size()) {
            throw InvalidArgument("tensor grid size overflows");
        }
        total_ *= a.size();
    }
}

std::uint64_t TensorGrid::flat_index(std::span<const std::size_t> multi) const {
    if (multi.size() != axes_.size()) throw InvalidArgument("multi-index length must equal the grid dimension");
    std::uint64_t flat = 0;
    for (std::size_t a = 0; a < axes_.size(); ++a) {
        if (multi[a] >= axes_[a].size()) throw InvalidArgument("multi-index out of range");
        flat = flat * axes_[a].size() + multi[a];
    }
    return flat;
}

void TensorGrid::multi_index(std::uint64_t flat, std::span<std::size_t> multi) const {
    if (multi.size() != axes_.size()) throw InvalidArgument("multi-index length must equal the grid dimension");
    if (flat >= total_) throw InvalidArgument("flat index out of range");
    for (std::size_t a = axes_.size(); a-- > 0;) {
        multi[a] = static_cast<std::size_t>(flat % axes_[a].size());
        flat /= axes_[a].size();
    }
}

double TensorGrid::weight(std::span<const std::size_t> multi) const {
    double w = 1.0;
    for (std::size_t a = 0; a < axes_.size(); ++a) w *= axes_[a].weights[multi[a]];
    return w;
}

void TensorGrid::point(std::span<const std::size_t> multi, std::span<double> out) const {
    for (std::size_t a = 0; a < axes_.size(); ++a) out[a] = axes_[a].nodes[multi[a]];
}

GridValues GridValues::materialized(std::vector<double> values) {
    GridValues g;
    g.values_ = std::move(values);
    return g;
}

GridValues GridValues::streaming(PointFnFactory factory) {
    if (!factory) throw InvalidArgument("streaming grid values need an evaluator factory");
    GridValues g;
    g.factory_ = std::move(factory);
    return g;
}

std::span<const double> GridValues::values() const {
    if (!is_materialized()) throw InvalidArgument("grid values are streaming, not stored");
    return values_;
}

std::vector<double> GridValues::to_vector(const TensorGrid& grid) const {
    if (is_materialized()) return values_;
    std::vector<double> out;
    out.reserve(grid.total_points());
    for_each(grid, [&](auto, std::uint64_t, double, double v) { out.push_back(v); });
    return out;
}

namespace {

void check_components(const GudrComponents& c, const TensorGrid& grid, bool need_gradients) {
    if (grid.dim() != c.dim || c.univariate_values.size() != c.dim) {
        throw InvalidArgument("components and grid disagree on the dimension");
    }
    for (std::size_t a = 0; a < c.dim; ++a) {
        if (c.nodes[a] != grid.axis(a).nodes) {
            throw InvalidArgument("components were built on different nodes than grid axis " + std::to_string(a));
        }
    }
    if (need_gradients && (c.univariate_grads.size() != c.dim || c.grad_mu.size() != c.dim)) {
        throw InvalidArgument("components carry no gradient information");
    }
}

GridValues build(const TensorGrid& grid, GridMode mode, std::size_t cap, GridValues::PointFnFactory factory) {
    if (mode == GridMode::Streaming) return GridValues::streaming(std::move(factory));
    if (grid.total_points() > cap) throw MemoryBudgetExceeded(grid.total_points(), cap);
    return GridValues::materialized(GridValues::streaming(std::move(factory)).to_vector(grid));
}

}  // namespace

GridValues combine_gudr(const GudrComponents& c, const TensorGrid& grid, GridMode mode,
                        std::size_t max_buffer_values) {
    check_components(c, grid, true);
    const std::size_t d = c.dim;
    // Per-axis offsets u - mu at every node.
    std::vector<std::vector<double>> offsets(d);
    for (std::size_t a = 0; a < d; ++a) {
        for (double u : c.nodes[a]) offsets[a].push_back(u - c.mu[a]);
    }
    auto shared = std::make_shared<const GudrComponents>(c);
    auto factory = [shared, offsets = std::move(offsets), d]() -> GridValues::PointFn {
        return [shared, &offsets, d, delta = std::vector<double>(d)](std::span<const std::size_t> q) mutable {
            const GudrComponents& c = *shared;
            for (std::size_t j = 0; j < d; ++j) delta[j] = offsets[j][q[j]];
            double univariate = 0.0;
            double cross = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                univariate += c.univariate_values[i][q[i]];
                const double* g = c.univariate_grads[i].data() + q[i] * d;
                for (std::size_t j = 0; j < d; ++j)
                    if (j != i) cross += delta[j] * g[j];
            }
            double linear = 0.0;
            for (std::size_t j = 0; j < d; ++j) linear += delta[j] * c.grad_mu[j];
            double hessian = 0.0;
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = i + 1; j < d; ++j) hessian += c.hess_offdiag.at(i, j) * delta[i] * delta[j];
            const double overlap = static_cast<double>(d - 1);
            return univariate - overlap * (c.mu_value + linear) + cross - hessian;
        };
    };
    return build(grid, mode, max_buffer_values, std::move(factory));
}

GridValues combine_udr(const GudrComponents& c, const TensorGrid& grid, GridMode mode,
                       std::size_t max_buffer_values) {
    check_components(c, grid, false);
    const std::size_t d = c.dim;
    auto values = std::make_shared<const std::vector<std::vector<double>>>(c.univariate_values);
    const double mu_value = c.mu_value;
    auto factory = [values, mu_value, d]() -> GridValues::PointFn {
        return [values, mu_value, d](std::span<const std::size_t> q) {
            double univariate = 0.0;
            for (std::size_t i = 0; i < d; ++i) univariate += (*values)[i][q[i]];
            return univariate - static_cast<double>(d - 1) * mu_value;
        };
    };
    return build(grid, mode, max_buffer_values, std::move(factory));
}

GridMoments weighted_moments(const GridValues& values, const TensorGrid& grid, int max_order) {
    if (max_order < 2) throw InvalidArgument("max_order must be >= 2");
    auto accumulate = [](double& sum, double& comp, double term) {  // Neumaier
        const double t = sum + term;
        comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
        sum = t;
    };

    // Sums are taken relative to the first value, so a constant grid has an
    // exact mean and exactly zero central moments.
    GridMoments m;
    bool first = true;
    double shift = 0.0, sum = 0.0, comp = 0.0, wsum = 0.0, wcomp = 0.0;
    values.for_each(grid, [&](auto, std::uint64_t, double w, double v) {
        if (first) {
            shift = v;
            first = false;
        }
        accumulate(sum, comp, w * (v - shift));
        accumulate(wsum, wcomp, w);
    });
    const double total_weight = wsum + wcomp;
    m.mean = shift + (sum + comp) / total_weight;

    const std::size_t orders = static_cast<std::size_t>(max_order) + 1;
    std::vector<double> sums(orders, 0.0), comps(orders, 0.0);
    values.for_each(grid, [&](auto, std::uint64_t, double w, double v) {
        const double dev = v - m.mean;
        double power = w;
        for (std::size_t p = 0; p < orders; ++p) {
            accumulate(sums[p], comps[p], power);
            power *= dev;
        }
    });
    m.central.resize(orders);
    for (std::size_t p = 0; p < orders; ++p) m.central[p] = (sums[p] + comps[p]) / total_weight;
    m.central[1] = 0.0;
    return m;
}

RiskMeasures risk_measures(const GridValues& values, const TensorGrid& grid, double threshold, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
    std::vector<std::pair<double, double>> atoms;  // (value, weight)
    atoms.reserve(grid.total_points());
    double exceed = 0.0, total = 0.0;
    values.for_each(grid, [&](auto, std::uint64_t, double w, double v) {
        atoms.emplace_back(v, w);
        total += w;
        if (v > threshold) exceed += w;
    });
    std::stable_sort(atoms.begin(), atoms.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

    const double tail_mass = (1.0 - alpha) * total;
    double mass = 0.0, acc = 0.0;
    for (const auto& [v, w] : atoms) {
        const double take = std::min(w, tail_mass - mass);
        if (take <= 0.0) break;
        acc += take * v;
        mass += take;
    }
    return {exceed / total, acc / mass};
}

namespace {

template <class T>
void put(std::ofstream& out, T value) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get(std::ifstream& in) {
    unsigned char bytes[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw InvalidArgument("truncated grid dump");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

}  // namespace

void write_grid_values(const std::string& path, const TensorGrid& grid, const GridValues& values) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot open '" + path + "' for writing");
    put<std::uint64_t>(out, grid.dim());
    for (const auto& a : grid.axes()) put<std::uint64_t>(out, a.size());
    for (const auto& a : grid.axes())
        for (double x : a.nodes) put<double>(out, x);
    values.for_each(grid, [&](auto, std::uint64_t, double, double v) { put<double>(out, v); });
    if (!out) throw InvalidArgument("failed writing '" + path + "'");
}

GridDump read_grid_values(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open '" + path + "'");
    GridDump dump;
    const auto d = get<std::uint64_t>(in);
    if (d > 4096) throw InvalidArgument("implausible dimension in grid dump");
    std::vector<std::uint64_t> sizes(d);
    std::uint64_t total = 1;
    for (auto& s : sizes) {
        s = get<std::uint64_t>(in);
        total *= s;
    }
    dump.axis_nodes.resize(d);
    for (std::size_t a = 0; a < d; ++a)
        for (std::uint64_t q = 0; q < sizes[a]; ++q) dump.axis_nodes[a].push_back(get<double>(in));
    dump.values.reserve(total);
    for (std::uint64_t i = 0; i < total; ++i) dump.values.push_back(get<double>(in));
    if (in.peek() != std::char_traits<char>::eof()) throw InvalidArgument("trailing bytes in grid dump");
    return dump;
}

}  // namespace gudr
