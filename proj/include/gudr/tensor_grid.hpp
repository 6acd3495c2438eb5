// SPDX-License-Identifier: MIT
#pragma once

#include "gudr/autodiff.hpp"
#include "gudr/errors.hpp"
#include "gudr/model_graph.hpp"
#include "gudr/quadrature.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace gudr {

inline constexpr std::size_t kDefaultMaxBufferValues = 10'000'000;

/// Cartesian product of per-axis rules. Flat indices are row-major with
/// axis 0 varying slowest.
class TensorGrid {
public:
    explicit TensorGrid(std::vector<QuadratureRule1D> axes);

    std::size_t dim() const noexcept { return axes_.size(); }
    const QuadratureRule1D& axis(std::size_t i) const { return axes_.at(i); }
    const std::vector<QuadratureRule1D>& axes() const noexcept { return axes_; }
    std::size_t axis_size(std::size_t i) const { return axes_.at(i).size(); }

    /// Product of axis sizes; throws InvalidArgument if it overflows 64 bits.
    std::uint64_t total_points() const noexcept { return total_; }

    std::uint64_t flat_index(std::span<const std::size_t> multi) const;
    void multi_index(std::uint64_t flat, std::span<std::size_t> multi) const;

    /// Product of the axis weights, multiplied in axis order.
    double weight(std::span<const std::size_t> multi) const;

    /// Grid point coordinates for a multi-index.
    void point(std::span<const std::size_t> multi, std::span<double> out) const;

private:
    std::vector<QuadratureRule1D> axes_;
    std::uint64_t total_ = 1;
};

/// Values of some function on every point of a TensorGrid, either stored
/// in iteration order or produced on demand by a pointwise evaluator.
class GridValues {
public:
    using PointFn = std::function<double(std::span<const std::size_t>)>;
    /// Creates an independent evaluator per traversal (each owns its scratch).
    using PointFnFactory = std::function<PointFn()>;

    static GridValues materialized(std::vector<double> values);
    static GridValues streaming(PointFnFactory factory);

    bool is_materialized() const noexcept { return !factory_; }

    /// Stored values; throws if this is a streaming instance.
    std::span<const double> values() const;

    /// Visits every point in iteration order with (multi, flat, weight, value).
    template <class Visitor>
    void for_each(const TensorGrid& grid, Visitor&& visit) const;

    /// Stored copy of the values (for streaming instances, evaluates them all).
    std::vector<double> to_vector(const TensorGrid& grid) const;

private:
    std::vector<double> values_;
    PointFnFactory factory_;
};

enum class GridMode { Materialized, Streaming };

/// Gradient-enhanced surrogate on every grid point; pure combination of
/// `components`, no model evaluations. At multi-index q with offsets
/// delta_j = u_j - mu_j:
///
///   sum_i f_i(u_i) - (d-1) [f(mu) + delta . grad f(mu)]
///   + sum_i sum_{j != i} delta_j df/du_j(slice i at u_i)
///   - sum_{i<j} H_ij(mu) delta_i delta_j
GridValues combine_gudr(const GudrComponents& components, const TensorGrid& grid, GridMode mode,
                        std::size_t max_buffer_values = kDefaultMaxBufferValues);

/// Plain univariate surrogate sum_i f_i(u_i) - (d-1) f(mu) on every grid point.
GridValues combine_udr(const GudrComponents& components, const TensorGrid& grid, GridMode mode,
                       std::size_t max_buffer_values = kDefaultMaxBufferValues);

struct GridMoments {
    double mean = 0.0;
    /// central[p] = sum w (v - mean)^p / sum w for p = 0..max_order; central[1] is 0.
    std::vector<double> central;
    double variance() const { return central.at(2); }
};

/// Weighted mean and central moments, two passes over the grid.
GridMoments weighted_moments(const GridValues& values, const TensorGrid& grid, int max_order);

struct RiskMeasures {
    double exceedance_probability = 0.0;
    double cvar_upper = 0.0;
};

/// P[v > threshold] and the mean of the upper tail holding mass 1 - alpha,
/// splitting the boundary atom fractionally.
RiskMeasures risk_measures(const GridValues& values, const TensorGrid& grid, double threshold, double alpha);

/// Binary dump: u64 d, u64 axis sizes, f64 axis nodes, f64 values in
/// iteration order, all little-endian.
void write_grid_values(const std::string& path, const TensorGrid& grid, const GridValues& values);

struct GridDump {
    std::vector<std::vector<double>> axis_nodes;
    std::vector<double> values;
};
GridDump read_grid_values(const std::string& path);

// --- implementation ---------------------------------------------------------

template <class Visitor>
void GridValues::for_each(const TensorGrid& grid, Visitor&& visit) const {
    const std::size_t d = grid.dim();
    const std::uint64_t total = grid.total_points();
    if (is_materialized() && values_.size() != total) {
        throw InvalidArgument("grid values do not match the grid size");
    }
    PointFn fn = is_materialized() ? PointFn{} : factory_();
    std::vector<std::size_t> multi(d, 0);
    for (std::uint64_t flat = 0; flat < total; ++flat) {
        const double w = grid.weight(multi);
        const double v = is_materialized() ? values_[flat] : fn(multi);
        visit(std::span<const std::size_t>(multi), flat, w, v);
        for (std::size_t a = d; a-- > 0;) {
            if (++multi[a] < grid.axis_size(a)) break;
            multi[a] = 0;
        }
    }
}

}  // namespace gudr
