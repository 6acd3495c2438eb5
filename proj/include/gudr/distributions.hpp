// SPDX-License-Identifier: MIT
#pragma once

#include "gudr/quadrature.hpp"

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace gudr {

using Rng = std::mt19937_64;

struct Normal {
    double mean;
    double std;
};

struct Uniform {
    double lower;
    double upper;
};

/// Law of one independent input. Immutable after construction.
class Distribution {
public:
    using Kind = std::variant<Normal, Uniform>;

    static Distribution normal(double mean, double std);
    static Distribution uniform(double lower, double upper);

    /// Parses `N(mean,std)` or `U(lower,upper)`; whitespace is ignored.
    static Distribution parse(std::string_view literal);

    const Kind& kind() const noexcept { return kind_; }

    double mean() const noexcept;
    double variance() const noexcept { return central_moment(2); }

    /// E[(X - mean)^order]. Both supported laws are symmetric, so odd orders are 0.
    double central_moment(int order) const;

    /// `count` i.i.d. draws from `rng`.
    std::vector<double> sample(Rng& rng, std::size_t count) const;

    /// Gauss rule matched to the law: Hermite nodes `mean + std*z` for a
    /// normal, Legendre nodes mapped onto [lower, upper] for a uniform.
    QuadratureRule1D make_rule(std::size_t k) const;

    /// Literal form accepted by parse(), with round-trip precision.
    std::string to_string() const;

    friend bool operator==(const Distribution& a, const Distribution& b);

private:
    explicit Distribution(Kind kind) : kind_(kind) {}
    Kind kind_;
};

/// Ordered list of d >= 1 independent inputs.
class InputSpace {
public:
    explicit InputSpace(std::vector<Distribution> dims);

    /// Comma-separated distribution literals, e.g. "N(0,1),U(-1,1)".
    static InputSpace parse(std::string_view literals);

    /// d copies of the same law.
    static InputSpace iid(const Distribution& dist, std::size_t d);

    std::size_t dim() const noexcept { return dims_.size(); }
    const Distribution& operator[](std::size_t i) const { return dims_.at(i); }
    const std::vector<Distribution>& dims() const noexcept { return dims_; }

    std::vector<double> mean_vector() const;
    std::vector<QuadratureRule1D> rules(std::size_t k) const;
    std::string to_string() const;

private:
    std::vector<Distribution> dims_;
};

}  // namespace gudr
