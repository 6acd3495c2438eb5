// SPDX-License-Identifier: MIT
#include "gudr/distributions.hpp"

#include "gudr/errors.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>

namespace gudr {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double double_factorial(int n) {
    double r = 1.0;
    for (int i = n; i > 1; i -= 2) r *= i;
    return r;
}

std::string format_real(double v) {
    // Shortest text that parses back to the same double.
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string strip_spaces(std::string_view s) {
    std::string out;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
    return out;
}

double parse_real(const std::string& text, std::string_view literal) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(v)) {
        throw InvalidArgument("bad number '" + text + "' in distribution literal '" +
                              std::string(literal) + "'");
    }
    return v;
}

}  // namespace

Distribution Distribution::normal(double mean, double std) {
    if (!std::isfinite(mean) || !std::isfinite(std) || !(std > 0.0)) {
        throw InvalidArgument("normal distribution needs finite mean and std > 0");
    }
    return Distribution(Normal{mean, std});
}

Distribution Distribution::uniform(double lower, double upper) {
    if (!std::isfinite(lower) || !std::isfinite(upper) || !(lower < upper)) {
        throw InvalidArgument("uniform distribution needs finite lower < upper");
    }
    return Distribution(Uniform{lower, upper});
}

Distribution Distribution::parse(std::string_view literal) {
    const std::string s = strip_spaces(literal);
    const auto open = s.find('(');
    const auto comma = s.find(',');
    if (s.size() < 5 || open != 1 || comma == std::string::npos || s.back() != ')' ||
        s.find(',', comma + 1) != std::string::npos) {
        throw InvalidArgument("bad distribution literal '" + std::string(literal) +
                              "', expected N(mean,std) or U(lower,upper)");
    }
    const double a = parse_real(s.substr(2, comma - 2), literal);
    const double b = parse_real(s.substr(comma + 1, s.size() - comma - 2), literal);
    switch (s[0]) {
        case 'N': return normal(a, b);
        case 'U': return uniform(a, b);
        default:
            throw InvalidArgument("unknown distribution family in '" + std::string(literal) + "'");
    }
}

double Distribution::mean() const noexcept {
    return std::visit(Overloaded{[](const Normal& n) { return n.mean; },
                                 [](const Uniform& u) { return 0.5 * (u.lower + u.upper); }},
                      kind_);
}

double Distribution::central_moment(int order) const {
    if (order < 0) throw InvalidArgument("central moment order must be >= 0");
    if (order == 0) return 1.0;
    if (order % 2 == 1) return 0.0;
    return std::visit(
        Overloaded{[&](const Normal& n) { return std::pow(n.std, order) * double_factorial(order - 1); },
                   [&](const Uniform& u) {
                       return std::pow(u.upper - u.lower, order) /
                              (std::pow(2.0, order) * (order + 1));
                   }},
        kind_);
}

std::vector<double> Distribution::sample(Rng& rng, std::size_t count) const {
    std::vector<double> out(count);
    std::visit(Overloaded{[&](const Normal& n) {
                              std::normal_distribution<double> law(n.mean, n.std);
                              for (double& v : out) v = law(rng);
                          },
                          [&](const Uniform& u) {
                              std::uniform_real_distribution<double> law(u.lower, u.upper);
                              for (double& v : out) v = law(rng);
                          }},
               kind_);
    return out;
}

QuadratureRule1D Distribution::make_rule(std::size_t k) const {
    return std::visit(Overloaded{[&](const Normal& n) {
                                     QuadratureRule1D r = gauss_hermite(k);
                                     for (double& x : r.nodes) x = n.mean + n.std * x;
                                     return r;
                                 },
                                 [&](const Uniform& u) {
                                     QuadratureRule1D r = gauss_legendre(k);
                                     const double mid = 0.5 * (u.lower + u.upper);
                                     const double half = 0.5 * (u.upper - u.lower);
                                     for (double& x : r.nodes) x = mid + half * x;
                                     return r;
                                 }},
                      kind_);
}

std::string Distribution::to_string() const {
    return std::visit(
        Overloaded{[](const Normal& n) { return "N(" + format_real(n.mean) + "," + format_real(n.std) + ")"; },
                   [](const Uniform& u) {
                       return "U(" + format_real(u.lower) + "," + format_real(u.upper) + ")";
                   }},
        kind_);
}

bool operator==(const Distribution& a, const Distribution& b) {
    if (a.kind_.index() != b.kind_.index()) return false;
    if (const auto* n = std::get_if<Normal>(&a.kind_)) {
        const auto& m = std::get<Normal>(b.kind_);
        return n->mean == m.mean && n->std == m.std;
    }
    const auto& u = std::get<Uniform>(a.kind_);
    const auto& v = std::get<Uniform>(b.kind_);
    return u.lower == v.lower && u.upper == v.upper;
}

InputSpace::InputSpace(std::vector<Distribution> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw InvalidArgument("input space needs at least one dimension");
}

InputSpace InputSpace::parse(std::string_view literals) {
    std::vector<Distribution> dims;
    std::size_t depth = 0, start = 0;
    for (std::size_t i = 0; i <= literals.size(); ++i) {
        const char c = i < literals.size() ? literals[i] : ',';
        if (c == '(') ++depth;
        if (c == ')' && depth > 0) --depth;
        if (c == ',' && depth == 0) {
            const std::string_view item = literals.substr(start, i - start);
            if (strip_spaces(item).empty()) {
                throw InvalidArgument("empty entry in distribution list '" + std::string(literals) + "'");
            }
            dims.push_back(Distribution::parse(item));
            start = i + 1;
        }
    }
    return InputSpace(std::move(dims));
}

InputSpace InputSpace::iid(const Distribution& dist, std::size_t d) {
    return InputSpace(std::vector<Distribution>(d, dist));
}

std::vector<double> InputSpace::mean_vector() const {
    std::vector<double> mu;
    mu.reserve(dims_.size());
    for (const auto& d : dims_) mu.push_back(d.mean());
    return mu;
}

std::vector<QuadratureRule1D> InputSpace::rules(std::size_t k) const {
    std::vector<QuadratureRule1D> out;
    out.reserve(dims_.size());
    for (const auto& d : dims_) out.push_back(d.make_rule(k));
    return out;
}

std::string InputSpace::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < dims_.size(); ++i) {
        if (i) out += ',';
        out += dims_[i].to_string();
    }
    return out;
}

}  // namespace gudr
