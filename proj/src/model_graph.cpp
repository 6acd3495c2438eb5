// SPDX-License-Identifier: MIT
#include "gudr/model_graph.hpp"

#include "gudr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <iterator>

namespace gudr {
namespace {

std::uint64_t bits_of(double v) {
    std::uint64_t b;
    std::memcpy(&b, &v, sizeof b);
    return b;
}

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double int_power(double base, std::int64_t exponent) {
    const bool invert = exponent < 0;
    std::uint64_t e = invert ? static_cast<std::uint64_t>(-exponent) : static_cast<std::uint64_t>(exponent);
    double result = 1.0;
    double b = base;
    while (e) {
        if (e & 1u) result *= b;
        b *= b;
        e >>= 1u;
    }
    return invert ? 1.0 / result : result;
}

}  // namespace

const char* op_name(Op op) noexcept {
    switch (op) {
        case Op::Input: return "Input";
        case Op::Constant: return "Constant";
        case Op::Neg: return "Neg";
        case Op::Add: return "Add";
        case Op::Sub: return "Sub";
        case Op::Mul: return "Mul";
        case Op::Div: return "Div";
        case Op::PowInt: return "PowInt";
        case Op::PowReal: return "PowReal";
        case Op::Exp: return "Exp";
        case Op::Log: return "Log";
        case Op::Sqrt: return "Sqrt";
        case Op::Sin: return "Sin";
        case Op::Cos: return "Cos";
    }
    return "?";
}

bool is_unary(Op op) noexcept {
    switch (op) {
        case Op::Neg:
        case Op::PowInt:
        case Op::PowReal:
        case Op::Exp:
        case Op::Log:
        case Op::Sqrt:
        case Op::Sin:
        case Op::Cos: return true;
        default: return false;
    }
}

bool is_binary(Op op) noexcept {
    return op == Op::Add || op == Op::Sub || op == Op::Mul || op == Op::Div;
}

double apply_op(const Node& n, double a, double b, std::size_t node) {
    double r = 0.0;
    switch (n.op) {
        case Op::Input: r = a; break;
        case Op::Constant: r = n.value; break;
        case Op::Neg: r = -a; break;
        case Op::Add: r = a + b; break;
        case Op::Sub: r = a - b; break;
        case Op::Mul: r = a * b; break;
        case Op::Div:
            if (b == 0.0) throw EvaluationError(node, "division by zero at node " + std::to_string(node));
            r = a / b;
            break;
        case Op::PowInt: r = int_power(a, n.exponent); break;
        case Op::PowReal:
            if (!(a > 0.0)) {
                throw EvaluationError(node, "non-integer power of non-positive base at node " +
                                                std::to_string(node));
            }
            r = std::pow(a, n.value);
            break;
        case Op::Exp: r = std::exp(a); break;
        case Op::Log:
            if (!(a > 0.0)) throw EvaluationError(node, "log of non-positive value at node " + std::to_string(node));
            r = std::log(a);
            break;
        case Op::Sqrt:
            if (a < 0.0) throw EvaluationError(node, "sqrt of negative value at node " + std::to_string(node));
            r = std::sqrt(a);
            break;
        case Op::Sin: r = std::sin(a); break;
        case Op::Cos: r = std::cos(a); break;
    }
    if (!std::isfinite(r)) {
        throw EvaluationError(node, std::string("non-finite value from ") + op_name(n.op) + " at node " +
                                        std::to_string(node));
    }
    return r;
}

void ModelGraph::evaluate_all(std::span<const double> point, std::span<double> values) const {
    if (point.size() != input_count_) {
        throw InvalidArgument("point has " + std::to_string(point.size()) + " coordinates, model expects " +
                              std::to_string(input_count_));
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const Node& n = nodes_[i];
        switch (n.op) {
            case Op::Input: values[i] = apply_op(n, point[n.input], 0.0, i); break;
            case Op::Constant: values[i] = n.value; break;
            default: {
                const double a = values[n.lhs];
                const double b = n.rhs == kNoOperand ? 0.0 : values[n.rhs];
                values[i] = apply_op(n, a, b, i);
            }
        }
    }
}

double ModelGraph::evaluate(std::span<const double> point) const {
    std::vector<double> values(nodes_.size());
    evaluate_all(point, values);
    return values[output_];
}

std::string ModelGraph::to_string() const {
    std::vector<std::string> text(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const Node& n = nodes_[i];
        const std::string a = n.lhs == kNoOperand ? "" : text[n.lhs];
        const std::string b = n.rhs == kNoOperand ? "" : text[n.rhs];
        switch (n.op) {
            case Op::Input: text[i] = "x" + std::to_string(n.input + 1); break;
            case Op::Constant:
                text[i] = n.value < 0.0 ? "(-" + format_real(-n.value) + ")" : format_real(n.value);
                break;
            case Op::Neg: text[i] = "(-" + a + ")"; break;
            case Op::Add: text[i] = "(" + a + " + " + b + ")"; break;
            case Op::Sub: text[i] = "(" + a + " - " + b + ")"; break;
            case Op::Mul: text[i] = "(" + a + " * " + b + ")"; break;
            case Op::Div: text[i] = "(" + a + " / " + b + ")"; break;
            case Op::PowInt: text[i] = "(" + a + "^" + std::to_string(n.exponent) + ")"; break;
            case Op::PowReal: text[i] = "(" + a + "^" + format_real(n.value) + ")"; break;
            case Op::Exp: text[i] = "exp(" + a + ")"; break;
            case Op::Log: text[i] = "log(" + a + ")"; break;
            case Op::Sqrt: text[i] = "sqrt(" + a + ")"; break;
            case Op::Sin: text[i] = "sin(" + a + ")"; break;
            case Op::Cos: text[i] = "cos(" + a + ")"; break;
        }
    }
    return nodes_.empty() ? std::string("0") : text[output_];
}

std::vector<DepSet> dependency_sets(const ModelGraph& graph) { return graph.dep_sets(); }

std::size_t GraphBuilder::add(const Node& n) {
    const Key key{n.op, n.lhs, n.rhs, n.input, bits_of(n.value), n.exponent};
    if (auto it = index_.find(key); it != index_.end()) return it->second;
    nodes_.push_back(n);
    index_.emplace(key, nodes_.size() - 1);
    return nodes_.size() - 1;
}

std::size_t GraphBuilder::input(std::size_t index) {
    if (index >= seen_inputs_.size()) seen_inputs_.resize(index + 1, false);
    seen_inputs_[index] = true;
    if (max_input_ == static_cast<std::size_t>(-1) || index > max_input_) max_input_ = index;
    Node n;
    n.op = Op::Input;
    n.input = index;
    return add(n);
}

std::size_t GraphBuilder::constant(double value) {
    if (!std::isfinite(value)) throw InvalidArgument("model constants must be finite");
    Node n;
    n.op = Op::Constant;
    n.value = value == 0.0 ? 0.0 : value;  // fold -0.0
    return add(n);
}

std::size_t GraphBuilder::unary(Op op, std::size_t operand) {
    if (!is_unary(op) || op == Op::PowInt || op == Op::PowReal) {
        throw InvalidArgument(std::string("not a plain unary op: ") + op_name(op));
    }
    if (operand >= nodes_.size()) throw InvalidArgument("operand refers to a missing node");
    Node n;
    n.op = op;
    n.lhs = operand;
    return add(n);
}

std::size_t GraphBuilder::binary(Op op, std::size_t lhs, std::size_t rhs) {
    if (!is_binary(op)) throw InvalidArgument(std::string("not a binary op: ") + op_name(op));
    if (lhs >= nodes_.size() || rhs >= nodes_.size()) throw InvalidArgument("operand refers to a missing node");
    Node n;
    n.op = op;
    n.lhs = lhs;
    n.rhs = rhs;
    return add(n);
}

std::size_t GraphBuilder::pow_int(std::size_t base, std::int64_t exponent) {
    if (base >= nodes_.size()) throw InvalidArgument("operand refers to a missing node");
    Node n;
    n.op = Op::PowInt;
    n.lhs = base;
    n.exponent = exponent;
    return add(n);
}

std::size_t GraphBuilder::pow_real(std::size_t base, double exponent) {
    if (base >= nodes_.size()) throw InvalidArgument("operand refers to a missing node");
    if (!std::isfinite(exponent)) throw InvalidArgument("exponent must be finite");
    if (exponent == std::trunc(exponent) && std::abs(exponent) < 9.0e15) {
        return pow_int(base, static_cast<std::int64_t>(exponent));
    }
    Node n;
    n.op = Op::PowReal;
    n.lhs = base;
    n.value = exponent;
    return add(n);
}

bool GraphBuilder::references_input(std::size_t index) const {
    return index < seen_inputs_.size() && seen_inputs_[index];
}

ModelGraph GraphBuilder::finish(std::size_t output, std::size_t input_count) && {
    if (nodes_.empty()) throw InvalidArgument("empty model graph");
    if (output >= nodes_.size()) throw InvalidArgument("output refers to a missing node");
    if (max_input_ != static_cast<std::size_t>(-1) && max_input_ >= input_count) {
        throw DimensionError("model references x" + std::to_string(max_input_ + 1) + " but has dimension " +
                             std::to_string(input_count));
    }

    // Keep only nodes reachable from the output, preserving order.
    std::vector<bool> live(nodes_.size(), false);
    live[output] = true;
    for (std::size_t i = nodes_.size(); i-- > 0;) {
        if (!live[i]) continue;
        if (nodes_[i].lhs != kNoOperand) live[nodes_[i].lhs] = true;
        if (nodes_[i].rhs != kNoOperand) live[nodes_[i].rhs] = true;
    }
    std::vector<std::size_t> remap(nodes_.size(), kNoOperand);

    ModelGraph g;
    g.input_count_ = input_count;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (!live[i]) continue;
        Node n = nodes_[i];
        if (n.lhs != kNoOperand) n.lhs = remap[n.lhs];
        if (n.rhs != kNoOperand) n.rhs = remap[n.rhs];
        DepSet deps;
        if (n.op == Op::Input) {
            deps = {n.input};
        } else if (n.lhs != kNoOperand) {
            const DepSet& a = g.dep_sets_[n.lhs];
            if (n.rhs == kNoOperand) {
                deps = a;
            } else {
                const DepSet& b = g.dep_sets_[n.rhs];
                std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(deps));
            }
        }
        remap[i] = g.nodes_.size();
        g.nodes_.push_back(n);
        g.dep_sets_.push_back(std::move(deps));
    }
    g.output_ = remap[output];
    return g;
}

}  // namespace gudr
