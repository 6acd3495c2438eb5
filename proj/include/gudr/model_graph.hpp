// SPDX-License-Identifier: MIT
#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace gudr {

enum class Op : std::uint8_t {
    Input,
    Constant,
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    PowInt,   // integer exponent, repeated multiplication
    PowReal,  // non-integer exponent, positive base only
    Exp,
    Log,
    Sqrt,
    Sin,
    Cos,
};

const char* op_name(Op op) noexcept;
bool is_unary(Op op) noexcept;
bool is_binary(Op op) noexcept;

inline constexpr std::size_t kNoOperand = static_cast<std::size_t>(-1);

struct Node {
    Op op = Op::Constant;
    std::size_t lhs = kNoOperand;
    std::size_t rhs = kNoOperand;
    std::size_t input = 0;      // Input
    double value = 0.0;         // Constant, PowReal exponent
    std::int64_t exponent = 0;  // PowInt
};

/// Sorted list of input indices a node depends on.
using DepSet = std::vector<std::size_t>;

/// Scalar model as a topologically ordered operation DAG.
///
/// Operands always refer to earlier nodes, so a single forward sweep
/// evaluates the graph. Immutable once built; evaluation is reentrant.
class ModelGraph {
public:
    std::size_t input_count() const noexcept { return input_count_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    const Node& node(std::size_t i) const { return nodes_.at(i); }
    std::size_t output() const noexcept { return output_; }

    /// Per-node dependency sets: {i} for Input(i), empty for constants and the
    /// union of operand sets otherwise.
    const std::vector<DepSet>& dep_sets() const noexcept { return dep_sets_; }

    /// f(point). Throws EvaluationError on a non-finite node value.
    double evaluate(std::span<const double> point) const;

    /// Writes every node value into `values` (size() entries).
    void evaluate_all(std::span<const double> point, std::span<double> values) const;

    /// Fully parenthesized expression that parses back to an equivalent graph.
    std::string to_string() const;

private:
    friend class GraphBuilder;
    std::vector<Node> nodes_;
    std::vector<DepSet> dep_sets_;
    std::size_t output_ = 0;
    std::size_t input_count_ = 0;
};

/// Dependency sets of `graph`, one per node.
std::vector<DepSet> dependency_sets(const ModelGraph& graph);

/// Value of a single elementary operation. Throws EvaluationError (tagged with
/// `node`) for domain errors and non-finite results.
double apply_op(const Node& n, double a, double b, std::size_t node);

/// Incremental graph construction with structural sharing: adding a node that
/// already exists returns the existing index.
class GraphBuilder {
public:
    std::size_t input(std::size_t index);
    std::size_t constant(double value);
    std::size_t unary(Op op, std::size_t operand);
    std::size_t binary(Op op, std::size_t lhs, std::size_t rhs);
    std::size_t pow_int(std::size_t base, std::int64_t exponent);
    std::size_t pow_real(std::size_t base, double exponent);

    /// Finalizes the graph. `input_count` must cover every referenced input.
    ModelGraph finish(std::size_t output, std::size_t input_count) &&;

    std::size_t max_input_referenced() const noexcept { return max_input_ + 1; }
    bool references_input(std::size_t index) const;

private:
    std::size_t add(const Node& n);

    using Key = std::tuple<Op, std::size_t, std::size_t, std::size_t, std::uint64_t, std::int64_t>;
    std::vector<Node> nodes_;
    std::map<Key, std::size_t> index_;
    std::vector<bool> seen_inputs_;
    std::size_t max_input_ = static_cast<std::size_t>(-1);
};

/// Parses the model expression language.
///
/// Variables are x1..xd, constants `pi` and `e`, unary functions exp, log,
/// sqrt, sin, cos. Precedence from tightest: unary minus, `^`
/// (right-associative), `*` `/`, `+` `-`. When `declared_dim` is absent the
/// dimension is the largest variable index, and every x_i below it must appear.
ModelGraph parse_model(std::string_view text, std::optional<std::size_t> declared_dim = std::nullopt);

}  // namespace gudr
