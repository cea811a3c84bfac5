#pragma once

#include "evosr/matrix.hpp"
#include "evosr/rng.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace evosr {

inline constexpr int kMaxTreeSize = 100;

enum class Op : std::uint8_t { Add, Sub, Mul, ProtDiv, ProtSqrt, ProtLog, Variable, Constant };

constexpr int arity(Op op) noexcept
{
    switch (op) {
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::ProtDiv:
        return 2;
    case Op::ProtSqrt:
    case Op::ProtLog:
        return 1;
    case Op::Variable:
    case Op::Constant:
        return 0;
    }
    return 0;
}

struct Node {
    Op op = Op::Constant;
    std::uint32_t var = 0; // Variable only
    double value = 0.0;    // Constant only

    friend bool operator==(const Node&, const Node&) = default;
};

// Protected primitives. Total for finite input.
double protected_div(double a, double b) noexcept;
double protected_sqrt(double x) noexcept;
double protected_log(double x) noexcept;

// Rounds to the 9 significant digits used by the text format, so that
// constants survive a print/parse round trip bit-for-bit.
double quantize_constant(double v) noexcept;

class StructuralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Expression tree stored as a prefix-order node sequence. A node locator is
// its prefix index; the subtree rooted at i occupies [i, subtree_end(i)).
class ExpressionTree {
public:
    ExpressionTree() = default;
    // Throws StructuralError if the sequence is not a single well-formed tree.
    explicit ExpressionTree(std::vector<Node> prefix);

    static ExpressionTree constant(double v);
    static ExpressionTree variable(std::uint32_t index);
    static ExpressionTree unary(Op op, const ExpressionTree& child);
    static ExpressionTree binary(Op op, const ExpressionTree& lhs, const ExpressionTree& rhs);

    [[nodiscard]] int size() const noexcept { return static_cast<int>(nodes_.size()); }
    [[nodiscard]] bool empty() const noexcept { return nodes_.empty(); }
    [[nodiscard]] std::span<const Node> nodes() const noexcept { return nodes_; }
    [[nodiscard]] const Node& node(std::size_t i) const { return nodes_.at(i); }

    [[nodiscard]] std::size_t subtree_end(std::size_t i) const;
    [[nodiscard]] int subtree_size(std::size_t i) const { return static_cast<int>(subtree_end(i) - i); }
    [[nodiscard]] std::vector<std::size_t> children(std::size_t i) const;
    [[nodiscard]] ExpressionTree subtree(std::size_t i) const;
    [[nodiscard]] int depth() const;
    [[nodiscard]] std::uint32_t max_variable_index() const noexcept;

    // Copy of this tree with the subtree at `at` replaced by `replacement`.
    [[nodiscard]] ExpressionTree replace_subtree(std::size_t at, const ExpressionTree& replacement) const;

    friend bool operator==(const ExpressionTree&, const ExpressionTree&) = default;

private:
    std::vector<Node> nodes_;
};

// Reusable buffers for column-wise interpretation.
class Evaluator {
public:
    std::vector<double> evaluate(const ExpressionTree& tree, const Matrix& features);
    void evaluate_into(const ExpressionTree& tree, const Matrix& features, std::vector<double>& out);

private:
    std::vector<std::vector<double>> stack_;
};

// One prediction per row. Throws StructuralError on a variable index >= cols.
std::vector<double> evaluate(const ExpressionTree& tree, const Matrix& features);

inline int size(const ExpressionTree& tree) noexcept { return tree.size(); }

// Uniform over all nodes, root included.
std::size_t random_subtree_locator(const ExpressionTree& tree, Rng& rng);

// "(x0 + 1.00000000)", "sqrt(x1)", "log(x0)", binary ops + - * /.
std::string to_string(const ExpressionTree& tree);
ExpressionTree parse_expression(std::string_view text);

} // namespace evosr
