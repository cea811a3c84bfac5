#include "evosr/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace evosr {

namespace {
constexpr double kProtectionEps = 1e-6;
}

double protected_div(double a, double b) noexcept
{
    return std::abs(b) <= kProtectionEps ? 1.0 : a / b;
}

double protected_sqrt(double x) noexcept { return std::sqrt(std::abs(x)); }

double protected_log(double x) noexcept
{
    return std::abs(x) <= kProtectionEps ? 0.0 : std::log(std::abs(x));
}

double quantize_constant(double v) noexcept
{
    if (!std::isfinite(v)) {
        return v;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%#.9g", v);
    return std::strtod(buf, nullptr);
}

ExpressionTree::ExpressionTree(std::vector<Node> prefix) : nodes_(std::move(prefix))
{
    if (nodes_.empty()) {
        throw StructuralError("expression tree must have at least one node");
    }
    // Every node consumes one open slot and opens arity() new ones.
    long open = 1;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (open == 0) {
            throw StructuralError("trailing nodes after a complete tree");
        }
        open += arity(nodes_[i].op) - 1;
    }
    if (open != 0) {
        throw StructuralError("incomplete tree: missing children");
    }
}

ExpressionTree ExpressionTree::constant(double v)
{
    return ExpressionTree({Node{Op::Constant, 0, v}});
}

ExpressionTree ExpressionTree::variable(std::uint32_t index)
{
    return ExpressionTree({Node{Op::Variable, index, 0.0}});
}

ExpressionTree ExpressionTree::unary(Op op, const ExpressionTree& child)
{
    if (arity(op) != 1) {
        throw StructuralError("unary() requires a unary operator");
    }
    std::vector<Node> nodes;
    nodes.reserve(child.nodes_.size() + 1);
    nodes.push_back(Node{op, 0, 0.0});
    nodes.insert(nodes.end(), child.nodes_.begin(), child.nodes_.end());
    return ExpressionTree(std::move(nodes));
}

ExpressionTree ExpressionTree::binary(Op op, const ExpressionTree& lhs, const ExpressionTree& rhs)
{
    if (arity(op) != 2) {
        throw StructuralError("binary() requires a binary operator");
    }
    std::vector<Node> nodes;
    nodes.reserve(lhs.nodes_.size() + rhs.nodes_.size() + 1);
    nodes.push_back(Node{op, 0, 0.0});
    nodes.insert(nodes.end(), lhs.nodes_.begin(), lhs.nodes_.end());
    nodes.insert(nodes.end(), rhs.nodes_.begin(), rhs.nodes_.end());
    return ExpressionTree(std::move(nodes));
}

std::size_t ExpressionTree::subtree_end(std::size_t i) const
{
    if (i >= nodes_.size()) {
        throw std::out_of_range("node locator out of range");
    }
    long open = 1;
    std::size_t j = i;
    while (open > 0) {
        open += arity(nodes_[j].op) - 1;
        ++j;
    }
    return j;
}

std::vector<std::size_t> ExpressionTree::children(std::size_t i) const
{
    std::vector<std::size_t> out;
    const int n = arity(nodes_.at(i).op);
    std::size_t child = i + 1;
    for (int k = 0; k < n; ++k) {
        out.push_back(child);
        child = subtree_end(child);
    }
    return out;
}

ExpressionTree ExpressionTree::subtree(std::size_t i) const
{
    const auto end = subtree_end(i);
    return ExpressionTree(std::vector<Node>(nodes_.begin() + static_cast<long>(i), nodes_.begin() + static_cast<long>(end)));
}

int ExpressionTree::depth() const
{
    // Depth in edges: a single leaf has depth 0.
    std::vector<int> pending; // remaining child slots per open ancestor
    int best = 0;
    for (const auto& n : nodes_) {
        const int d = static_cast<int>(pending.size());
        best = std::max(best, d);
        if (!pending.empty()) {
            --pending.back();
        }
        if (arity(n.op) > 0) {
            pending.push_back(arity(n.op));
        }
        while (!pending.empty() && pending.back() == 0) {
            pending.pop_back();
        }
    }
    return best;
}

std::uint32_t ExpressionTree::max_variable_index() const noexcept
{
    std::uint32_t best = 0;
    for (const auto& n : nodes_) {
        if (n.op == Op::Variable) {
            best = std::max(best, n.var);
        }
    }
    return best;
}

ExpressionTree ExpressionTree::replace_subtree(std::size_t at, const ExpressionTree& replacement) const
{
    const auto end = subtree_end(at);
    std::vector<Node> nodes;
    nodes.reserve(nodes_.size() - (end - at) + replacement.nodes_.size());
    nodes.insert(nodes.end(), nodes_.begin(), nodes_.begin() + static_cast<long>(at));
    nodes.insert(nodes.end(), replacement.nodes_.begin(), replacement.nodes_.end());
    nodes.insert(nodes.end(), nodes_.begin() + static_cast<long>(end), nodes_.end());
    ExpressionTree out;
    out.nodes_ = std::move(nodes);
    return out;
}

void Evaluator::evaluate_into(const ExpressionTree& tree, const Matrix& features, std::vector<double>& out)
{
    const std::size_t n = features.rows();
    const auto nodes = tree.nodes();
    std::size_t top = 0; // number of live stack entries

    auto push = [&]() -> std::vector<double>& {
        if (stack_.size() <= top) {
            stack_.emplace_back();
        }
        auto& buf = stack_[top++];
        buf.resize(n);
        return buf;
    };

    for (std::size_t k = nodes.size(); k-- > 0;) {
        const Node& node = nodes[k];
        switch (node.op) {
        case Op::Variable: {
            if (node.var >= features.cols()) {
                throw StructuralError("variable x" + std::to_string(node.var) + " out of range for " +
                                      std::to_string(features.cols()) + " features");
            }
            auto col = features.column(node.var);
            auto& buf = push();
            std::copy(col.begin(), col.end(), buf.begin());
            break;
        }
        case Op::Constant: {
            auto& buf = push();
            std::fill(buf.begin(), buf.end(), node.value);
            break;
        }
        case Op::ProtSqrt: {
            auto& a = stack_[top - 1];
            for (std::size_t i = 0; i < n; ++i) {
                a[i] = protected_sqrt(a[i]);
            }
            break;
        }
        case Op::ProtLog: {
            auto& a = stack_[top - 1];
            for (std::size_t i = 0; i < n; ++i) {
                a[i] = protected_log(a[i]);
            }
            break;
        }
        default: {
            // Reverse prefix walk: the first operand is on top.
            auto& a = stack_[top - 1];
            const auto& b = stack_[top - 2];
            switch (node.op) {
            case Op::Add:
                for (std::size_t i = 0; i < n; ++i) a[i] += b[i];
                break;
            case Op::Sub:
                for (std::size_t i = 0; i < n; ++i) a[i] -= b[i];
                break;
            case Op::Mul:
                for (std::size_t i = 0; i < n; ++i) a[i] *= b[i];
                break;
            case Op::ProtDiv:
                for (std::size_t i = 0; i < n; ++i) a[i] = protected_div(a[i], b[i]);
                break;
            default:
                break;
            }
            std::swap(stack_[top - 2], stack_[top - 1]);
            --top;
            break;
        }
        }
    }
    out.assign(stack_[0].begin(), stack_[0].end());
}

std::vector<double> Evaluator::evaluate(const ExpressionTree& tree, const Matrix& features)
{
    std::vector<double> out;
    evaluate_into(tree, features, out);
    return out;
}

std::vector<double> evaluate(const ExpressionTree& tree, const Matrix& features)
{
    thread_local Evaluator evaluator;
    return evaluator.evaluate(tree, features);
}

std::size_t random_subtree_locator(const ExpressionTree& tree, Rng& rng)
{
    return rng.index(static_cast<std::size_t>(tree.size()));
}

namespace {

void format_constant(std::string& out, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%#.9g", v);
    out += buf;
}

void write_node(const ExpressionTree& tree, std::size_t i, std::string& out)
{
    const Node& n = tree.node(i);
    switch (n.op) {
    case Op::Variable:
        out += 'x';
        out += std::to_string(n.var);
        return;
    case Op::Constant:
        format_constant(out, n.value);
        return;
    case Op::ProtSqrt:
    case Op::ProtLog:
        out += n.op == Op::ProtSqrt ? "sqrt(" : "log(";
        write_node(tree, i + 1, out);
        out += ')';
        return;
    default: {
        const auto kids = tree.children(i);
        out += '(';
        write_node(tree, kids[0], out);
        switch (n.op) {
        case Op::Add: out += " + "; break;
        case Op::Sub: out += " - "; break;
        case Op::Mul: out += " * "; break;
        default: out += " / "; break;
        }
        write_node(tree, kids[1], out);
        out += ')';
        return;
    }
    }
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    ExpressionTree parse()
    {
        parse_node();
        skip_ws();
        if (pos_ != text_.size()) {
            fail("unexpected trailing input");
        }
        return ExpressionTree(std::move(nodes_));
    }

private:
    [[noreturn]] void fail(const std::string& what) const
    {
        throw ParseError(what + " at offset " + std::to_string(pos_));
    }

    void skip_ws()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    bool consume(std::string_view token)
    {
        skip_ws();
        if (text_.substr(pos_, token.size()) == token) {
            pos_ += token.size();
            return true;
        }
        return false;
    }

    void expect(char c)
    {
        if (!consume(std::string_view(&c, 1))) {
            fail(std::string("expected '") + c + "'");
        }
    }

    void parse_node()
    {
        skip_ws();
        if (pos_ >= text_.size()) {
            fail("unexpected end of input");
        }
        if (consume("sqrt(") || consume("log(")) {
            const bool is_sqrt = text_[pos_ - 2] == 't';
            nodes_.push_back(Node{is_sqrt ? Op::ProtSqrt : Op::ProtLog, 0, 0.0});
            parse_node();
            expect(')');
            return;
        }
        if (consume("(")) {
            const std::size_t op_slot = nodes_.size();
            nodes_.push_back(Node{});
            parse_node();
            skip_ws();
            if (pos_ >= text_.size()) {
                fail("missing operator");
            }
            Op op{};
            switch (text_[pos_]) {
            case '+': op = Op::Add; break;
            case '-': op = Op::Sub; break;
            case '*': op = Op::Mul; break;
            case '/': op = Op::ProtDiv; break;
            default: fail("unknown operator");
            }
            ++pos_;
            nodes_[op_slot].op = op;
            parse_node();
            expect(')');
            return;
        }
        if (text_[pos_] == 'x') {
            ++pos_;
            const std::size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                ++pos_;
            }
            if (start == pos_) {
                fail("variable without index");
            }
            nodes_.push_back(Node{Op::Variable, static_cast<std::uint32_t>(std::stoul(std::string(text_.substr(start, pos_ - start)))), 0.0});
            return;
        }
        // Numeric literal; strtod needs a terminated buffer.
        const std::string rest(text_.substr(pos_, std::min<std::size_t>(64, text_.size() - pos_)));
        char* end = nullptr;
        const double v = std::strtod(rest.c_str(), &end);
        if (end == rest.c_str()) {
            fail("expected expression");
        }
        pos_ += static_cast<std::size_t>(end - rest.c_str());
        nodes_.push_back(Node{Op::Constant, 0, v});
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::vector<Node> nodes_;
};

} // namespace

std::string to_string(const ExpressionTree& tree)
{
    std::string out;
    if (!tree.empty()) {
        write_node(tree, 0, out);
    }
    return out;
}

ExpressionTree parse_expression(std::string_view text)
{
    return Parser(text).parse();
}

} // namespace evosr
