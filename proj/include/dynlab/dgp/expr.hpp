#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dynlab::dgp {

enum class NodeKind : std::uint8_t { Add, Sub, Mul, VarZ, VarY, Const };

constexpr bool is_binary(NodeKind k) { return k == NodeKind::Add || k == NodeKind::Sub || k == NodeKind::Mul; }

struct Node {
    NodeKind kind = NodeKind::Const;
    std::uint32_t index = 0; // VarZ / VarY
    double value = 0.0;      // Const

    static Node add() { return {NodeKind::Add, 0, 0.0}; }
    static Node sub() { return {NodeKind::Sub, 0, 0.0}; }
    static Node mul() { return {NodeKind::Mul, 0, 0.0}; }
    static Node z(std::uint32_t i) { return {NodeKind::VarZ, i, 0.0}; }
    static Node y(std::uint32_t j) { return {NodeKind::VarY, j, 0.0}; }
    static Node constant(double c) { return {NodeKind::Const, 0, c}; }

    bool operator==(const Node&) const = default;
};

/// Leaves a tree may use: z_0..z_{n_z-1}, y_0..y_{n_y-1} and constants.
struct TerminalSet {
    std::size_t n_z = 0;
    std::size_t n_y = 0;
};

struct TreeLimits {
    std::size_t max_depth = 8; // a single leaf has depth 1
    std::size_t max_nodes = 64;
};

/// Expression tree over {+, -, *} stored in prefix order; every subtree is a
/// contiguous range starting at its root.
class ExprTree {
public:
    /// Single Const(0) leaf.
    ExprTree();
    /// Throws std::invalid_argument unless `nodes` is one complete prefix tree.
    explicit ExprTree(std::vector<Node> nodes);

    static ExprTree leaf(Node n);
    static ExprTree binary(NodeKind kind, const ExprTree& lhs, const ExprTree& rhs);

    std::size_t size() const noexcept { return nodes_.size(); }
    std::size_t depth() const noexcept { return depth_; }
    std::span<const Node> nodes() const noexcept { return nodes_; }
    const Node& node(std::size_t pos) const { return nodes_[pos]; }

    /// One past the last node of the subtree rooted at pos.
    std::size_t subtree_end(std::size_t pos) const;
    /// Depth of node pos below the root (root = 1).
    std::size_t level_of(std::size_t pos) const;

    ExprTree subtree(std::size_t pos) const;
    ExprTree replace_subtree(std::size_t pos, const ExprTree& replacement) const;
    ExprTree with_node(std::size_t pos, Node n) const; // same-arity replacement

    double eval(std::span<const double> z, std::span<const double> y) const;

    bool within(const TreeLimits& limits) const {
        return depth_ <= limits.max_depth && nodes_.size() <= limits.max_nodes;
    }
    bool uses_only(const TerminalSet& terms) const;

    bool operator==(const ExprTree& other) const { return nodes_ == other.nodes_; }

private:
    std::vector<Node> nodes_;
    std::size_t depth_ = 1;
};

} // namespace dynlab::dgp
