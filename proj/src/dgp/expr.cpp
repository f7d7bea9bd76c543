#include "dynlab/dgp/expr.hpp"

#include <algorithm>
#include <stdexcept>

namespace dynlab::dgp {

namespace {

// Returns the end of the subtree at pos and its height, or throws if the
// prefix sequence ends early.
std::pair<std::size_t, std::size_t> scan(const std::vector<Node>& nodes, std::size_t pos) {
    if (pos >= nodes.size()) throw std::invalid_argument("expression tree is missing operands");
    if (!is_binary(nodes[pos].kind)) return {pos + 1, 1};
    auto [mid, hl] = scan(nodes, pos + 1);
    auto [end, hr] = scan(nodes, mid);
    return {end, 1 + std::max(hl, hr)};
}

double eval_at(const Node* nodes, std::size_t& pos, std::span<const double> z, std::span<const double> y) {
    const Node& n = nodes[pos++];
    switch (n.kind) {
    case NodeKind::Const:
        return n.value;
    case NodeKind::VarZ:
        return z[n.index];
    case NodeKind::VarY:
        return y[n.index];
    case NodeKind::Add: {
        const double a = eval_at(nodes, pos, z, y);
        return a + eval_at(nodes, pos, z, y);
    }
    case NodeKind::Sub: {
        const double a = eval_at(nodes, pos, z, y);
        return a - eval_at(nodes, pos, z, y);
    }
    case NodeKind::Mul: {
        const double a = eval_at(nodes, pos, z, y);
        return a * eval_at(nodes, pos, z, y);
    }
    }
    return 0.0;
}

} // namespace

ExprTree::ExprTree() : nodes_{Node::constant(0.0)}, depth_(1) {}

ExprTree::ExprTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
    auto [end, height] = scan(nodes_, 0);
    if (end != nodes_.size()) throw std::invalid_argument("trailing nodes after a complete expression tree");
    depth_ = height;
}

ExprTree ExprTree::leaf(Node n) {
    if (is_binary(n.kind)) throw std::invalid_argument("leaf() requires a terminal node");
    return ExprTree(std::vector<Node>{n});
}

ExprTree ExprTree::binary(NodeKind kind, const ExprTree& lhs, const ExprTree& rhs) {
    if (!is_binary(kind)) throw std::invalid_argument("binary() requires a function node");
    std::vector<Node> nodes;
    nodes.reserve(1 + lhs.size() + rhs.size());
    nodes.push_back({kind, 0, 0.0});
    nodes.insert(nodes.end(), lhs.nodes_.begin(), lhs.nodes_.end());
    nodes.insert(nodes.end(), rhs.nodes_.begin(), rhs.nodes_.end());
    ExprTree t;
    t.nodes_ = std::move(nodes);
    t.depth_ = 1 + std::max(lhs.depth_, rhs.depth_);
    return t;
}

std::size_t ExprTree::subtree_end(std::size_t pos) const {
    std::size_t pending = 1;
    while (pending > 0) {
        pending += is_binary(nodes_[pos].kind) ? 2 : 0;
        --pending;
        ++pos;
    }
    return pos;
}

std::size_t ExprTree::level_of(std::size_t pos) const {
    // Walk from the root keeping a stack of open operand slots per level.
    std::vector<std::size_t> open; // remaining operand count of each ancestor
    std::size_t i = 0;
    while (true) {
        if (i == pos) return open.size() + 1;
        if (is_binary(nodes_[i].kind)) {
            open.push_back(2);
        } else {
            while (!open.empty() && --open.back() == 0) open.pop_back();
        }
        ++i;
    }
}

ExprTree ExprTree::subtree(std::size_t pos) const {
    const std::size_t end = subtree_end(pos);
    return ExprTree(std::vector<Node>(nodes_.begin() + static_cast<std::ptrdiff_t>(pos),
                                      nodes_.begin() + static_cast<std::ptrdiff_t>(end)));
}

ExprTree ExprTree::replace_subtree(std::size_t pos, const ExprTree& replacement) const {
    const std::size_t end = subtree_end(pos);
    std::vector<Node> nodes;
    nodes.reserve(nodes_.size() - (end - pos) + replacement.size());
    nodes.insert(nodes.end(), nodes_.begin(), nodes_.begin() + static_cast<std::ptrdiff_t>(pos));
    nodes.insert(nodes.end(), replacement.nodes_.begin(), replacement.nodes_.end());
    nodes.insert(nodes.end(), nodes_.begin() + static_cast<std::ptrdiff_t>(end), nodes_.end());
    return ExprTree(std::move(nodes));
}

ExprTree ExprTree::with_node(std::size_t pos, Node n) const {
    if (is_binary(n.kind) != is_binary(nodes_.at(pos).kind))
        throw std::invalid_argument("with_node must preserve arity");
    ExprTree t = *this;
    t.nodes_[pos] = n;
    return t;
}

double ExprTree::eval(std::span<const double> z, std::span<const double> y) const {
    std::size_t pos = 0;
    return eval_at(nodes_.data(), pos, z, y);
}

bool ExprTree::uses_only(const TerminalSet& terms) const {
    return std::all_of(nodes_.begin(), nodes_.end(), [&](const Node& n) {
        if (n.kind == NodeKind::VarZ) return n.index < terms.n_z;
        if (n.kind == NodeKind::VarY) return n.index < terms.n_y;
        return true;
    });
}

} // namespace dynlab::dgp
