#include "dynlab/dgp/sexpr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <vector>

#include "dynlab/csv.hpp"
#include "dynlab/errors.hpp"

namespace dynlab::dgp {

namespace {

void write(const ExprTree& tree, std::size_t& pos, std::string& out) {
    const Node& n = tree.node(pos++);
    switch (n.kind) {
    case NodeKind::Const:
        out += format_shortest(n.value);
        return;
    case NodeKind::VarZ:
        out += 'z' + std::to_string(n.index + 1);
        return;
    case NodeKind::VarY:
        out += 'y' + std::to_string(n.index + 1);
        return;
    case NodeKind::Add:
        out += "(add ";
        break;
    case NodeKind::Sub:
        out += "(sub ";
        break;
    case NodeKind::Mul:
        out += "(mul ";
        break;
    }
    write(tree, pos, out);
    out += ' ';
    write(tree, pos, out);
    out += ')';
}

class Parser {
public:
    Parser(std::string_view text, std::size_t base) : text_(text), base_(base) {}

    ExprTree parse_all() {
        std::vector<Node> nodes;
        skip_space();
        parse_expr(nodes);
        skip_space();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return ExprTree(std::move(nodes));
    }

private:
    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, base_ + pos_); }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    std::string_view atom() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
               text_[pos_] != '(' && text_[pos_] != ')')
            ++pos_;
        return text_.substr(start, pos_ - start);
    }

    void parse_expr(std::vector<Node>& nodes) {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        if (text_[pos_] == ')') fail("unexpected ')'");
        if (text_[pos_] == '(') {
            const std::size_t open = pos_++;
            skip_space();
            const std::size_t op_pos = pos_;
            const std::string_view op = atom();
            Node n;
            if (op == "add") n = Node::add();
            else if (op == "sub") n = Node::sub();
            else if (op == "mul") n = Node::mul();
            else {
                pos_ = op_pos;
                fail(op.empty() ? "missing operator" : "unknown operator '" + std::string(op) + "'");
            }
            nodes.push_back(n);
            for (int arg = 0; arg < 2; ++arg) {
                skip_space();
                if (pos_ >= text_.size() || text_[pos_] == ')') {
                    if (pos_ >= text_.size()) fail("unterminated '(' opened at " + std::to_string(base_ + open));
                    fail("operator '" + std::string(op) + "' expects 2 operands, got " + std::to_string(arg));
                }
                parse_expr(nodes);
            }
            skip_space();
            if (pos_ >= text_.size()) fail("unterminated '(' opened at " + std::to_string(base_ + open));
            if (text_[pos_] != ')') fail("operator '" + std::string(op) + "' expects 2 operands");
            ++pos_;
            return;
        }
        const std::size_t start = pos_;
        const std::string_view tok = atom();
        if ((tok.size() >= 2) && (tok[0] == 'z' || tok[0] == 'y')) {
            unsigned idx = 0;
            const auto res = std::from_chars(tok.data() + 1, tok.data() + tok.size(), idx);
            if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size() || idx == 0) {
                pos_ = start;
                fail("bad variable '" + std::string(tok) + "'");
            }
            nodes.push_back(tok[0] == 'z' ? Node::z(idx - 1) : Node::y(idx - 1));
            return;
        }
        double value = 0.0;
        const char* first = tok.data();
        if (!tok.empty() && tok[0] == '+') ++first;
        const auto res = std::from_chars(first, tok.data() + tok.size(), value);
        if (tok.empty() || res.ec != std::errc{} || res.ptr != tok.data() + tok.size() || !std::isfinite(value)) {
            pos_ = start;
            fail("bad token '" + std::string(tok) + "'");
        }
        nodes.push_back(Node::constant(value));
    }

    std::string_view text_;
    std::size_t base_;
    std::size_t pos_ = 0;
};

} // namespace

std::string serialize_tree(const ExprTree& tree) {
    std::string out;
    std::size_t pos = 0;
    write(tree, pos, out);
    return out;
}

std::string serialize_individual(const Individual& ind) {
    std::string out;
    for (const auto& t : ind.state_trees) out += serialize_tree(t) + '\n';
    out += serialize_tree(ind.readout_tree) + '\n';
    return out;
}

ExprTree parse_tree(std::string_view text) { return Parser(text, 0).parse_all(); }

Individual parse_individual(std::string_view text) {
    std::vector<ExprTree> trees;
    std::vector<std::size_t> offsets;
    std::size_t line_start = 0;
    while (line_start <= text.size()) {
        std::size_t end = text.find('\n', line_start);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view line = text.substr(line_start, end - line_start);
        const std::size_t first = line.find_first_not_of(" \t\r");
        if (first != std::string_view::npos && line[first] != '#') {
            trees.push_back(Parser(line, line_start).parse_all());
            offsets.push_back(line_start);
        }
        line_start = end + 1;
    }
    if (trees.size() < 2) throw ParseError("an individual needs at least one state tree and a readout", 0);

    Individual ind;
    ind.readout_tree = std::move(trees.back());
    trees.pop_back();
    ind.state_trees = std::move(trees);
    const std::size_t k = ind.state_trees.size();
    for (std::size_t s = 0; s <= k; ++s) {
        for (const Node& n : ind.slot(s).nodes()) {
            if (n.kind == NodeKind::VarZ && n.index >= k)
                throw ParseError("z" + std::to_string(n.index + 1) + " exceeds the " + std::to_string(k) +
                                     " state variables",
                                 offsets[s]);
            if (s == k && n.kind == NodeKind::VarY)
                throw ParseError("the readout may only reference z variables", offsets[s]);
        }
    }
    return ind;
}

} // namespace dynlab::dgp
