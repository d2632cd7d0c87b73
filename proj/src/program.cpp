#include "bstac/program.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bstac/error.hpp"
#include "bstac/text.hpp"

namespace bstac {

std::string_view op_name(Op op) {
    switch (op) {
        case Op::Add: return "add";
        case Op::Sub: return "sub";
        case Op::Mul: return "mul";
        case Op::PDiv: return "pdiv";
    }
    return "?";
}

double RngStream::gaussian(double mean, double sigma) {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    return mean + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

ProgramTree::ProgramTree(std::vector<Node> prefix) : nodes_(std::move(prefix)) {
    // Validate arity: a prefix sequence of binary operators is complete iff
    // the open-slot counter reaches zero exactly at the last node.
    std::size_t open = 1;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (open == 0) throw std::invalid_argument("prefix sequence has trailing nodes");
        const auto& n = nodes_[i];
        if (n.kind == NodeKind::Constant && !std::isfinite(n.value))
            throw std::invalid_argument("non-finite constant");
        open += n.is_leaf() ? 0 : 2;
        --open;
    }
    if (nodes_.empty() || open != 0) throw std::invalid_argument("incomplete prefix sequence");
}

std::size_t ProgramTree::depth() const {
    // Remaining-children stack of the operators on the current path.
    std::vector<std::size_t> pending;
    std::size_t best = 0;
    for (const auto& n : nodes_) {
        best = std::max(best, pending.size() + 1);
        if (!n.is_leaf()) {
            pending.push_back(2);
            continue;
        }
        while (!pending.empty() && --pending.back() == 0) pending.pop_back();
    }
    return best;
}

std::size_t ProgramTree::attribute_span() const {
    std::size_t span = 0;
    for (const auto& n : nodes_)
        if (n.kind == NodeKind::Attribute) span = std::max<std::size_t>(span, n.attribute + 1);
    return span;
}

std::string ProgramTree::to_string() const {
    std::string out;
    std::vector<std::size_t> pending;
    for (const auto& n : nodes_) {
        if (!pending.empty() && pending.back() == 1) out += ' ';
        switch (n.kind) {
            case NodeKind::Attribute: out += "(attr " + std::to_string(n.attribute) + ")"; break;
            case NodeKind::Constant: out += "(const " + format_real(n.value) + ")"; break;
            case NodeKind::Operator:
                out += '(';
                out += op_name(n.op);
                out += ' ';
                pending.push_back(2);
                continue;
        }
        while (!pending.empty() && --pending.back() == 0) {
            pending.pop_back();
            out += ')';
        }
    }
    return out;
}

namespace {

struct Lexer {
    std::string_view text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    }
    void expect(char ch) {
        skip_ws();
        if (pos >= text.size() || text[pos] != ch)
            throw ModelFormatError("tree text: expected '" + std::string(1, ch) + "' at offset " + std::to_string(pos));
        ++pos;
    }
    std::string_view word() {
        skip_ws();
        const auto start = pos;
        while (pos < text.size() && text[pos] != ' ' && text[pos] != '(' && text[pos] != ')' && text[pos] != '\t') ++pos;
        if (start == pos) throw ModelFormatError("tree text: expected token at offset " + std::to_string(pos));
        return text.substr(start, pos - start);
    }
};

void parse_node(Lexer& lx, std::vector<Node>& out, int depth) {
    if (depth > 100000) throw ModelFormatError("tree text: nesting too deep");
    lx.expect('(');
    const auto head = lx.word();
    if (head == "attr") {
        const auto w = lx.word();
        std::uint32_t idx = 0;
        const auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), idx);
        if (ec != std::errc{} || p != w.data() + w.size()) throw ModelFormatError("tree text: bad attribute index '" + std::string(w) + "'");
        out.push_back(Node::attr(idx));
    } else if (head == "const") {
        const auto w = lx.word();
        const auto v = parse_real(w);
        if (!v || !std::isfinite(*v)) throw ModelFormatError("tree text: bad constant '" + std::string(w) + "'");
        out.push_back(Node::constant(*v));
    } else {
        Op op{};
        bool found = false;
        for (std::size_t k = 0; k < kNumOps; ++k)
            if (op_name(static_cast<Op>(k)) == head) {
                op = static_cast<Op>(k);
                found = true;
            }
        if (!found) throw ModelFormatError("tree text: unknown node '" + std::string(head) + "'");
        out.push_back(Node::oper(op));
        parse_node(lx, out, depth + 1);
        parse_node(lx, out, depth + 1);
    }
    lx.expect(')');
}

double eval_at(std::span<const Node> nodes, std::size_t& pos, std::span<const double> record) {
    const Node& n = nodes[pos++];
    switch (n.kind) {
        case NodeKind::Attribute: return saturate(record[n.attribute]);
        case NodeKind::Constant: return saturate(n.value);
        case NodeKind::Operator: {
            const double a = eval_at(nodes, pos, record);
            const double b = eval_at(nodes, pos, record);
            return apply_op(n.op, a, b);
        }
    }
    return 0.0;
}

}  // namespace

ProgramTree ProgramTree::parse(std::string_view text) {
    Lexer lx{trim(text)};
    std::vector<Node> nodes;
    parse_node(lx, nodes, 0);
    lx.skip_ws();
    if (lx.pos != lx.text.size()) throw ModelFormatError("tree text: trailing characters");
    return ProgramTree(std::move(nodes));
}

double eval(const ProgramTree& tree, std::span<const double> record) {
    std::size_t pos = 0;
    return eval_at(tree.nodes(), pos, record);
}

Node random_terminal(std::size_t num_attributes, RngStream& rng, const VariationParams& params) {
    if (rng.bernoulli(params.attribute_probability))
        return Node::attr(static_cast<std::uint32_t>(rng.below(num_attributes)));
    return Node::constant(rng.uniform(params.constant_lo, params.constant_hi));
}

ProgramTree init_stump(std::size_t num_attributes, RngStream& rng, const VariationParams& params) {
    if (num_attributes == 0) throw ConfigError("cannot build programs over zero attributes");
    return ProgramTree({random_terminal(num_attributes, rng, params)});
}

ProgramTree grow_clone(const ProgramTree& parent, std::size_t num_attributes, RngStream& rng,
                       const VariationParams& params) {
    const auto src = parent.nodes();
    std::vector<std::size_t> leaves;
    for (std::size_t i = 0; i < src.size(); ++i)
        if (src[i].is_leaf()) leaves.push_back(i);
    const std::size_t at = leaves[rng.below(leaves.size())];
    const Op op = static_cast<Op>(rng.below(kNumOps));
    const Node fresh = random_terminal(num_attributes, rng, params);

    // In prefix order op(L, T) is "op L T", taking L's single slot.
    std::vector<Node> out;
    out.reserve(src.size() + 2);
    out.insert(out.end(), src.begin(), src.begin() + static_cast<std::ptrdiff_t>(at));
    out.push_back(Node::oper(op));
    out.push_back(src[at]);
    out.push_back(fresh);
    out.insert(out.end(), src.begin() + static_cast<std::ptrdiff_t>(at) + 1, src.end());
    return ProgramTree(std::move(out));
}

ProgramTree mutate_params(const ProgramTree& tree, std::size_t num_attributes, RngStream& rng,
                          const VariationParams& params) {
    std::vector<Node> out(tree.nodes().begin(), tree.nodes().end());
    for (auto& n : out) {
        if (!rng.bernoulli(params.node_mutation_rate)) continue;
        switch (n.kind) {
            case NodeKind::Constant: n.value = saturate(n.value + rng.gaussian(0.0, params.mutation_sigma)); break;
            case NodeKind::Attribute: n.attribute = static_cast<std::uint32_t>(rng.below(num_attributes)); break;
            case NodeKind::Operator: n.op = static_cast<Op>(rng.below(kNumOps)); break;
        }
    }
    return ProgramTree(std::move(out));
}

}  // namespace bstac
