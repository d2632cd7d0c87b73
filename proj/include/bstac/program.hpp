#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bstac/rng.hpp"

namespace bstac {

enum class Op : std::uint8_t { Add, Sub, Mul, PDiv };
inline constexpr std::size_t kNumOps = 4;

enum class NodeKind : std::uint8_t { Attribute, Constant, Operator };

struct Node {
    NodeKind kind = NodeKind::Constant;
    Op op = Op::Add;
    std::uint32_t attribute = 0;
    double value = 0.0;

    static Node attr(std::uint32_t index) { return {NodeKind::Attribute, Op::Add, index, 0.0}; }
    static Node constant(double v) { return {NodeKind::Constant, Op::Add, 0, v}; }
    static Node oper(Op o) { return {NodeKind::Operator, o, 0, 0.0}; }

    bool is_leaf() const { return kind != NodeKind::Operator; }
    friend bool operator==(const Node&, const Node&) = default;
};

// Every intermediate (and the final output) saturates to this range, which
// also keeps the interpreter free of inf/NaN.
inline constexpr double kOutputClamp = 1e12;
// |divisor| below this makes pdiv return 1.
inline constexpr double kPDivGuard = 1e-9;

inline double saturate(double v) {
    return v > kOutputClamp ? kOutputClamp : (v < -kOutputClamp ? -kOutputClamp : v);
}

inline double apply_op(Op op, double a, double b) {
    switch (op) {
        case Op::Add: return saturate(a + b);
        case Op::Sub: return saturate(a - b);
        case Op::Mul: return saturate(a * b);
        case Op::PDiv: return (b < kPDivGuard && b > -kPDivGuard) ? 1.0 : saturate(a / b);
    }
    return 0.0;
}

std::string_view op_name(Op op);

// Expression tree stored as a prefix-order node sequence; every operator is
// binary, so the sequence alone determines the shape.
class ProgramTree {
public:
    ProgramTree() = default;
    explicit ProgramTree(std::vector<Node> prefix);

    std::span<const Node> nodes() const { return nodes_; }
    std::size_t node_count() const { return nodes_.size(); }
    // A single node has depth 1.
    std::size_t depth() const;
    // One past the largest referenced attribute index (0 if none).
    std::size_t attribute_span() const;

    // Parenthesized prefix text, e.g. "(add (attr 0) (const 0.25))".
    std::string to_string() const;
    static ProgramTree parse(std::string_view text);

    friend bool operator==(const ProgramTree&, const ProgramTree&) = default;

private:
    std::vector<Node> nodes_;
};

// Reference interpreter for one record: pure and total.
double eval(const ProgramTree& tree, std::span<const double> record);

struct VariationParams {
    double attribute_probability = 0.9;
    double constant_lo = -1.0;
    double constant_hi = 1.0;
    double node_mutation_rate = 0.1;
    double mutation_sigma = 0.1;
};

Node random_terminal(std::size_t num_attributes, RngStream& rng, const VariationParams& params = {});
ProgramTree init_stump(std::size_t num_attributes, RngStream& rng, const VariationParams& params = {});
// Copy of `parent` with one uniformly chosen leaf L replaced by op(L, terminal).
ProgramTree grow_clone(const ProgramTree& parent, std::size_t num_attributes, RngStream& rng,
                       const VariationParams& params = {});
// Independent per-node parameter mutation; shape is never changed.
ProgramTree mutate_params(const ProgramTree& tree, std::size_t num_attributes, RngStream& rng,
                          const VariationParams& params = {});

}  // namespace bstac
