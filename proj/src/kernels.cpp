#include "bstac/kernels.hpp"

#include <algorithm>
#include <array>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bstac {

namespace {

constexpr std::size_t kBlock = 256;

// Evaluates rows [begin, begin + len) into out. Walks the prefix sequence
// backwards so each operator finds its left operand on top of the stack.
void eval_block(std::span<const Node> nodes, const LabeledDataset& data, std::size_t begin, std::size_t len,
                std::vector<double>& stack, double* out) {
    const std::size_t d = data.cols();
    const double* x = data.values().data() + begin * d;
    std::size_t top = 0;  // number of occupied block slots
    for (std::size_t i = nodes.size(); i-- > 0;) {
        const Node& n = nodes[i];
        if (n.kind == NodeKind::Operator) {
            double* left = stack.data() + (top - 1) * kBlock;
            const double* right = stack.data() + (top - 2) * kBlock;
            double* dst = stack.data() + (top - 2) * kBlock;
            switch (n.op) {
                case Op::Add:
                    for (std::size_t k = 0; k < len; ++k) dst[k] = apply_op(Op::Add, left[k], right[k]);
                    break;
                case Op::Sub:
                    for (std::size_t k = 0; k < len; ++k) dst[k] = apply_op(Op::Sub, left[k], right[k]);
                    break;
                case Op::Mul:
                    for (std::size_t k = 0; k < len; ++k) dst[k] = apply_op(Op::Mul, left[k], right[k]);
                    break;
                case Op::PDiv:
                    for (std::size_t k = 0; k < len; ++k) dst[k] = apply_op(Op::PDiv, left[k], right[k]);
                    break;
            }
            --top;
            continue;
        }
        double* dst = stack.data() + top * kBlock;
        if (n.kind == NodeKind::Attribute) {
            for (std::size_t k = 0; k < len; ++k) dst[k] = saturate(x[k * d + n.attribute]);
        } else {
            std::fill(dst, dst + len, saturate(n.value));
        }
        ++top;
    }
    std::copy(stack.data(), stack.data() + len, out);
}

}  // namespace

void eval_batch(const ProgramTree& tree, const LabeledDataset& data, std::span<double> out) {
    const auto nodes = tree.nodes();
    // Stack height never exceeds the number of leaves.
    std::vector<double> stack(((nodes.size() + 1) / 2 + 1) * kBlock);
    for (std::size_t begin = 0; begin < data.rows(); begin += kBlock) {
        const std::size_t len = std::min(kBlock, data.rows() - begin);
        eval_block(nodes, data, begin, len, stack, out.data() + begin);
    }
}

void eval_batch_serial(const ProgramTree& tree, const LabeledDataset& data, std::span<double> out) {
    for (std::size_t r = 0; r < data.rows(); ++r) out[r] = eval(tree, data.record(r));
}

ProgramScore score_program(const ProgramTree& tree, const LabeledDataset& data, const ScoringParams& params) {
    const auto hist = fit_histogram(tree, data, params.geometry);
    return {gini_fitness(hist, data.class_counts(), params.fitness.alpha), hist.used_bins(),
            count_pure_bins(hist, params.fitness.beta)};
}

std::vector<ProgramScore> score_population_serial(std::span<const ProgramTree> pop, const LabeledDataset& data,
                                                  const ScoringParams& params) {
    std::vector<ProgramScore> scores(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) scores[i] = score_program(pop[i], data, params);
    return scores;
}

int resolve_workers(int workers) {
#ifdef _OPENMP
    return workers > 0 ? workers : omp_get_max_threads();
#else
    (void)workers;
    return 1;
#endif
}

std::vector<ProgramScore> score_population(std::span<const ProgramTree> pop, const LabeledDataset& data,
                                           const ScoringParams& params, int workers) {
    std::vector<ProgramScore> scores(pop.size());
    const auto count = static_cast<std::ptrdiff_t>(pop.size());
    [[maybe_unused]] const int threads = resolve_workers(workers);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < count; ++i)
        scores[static_cast<std::size_t>(i)] = score_program(pop[static_cast<std::size_t>(i)], data, params);
    return scores;
}

}  // namespace bstac
