#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sfd/optimizers.hpp"

namespace sfd {

/// One optimizer setting in a comparison.
struct OptimizerVariant {
    std::string label;
    CriterionSpec criterion;
    OptimizerConfig config;  ///< seed and budget are overridden per replicate
};

/// Quantity tracked along each run, evaluated on the best design so far.
/// Defaults to the driving criterion's best value when empty.
using Monitor = std::function<double(const DesignMatrix&)>;

struct ComparisonScenario {
    std::size_t n_points = 50;
    std::size_t n_dims = 5;
    std::vector<OptimizerVariant> variants;
    std::size_t replicates = 10;
    std::uint64_t budget = 10'000;
    Seed seed;
    /// Perturbation counts at which quantiles are reported (ascending).
    std::vector<std::uint64_t> checkpoints;
    Monitor monitor;
    std::size_t jobs = 1;
};

struct ComparisonRow {
    std::uint64_t checkpoint = 0;
    std::string variant;
    double q05 = 0.0;
    double q25 = 0.0;
    double q50 = 0.0;
    double q75 = 0.0;
    double q95 = 0.0;
    double mean = 0.0;
};

struct ComparisonReport {
    std::vector<ComparisonRow> rows;
    /// monitored[v][r][c]: variant v, replicate r, checkpoint c.
    std::vector<std::vector<std::vector<double>>> monitored;
    std::vector<std::uint64_t> checkpoints;
    std::vector<std::string> labels;
    /// Every variant of replicate r starts from the same design and optimizer seed.
    bool paired = true;
};

/// Replicate r starts from generate_random_lhs(N, d, seed + r); its optimizer
/// stream is seeded from the same replicate seed, shared by all variants.
/// Replicates run on `jobs` threads and are merged by index.
[[nodiscard]] ComparisonReport compare_optimizers(const ComparisonScenario& scenario);

/// Seed of the optimizer stream for a replicate seed.
[[nodiscard]] Seed optimizer_stream_seed(Seed replicate_seed);

/// Runs one optimization and returns the best design as of each checkpoint
/// (ascending). Checkpoints past an early stop get the final best design.
[[nodiscard]] std::vector<DesignMatrix> best_at_checkpoints(const LhsDesign& initial, const CriterionSpec& spec,
                                                           const OptimizerConfig& config,
                                                           std::span<const std::uint64_t> checkpoints);

/// `checkpoint,variant,q05,q25,q50,q75,q95,mean`
[[nodiscard]] std::string comparison_to_csv(const ComparisonReport& report);

/// Evenly spaced checkpoints: step, 2 step, ..., budget.
[[nodiscard]] std::vector<std::uint64_t> even_checkpoints(std::uint64_t budget, std::size_t count);

}  // namespace sfd
