#include "sfd/compare.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "sfd/diagnostics.hpp"
#include "sfd/errors.hpp"
#include "sfd/parallel.hpp"

namespace sfd {

Seed optimizer_stream_seed(Seed replicate_seed) { return Seed{mix64(replicate_seed.value ^ 0x5fd0a11c0ffee5ULL)}; }

std::vector<std::uint64_t> even_checkpoints(std::uint64_t budget, std::size_t count) {
    std::vector<std::uint64_t> out;
    if (budget == 0 || count == 0) return out;
    for (std::size_t i = 1; i <= count; ++i) {
        const std::uint64_t c = budget * i / count;
        if (c > 0 && (out.empty() || c > out.back())) out.push_back(c);
    }
    return out;
}

std::vector<DesignMatrix> best_at_checkpoints(const LhsDesign& initial, const CriterionSpec& spec,
                                             const OptimizerConfig& config,
                                             std::span<const std::uint64_t> checkpoints) {
    std::vector<DesignMatrix> out;
    out.reserve(checkpoints.size());
    // Records are written on every new best, so the best design as of the last
    // record at or before a checkpoint is the best design at that checkpoint.
    DesignMatrix pending = initial.matrix();
    const RecordHook hook = [&](const TraceRecord& rec, const LhsDesign& best) {
        while (out.size() < checkpoints.size() && checkpoints[out.size()] < rec.perturbations) {
            out.push_back(pending);
        }
        pending = best.matrix();
    };
    (void)optimize(initial, spec, config, hook);
    while (out.size() < checkpoints.size()) out.push_back(pending);
    return out;
}

ComparisonReport compare_optimizers(const ComparisonScenario& scenario) {
    if (scenario.replicates == 0) throw InvalidArgument("comparison needs at least one replicate");
    if (scenario.variants.empty()) throw InvalidArgument("comparison needs at least one variant");
    if (scenario.checkpoints.empty()) throw InvalidArgument("comparison needs at least one checkpoint");
    if (!std::is_sorted(scenario.checkpoints.begin(), scenario.checkpoints.end())) {
        throw InvalidArgument("checkpoints must be ascending");
    }

    const std::size_t n_var = scenario.variants.size();
    const std::size_t n_rep = scenario.replicates;
    const std::size_t n_cp = scenario.checkpoints.size();
    ComparisonReport report;
    report.checkpoints = scenario.checkpoints;
    report.monitored.assign(n_var, std::vector<std::vector<double>>(n_rep, std::vector<double>(n_cp, 0.0)));
    for (const auto& v : scenario.variants) report.labels.push_back(v.label);

    parallel_for(n_var * n_rep, scenario.jobs, [&](std::size_t task) {
        const std::size_t vi = task / n_rep;
        const std::size_t r = task % n_rep;
        const auto& variant = scenario.variants[vi];
        const Seed replicate_seed = scenario.seed.offset(r);
        const auto initial = generate_random_lhs(scenario.n_points, scenario.n_dims, replicate_seed);
        OptimizerConfig config = variant.config;
        config.budget = scenario.budget;
        config.seed = optimizer_stream_seed(replicate_seed);

        const auto snapshots = best_at_checkpoints(initial, variant.criterion, config, scenario.checkpoints);
        auto& out = report.monitored[vi][r];
        for (std::size_t c = 0; c < n_cp; ++c) {
            out[c] = scenario.monitor ? scenario.monitor(snapshots[c])
                                      : evaluate(snapshots[c], variant.criterion).value;
        }
    });

    for (std::size_t c = 0; c < n_cp; ++c) {
        for (std::size_t vi = 0; vi < n_var; ++vi) {
            std::vector<double> sample(n_rep);
            for (std::size_t r = 0; r < n_rep; ++r) sample[r] = report.monitored[vi][r][c];
            std::sort(sample.begin(), sample.end());
            ComparisonRow row;
            row.checkpoint = scenario.checkpoints[c];
            row.variant = scenario.variants[vi].label;
            row.q05 = quantile_sorted(sample, 0.05);
            row.q25 = quantile_sorted(sample, 0.25);
            row.q50 = quantile_sorted(sample, 0.50);
            row.q75 = quantile_sorted(sample, 0.75);
            row.q95 = quantile_sorted(sample, 0.95);
            row.mean = std::accumulate(sample.begin(), sample.end(), 0.0) / static_cast<double>(n_rep);
            report.rows.push_back(row);
        }
    }
    return report;
}

std::string comparison_to_csv(const ComparisonReport& report) {
    fmt::memory_buffer buf;
    auto out = std::back_inserter(buf);
    fmt::format_to(out, "checkpoint,variant,q05,q25,q50,q75,q95,mean\n");
    for (const auto& r : report.rows) {
        fmt::format_to(out, "{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.checkpoint, r.variant, r.q05,
                       r.q25, r.q50, r.q75, r.q95, r.mean);
    }
    return fmt::to_string(buf);
}

}  // namespace sfd
