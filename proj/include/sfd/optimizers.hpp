#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sfd/criteria.hpp"
#include "sfd/design.hpp"

namespace sfd {

enum class Algorithm { GeometricSA, MorrisMitchellSA, Ese };

[[nodiscard]] std::string to_string(Algorithm a);
/// "sa" | "mmsa" | "ese"
[[nodiscard]] Algorithm parse_algorithm(std::string_view name);

/// Temperature control of ESE, applied after every inner loop from the
/// acceptance ratio a = accepted / inner iterations.
///
/// Improving phase (best value improved during the inner loop):
///   a > acceptance_low  -> T *= improve_cool, else T /= improve_cool.
/// Exploring phase:
///   a < acceptance_low  -> T /= explore_warm
///   a > acceptance_high -> T *= explore_cool
struct EseSchedule {
    double acceptance_low = 0.1;
    double acceptance_high = 0.8;
    double improve_cool = 0.8;
    double explore_warm = 0.7;
    double explore_cool = 0.9;
    /// Default T0 = t0_factor * |f(initial)|.
    double t0_factor = 0.005;
};

struct OptimizerConfig {
    Algorithm algorithm = Algorithm::Ese;
    /// Initial temperature. Defaults: 0.1 for both SA variants, ESE derives it
    /// from the initial criterion value (EseSchedule::t0_factor).
    std::optional<double> t0;
    /// Geometric ratio (GeometricSA, MorrisMitchellSA), 0 < c < 1.
    double c = 0.9;
    /// MM SA plateau length.
    std::uint64_t i_max = 100;
    /// ESE inner iterations (M), candidates per iteration (J), outer iterations (Q).
    std::uint64_t m_inner = 100;
    std::uint64_t j_candidates = 50;
    /// Defaults to ceil(budget / (M J)).
    std::optional<std::uint64_t> q_outer;
    /// Maximum number of elementary perturbations (proposed swaps).
    std::uint64_t budget = 10'000;
    Seed seed;
    EseSchedule ese;

    /// Throws InvalidArgument on out-of-range fields.
    void validate() const;
};

[[nodiscard]] nlohmann::json to_json(const OptimizerConfig& config);

struct TraceRecord {
    std::uint64_t perturbations = 0;
    double current = 0.0;  ///< criterion value of the current design
    double best = 0.0;  ///< best criterion value so far
    double temperature = 0.0;
};

struct TraceMetadata {
    OptimizerConfig config;
    CriterionSpec criterion;
    std::uint64_t initial_fingerprint = 0;
    std::uint64_t final_fingerprint = 0;
    double wall_seconds = 0.0;
};

/// Convergence record. Records are written at perturbation 0, at every
/// max(1, budget / 1000) perturbations, at every new best, and at the end;
/// counts are strictly increasing.
struct OptimizationTrace {
    std::vector<TraceRecord> records;
    TraceMetadata metadata;
};

enum class Termination { BudgetExhausted, Stalled };

[[nodiscard]] std::string to_string(Termination t);

struct OptimizationResult {
    LhsDesign best_design;
    CriterionValue best_value;
    OptimizationTrace trace;
    Termination termination = Termination::BudgetExhausted;
    std::uint64_t perturbations = 0;
    std::vector<std::string> warnings;
};

/// Called after each trace record is appended, with the best design so far.
using RecordHook = std::function<void(const TraceRecord&, const LhsDesign& best)>;

/// Simulated annealing with T = c^i T0 at perturbation i. One random swap per
/// perturbation (random column, two random distinct rows); Metropolis
/// acceptance on the minimization objective.
OptimizationResult optimize_geometric_sa(const LhsDesign& initial, const CriterionSpec& spec,
                                         const OptimizerConfig& config, const RecordHook& hook = {});

/// Morris-Mitchell simulated annealing: T *= c after i_max consecutive proposals
/// without improving the best value. Stops at the budget, or once i_max
/// consecutive proposals have all been rejected.
OptimizationResult optimize_mm_sa(const LhsDesign& initial, const CriterionSpec& spec, const OptimizerConfig& config,
                                  const RecordHook& hook = {});

/// Enhanced stochastic evolutionary algorithm. Each inner iteration draws J
/// distinct swaps in one column (columns visited cyclically), keeps the best
/// candidate and Metropolis-accepts it. T adapts after every inner loop of M
/// iterations (see EseSchedule). Every candidate counts as one perturbation.
OptimizationResult optimize_ese(const LhsDesign& initial, const CriterionSpec& spec, const OptimizerConfig& config,
                                const RecordHook& hook = {});

/// Dispatches on config.algorithm.
OptimizationResult optimize(const LhsDesign& initial, const CriterionSpec& spec, const OptimizerConfig& config,
                            const RecordHook& hook = {});

/// `perturbations,current,best,temperature`
[[nodiscard]] std::string trace_to_csv(const OptimizationTrace& trace);
[[nodiscard]] nlohmann::json trace_metadata_json(const OptimizationResult& result);

}  // namespace sfd
