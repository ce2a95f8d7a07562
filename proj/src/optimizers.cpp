#include "sfd/optimizers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "sfd/errors.hpp"
#include "sfd/swap_state.hpp"

namespace sfd {

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::GeometricSA: return "sa";
        case Algorithm::MorrisMitchellSA: return "mmsa";
        case Algorithm::Ese: return "ese";
    }
    return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
    if (name == "sa") return Algorithm::GeometricSA;
    if (name == "mmsa") return Algorithm::MorrisMitchellSA;
    if (name == "ese") return Algorithm::Ese;
    throw InvalidArgument(fmt::format("unknown algorithm '{}' (expected sa, mmsa, ese)", name));
}

std::string to_string(Termination t) {
    return t == Termination::Stalled ? "stalled" : "budget";
}

void OptimizerConfig::validate() const {
    if (budget < 1) throw InvalidArgument("budget must be >= 1");
    if (t0 && !(*t0 > 0.0)) throw InvalidArgument("initial temperature must be > 0");
    if (algorithm != Algorithm::Ese && !(c > 0.0 && c < 1.0)) {
        throw InvalidArgument(fmt::format("cooling ratio c must lie in (0, 1) (got {})", c));
    }
    if (algorithm == Algorithm::MorrisMitchellSA && i_max < 1) throw InvalidArgument("i_max must be >= 1");
    if (algorithm == Algorithm::Ese) {
        if (m_inner < 1 || j_candidates < 1) throw InvalidArgument("ESE needs M >= 1 and J >= 1");
        if (q_outer && *q_outer < 1) throw InvalidArgument("ESE needs Q >= 1");
        if (!(ese.t0_factor > 0.0)) throw InvalidArgument("ESE t0 factor must be > 0");
    }
}

nlohmann::json to_json(const OptimizerConfig& config) {
    nlohmann::json j;
    j["algorithm"] = to_string(config.algorithm);
    if (config.t0) j["t0"] = *config.t0;
    j["budget"] = config.budget;
    j["seed"] = config.seed.value;
    if (config.algorithm != Algorithm::Ese) j["c"] = config.c;
    if (config.algorithm == Algorithm::MorrisMitchellSA) j["i_max"] = config.i_max;
    if (config.algorithm == Algorithm::Ese) {
        j["m_inner"] = config.m_inner;
        j["j_candidates"] = config.j_candidates;
        if (config.q_outer) j["q_outer"] = *config.q_outer;
        j["ese_schedule"] = {{"acceptance_low", config.ese.acceptance_low},
                             {"acceptance_high", config.ese.acceptance_high},
                             {"improve_cool", config.ese.improve_cool},
                             {"explore_warm", config.ese.explore_warm},
                             {"explore_cool", config.ese.explore_cool},
                             {"t0_factor", config.ese.t0_factor}};
    }
    return j;
}

namespace {

// Shared state of one optimization run: current design, incremental
// evaluator, best-so-far and the trace.
class Run {
public:
    Run(const LhsDesign& initial, const CriterionSpec& spec, const OptimizerConfig& config, const RecordHook& hook)
        : spec_(spec),
          config_(config),
          hook_(hook),
          rng_(config.seed),
          current_(initial),
          state_(initial.matrix(), spec),
          best_(initial),
          start_(std::chrono::steady_clock::now()) {
        config.validate();
        if (initial.n_points() < 2) throw InvalidArgument("optimization needs at least two design points");
        if (initial.matrix() != state_.design()) throw StaleState("initial design mismatch");
        current_value_ = state_.value().value;
        best_value_ = current_value_;
        interval_ = std::max<std::uint64_t>(1, config.budget / 1000);
        trace_.metadata.config = config;
        trace_.metadata.criterion = spec;
        trace_.metadata.initial_fingerprint = initial.fingerprint();
    }

    [[nodiscard]] double f_current() const { return CriterionValue::to_objective(spec_, current_value_); }
    [[nodiscard]] double f_best() const { return CriterionValue::to_objective(spec_, best_value_); }
    [[nodiscard]] double objective(double value) const { return CriterionValue::to_objective(spec_, value); }
    [[nodiscard]] std::size_t n() const { return current_.n_points(); }
    [[nodiscard]] std::size_t d() const { return current_.n_dims(); }
    Rng& rng() { return rng_; }
    SwapDeltaState& state() { return state_; }

    /// Metropolis rule on the minimization objective.
    bool accept(double f_new, double temperature) {
        const double f_cur = f_current();
        if (std::isinf(f_new) && f_new > 0) return false;
        if (std::isinf(f_cur) && f_cur > 0) return true;
        const double delta = f_new - f_cur;
        if (delta <= 0.0) return true;
        if (!(temperature > 0.0)) return false;
        return rng_.uniform() < std::exp(-delta / temperature);
    }

    void commit(std::size_t col, std::size_t a, std::size_t b) {
        current_value_ = state_.apply(col, a, b).value;
        current_.swap_in_column(col, a, b);
    }

    /// Updates the best design; returns true on strict improvement.
    bool update_best() {
        if (f_current() < f_best()) {
            best_value_ = current_value_;
            best_ = current_;
            new_best_ = true;
            return true;
        }
        return false;
    }

    void initial_record(double temperature) { push(0, temperature); }

    /// Records after `count` perturbations when a checkpoint was crossed or the
    /// best improved.
    void maybe_record(std::uint64_t count, double temperature) {
        const bool crossed = count / interval_ > last_count_ / interval_;
        if (crossed || new_best_) push(count, temperature);
        new_best_ = false;
    }

    OptimizationResult finish(std::uint64_t count, double temperature, Termination termination) {
        if (trace_.records.empty() || trace_.records.back().perturbations != count) push(count, temperature);
        OptimizationResult out;
        const auto final_check = evaluate(best_.matrix(), spec_);
        out.best_value = final_check;
        out.best_design = std::move(best_);
        trace_.metadata.final_fingerprint = out.best_design.fingerprint();
        trace_.metadata.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        out.trace = std::move(trace_);
        out.termination = termination;
        out.perturbations = count;
        out.warnings = std::move(warnings_);
        return out;
    }

    void warn(std::string message) { warnings_.push_back(std::move(message)); }

private:
    void push(std::uint64_t count, double temperature) {
        if (!trace_.records.empty() && trace_.records.back().perturbations == count) return;
        trace_.records.push_back({count, current_value_, best_value_, temperature});
        last_count_ = count;
        if (hook_) hook_(trace_.records.back(), best_);
    }

    CriterionSpec spec_;
    OptimizerConfig config_;
    const RecordHook& hook_;
    Rng rng_;
    LhsDesign current_;
    SwapDeltaState state_;
    LhsDesign best_;
    double current_value_ = 0.0;
    double best_value_ = 0.0;
    OptimizationTrace trace_;
    std::uint64_t interval_ = 1;
    std::uint64_t last_count_ = 0;
    bool new_best_ = false;
    std::vector<std::string> warnings_;
    std::chrono::steady_clock::time_point start_;
};

struct Swap {
    std::size_t col;
    std::size_t a;
    std::size_t b;
};

Swap random_swap(Run& run) {
    const auto col = static_cast<std::size_t>(run.rng().below(run.d()));
    const auto [a, b] = run.rng().distinct_pair(run.n());
    return {col, a, b};
}

}  // namespace

OptimizationResult optimize_geometric_sa(const LhsDesign& initial, const CriterionSpec& spec,
                                         const OptimizerConfig& config, const RecordHook& hook) {
    Run run(initial, spec, config, hook);
    if (config.c < 0.95 && initial.n_dims() > 20) {
        run.warn(fmt::format("geometric SA with c = {} in dimension {}: the temperature collapses quickly; "
                             "use c close to 1 for high dimensions",
                             config.c, initial.n_dims()));
    }
    const double t0 = config.t0.value_or(0.1);
    run.initial_record(t0);
    double temperature = t0;
    for (std::uint64_t i = 1; i <= config.budget; ++i) {
        temperature = t0 * std::pow(config.c, static_cast<double>(i));
        const Swap s = random_swap(run);
        const double value = run.state().preview(s.col, s.a, s.b);
        if (run.accept(run.objective(value), temperature)) {
            run.commit(s.col, s.a, s.b);
            run.update_best();
        }
        run.maybe_record(i, temperature);
    }
    return run.finish(config.budget, temperature, Termination::BudgetExhausted);
}

OptimizationResult optimize_mm_sa(const LhsDesign& initial, const CriterionSpec& spec, const OptimizerConfig& config,
                                  const RecordHook& hook) {
    Run run(initial, spec, config, hook);
    double temperature = config.t0.value_or(0.1);
    run.initial_record(temperature);
    std::uint64_t since_improvement = 0;
    std::uint64_t since_acceptance = 0;
    std::uint64_t i = 0;
    while (i < config.budget) {
        ++i;
        const Swap s = random_swap(run);
        const double value = run.state().preview(s.col, s.a, s.b);
        if (run.accept(run.objective(value), temperature)) {
            run.commit(s.col, s.a, s.b);
            since_acceptance = 0;
        } else {
            ++since_acceptance;
        }
        if (run.update_best()) {
            since_improvement = 0;
        } else if (++since_improvement >= config.i_max) {
            temperature *= config.c;
            since_improvement = 0;
        }
        run.maybe_record(i, temperature);
        if (since_acceptance >= config.i_max) return run.finish(i, temperature, Termination::Stalled);
    }
    return run.finish(i, temperature, Termination::BudgetExhausted);
}

OptimizationResult optimize_ese(const LhsDesign& initial, const CriterionSpec& spec, const OptimizerConfig& config,
                                const RecordHook& hook) {
    Run run(initial, spec, config, hook);
    const EseSchedule& sched = config.ese;
    double temperature = config.t0.value_or(sched.t0_factor * std::abs(run.f_current()));
    if (!(temperature > 0.0) || !std::isfinite(temperature)) temperature = sched.t0_factor;
    run.initial_record(temperature);

    const std::uint64_t per_outer = config.m_inner * config.j_candidates;
    const std::uint64_t q = config.q_outer.value_or((config.budget + per_outer - 1) / per_outer);
    std::uint64_t count = 0;
    std::uint64_t inner_counter = 0;
    std::vector<std::pair<std::size_t, std::size_t>> drawn;
    drawn.reserve(config.j_candidates);

    for (std::uint64_t outer = 0; outer < q && count < config.budget; ++outer) {
        std::uint64_t accepted = 0;
        std::uint64_t inner_done = 0;
        bool improved = false;
        for (std::uint64_t m = 0; m < config.m_inner && count < config.budget; ++m) {
            const auto col = static_cast<std::size_t>(inner_counter++ % run.d());
            const std::uint64_t j_here = std::min(config.j_candidates, config.budget - count);
            drawn.clear();
            double best_candidate = std::numeric_limits<double>::infinity();
            std::pair<std::size_t, std::size_t> chosen{0, 1};
            for (std::uint64_t j = 0; j < j_here; ++j) {
                std::pair<std::size_t, std::size_t> pair;
                for (int attempt = 0;; ++attempt) {
                    auto [a, b] = run.rng().distinct_pair(run.n());
                    pair = {std::min(a, b), std::max(a, b)};
                    if (attempt >= 10 || std::find(drawn.begin(), drawn.end(), pair) == drawn.end()) break;
                }
                drawn.push_back(pair);
                const double value = run.state().preview(col, pair.first, pair.second);
                const double f = run.objective(value);
                if (j == 0 || f < best_candidate) {
                    best_candidate = f;
                    chosen = pair;
                }
            }
            count += j_here;
            ++inner_done;
            if (run.accept(best_candidate, temperature)) {
                run.commit(col, chosen.first, chosen.second);
                ++accepted;
            }
            improved = run.update_best() || improved;
            run.maybe_record(count, temperature);
        }
        const double ratio = static_cast<double>(accepted) / static_cast<double>(inner_done);
        if (improved) {
            temperature = ratio > sched.acceptance_low ? temperature * sched.improve_cool
                                                       : temperature / sched.improve_cool;
        } else if (ratio < sched.acceptance_low) {
            temperature /= sched.explore_warm;
        } else if (ratio > sched.acceptance_high) {
            temperature *= sched.explore_cool;
        }
    }
    return run.finish(count, temperature, Termination::BudgetExhausted);
}

OptimizationResult optimize(const LhsDesign& initial, const CriterionSpec& spec, const OptimizerConfig& config,
                            const RecordHook& hook) {
    switch (config.algorithm) {
        case Algorithm::GeometricSA: return optimize_geometric_sa(initial, spec, config, hook);
        case Algorithm::MorrisMitchellSA: return optimize_mm_sa(initial, spec, config, hook);
        case Algorithm::Ese: return optimize_ese(initial, spec, config, hook);
    }
    throw InvalidArgument("unknown algorithm");
}

std::string trace_to_csv(const OptimizationTrace& trace) {
    fmt::memory_buffer buf;
    fmt::format_to(std::back_inserter(buf), "perturbations,current,best,temperature\n");
    for (const auto& r : trace.records) {
        fmt::format_to(std::back_inserter(buf), "{},{:.17g},{:.17g},{:.17g}\n", r.perturbations, r.current, r.best,
                       r.temperature);
    }
    return fmt::to_string(buf);
}

nlohmann::json trace_metadata_json(const OptimizationResult& result) {
    const auto& meta = result.trace.metadata;
    nlohmann::json j;
    j["config"] = to_json(meta.config);
    j["criterion"] = meta.criterion.name();
    if (meta.criterion.kind == CriterionKind::PhiP) j["p"] = meta.criterion.p;
    j["seed"] = meta.config.seed.value;
    j["initial_design_hash"] = fmt::format("{:016x}", meta.initial_fingerprint);
    j["final_design_hash"] = fmt::format("{:016x}", meta.final_fingerprint);
    j["wall_seconds"] = meta.wall_seconds;
    j["perturbations"] = result.perturbations;
    j["termination"] = to_string(result.termination);
    j["best_value"] = to_json(result.best_value);
    j["warnings"] = result.warnings;
    return j;
}

}  // namespace sfd
