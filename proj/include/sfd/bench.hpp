#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sfd/compare.hpp"
#include "sfd/diagnostics.hpp"

namespace sfd {

enum class BenchScale { Desk, Full };

[[nodiscard]] std::string to_string(BenchScale s);
/// "desk" | "full"
[[nodiscard]] BenchScale parse_bench_scale(std::string_view name);

/// fig4 .. fig14, in order.
[[nodiscard]] const std::vector<std::string>& bench_figures();

/// Throws InvalidArgument for an unknown figure id.
void check_figure_id(std::string_view figure);

/// Convergence scenarios (fig4 .. fig7). The monitor is mindist of the best
/// design so far; checkpoints are 0 and 50 evenly spaced counts up to the budget.
///
///   fig4  N=100 d=10, ESE M=100 J=50, variants `phip` and `mindist`, 50k
///   fig5  N=50 d=5, MM SA T0=0.1 c=0.9, `case1` I_max=100, `case2` I_max=300, 60k
///   fig6  N=50 d=5, ESE M=100 J=50 `ese`, 30k
///   fig7  N=50 d=5, `ese` M=300 J=50 and `mmsa` T0=0.01 I_max=1000 c=0.98, 350k
///
/// Desk scale runs 10 replicates, full scale 50.
[[nodiscard]] ComparisonScenario convergence_scenario(std::string_view figure, BenchScale scale, Seed seed,
                                                      std::size_t jobs = 1);

/// Families of designs compared in the subprojection study.
enum class DesignClass { Random, CenteredOpt, WrapAroundOpt, StarOpt, Maximin, Sobol };

[[nodiscard]] std::string to_string(DesignClass c);

/// Settings of the subprojection study (fig9 .. fig14) and of fig8.
///
/// Optimized classes run geometric SA on random LHS with
/// T0 = t0_factor * |f(initial)| and c = c_end^(1 / budget), so the final
/// temperature is c_end * T0 whatever the budget. Maximin designs minimize phi_p(50).
struct StudyParameters {
    std::size_t n_points = 100;
    std::vector<std::size_t> dims{2, 5, 10, 20};
    std::size_t designs = 5;
    std::uint64_t budget = 200'000;
    double t0_factor = 0.1;
    double c_end = 1e-5;
};

[[nodiscard]] StudyParameters study_parameters(BenchScale scale);

[[nodiscard]] nlohmann::json to_json(const StudyParameters& p);

/// Optimizer configuration used for optimized classes.
[[nodiscard]] OptimizerConfig study_optimizer_config(const StudyParameters& p, double initial_objective, Seed seed);

/// The `designs` members of a class at dimension d. Design i depends only on
/// (seed, class, d, i), so figures sharing a class share its designs.
[[nodiscard]] std::vector<DesignMatrix> study_designs(DesignClass cls, std::size_t d, const StudyParameters& p,
                                                      Seed seed, std::size_t jobs = 1);

struct BenchOptions {
    std::string figure = "fig9";
    BenchScale scale = BenchScale::Desk;
    Seed seed{20'240'601};
    std::size_t jobs = 1;
};

struct BenchFile {
    std::string name;
    std::string content;
};

struct BenchResult {
    std::vector<BenchFile> files;
    /// Scenario description for the run manifest.
    nlohmann::json parameters;
};

/// Runs a figure scenario and returns its CSV datasets in memory.
///
///   fig4..fig7    <fig>_convergence.csv  checkpoint,variant,q05,q25,q50,q75,q95,mean
///   fig8          fig8_mst.csv           checkpoint,variant,m,sigma (means over designs)
///   fig9..fig14   <fig>_subprojections.csv  class,d,design_id,cols,metric,value
///                 <fig>_summary.csv         class,d,metric,min,q25,median,q75,max
///
/// fig9: C2 of 2D subsamples for random and C2-optimized LHS; fig10: scrambled
/// Sobol'; fig11: star-L2-optimized LHS; fig12: maximin LHS; fig13 and fig14:
/// MST m and sigma of 2D subsamples of maximin and C2-optimized LHS.
/// Output depends only on the options, not on `jobs`.
[[nodiscard]] BenchResult run_bench(const BenchOptions& options);

}  // namespace sfd
