#include "sfd/bench.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numeric>

#include <fmt/format.h>

#include "sfd/errors.hpp"
#include "sfd/parallel.hpp"
#include "sfd/sobol.hpp"

namespace sfd {

namespace {

constexpr std::size_t kConvergenceCheckpoints = 50;

std::vector<std::uint64_t> checkpoints_from_zero(std::uint64_t budget, std::size_t count) {
    std::vector<std::uint64_t> out{0};
    for (const auto c : even_checkpoints(budget, count)) out.push_back(c);
    return out;
}

double mindist_monitor(const DesignMatrix& x) { return mindist(x).value; }

OptimizerVariant ese_variant(std::string label, CriterionSpec spec, std::uint64_t m_inner) {
    OptimizerConfig config;
    config.algorithm = Algorithm::Ese;
    config.m_inner = m_inner;
    config.j_candidates = 50;
    return {std::move(label), spec, config};
}

OptimizerVariant mm_variant(std::string label, double t0, double c, std::uint64_t i_max) {
    OptimizerConfig config;
    config.algorithm = Algorithm::MorrisMitchellSA;
    config.t0 = t0;
    config.c = c;
    config.i_max = i_max;
    return {std::move(label), CriterionSpec{CriterionKind::PhiP}, config};
}

CriterionSpec class_criterion(DesignClass cls) {
    switch (cls) {
        case DesignClass::CenteredOpt: return {CriterionKind::CenteredL2};
        case DesignClass::WrapAroundOpt: return {CriterionKind::WrapAroundL2};
        case DesignClass::StarOpt: return {CriterionKind::StarL2};
        case DesignClass::Maximin: return {CriterionKind::PhiP};
        default: break;
    }
    throw InvalidArgument("design class is not optimized");
}

Seed design_seed(Seed seed, DesignClass cls, std::size_t d, std::size_t i) {
    std::uint64_t h = mix64(seed.value ^ 0x6a09e667f3bcc909ULL);
    h = mix64(h ^ static_cast<std::uint64_t>(cls));
    h = mix64(h ^ static_cast<std::uint64_t>(d));
    return Seed{mix64(h ^ static_cast<std::uint64_t>(i))};
}

DesignMatrix study_design(DesignClass cls, std::size_t d, const StudyParameters& p, Seed seed, std::size_t i) {
    const Seed s = design_seed(seed, cls, d, i);
    switch (cls) {
        case DesignClass::Random: return generate_random_lhs(p.n_points, d, s).matrix();
        case DesignClass::Sobol: {
            SobolConfig config;
            config.dimension = d;
            config.scramble = Scramble::OwenNested;
            config.seed = s;
            return generate_sobol(p.n_points, config);
        }
        default: break;
    }
    const CriterionSpec spec = class_criterion(cls);
    const auto initial = generate_random_lhs(p.n_points, d, s);
    const double f0 = evaluate(initial.matrix(), spec).objective();
    const auto config = study_optimizer_config(p, f0, Seed{mix64(s.value)});
    return optimize(initial, spec, config).best_design.matrix();
}

struct StudyPanel {
    DesignClass cls;
    SubprojectionMetric metric;
};

std::vector<StudyPanel> study_panels(std::string_view figure) {
    const auto c2 = SubprojectionMetric::of({CriterionKind::CenteredL2});
    const auto mst = SubprojectionMetric::mst_stats();
    if (figure == "fig9") return {{DesignClass::Random, c2}, {DesignClass::CenteredOpt, c2}};
    if (figure == "fig10") return {{DesignClass::Sobol, c2}, {DesignClass::CenteredOpt, c2}};
    if (figure == "fig11") return {{DesignClass::StarOpt, c2}};
    if (figure == "fig12") return {{DesignClass::Maximin, c2}};
    if (figure == "fig13") return {{DesignClass::Maximin, mst}};
    return {{DesignClass::CenteredOpt, mst}};
}

void append_summary(fmt::memory_buffer& buf, DesignClass cls, std::size_t d, std::string_view metric,
                    const FiveNumber& f) {
    fmt::format_to(std::back_inserter(buf), "{},{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", to_string(cls), d,
                   metric, f.min, f.q25, f.median, f.q75, f.max);
}

BenchResult run_convergence(const BenchOptions& options) {
    const auto scenario = convergence_scenario(options.figure, options.scale, options.seed, options.jobs);
    const auto report = compare_optimizers(scenario);
    BenchResult out;
    out.files.push_back({options.figure + "_convergence.csv", comparison_to_csv(report)});
    nlohmann::json variants = nlohmann::json::array();
    for (const auto& v : scenario.variants) {
        auto config = to_json(v.config);
        config.erase("budget");
        config.erase("seed");
        variants.push_back({{"label", v.label}, {"criterion", v.criterion.name()}, {"config", config}});
    }
    out.parameters = {{"n_points", scenario.n_points}, {"n_dims", scenario.n_dims},
                      {"replicates", scenario.replicates}, {"budget", scenario.budget},
                      {"monitor", "mindist"}, {"variants", variants}};
    return out;
}

BenchResult run_fig8(const BenchOptions& options) {
    StudyParameters p = study_parameters(options.scale);
    const std::size_t d = 10;
    const std::vector<DesignClass> classes{DesignClass::CenteredOpt, DesignClass::WrapAroundOpt};
    const auto checkpoints = checkpoints_from_zero(p.budget, 20);
    // mst[class][design][checkpoint]
    std::vector<std::vector<std::vector<MstSummary>>> mst(
        classes.size(), std::vector<std::vector<MstSummary>>(p.designs, std::vector<MstSummary>(checkpoints.size())));
    parallel_for(classes.size() * p.designs, options.jobs, [&](std::size_t task) {
        const std::size_t ci = task / p.designs;
        const std::size_t i = task % p.designs;
        const Seed s = design_seed(options.seed, classes[ci], d, i);
        const CriterionSpec spec = class_criterion(classes[ci]);
        const auto initial = generate_random_lhs(p.n_points, d, s);
        const double f0 = evaluate(initial.matrix(), spec).objective();
        const auto config = study_optimizer_config(p, f0, Seed{mix64(s.value)});
        const auto snapshots = best_at_checkpoints(initial, spec, config, checkpoints);
        for (std::size_t c = 0; c < checkpoints.size(); ++c) mst[ci][i][c] = mst_summary(snapshots[c]);
    });

    fmt::memory_buffer buf;
    auto it = std::back_inserter(buf);
    fmt::format_to(it, "checkpoint,variant,m,sigma\n");
    for (std::size_t ci = 0; ci < classes.size(); ++ci) {
        for (std::size_t c = 0; c < checkpoints.size(); ++c) {
            double m = 0.0;
            double sigma = 0.0;
            for (std::size_t i = 0; i < p.designs; ++i) {
                m += mst[ci][i][c].m;
                sigma += mst[ci][i][c].sigma;
            }
            const double k = static_cast<double>(p.designs);
            fmt::format_to(it, "{},{},{:.17g},{:.17g}\n", checkpoints[c], class_criterion(classes[ci]).name(), m / k,
                           sigma / k);
        }
    }
    BenchResult out;
    out.files.push_back({"fig8_mst.csv", fmt::to_string(buf)});
    auto params = to_json(p);
    params["dims"] = {d};
    out.parameters = {{"study", params}, {"variants", {"c2", "w2"}}};
    return out;
}

BenchResult run_study(const BenchOptions& options) {
    const StudyParameters p = study_parameters(options.scale);
    const auto panels = study_panels(options.figure);

    // Generate every design of every panel up front: one task per design.
    struct Cell {
        DesignClass cls;
        std::size_t d;
    };
    std::vector<Cell> cells;
    for (const auto& panel : panels) {
        for (const auto d : p.dims) cells.push_back({panel.cls, d});
    }
    std::vector<std::vector<DesignMatrix>> designs(cells.size(), std::vector<DesignMatrix>(p.designs));
    parallel_for(cells.size() * p.designs, options.jobs, [&](std::size_t task) {
        const auto& cell = cells[task / p.designs];
        designs[task / p.designs][task % p.designs] = study_design(cell.cls, cell.d, p, options.seed, task % p.designs);
    });

    std::vector<std::string> ids(p.designs);
    for (std::size_t i = 0; i < p.designs; ++i) ids[i] = std::to_string(i + 1);

    fmt::memory_buffer rows;
    fmt::memory_buffer summary;
    fmt::format_to(std::back_inserter(rows), "class,d,design_id,cols,metric,value\n");
    fmt::format_to(std::back_inserter(summary), "class,d,metric,min,q25,median,q75,max\n");
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        const auto& cell = cells[ci];
        const auto& metric = panels[ci / p.dims.size()].metric;
        SubprojectionOptions sub;
        sub.jobs = options.jobs;
        const auto report = subprojection_report(designs[ci], ids, 2, metric, sub);
        const std::string cls = to_string(cell.cls);
        const std::string value_name = metric.mst ? "m" : metric.name();
        for (const auto& pd : report.per_design) {
            for (std::size_t t = 0; t < report.tuples.size(); ++t) {
                const auto cols = format_columns(report.tuples[t]);
                fmt::format_to(std::back_inserter(rows), "{},{},{},{},{},{:.17g}\n", cls, cell.d, pd.id, cols,
                               value_name, pd.values[t]);
                if (metric.mst) {
                    fmt::format_to(std::back_inserter(rows), "{},{},{},{},sigma,{:.17g}\n", cls, cell.d, pd.id, cols,
                                   pd.sigmas[t]);
                }
            }
        }
        append_summary(summary, cell.cls, cell.d, value_name, report.pooled);
        if (metric.mst) append_summary(summary, cell.cls, cell.d, "sigma", *report.pooled_sigma);
    }

    BenchResult out;
    out.files.push_back({options.figure + "_subprojections.csv", fmt::to_string(rows)});
    out.files.push_back({options.figure + "_summary.csv", fmt::to_string(summary)});
    nlohmann::json panel_json = nlohmann::json::array();
    for (const auto& panel : panels) panel_json.push_back({{"class", to_string(panel.cls)}, {"metric", panel.metric.name()}});
    out.parameters = {{"study", to_json(p)}, {"k", 2}, {"panels", panel_json}};
    return out;
}

}  // namespace

std::string to_string(BenchScale s) { return s == BenchScale::Desk ? "desk" : "full"; }

BenchScale parse_bench_scale(std::string_view name) {
    if (name == "desk") return BenchScale::Desk;
    if (name == "full") return BenchScale::Full;
    throw InvalidArgument(fmt::format("unknown scale '{}' (expected desk or full)", name));
}

const std::vector<std::string>& bench_figures() {
    static const std::vector<std::string> ids{"fig4",  "fig5",  "fig6",  "fig7",  "fig8", "fig9",
                                              "fig10", "fig11", "fig12", "fig13", "fig14"};
    return ids;
}

void check_figure_id(std::string_view figure) {
    const auto& ids = bench_figures();
    if (std::find(ids.begin(), ids.end(), figure) == ids.end()) {
        throw InvalidArgument(fmt::format("unknown figure id '{}' (expected fig4 .. fig14)", figure));
    }
}

ComparisonScenario convergence_scenario(std::string_view figure, BenchScale scale, Seed seed, std::size_t jobs) {
    ComparisonScenario s;
    s.seed = seed;
    s.jobs = jobs;
    s.replicates = scale == BenchScale::Desk ? 10 : 50;
    s.monitor = mindist_monitor;
    const CriterionSpec phip{CriterionKind::PhiP};
    if (figure == "fig4") {
        s.n_points = 100;
        s.n_dims = 10;
        s.budget = 50'000;
        s.variants = {ese_variant("phip", phip, 100), ese_variant("mindist", {CriterionKind::Mindist}, 100)};
    } else if (figure == "fig5") {
        s.budget = 60'000;
        s.variants = {mm_variant("case1", 0.1, 0.9, 100), mm_variant("case2", 0.1, 0.9, 300)};
    } else if (figure == "fig6") {
        s.budget = 30'000;
        s.variants = {ese_variant("ese", phip, 100)};
    } else if (figure == "fig7") {
        s.budget = 350'000;
        s.variants = {ese_variant("ese", phip, 300), mm_variant("mmsa", 0.01, 0.98, 1000)};
    } else {
        check_figure_id(figure);
        throw InvalidArgument(fmt::format("{} is not a convergence figure", figure));
    }
    s.checkpoints = checkpoints_from_zero(s.budget, kConvergenceCheckpoints);
    return s;
}

std::string to_string(DesignClass c) {
    switch (c) {
        case DesignClass::Random: return "lhs";
        case DesignClass::CenteredOpt: return "c2-opt";
        case DesignClass::WrapAroundOpt: return "w2-opt";
        case DesignClass::StarOpt: return "l2star-opt";
        case DesignClass::Maximin: return "maximin";
        case DesignClass::Sobol: return "sobol";
    }
    return "unknown";
}

StudyParameters study_parameters(BenchScale scale) {
    StudyParameters p;
    if (scale == BenchScale::Full) {
        p.dims = {2, 5, 10, 20, 30, 40, 54};
        p.budget = 1'000'000;
    }
    return p;
}

nlohmann::json to_json(const StudyParameters& p) {
    return {{"n_points", p.n_points}, {"dims", p.dims},           {"designs", p.designs},
            {"budget", p.budget},     {"t0_factor", p.t0_factor}, {"c_end", p.c_end}};
}

OptimizerConfig study_optimizer_config(const StudyParameters& p, double initial_objective, Seed seed) {
    OptimizerConfig config;
    config.algorithm = Algorithm::GeometricSA;
    config.budget = p.budget;
    config.seed = seed;
    double t0 = p.t0_factor * std::abs(initial_objective);
    if (!(t0 > 0.0) || !std::isfinite(t0)) t0 = p.t0_factor;
    config.t0 = t0;
    config.c = std::pow(p.c_end, 1.0 / static_cast<double>(p.budget));
    return config;
}

std::vector<DesignMatrix> study_designs(DesignClass cls, std::size_t d, const StudyParameters& p, Seed seed,
                                        std::size_t jobs) {
    std::vector<DesignMatrix> out(p.designs);
    parallel_for(p.designs, jobs, [&](std::size_t i) { out[i] = study_design(cls, d, p, seed, i); });
    return out;
}

BenchResult run_bench(const BenchOptions& options) {
    check_figure_id(options.figure);
    BenchResult out;
    if (options.figure == "fig8") {
        out = run_fig8(options);
    } else if (options.figure == "fig4" || options.figure == "fig5" || options.figure == "fig6" ||
               options.figure == "fig7") {
        out = run_convergence(options);
    } else {
        out = run_study(options);
    }
    out.parameters["figure"] = options.figure;
    out.parameters["scale"] = to_string(options.scale);
    return out;
}

}  // namespace sfd
