// sfd: generate, optimize and diagnose space-filling Latin hypercube designs.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/chrono.h>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "sfd/bench.hpp"
#include "sfd/compare.hpp"
#include "sfd/criteria.hpp"
#include "sfd/design.hpp"
#include "sfd/design_io.hpp"
#include "sfd/diagnostics.hpp"
#include "sfd/errors.hpp"
#include "sfd/optimizers.hpp"
#include "sfd/parallel.hpp"
#include "sfd/sobol.hpp"

#ifndef SFD_VERSION
#define SFD_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum ExitCode : int { kOk = 0, kUsage = 2, kData = 3, kDegenerate = 4 };

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw sfd::ParseError(fmt::format("cannot open '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string utc_now() {
    const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
    return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", now);
}

/// Records what a command did; written as manifest.json next to its outputs.
class RunManifest {
public:
    RunManifest(std::string command, std::vector<std::string> argv) : started_(utc_now()) {
        doc_["command"] = std::move(command);
        doc_["argv"] = std::move(argv);
        doc_["version"] = SFD_VERSION;
        doc_["inputs"] = json::array();
        doc_["outputs"] = json::array();
    }

    void set_seed(std::uint64_t seed) { doc_["seed"] = seed; }
    void set_config(json config) { doc_["config"] = std::move(config); }

    void add_input(const fs::path& path) {
        doc_["inputs"].push_back({{"path", path.string()}, {"fnv1a64", digest(read_file(path))}});
    }

    /// Writes an output file atomically and records its digest.
    void write_output(const fs::path& path, const std::string& contents) {
        sfd::write_file_atomic(path, contents);
        doc_["outputs"].push_back({{"path", path.filename().string()}, {"fnv1a64", digest(contents)}});
    }

    void finish(const fs::path& dir) {
        doc_["started_at"] = started_;
        doc_["finished_at"] = utc_now();
        sfd::write_file_atomic(dir / "manifest.json", doc_.dump(2) + "\n");
    }

private:
    static std::string digest(std::string_view bytes) { return fmt::format("{:016x}", fnv1a64(bytes)); }

    json doc_;
    std::string started_;
};

/// --seed if given, otherwise a fresh seed that is printed so the run can be repeated.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed) {
    if (seed) return *seed;
    std::random_device rd;
    const std::uint64_t drawn =
        sfd::mix64((static_cast<std::uint64_t>(rd()) << 32) ^ rd() ^
                   static_cast<std::uint64_t>(std::chrono::steady_clock::now().time_since_epoch().count()));
    std::cerr << "seed: " << drawn << "\n";
    return drawn;
}

fs::path resolve_output_dir(const std::optional<std::string>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("SFD_OUTPUT_DIR"); env != nullptr && *env != '\0') return env;
    return "sfd-out";
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string design_id(const fs::path& path) { return path.stem().string(); }

sfd::LhsDesign as_lhs(sfd::DesignMatrix matrix, const fs::path& path) {
    try {
        return sfd::LhsDesign::from_matrix(std::move(matrix));
    } catch (const sfd::InvalidArgument& e) {
        throw sfd::ParseError(fmt::format("'{}' is not a Latin hypercube: {}", path.string(), e.what()));
    }
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
    std::string method = "lhs";
    std::size_t n = 0;
    std::size_t d = 0;
    std::optional<std::uint64_t> seed;
    bool no_scramble = false;
    std::optional<std::string> out;
};

int run_generate(const GenerateArgs& a) {
    const sfd::Seed seed{resolve_seed(a.seed)};
    sfd::DesignMatrix design;
    if (a.method == "lhs") {
        design = sfd::generate_random_lhs(a.n, a.d, seed).matrix();
    } else if (a.method == "lhs-centered") {
        design = sfd::generate_centered_lhs(a.n, a.d, seed).matrix();
    } else if (a.method == "srs") {
        design = sfd::generate_srs(a.n, a.d, seed);
    } else {
        sfd::SobolConfig config;
        config.dimension = a.d;
        config.scramble = a.no_scramble ? sfd::Scramble::None : sfd::Scramble::OwenNested;
        config.seed = seed;
        design = sfd::generate_sobol(a.n, config);
    }
    const auto text = sfd::design_to_csv(design);
    if (a.out) {
        sfd::write_file_atomic(*a.out, text);
    } else {
        std::cout << text;
    }
    return kOk;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
    std::string design;
    std::string criteria = "c2,w2,l2star,mindist,phip";
    std::string format = "json";
};

int run_evaluate(const EvaluateArgs& a) {
    std::vector<sfd::CriterionSpec> specs;
    for (const auto& name : split_list(a.criteria)) specs.push_back(sfd::CriterionSpec::parse(name));
    if (specs.empty()) throw sfd::InvalidArgument("no criteria given");
    const auto design = sfd::read_design_csv(fs::path(a.design));

    bool degenerate = false;
    std::vector<sfd::CriterionValue> values;
    for (const auto& spec : specs) {
        values.push_back(sfd::evaluate(design, spec));
        degenerate = degenerate || values.back().degenerate;
    }
    if (a.format == "json") {
        json out{{"design", a.design}, {"n", design.n_points()}, {"d", design.n_dims()}, {"criteria", json::array()}};
        for (const auto& v : values) out["criteria"].push_back(sfd::to_json(v));
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "criterion,value,degenerate\n";
        for (const auto& v : values) {
            std::cout << fmt::format("{},{:.17g},{}\n", v.spec.name(), v.value, v.degenerate ? 1 : 0);
        }
    }
    return degenerate ? kDegenerate : kOk;
}

// ---------------------------------------------------------------- optimize

struct OptimizeArgs {
    std::optional<std::string> in;
    std::string generator = "lhs";
    std::size_t n = 0;
    std::size_t d = 0;
    std::string criterion = "phip";
    std::string algo = "ese";
    std::optional<double> t0;
    double c = 0.9;
    std::uint64_t i_max = 100;
    std::uint64_t m_inner = 100;
    std::uint64_t j_candidates = 50;
    std::optional<std::uint64_t> q_outer;
    std::uint64_t budget = 10'000;
    std::size_t replicates = 1;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::size_t jobs = 1;
};

int run_optimize(const OptimizeArgs& a, const std::vector<std::string>& argv) {
    const auto spec = sfd::CriterionSpec::parse(a.criterion);
    sfd::OptimizerConfig base;
    base.algorithm = sfd::parse_algorithm(a.algo);
    base.t0 = a.t0;
    base.c = a.c;
    base.i_max = a.i_max;
    base.m_inner = a.m_inner;
    base.j_candidates = a.j_candidates;
    base.q_outer = a.q_outer;
    base.budget = a.budget;
    base.validate();
    if (a.replicates == 0) throw sfd::InvalidArgument("--replicates must be at least 1");

    std::optional<sfd::LhsDesign> given;
    if (a.in) {
        given = as_lhs(sfd::read_design_csv(fs::path(*a.in)), *a.in);
    } else {
        if (a.n == 0 || a.d == 0) throw sfd::InvalidArgument("give --in or both -n and -d");
        if (a.generator != "lhs" && a.generator != "lhs-centered") {
            throw sfd::InvalidArgument(fmt::format("unknown generator '{}' (expected lhs or lhs-centered)", a.generator));
        }
    }

    const std::uint64_t seed = resolve_seed(a.seed);
    const fs::path dir = resolve_output_dir(a.out_dir);
    RunManifest manifest("optimize", argv);
    manifest.set_seed(seed);
    json config = sfd::to_json(base);
    config["criterion"] = spec.name();
    config["replicates"] = a.replicates;
    config["input"] = a.in ? json(*a.in) : json{{"generator", a.generator}, {"n", a.n}, {"d", a.d}};
    manifest.set_config(config);
    if (a.in) manifest.add_input(*a.in);

    std::vector<sfd::OptimizationResult> results(a.replicates);
    sfd::parallel_for(a.replicates, a.jobs, [&](std::size_t r) {
        const sfd::Seed replicate_seed = sfd::Seed{seed}.offset(r);
        sfd::LhsDesign initial;
        if (given) {
            initial = *given;
        } else if (a.generator == "lhs") {
            initial = sfd::generate_random_lhs(a.n, a.d, replicate_seed);
        } else {
            initial = sfd::generate_centered_lhs(a.n, a.d, replicate_seed);
        }
        sfd::OptimizerConfig config = base;
        config.seed = sfd::optimizer_stream_seed(replicate_seed);
        results[r] = sfd::optimize(initial, spec, config);
    });

    json summary = json::array();
    for (std::size_t r = 0; r < a.replicates; ++r) {
        const auto& res = results[r];
        const std::string tag = fmt::format("{:03}", r + 1);
        manifest.write_output(dir / fmt::format("best_{}.csv", tag), sfd::design_to_csv(res.best_design.matrix()));
        manifest.write_output(dir / fmt::format("trace_{}.csv", tag), sfd::trace_to_csv(res.trace));
        auto meta = sfd::trace_metadata_json(res);
        meta["replicate"] = r + 1;
        meta["replicate_seed"] = seed + r;
        manifest.write_output(dir / fmt::format("trace_{}.json", tag), meta.dump(2) + "\n");
        for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
        summary.push_back({{"replicate", r + 1},
                           {"best_value", sfd::to_json(res.best_value)},
                           {"perturbations", res.perturbations},
                           {"termination", sfd::to_string(res.termination)}});
    }
    manifest.finish(dir);
    std::cout << summary.dump(2) << "\n";
    return kOk;
}

// ---------------------------------------------------------------- subproj

struct SubprojArgs {
    std::vector<std::string> designs;
    std::size_t k = 2;
    std::string metric = "c2";
    std::optional<std::size_t> sampled;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::size_t jobs = 1;
};

int run_subproj(const SubprojArgs& a, const std::vector<std::string>& argv) {
    const auto metric = sfd::SubprojectionMetric::parse(a.metric);
    std::vector<sfd::DesignMatrix> designs;
    std::vector<std::string> ids;
    for (const auto& path : a.designs) {
        designs.push_back(sfd::read_design_csv(fs::path(path)));
        ids.push_back(design_id(path));
    }
    sfd::SubprojectionOptions options;
    options.jobs = a.jobs;
    options.sampled = a.sampled;
    RunManifest manifest("subproj", argv);
    if (a.sampled) {
        const std::uint64_t seed = resolve_seed(a.seed);
        options.seed = sfd::Seed{seed};
        manifest.set_seed(seed);
    }
    const auto report = sfd::subprojection_report(designs, ids, a.k, metric, options);

    const fs::path dir = resolve_output_dir(a.out_dir);
    manifest.set_config({{"k", a.k}, {"metric", metric.name()}, {"sampled", a.sampled ? json(*a.sampled) : json()}});
    for (const auto& path : a.designs) manifest.add_input(path);
    const auto doc = sfd::to_json(report);
    manifest.write_output(dir / "subprojections.json", doc.dump(2) + "\n");
    manifest.write_output(dir / "subprojections.csv", sfd::subprojection_to_csv(report));
    manifest.finish(dir);

    json out{{"k", report.k}, {"metric", metric.name()}, {"tuples", report.tuples.size()},
             {"pooled_summary", doc["pooled_summary"]}};
    if (doc.contains("pooled_sigma_summary")) out["pooled_sigma_summary"] = doc["pooled_sigma_summary"];
    std::cout << out.dump(2) << "\n";
    return kOk;
}

// ---------------------------------------------------------------- mst

int run_mst(const std::string& path) {
    const auto design = sfd::read_design_csv(fs::path(path));
    auto doc = sfd::to_json(sfd::mst_summary(design));
    doc["design"] = path;
    std::cout << doc.dump(2) << "\n";
    return kOk;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
    std::string figure;
    std::string scale = "desk";
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::size_t jobs = 1;
};

int run_bench(const BenchArgs& a, const std::vector<std::string>& argv) {
    sfd::check_figure_id(a.figure);
    sfd::BenchOptions options;
    options.figure = a.figure;
    options.scale = sfd::parse_bench_scale(a.scale);
    options.jobs = a.jobs;
    options.seed = sfd::Seed{resolve_seed(a.seed)};
    const fs::path dir = resolve_output_dir(a.out_dir);

    RunManifest manifest("bench", argv);
    manifest.set_seed(options.seed.value);
    const auto result = sfd::run_bench(options);
    manifest.set_config(result.parameters);
    for (const auto& file : result.files) {
        manifest.write_output(dir / file.name, file.content);
        std::cout << (dir / file.name).string() << "\n";
    }
    manifest.finish(dir);
    return kOk;
}

constexpr const char* kOptimizeExamples = R"(Examples:
  Fig. 5, case 1 (MM SA with T0=0.1, I_max=100, c=0.9):
    sfd optimize -n 50 -d 5 --criterion phip --algo mmsa --t0 0.1 --imax 100 --c 0.9 \
      --budget 60000 --replicates 10 --seed 1 --out-dir fig5-case1
  Fig. 5, case 2: the same with --imax 300.
  Fig. 6 (ESE, M=100, J=50):
    sfd optimize -n 50 -d 5 --criterion phip --algo ese --m 100 --j 50 --budget 30000 --replicates 10 --seed 1
)";

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv, argv + argc);
    CLI::App app{"Space-filling Latin hypercube designs: generation, optimization and diagnostics"};
    app.set_version_flag("--version", SFD_VERSION);
    app.require_subcommand(1);
    app.footer("Exit codes: 0 success, 2 usage error, 3 data or parse error, 4 degenerate design.\n"
               "Default output directory: $SFD_OUTPUT_DIR, else ./sfd-out.");

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Write a new design as CSV");
    generate->add_option("--method", gen.method, "lhs | lhs-centered | srs | sobol")
        ->check(CLI::IsMember({"lhs", "lhs-centered", "srs", "sobol"}))
        ->capture_default_str();
    generate->add_option("-n,--points", gen.n, "Number of points")->required()->check(CLI::PositiveNumber);
    generate->add_option("-d,--dims", gen.d, "Number of dimensions")->required()->check(CLI::PositiveNumber);
    generate->add_option("--seed", gen.seed, "Random seed (drawn and printed when absent)");
    generate->add_flag("--no-scramble", gen.no_scramble, "sobol: plain Sobol' points");
    generate->add_option("-o,--out", gen.out, "Output file (stdout when absent)");

    EvaluateArgs eval;
    auto* evaluate = app.add_subcommand("evaluate", "Evaluate criteria on a design file");
    evaluate->add_option("design", eval.design, "Design CSV")->required();
    evaluate->add_option("--criteria", eval.criteria, "Comma-separated: c2,w2,l2star,mindist,phip[:p]")
        ->capture_default_str();
    evaluate->add_option("--format", eval.format, "json | csv")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();

    OptimizeArgs opt;
    auto* optimize = app.add_subcommand("optimize", "Optimize LHS designs by swaps");
    optimize->add_option("--in", opt.in, "Start from this design (must be a Latin hypercube)");
    optimize->add_option("--generator", opt.generator, "lhs | lhs-centered, when --in is absent")
        ->capture_default_str();
    optimize->add_option("-n,--points", opt.n, "Points of generated initial designs");
    optimize->add_option("-d,--dims", opt.d, "Dimensions of generated initial designs");
    optimize->add_option("--criterion", opt.criterion, "c2 | w2 | l2star | mindist | phip[:p]")->capture_default_str();
    optimize->add_option("--algo", opt.algo, "sa (geometric) | mmsa (Morris-Mitchell) | ese")
        ->check(CLI::IsMember({"sa", "mmsa", "ese"}))
        ->capture_default_str();
    optimize->add_option("--t0", opt.t0, "Initial temperature");
    optimize->add_option("--c", opt.c, "Cooling ratio (sa, mmsa)")->capture_default_str();
    optimize->add_option("--imax", opt.i_max, "mmsa plateau length")->capture_default_str();
    optimize->add_option("--m", opt.m_inner, "ese inner iterations")->capture_default_str();
    optimize->add_option("--j", opt.j_candidates, "ese candidates per iteration")->capture_default_str();
    optimize->add_option("--q", opt.q_outer, "ese outer iterations (default: budget / (m j))");
    optimize->add_option("--budget", opt.budget, "Maximum elementary perturbations")->capture_default_str();
    optimize->add_option("--replicates", opt.replicates, "Replicate r uses seed + r")->capture_default_str();
    optimize->add_option("--seed", opt.seed, "Random seed (drawn and printed when absent)");
    optimize->add_option("--out-dir", opt.out_dir, "Output directory");
    optimize->add_option("--jobs", opt.jobs, "Parallel replicates")->capture_default_str()->check(CLI::PositiveNumber);
    optimize->footer(kOptimizeExamples);

    SubprojArgs sub;
    auto* subproj = app.add_subcommand("subproj", "Criteria on k-column subprojections");
    subproj->add_option("designs", sub.designs, "Design CSVs with equal shapes")->required();
    subproj->add_option("-k", sub.k, "Subprojection size")->capture_default_str();
    subproj->add_option("--metric", sub.metric, "c2 | w2 | l2star | mindist | phip | mst")->capture_default_str();
    subproj->add_option("--sampled", sub.sampled, "Evaluate this many random k-subsets");
    subproj->add_option("--seed", sub.seed, "Seed for --sampled");
    subproj->add_option("--out-dir", sub.out_dir, "Output directory");
    subproj->add_option("--jobs", sub.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);

    std::string mst_path;
    auto* mst = app.add_subcommand("mst", "Minimum spanning tree statistics of a design");
    mst->add_option("design", mst_path, "Design CSV")->required();

    BenchArgs bench_args;
    auto* bench = app.add_subcommand("bench", "Reproduce a figure's dataset as CSV");
    bench->add_option("figure", bench_args.figure, "fig4 .. fig14")->required();
    bench->add_option("--scale", bench_args.scale, "desk | full")
        ->check(CLI::IsMember({"desk", "full"}))
        ->capture_default_str();
    bench->add_option("--seed", bench_args.seed, "Random seed (drawn and printed when absent)");
    bench->add_option("--out-dir", bench_args.out_dir, "Output directory");
    bench->add_option("--jobs", bench_args.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*generate) return run_generate(gen);
        if (*evaluate) return run_evaluate(eval);
        if (*optimize) return run_optimize(opt, args);
        if (*subproj) return run_subproj(sub, args);
        if (*mst) return run_mst(mst_path);
        if (*bench) return run_bench(bench_args, args);
    } catch (const sfd::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const sfd::DegenerateDesign& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDegenerate;
    } catch (const sfd::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kData;
    } catch (const sfd::IndexOutOfRange& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kData;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kData;
    }
    return kUsage;
}
