#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sfd/criteria.hpp"
#include "sfd/design.hpp"

namespace sfd {

/// Minimum spanning tree of the design points under Euclidean distance.
struct MstSummary {
    double m = 0.0;  ///< mean edge length
    double sigma = 0.0;  ///< standard deviation of edge lengths (divisor = edge count)
    double total_weight = 0.0;
    std::vector<double> edge_lengths;  ///< N - 1 lengths, in insertion order
    std::vector<std::pair<std::size_t, std::size_t>> edges;
};

/// Dense O(N^2) Prim growth from row 0. Among equal candidate edges the one
/// with the smallest (row_i, row_j) pair wins. Throws DegenerateDesign for N < 2.
[[nodiscard]] MstSummary mst_summary(const DesignMatrix& design);

/// Kruskal over the sorted list of all pairs with union-find. Independent
/// second algorithm; same tie-breaking.
[[nodiscard]] MstSummary mst_summary_kruskal(const DesignMatrix& design);

[[nodiscard]] nlohmann::json to_json(const MstSummary& s);

enum class MstOrder { ABetter, BBetter, Incomparable };

[[nodiscard]] std::string to_string(MstOrder o);

/// Partial order: A fills the space better than B iff m(A) > m(B) and
/// sigma(A) < sigma(B). Any equality gives Incomparable.
[[nodiscard]] MstOrder mst_compare(const MstSummary& a, const MstSummary& b);

struct FiveNumber {
    double min = 0.0;
    double q25 = 0.0;
    double median = 0.0;
    double q75 = 0.0;
    double max = 0.0;
};

/// Type-7 (linear interpolation) sample quantile of sorted data, prob in [0, 1].
[[nodiscard]] double quantile_sorted(std::span<const double> sorted, double prob);

/// Five-number summary with type-7 quantiles. Throws InvalidArgument when empty.
[[nodiscard]] FiveNumber quantiles(std::vector<double> values);

[[nodiscard]] nlohmann::json to_json(const FiveNumber& f);

/// Metric evaluated on subprojections: a criterion or the MST statistics.
struct SubprojectionMetric {
    bool mst = false;
    CriterionSpec criterion;

    static SubprojectionMetric of(CriterionSpec spec) { return {false, spec}; }
    static SubprojectionMetric mst_stats() { return {true, {}}; }
    /// Criterion short name or "mst".
    static SubprojectionMetric parse(std::string_view name);
    [[nodiscard]] std::string name() const { return mst ? "mst" : criterion.name(); }
};

struct DesignSubprojections {
    std::string id;
    /// Criterion value per tuple; MST mean edge length m for the MST metric.
    std::vector<double> values;
    /// MST only: sigma per tuple.
    std::vector<double> sigmas;
    FiveNumber summary;
    std::optional<FiveNumber> sigma_summary;
};

struct SubprojectionReport {
    std::size_t k = 0;
    SubprojectionMetric metric;
    /// 0-based column tuples, shared by all designs.
    std::vector<std::vector<std::size_t>> tuples;
    std::vector<DesignSubprojections> per_design;
    FiveNumber pooled;
    std::optional<FiveNumber> pooled_sigma;
};

struct SubprojectionOptions {
    /// Evaluate this many random k-subsets instead of all C(d, k).
    std::optional<std::size_t> sampled;
    Seed seed;
    std::size_t jobs = 1;
};

/// All k-subsets of {0..d-1} in lexicographic order.
[[nodiscard]] std::vector<std::vector<std::size_t>> column_combinations(std::size_t d, std::size_t k);

/// Evaluates the metric on every k-column subprojection of every design and
/// pools the values. Designs must share (N, d); 1 <= k <= d.
[[nodiscard]] SubprojectionReport subprojection_report(std::span<const DesignMatrix> designs,
                                                       std::span<const std::string> ids, std::size_t k,
                                                       const SubprojectionMetric& metric,
                                                       const SubprojectionOptions& options = {});

/// {k, metric, per_design: [{id, tuples, values, summary}], pooled_summary}
[[nodiscard]] nlohmann::json to_json(const SubprojectionReport& report);

/// `design_id,cols,value` (`design_id,cols,m,sigma` for MST); cols are 1-based
/// joined by '-'.
[[nodiscard]] std::string subprojection_to_csv(const SubprojectionReport& report);

[[nodiscard]] std::string format_columns(std::span<const std::size_t> cols);

}  // namespace sfd
