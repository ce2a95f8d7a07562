#include "sfd/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include <fmt/format.h>

#include "sfd/errors.hpp"
#include "sfd/parallel.hpp"

namespace sfd {

namespace {

double dist2(std::span<const double> u, std::span<const double> v) {
    double s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double t = u[k] - v[k];
        s += t * t;
    }
    return s;
}

std::pair<std::size_t, std::size_t> ordered(std::size_t a, std::size_t b) { return {std::min(a, b), std::max(a, b)}; }

MstSummary summarize(std::vector<std::pair<std::size_t, std::size_t>> edges, std::vector<double> lengths) {
    MstSummary s;
    s.edges = std::move(edges);
    s.edge_lengths = std::move(lengths);
    const auto count = static_cast<double>(s.edge_lengths.size());
    s.total_weight = std::accumulate(s.edge_lengths.begin(), s.edge_lengths.end(), 0.0);
    s.m = s.total_weight / count;
    double var = 0.0;
    for (double l : s.edge_lengths) var += (l - s.m) * (l - s.m);
    s.sigma = std::sqrt(var / count);
    return s;
}

void require_points(const DesignMatrix& design) {
    if (design.n_points() < 2) throw DegenerateDesign("a spanning tree needs at least two points");
}

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (rank_[a] < rank_[b]) std::swap(a, b);
        parent_[b] = a;
        if (rank_[a] == rank_[b]) ++rank_[a];
        return true;
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<unsigned> rank_;
};

}  // namespace

MstSummary mst_summary(const DesignMatrix& design) {
    require_points(design);
    const std::size_t n = design.n_points();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> key(n, inf);
    std::vector<std::size_t> parent(n, 0);
    std::vector<bool> in_tree(n, false);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::vector<double> lengths;
    edges.reserve(n - 1);
    lengths.reserve(n - 1);

    auto relax = [&](std::size_t u) {
        for (std::size_t v = 0; v < n; ++v) {
            if (in_tree[v]) continue;
            const double w = dist2(design.row(u), design.row(v));
            if (w < key[v] || (w == key[v] && ordered(u, v) < ordered(parent[v], v))) {
                key[v] = w;
                parent[v] = u;
            }
        }
    };

    in_tree[0] = true;
    relax(0);
    for (std::size_t step = 1; step < n; ++step) {
        std::size_t pick = n;
        for (std::size_t v = 0; v < n; ++v) {
            if (in_tree[v]) continue;
            if (pick == n || key[v] < key[pick] ||
                (key[v] == key[pick] && ordered(parent[v], v) < ordered(parent[pick], pick))) {
                pick = v;
            }
        }
        in_tree[pick] = true;
        edges.push_back(ordered(parent[pick], pick));
        lengths.push_back(std::sqrt(key[pick]));
        relax(pick);
    }
    return summarize(std::move(edges), std::move(lengths));
}

MstSummary mst_summary_kruskal(const DesignMatrix& design) {
    require_points(design);
    const std::size_t n = design.n_points();
    std::vector<std::tuple<double, std::size_t, std::size_t>> all;
    all.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) all.emplace_back(dist2(design.row(i), design.row(j)), i, j);
    }
    std::sort(all.begin(), all.end());
    DisjointSets sets(n);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::vector<double> lengths;
    for (const auto& [w, i, j] : all) {
        if (sets.unite(i, j)) {
            edges.emplace_back(i, j);
            lengths.push_back(std::sqrt(w));
            if (edges.size() + 1 == n) break;
        }
    }
    return summarize(std::move(edges), std::move(lengths));
}

nlohmann::json to_json(const MstSummary& s) {
    nlohmann::json j;
    j["m"] = s.m;
    j["sigma"] = s.sigma;
    j["total_weight"] = s.total_weight;
    j["edge_count"] = s.edge_lengths.size();
    j["edge_lengths"] = s.edge_lengths;
    return j;
}

std::string to_string(MstOrder o) {
    switch (o) {
        case MstOrder::ABetter: return "a-better";
        case MstOrder::BBetter: return "b-better";
        case MstOrder::Incomparable: return "incomparable";
    }
    return "incomparable";
}

MstOrder mst_compare(const MstSummary& a, const MstSummary& b) {
    if (a.m > b.m && a.sigma < b.sigma) return MstOrder::ABetter;
    if (b.m > a.m && b.sigma < a.sigma) return MstOrder::BBetter;
    return MstOrder::Incomparable;
}

double quantile_sorted(std::span<const double> sorted, double prob) {
    if (sorted.empty()) throw InvalidArgument("quantile of an empty sample");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

FiveNumber quantiles(std::vector<double> values) {
    if (values.empty()) throw InvalidArgument("quantiles of an empty sample");
    std::sort(values.begin(), values.end());
    return {values.front(), quantile_sorted(values, 0.25), quantile_sorted(values, 0.5), quantile_sorted(values, 0.75),
            values.back()};
}

nlohmann::json to_json(const FiveNumber& f) {
    return {{"min", f.min}, {"q25", f.q25}, {"median", f.median}, {"q75", f.q75}, {"max", f.max}};
}

SubprojectionMetric SubprojectionMetric::parse(std::string_view name) {
    if (name == "mst") return mst_stats();
    return of(CriterionSpec::parse(name));
}

std::vector<std::vector<std::size_t>> column_combinations(std::size_t d, std::size_t k) {
    std::vector<std::vector<std::size_t>> out;
    if (k == 0 || k > d) return out;
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
        out.push_back(idx);
        std::size_t pos = k;
        while (pos > 0 && idx[pos - 1] == d - k + pos - 1) --pos;
        if (pos == 0) break;
        ++idx[pos - 1];
        for (std::size_t t = pos; t < k; ++t) idx[t] = idx[t - 1] + 1;
    }
    return out;
}

SubprojectionReport subprojection_report(std::span<const DesignMatrix> designs, std::span<const std::string> ids,
                                         std::size_t k, const SubprojectionMetric& metric,
                                         const SubprojectionOptions& options) {
    if (designs.empty()) throw InvalidArgument("subprojection report needs at least one design");
    if (!ids.empty() && ids.size() != designs.size()) throw InvalidArgument("one id per design expected");
    const std::size_t n = designs.front().n_points();
    const std::size_t d = designs.front().n_dims();
    for (const auto& x : designs) {
        if (x.n_points() != n || x.n_dims() != d) {
            throw InvalidArgument("all designs of a subprojection report must share N and d");
        }
    }
    if (k < 1 || k > d) throw InvalidArgument(fmt::format("subspace dimension k = {} must satisfy 1 <= k <= d = {}", k, d));

    SubprojectionReport report;
    report.k = k;
    report.metric = metric;
    if (options.sampled) {
        Rng rng(options.seed);
        std::vector<std::size_t> cols(d);
        for (std::size_t s = 0; s < *options.sampled; ++s) {
            std::iota(cols.begin(), cols.end(), 0);
            // Partial Fisher-Yates: the first k entries form a uniform k-subset.
            for (std::size_t t = 0; t < k; ++t) {
                const auto r = t + static_cast<std::size_t>(rng.below(d - t));
                std::swap(cols[t], cols[r]);
            }
            std::vector<std::size_t> tuple(cols.begin(), cols.begin() + static_cast<std::ptrdiff_t>(k));
            std::sort(tuple.begin(), tuple.end());
            report.tuples.push_back(std::move(tuple));
        }
    } else {
        report.tuples = column_combinations(d, k);
    }

    const std::size_t n_tuples = report.tuples.size();
    const std::size_t total = designs.size() * n_tuples;
    std::vector<double> values(total);
    std::vector<double> sigmas(metric.mst ? total : 0);
    parallel_for(total, options.jobs, [&](std::size_t task) {
        const std::size_t di = task / n_tuples;
        const std::size_t ti = task % n_tuples;
        const auto sub = extract_subprojection(designs[di], report.tuples[ti]);
        if (metric.mst) {
            const auto s = mst_summary(sub);
            values[task] = s.m;
            sigmas[task] = s.sigma;
        } else {
            values[task] = evaluate(sub, metric.criterion).value;
        }
    });

    std::vector<double> pooled;
    std::vector<double> pooled_sigma;
    for (std::size_t di = 0; di < designs.size(); ++di) {
        DesignSubprojections entry;
        entry.id = ids.empty() ? fmt::format("design{}", di + 1) : ids[di];
        const auto first = values.begin() + static_cast<std::ptrdiff_t>(di * n_tuples);
        entry.values.assign(first, first + static_cast<std::ptrdiff_t>(n_tuples));
        entry.summary = quantiles(entry.values);
        pooled.insert(pooled.end(), entry.values.begin(), entry.values.end());
        if (metric.mst) {
            const auto sfirst = sigmas.begin() + static_cast<std::ptrdiff_t>(di * n_tuples);
            entry.sigmas.assign(sfirst, sfirst + static_cast<std::ptrdiff_t>(n_tuples));
            entry.sigma_summary = quantiles(entry.sigmas);
            pooled_sigma.insert(pooled_sigma.end(), entry.sigmas.begin(), entry.sigmas.end());
        }
        report.per_design.push_back(std::move(entry));
    }
    report.pooled = quantiles(std::move(pooled));
    if (metric.mst) report.pooled_sigma = quantiles(std::move(pooled_sigma));
    return report;
}

std::string format_columns(std::span<const std::size_t> cols) {
    std::string out;
    for (std::size_t t = 0; t < cols.size(); ++t) {
        if (t > 0) out += '-';
        out += std::to_string(cols[t] + 1);
    }
    return out;
}

nlohmann::json to_json(const SubprojectionReport& report) {
    nlohmann::json j;
    j["k"] = report.k;
    j["metric"] = report.metric.name();
    if (!report.metric.mst && report.metric.criterion.kind == CriterionKind::PhiP) j["p"] = report.metric.criterion.p;
    nlohmann::json tuples = nlohmann::json::array();
    for (const auto& t : report.tuples) {
        nlohmann::json one = nlohmann::json::array();
        for (auto c : t) one.push_back(c + 1);
        tuples.push_back(std::move(one));
    }
    nlohmann::json per = nlohmann::json::array();
    for (const auto& entry : report.per_design) {
        nlohmann::json e;
        e["id"] = entry.id;
        e["tuples"] = tuples;
        if (report.metric.mst) {
            e["m"] = entry.values;
            e["sigma"] = entry.sigmas;
            e["summary"] = {{"m", to_json(entry.summary)}, {"sigma", to_json(*entry.sigma_summary)}};
        } else {
            e["values"] = entry.values;
            e["summary"] = to_json(entry.summary);
        }
        per.push_back(std::move(e));
    }
    j["per_design"] = std::move(per);
    if (report.metric.mst) {
        j["pooled_summary"] = {{"m", to_json(report.pooled)}, {"sigma", to_json(*report.pooled_sigma)}};
    } else {
        j["pooled_summary"] = to_json(report.pooled);
    }
    return j;
}

std::string subprojection_to_csv(const SubprojectionReport& report) {
    fmt::memory_buffer buf;
    auto out = std::back_inserter(buf);
    const std::string_view header = report.metric.mst ? "design_id,cols,m,sigma\n" : "design_id,cols,value\n";
    buf.append(header.data(), header.data() + header.size());
    for (const auto& entry : report.per_design) {
        for (std::size_t t = 0; t < report.tuples.size(); ++t) {
            if (report.metric.mst) {
                fmt::format_to(out, "{},{},{:.17g},{:.17g}\n", entry.id, format_columns(report.tuples[t]),
                               entry.values[t], entry.sigmas[t]);
            } else {
                fmt::format_to(out, "{},{},{:.17g}\n", entry.id, format_columns(report.tuples[t]), entry.values[t]);
            }
        }
    }
    return fmt::to_string(buf);
}

}  // namespace sfd
