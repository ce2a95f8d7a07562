#include "sfd/criteria.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "kernels.hpp"
#include "sfd/errors.hpp"

namespace sfd {

namespace {

double squared_discrepancy(const DesignMatrix& x, CriterionKind kind) {
    const detail::DiscrepancyKernel kernel{kind};
    const std::size_t n = x.n_points();
    const std::size_t d = x.n_dims();
    double row_sum = 0.0;
    if (kernel.row_weight() != 0.0) {
        for (std::size_t i = 0; i < n; ++i) {
            double prod = 1.0;
            for (std::size_t k = 0; k < d; ++k) prod *= kernel.row(x(i, k));
            row_sum += prod;
        }
    }
    double diag = 0.0;
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto xi = x.row(i);
        for (std::size_t j = i; j < n; ++j) {
            const auto xj = x.row(j);
            double prod = 1.0;
            for (std::size_t k = 0; k < d; ++k) prod *= kernel.pair(xi[k], xj[k]);
            if (i == j) {
                diag += prod;
            } else {
                off += prod;
            }
        }
    }
    const auto nn = static_cast<double>(n);
    return kernel.constant(d) + kernel.row_weight() / nn * row_sum + (diag + 2.0 * off) / (nn * nn);
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double t = a[k] - b[k];
        s += t * t;
    }
    return s;
}

void require_pairs(const DesignMatrix& design) {
    if (design.n_points() < 2) {
        throw DegenerateDesign("distance criteria need at least two design points");
    }
}

double min_squared_distance(const DesignMatrix& design) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < design.n_points(); ++i) {
        for (std::size_t j = i + 1; j < design.n_points(); ++j) {
            best = std::min(best, squared_distance(design.row(i), design.row(j)));
        }
    }
    return best;
}

}  // namespace

std::string CriterionSpec::name() const {
    switch (kind) {
        case CriterionKind::CenteredL2: return "c2";
        case CriterionKind::WrapAroundL2: return "w2";
        case CriterionKind::StarL2: return "l2star";
        case CriterionKind::Mindist: return "mindist";
        case CriterionKind::PhiP: return "phip";
    }
    return "unknown";
}

CriterionSpec CriterionSpec::parse(std::string_view name) {
    if (name == "c2") return {CriterionKind::CenteredL2};
    if (name == "w2") return {CriterionKind::WrapAroundL2};
    if (name == "l2star") return {CriterionKind::StarL2};
    if (name == "mindist") return {CriterionKind::Mindist};
    if (name == "phip") return {CriterionKind::PhiP};
    if (name.starts_with("phip:")) {
        const auto digits = name.substr(5);
        int p = 0;
        const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), p);
        if (ec != std::errc{} || ptr != digits.data() + digits.size() || p < 1) {
            throw InvalidArgument(fmt::format("invalid phip exponent in '{}'", name));
        }
        return {CriterionKind::PhiP, p};
    }
    throw InvalidArgument(fmt::format("unknown criterion '{}' (expected c2, w2, l2star, mindist, phip)", name));
}

CriterionValue centered_l2(const DesignMatrix& design) {
    return {squared_discrepancy(design, CriterionKind::CenteredL2), {CriterionKind::CenteredL2}};
}

CriterionValue wraparound_l2(const DesignMatrix& design) {
    return {squared_discrepancy(design, CriterionKind::WrapAroundL2), {CriterionKind::WrapAroundL2}};
}

CriterionValue star_l2(const DesignMatrix& design) {
    const double sq = squared_discrepancy(design, CriterionKind::StarL2);
    return {std::sqrt(std::max(sq, 0.0)), {CriterionKind::StarL2}};
}

CriterionValue mindist(const DesignMatrix& design) {
    require_pairs(design);
    const double d2 = min_squared_distance(design);
    return {std::sqrt(d2), {CriterionKind::Mindist}, d2 == 0.0};
}

CriterionValue phi_p(const DesignMatrix& design, int p) {
    if (p < 1) throw InvalidArgument(fmt::format("phi_p exponent must be >= 1 (got {})", p));
    require_pairs(design);
    const CriterionSpec spec{CriterionKind::PhiP, p};
    const double dmin2 = min_squared_distance(design);
    if (dmin2 == 0.0) return {std::numeric_limits<double>::infinity(), spec, true};
    const double half_p = 0.5 * static_cast<double>(p);
    double sum = 0.0;
    for (std::size_t i = 0; i < design.n_points(); ++i) {
        for (std::size_t j = i + 1; j < design.n_points(); ++j) {
            sum += std::pow(dmin2 / squared_distance(design.row(i), design.row(j)), half_p);
        }
    }
    return {std::pow(sum, 1.0 / static_cast<double>(p)) / std::sqrt(dmin2), spec};
}

CriterionValue evaluate(const DesignMatrix& design, const CriterionSpec& spec) {
    switch (spec.kind) {
        case CriterionKind::CenteredL2: return centered_l2(design);
        case CriterionKind::WrapAroundL2: return wraparound_l2(design);
        case CriterionKind::StarL2: return star_l2(design);
        case CriterionKind::Mindist: return mindist(design);
        case CriterionKind::PhiP: return phi_p(design, spec.p);
    }
    throw InvalidArgument("unknown criterion kind");
}

nlohmann::json to_json(const CriterionValue& v) {
    nlohmann::json j;
    j["criterion"] = v.spec.name();
    if (v.spec.kind == CriterionKind::PhiP) j["p"] = v.spec.p;
    if (std::isfinite(v.value)) {
        j["value"] = v.value;
    } else {
        j["value"] = nullptr;
    }
    if (v.degenerate) j["degenerate"] = true;
    return j;
}

MonteCarloEstimate mc_discrepancy_oracle(const DesignMatrix& design, std::size_t n_samples, Seed seed) {
    if (n_samples < 2) throw InvalidArgument("Monte Carlo oracle needs at least two samples");
    Rng rng(seed);
    const std::size_t n = design.n_points();
    const std::size_t d = design.n_dims();
    std::vector<double> y(d);
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t s = 0; s < n_samples; ++s) {
        double volume = 1.0;
        for (auto& v : y) {
            v = rng.uniform();
            volume *= v;
        }
        std::size_t inside = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto xi = design.row(i);
            bool in = true;
            for (std::size_t k = 0; k < d && in; ++k) in = xi[k] <= y[k];
            inside += in ? 1 : 0;
        }
        const double diff = static_cast<double>(inside) / static_cast<double>(n) - volume;
        const double f = diff * diff;
        // Welford
        const double delta = f - mean;
        mean += delta / static_cast<double>(s + 1);
        m2 += delta * (f - mean);
    }
    const double variance = m2 / static_cast<double>(n_samples - 1);
    return {mean, std::sqrt(variance / static_cast<double>(n_samples))};
}

}  // namespace sfd
