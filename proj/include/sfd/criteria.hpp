#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "sfd/design.hpp"

namespace sfd {

enum class CriterionKind { CenteredL2, WrapAroundL2, StarL2, Mindist, PhiP };
enum class Direction { Minimize, Maximize };

inline constexpr int kDefaultPhiP = 50;

/// Which space-filling measure to compute. `p` only matters for PhiP.
/// Distances are always Euclidean.
struct CriterionSpec {
    CriterionKind kind = CriterionKind::CenteredL2;
    int p = kDefaultPhiP;

    constexpr CriterionSpec() = default;
    constexpr CriterionSpec(CriterionKind k, int p_ = kDefaultPhiP) : kind(k), p(p_) {}  // NOLINT

    /// Discrepancies and PhiP are minimized, Mindist is maximized.
    [[nodiscard]] constexpr Direction direction() const {
        return kind == CriterionKind::Mindist ? Direction::Maximize : Direction::Minimize;
    }
    [[nodiscard]] bool is_discrepancy() const {
        return kind == CriterionKind::CenteredL2 || kind == CriterionKind::WrapAroundL2 ||
               kind == CriterionKind::StarL2;
    }

    /// Short name: c2, w2, l2star, mindist, phip.
    [[nodiscard]] std::string name() const;

    /// Parses a short name; "phip" may carry an exponent as "phip:30".
    /// Throws InvalidArgument on unknown names or p < 1.
    static CriterionSpec parse(std::string_view name);

    friend constexpr bool operator==(const CriterionSpec&, const CriterionSpec&) = default;
};

/// An evaluated criterion. `degenerate` is set when two design points coincide
/// (mindist = 0, PhiP = +inf).
struct CriterionValue {
    double value = 0.0;
    CriterionSpec spec;
    bool degenerate = false;

    /// Value as a quantity to minimize: -value for Mindist, value otherwise.
    [[nodiscard]] double objective() const { return to_objective(spec, value); }

    static double to_objective(const CriterionSpec& spec, double value) {
        return spec.direction() == Direction::Maximize ? -value : value;
    }
};

/// Centered L2-discrepancy in its squared closed form:
///
///   (13/12)^d - 2/N sum_i prod_k (1 + |z_ik|/2 - z_ik^2/2)
///             + 1/N^2 sum_{i,j} prod_k (1 + |z_ik|/2 + |z_jk|/2 - |x_ik - x_jk|/2),  z = x - 0.5
[[nodiscard]] CriterionValue centered_l2(const DesignMatrix& design);

/// Wrap-around L2-discrepancy, squared form:
///
///   -(4/3)^d + 1/N^2 sum_{i,j} prod_k (3/2 - |x_ik - x_jk| (1 - |x_ik - x_jk|))
[[nodiscard]] CriterionValue wraparound_l2(const DesignMatrix& design);

/// Star L2-discrepancy (the root), from Warnock's formula for its square:
///
///   (1/3)^d - 2/N sum_i prod_k (1 - x_ik^2)/2 + 1/N^2 sum_{i,j} prod_k (1 - max(x_ik, x_jk))
///
/// Round-off below zero is clamped before the square root.
[[nodiscard]] CriterionValue star_l2(const DesignMatrix& design);

/// Smallest pairwise Euclidean distance. N >= 2, else DegenerateDesign.
[[nodiscard]] CriterionValue mindist(const DesignMatrix& design);

/// [sum_{i<j} d_ij^-p]^(1/p), computed as (1/d_min) [sum (d_min/d_ij)^p]^(1/p).
/// Coincident points give +inf with `degenerate` set.
[[nodiscard]] CriterionValue phi_p(const DesignMatrix& design, int p = kDefaultPhiP);

[[nodiscard]] CriterionValue evaluate(const DesignMatrix& design, const CriterionSpec& spec);

/// {"criterion": "<name>", "value": <float>} plus "p" for phip.
[[nodiscard]] nlohmann::json to_json(const CriterionValue& v);

struct MonteCarloEstimate {
    double estimate = 0.0;
    double standard_error = 0.0;
};

/// Plain Monte Carlo estimate of the squared star L2-discrepancy integral
/// (mean over uniform y of (#{x_i <= y}/N - prod y)^2). Test oracle.
[[nodiscard]] MonteCarloEstimate mc_discrepancy_oracle(const DesignMatrix& design, std::size_t n_samples, Seed seed);

}  // namespace sfd
