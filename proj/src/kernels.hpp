#pragma once

// Per-coordinate factors of the L2-discrepancy closed forms. Each squared
// discrepancy has the shape
//
//   constant + row_weight/N * sum_i prod_k row(x_ik) + 1/N^2 * sum_{i,j} prod_k pair(x_ik, x_jk)
//
// which is what the incremental tracker exploits.

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "sfd/criteria.hpp"

namespace sfd::detail {

struct DiscrepancyKernel {
    CriterionKind kind;

    [[nodiscard]] double constant(std::size_t d) const {
        const auto dd = static_cast<double>(d);
        switch (kind) {
            case CriterionKind::CenteredL2: return std::pow(13.0 / 12.0, dd);
            case CriterionKind::WrapAroundL2: return -std::pow(4.0 / 3.0, dd);
            default: return std::pow(1.0 / 3.0, dd);
        }
    }

    /// Multiplier of (1/N) sum_i prod_k row(.); zero when there is no row term.
    [[nodiscard]] double row_weight() const { return kind == CriterionKind::WrapAroundL2 ? 0.0 : -2.0; }

    [[nodiscard]] double row(double x) const {
        if (kind == CriterionKind::CenteredL2) {
            const double z = std::abs(x - 0.5);
            return 1.0 + 0.5 * z - 0.5 * z * z;
        }
        return 0.5 * (1.0 - x * x);
    }

    [[nodiscard]] double pair(double x, double y) const {
        switch (kind) {
            case CriterionKind::CenteredL2:
                return 1.0 + 0.5 * std::abs(x - 0.5) + 0.5 * std::abs(y - 0.5) - 0.5 * std::abs(x - y);
            case CriterionKind::WrapAroundL2: {
                const double t = std::abs(x - y);
                return 1.5 - t * (1.0 - t);
            }
            default: return 1.0 - std::max(x, y);
        }
    }
};

}  // namespace sfd::detail
