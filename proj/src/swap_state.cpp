#include "sfd/swap_state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <fmt/format.h>

#include "kernels.hpp"
#include "sfd/errors.hpp"

namespace sfd {

namespace detail {

class SwapTracker {
public:
    virtual ~SwapTracker() = default;
    virtual void rebuild(const DesignMatrix& x) = 0;
    [[nodiscard]] virtual CriterionValue value() const = 0;
    /// Value after the swap; `x` is the design before it.
    virtual double preview(const DesignMatrix& x, std::size_t col, std::size_t a, std::size_t b) = 0;
    /// Commits; `x` is the design before the swap.
    virtual void commit(const DesignMatrix& x, std::size_t col, std::size_t a, std::size_t b) = 0;
};

namespace {

// ---------------------------------------------------------------------------
// L2-discrepancies

class DiscrepancyTracker final : public SwapTracker {
public:
    explicit DiscrepancyTracker(CriterionKind kind) : kernel_{kind} {}

    void rebuild(const DesignMatrix& x) override {
        n_ = x.n_points();
        d_ = x.n_dims();
        row_terms_.assign(n_, 0.0);
        pair_.assign(n_ * n_, 0.0);
        row_sum_ = 0.0;
        if (has_row_term()) {
            for (std::size_t i = 0; i < n_; ++i) {
                double prod = 1.0;
                for (std::size_t k = 0; k < d_; ++k) prod *= kernel_.row(x(i, k));
                row_terms_[i] = prod;
                row_sum_ += prod;
            }
        }
        double diag = 0.0;
        double off = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = i; j < n_; ++j) {
                double prod = 1.0;
                for (std::size_t k = 0; k < d_; ++k) prod *= kernel_.pair(x(i, k), x(j, k));
                pair_[i * n_ + j] = prod;
                pair_[j * n_ + i] = prod;
                (i == j ? diag : off) += prod;
            }
        }
        pair_sum_ = diag + 2.0 * off;
        scratch_a_.assign(n_, 0.0);
        scratch_b_.assign(n_, 0.0);
    }

    [[nodiscard]] CriterionValue value() const override { return {to_value(row_sum_, pair_sum_), {kernel_.kind}}; }

    double preview(const DesignMatrix& x, std::size_t col, std::size_t a, std::size_t b) override {
        const auto [row_sum, pair_sum] = swapped_sums(x, col, a, b);
        return to_value(row_sum, pair_sum);
    }

    void commit(const DesignMatrix& x, std::size_t col, std::size_t a, std::size_t b) override {
        const auto [row_sum, pair_sum] = swapped_sums(x, col, a, b);
        for (std::size_t j = 0; j < n_; ++j) {
            if (j == a || j == b) continue;
            pair_[a * n_ + j] = pair_[j * n_ + a] = scratch_a_[j];
            pair_[b * n_ + j] = pair_[j * n_ + b] = scratch_b_[j];
        }
        pair_[a * n_ + a] = scratch_a_[a];
        pair_[b * n_ + b] = scratch_b_[b];
        row_terms_[a] = new_row_a_;
        row_terms_[b] = new_row_b_;
        row_sum_ = row_sum;
        pair_sum_ = pair_sum;
    }

private:
    [[nodiscard]] bool has_row_term() const { return kernel_.row_weight() != 0.0; }

    [[nodiscard]] double to_value(double row_sum, double pair_sum) const {
        const auto nn = static_cast<double>(n_);
        const double sq = kernel_.constant(d_) + kernel_.row_weight() / nn * row_sum + pair_sum / (nn * nn);
        if (kernel_.kind == CriterionKind::StarL2) return std::sqrt(std::max(sq, 0.0));
        return sq;
    }

    // Product over columns of the row kernel for row i with column `col` replaced by v.
    [[nodiscard]] double row_product_with(const DesignMatrix& x, std::size_t i, std::size_t col, double v) const {
        double prod = 1.0;
        for (std::size_t k = 0; k < d_; ++k) prod *= kernel_.row(k == col ? v : x(i, k));
        return prod;
    }

    // Pair product of rows i and j with column `col` of row i replaced by vi and of row j by vj.
    [[nodiscard]] double pair_product_with(const DesignMatrix& x, std::size_t i, std::size_t j, std::size_t col,
                                           double vi, double vj) const {
        double prod = 1.0;
        for (std::size_t k = 0; k < d_; ++k) {
            prod *= k == col ? kernel_.pair(vi, vj) : kernel_.pair(x(i, k), x(j, k));
        }
        return prod;
    }

    // old * new_factor / old_factor, falling back to a direct product when the
    // old factor vanishes (star kernel at x = 1).
    template <typename Direct>
    static double rescale(double old, double old_factor, double new_factor, Direct direct) {
        if (old_factor == 0.0) return direct();
        return old / old_factor * new_factor;
    }

    std::pair<double, double> swapped_sums(const DesignMatrix& x, std::size_t col, std::size_t a, std::size_t b) {
        const double xa = x(a, col);
        const double xb = x(b, col);

        double row_sum = row_sum_;
        if (has_row_term()) {
            const double ga = kernel_.row(xa);
            const double gb = kernel_.row(xb);
            new_row_a_ = rescale(row_terms_[a], ga, gb, [&] { return row_product_with(x, a, col, xb); });
            new_row_b_ = rescale(row_terms_[b], gb, ga, [&] { return row_product_with(x, b, col, xa); });
            row_sum += (new_row_a_ - row_terms_[a]) + (new_row_b_ - row_terms_[b]);
        } else {
            new_row_a_ = row_terms_[a];
            new_row_b_ = row_terms_[b];
        }

        double off_delta = 0.0;
        for (std::size_t j = 0; j < n_; ++j) {
            if (j == a || j == b) continue;
            const double xj = x(j, col);
            const double ha = kernel_.pair(xa, xj);
            const double hb = kernel_.pair(xb, xj);
            const double old_a = pair_[a * n_ + j];
            const double old_b = pair_[b * n_ + j];
            const double new_a = rescale(old_a, ha, hb, [&] { return pair_product_with(x, a, j, col, xb, xj); });
            const double new_b = rescale(old_b, hb, ha, [&] { return pair_product_with(x, b, j, col, xa, xj); });
            scratch_a_[j] = new_a;
            scratch_b_[j] = new_b;
            off_delta += (new_a - old_a) + (new_b - old_b);
        }
        const double haa = kernel_.pair(xa, xa);
        const double hbb = kernel_.pair(xb, xb);
        const double old_aa = pair_[a * n_ + a];
        const double old_bb = pair_[b * n_ + b];
        scratch_a_[a] = rescale(old_aa, haa, hbb, [&] { return pair_product_with(x, a, a, col, xb, xb); });
        scratch_b_[b] = rescale(old_bb, hbb, haa, [&] { return pair_product_with(x, b, b, col, xa, xa); });
        const double diag_delta = (scratch_a_[a] - old_aa) + (scratch_b_[b] - old_bb);
        // The (a, b) pair keeps its product: the swap exchanges both coordinates.
        return {row_sum, pair_sum_ + 2.0 * off_delta + diag_delta};
    }

    DiscrepancyKernel kernel_;
    std::size_t n_ = 0;
    std::size_t d_ = 0;
    std::vector<double> row_terms_;
    std::vector<double> pair_;
    double row_sum_ = 0.0;
    double pair_sum_ = 0.0;
    std::vector<double> scratch_a_;
    std::vector<double> scratch_b_;
    double new_row_a_ = 0.0;
    double new_row_b_ = 0.0;
};

// ---------------------------------------------------------------------------
// Distance criteria (mindist, phi_p)

class DistanceTracker final : public SwapTracker {
public:
    explicit DistanceTracker(CriterionSpec spec) : spec_(spec), half_p_(0.5 * spec.p) {}

    void rebuild(const DesignMatrix& x) override {
        n_ = x.n_points();
        d2_.assign(n_ * n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = i + 1; j < n_; ++j) d2_[i * n_ + j] = d2_[j * n_ + i] = dist2(x.row(i), x.row(j));
        }
        new_a_.assign(n_, 0.0);
        new_b_.assign(n_, 0.0);
        zero_pairs_ = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = i + 1; j < n_; ++j) zero_pairs_ += d2_[i * n_ + j] == 0.0 ? 1 : 0;
        }
        if (is_phi()) {
            rebuild_terms();
        } else {
            row_min_.assign(n_, 0.0);
            row_arg_.assign(n_, 0);
            for (std::size_t i = 0; i < n_; ++i) rescan_row(i);
        }
    }

    [[nodiscard]] CriterionValue value() const override {
        if (is_phi()) {
            if (zero_pairs_ > 0) return {std::numeric_limits<double>::infinity(), spec_, true};
            return {phi_from_sum(sum_), spec_};
        }
        const double m = *std::min_element(row_min_.begin(), row_min_.end());
        return {std::sqrt(m), spec_, m == 0.0};
    }

    double preview(const DesignMatrix& x, std::size_t col, std::size_t a, std::size_t b) override {
        fill_new_rows(x, col, a, b);
        return is_phi() ? preview_phi(a, b) : std::sqrt(preview_min(a, b));
    }

    void commit(const DesignMatrix& x, std::size_t col, std::size_t a, std::size_t b) override {
        fill_new_rows(x, col, a, b);
        if (is_phi()) {
            const double v = preview_phi(a, b);
            std::size_t zeros = zero_pairs_;
            for (std::size_t j = 0; j < n_; ++j) {
                if (j == a || j == b) continue;
                zeros -= (d2_[a * n_ + j] == 0.0) + (d2_[b * n_ + j] == 0.0);
                zeros += (new_a_[j] == 0.0) + (new_b_[j] == 0.0);
            }
            write_rows(a, b);
            zero_pairs_ = zeros;
            if (fallback_used_ || zero_pairs_ > 0 || !std::isfinite(v) || pending_err_ > kDriftTolerance * pending_sum_) {
                rebuild_terms();
            } else {
                for (std::size_t j = 0; j < n_; ++j) {
                    if (j == a || j == b) continue;
                    terms_[a * n_ + j] = terms_[j * n_ + a] = new_term_a_[j];
                    terms_[b * n_ + j] = terms_[j * n_ + b] = new_term_b_[j];
                }
                sum_ = pending_sum_;
                err_ = pending_err_;
            }
            return;
        }
        write_rows(a, b);
        for (std::size_t i = 0; i < n_; ++i) {
            if (i == a || i == b) {
                rescan_row(i);
            } else if (row_arg_[i] == a || row_arg_[i] == b) {
                rescan_row(i);
            } else {
                for (const std::size_t j : {a, b}) {
                    if (d2_[i * n_ + j] < row_min_[i]) {
                        row_min_[i] = d2_[i * n_ + j];
                        row_arg_[i] = j;
                    }
                }
            }
        }
    }

private:
    [[nodiscard]] bool is_phi() const { return spec_.kind == CriterionKind::PhiP; }

    static double dist2(std::span<const double> u, std::span<const double> v) {
        double s = 0.0;
        for (std::size_t k = 0; k < u.size(); ++k) {
            const double t = u[k] - v[k];
            s += t * t;
        }
        return s;
    }

    // Squared distance between row i (column `col` replaced by vi) and row j.
    static double dist2_with(const DesignMatrix& x, std::size_t i, std::size_t j, std::size_t col, double vi) {
        const auto u = x.row(i);
        const auto v = x.row(j);
        double s = 0.0;
        for (std::size_t k = 0; k < u.size(); ++k) {
            const double t = (k == col ? vi : u[k]) - v[k];
            s += t * t;
        }
        return s;
    }

    void fill_new_rows(const DesignMatrix& x, std::size_t col, std::size_t a, std::size_t b) {
        const double xa = x(a, col);
        const double xb = x(b, col);
        for (std::size_t j = 0; j < n_; ++j) {
            if (j == a || j == b) continue;
            new_a_[j] = dist2_with(x, a, j, col, xb);
            new_b_[j] = dist2_with(x, b, j, col, xa);
        }
    }

    void write_rows(std::size_t a, std::size_t b) {
        for (std::size_t j = 0; j < n_; ++j) {
            if (j == a || j == b) continue;
            d2_[a * n_ + j] = d2_[j * n_ + a] = new_a_[j];
            d2_[b * n_ + j] = d2_[j * n_ + b] = new_b_[j];
        }
    }

    // --- phi_p ---

    [[nodiscard]] double term(double d2) const { return d2 == 0.0 ? 0.0 : std::pow(scale2_ / d2, half_p_); }

    [[nodiscard]] double phi_from_sum(double sum) const {
        return std::pow(sum, 1.0 / static_cast<double>(spec_.p)) / std::sqrt(scale2_);
    }

    void rebuild_terms() {
        double dmin2 = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = i + 1; j < n_; ++j) {
                const double v = d2_[i * n_ + j];
                if (v > 0.0) dmin2 = std::min(dmin2, v);
            }
        }
        scale2_ = std::isfinite(dmin2) ? dmin2 : 1.0;
        terms_.assign(n_ * n_, 0.0);
        new_term_a_.assign(n_, 0.0);
        new_term_b_.assign(n_, 0.0);
        sum_ = 0.0;
        err_ = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = i + 1; j < n_; ++j) {
                const double t = term(d2_[i * n_ + j]);
                terms_[i * n_ + j] = terms_[j * n_ + i] = t;
                sum_ += t;
            }
        }
    }

    double preview_phi(std::size_t a, std::size_t b) {
        fallback_used_ = false;
        std::size_t zeros = zero_pairs_;
        double removed = 0.0;
        double added = 0.0;
        for (std::size_t j = 0; j < n_; ++j) {
            if (j == a || j == b) continue;
            zeros -= (d2_[a * n_ + j] == 0.0) + (d2_[b * n_ + j] == 0.0);
            zeros += (new_a_[j] == 0.0) + (new_b_[j] == 0.0);
            removed += terms_[a * n_ + j] + terms_[b * n_ + j];
            new_term_a_[j] = term(new_a_[j]);
            new_term_b_[j] = term(new_b_[j]);
            added += new_term_a_[j] + new_term_b_[j];
        }
        if (zeros > 0) return std::numeric_limits<double>::infinity();
        pending_sum_ = (sum_ - removed) + added;
        // Rounding bound of the running sum; it grows while the sum shrinks
        // under optimization, so commit() resums once it is no longer small.
        pending_err_ = err_ + std::numeric_limits<double>::epsilon() *
                                  (sum_ + static_cast<double>(n_) * (removed + added));
        // Cancellation (the dominant terms were removed) or overflow: resum the
        // swapped distance matrix directly.
        if (!std::isfinite(pending_sum_) || pending_sum_ < 1e-3 * sum_ || zero_pairs_ > 0) {
            fallback_used_ = true;
            return direct_phi(a, b);
        }
        return phi_from_sum(pending_sum_);
    }

    [[nodiscard]] double swapped_d2(std::size_t i, std::size_t j, std::size_t a, std::size_t b) const {
        if (i == a && j != b) return new_a_[j];
        if (j == a && i != b) return new_a_[i];
        if (i == b && j != a) return new_b_[j];
        if (j == b && i != a) return new_b_[i];
        return d2_[i * n_ + j];
    }

    [[nodiscard]] double direct_phi(std::size_t a, std::size_t b) const {
        double dmin2 = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = i + 1; j < n_; ++j) dmin2 = std::min(dmin2, swapped_d2(i, j, a, b));
        }
        double sum = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = i + 1; j < n_; ++j) sum += std::pow(dmin2 / swapped_d2(i, j, a, b), half_p_);
        }
        return std::pow(sum, 1.0 / static_cast<double>(spec_.p)) / std::sqrt(dmin2);
    }

    // --- mindist ---

    void rescan_row(std::size_t i) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = i;
        for (std::size_t j = 0; j < n_; ++j) {
            if (j != i && d2_[i * n_ + j] < best) {
                best = d2_[i * n_ + j];
                arg = j;
            }
        }
        row_min_[i] = best;
        row_arg_[i] = arg;
    }

    [[nodiscard]] double preview_min(std::size_t a, std::size_t b) const {
        double best = d2_[a * n_ + b];
        for (std::size_t i = 0; i < n_; ++i) {
            if (i == a || i == b) continue;
            best = std::min({best, new_a_[i], new_b_[i]});
            if (row_arg_[i] != a && row_arg_[i] != b) {
                best = std::min(best, row_min_[i]);
            } else {
                for (std::size_t j = 0; j < n_; ++j) {
                    if (j != i && j != a && j != b) best = std::min(best, d2_[i * n_ + j]);
                }
            }
        }
        return best;
    }

    CriterionSpec spec_;
    double half_p_;
    std::size_t n_ = 0;
    std::vector<double> d2_;
    std::vector<double> new_a_;
    std::vector<double> new_b_;
    std::size_t zero_pairs_ = 0;
    // phi_p: terms (scale2 / d2)^(p/2), their sum over i < j.
    std::vector<double> terms_;
    std::vector<double> new_term_a_;
    std::vector<double> new_term_b_;
    double scale2_ = 1.0;
    double sum_ = 0.0;
    double pending_sum_ = 0.0;
    double err_ = 0.0;
    double pending_err_ = 0.0;
    static constexpr double kDriftTolerance = 1e-11;
    bool fallback_used_ = false;
    // mindist: per-row minimum squared distance and its partner.
    std::vector<double> row_min_;
    std::vector<std::size_t> row_arg_;
};

}  // namespace

}  // namespace detail

SwapDeltaState::SwapDeltaState(const DesignMatrix& design, CriterionSpec spec)
    : spec_(spec), design_(design), fingerprint_(sfd::fingerprint(design)) {
    if (spec.kind == CriterionKind::PhiP && spec.p < 1) throw InvalidArgument("phi_p exponent must be >= 1");
    if (spec.is_discrepancy()) {
        tracker_ = std::make_unique<detail::DiscrepancyTracker>(spec.kind);
    } else {
        if (design.n_points() < 2) throw DegenerateDesign("distance criteria need at least two design points");
        tracker_ = std::make_unique<detail::DistanceTracker>(spec);
    }
    tracker_->rebuild(design_);
}

SwapDeltaState::~SwapDeltaState() = default;
SwapDeltaState::SwapDeltaState(SwapDeltaState&&) noexcept = default;
SwapDeltaState& SwapDeltaState::operator=(SwapDeltaState&&) noexcept = default;

CriterionValue SwapDeltaState::value() const { return tracker_->value(); }

void SwapDeltaState::check_indices(std::size_t col, std::size_t row_a, std::size_t row_b) const {
    if (col >= design_.n_dims()) {
        throw IndexOutOfRange(fmt::format("column {} out of range (d = {})", col + 1, design_.n_dims()));
    }
    if (row_a >= design_.n_points() || row_b >= design_.n_points()) {
        throw IndexOutOfRange(
            fmt::format("row {} or {} out of range (N = {})", row_a + 1, row_b + 1, design_.n_points()));
    }
    if (row_a == row_b) throw InvalidArgument("elementary swap needs two different rows");
}

double SwapDeltaState::preview(std::size_t col, std::size_t row_a, std::size_t row_b) {
    check_indices(col, row_a, row_b);
    return tracker_->preview(design_, col, row_a, row_b);
}

CriterionValue SwapDeltaState::apply(std::size_t col, std::size_t row_a, std::size_t row_b) {
    check_indices(col, row_a, row_b);
    tracker_->commit(design_, col, row_a, row_b);
    fingerprint_ = swap_fingerprint(fingerprint_, design_, col, row_a, row_b);
    design_.swap_entries(col, row_a, row_b);
    if (resync_interval_ > 0 && ++commits_ % resync_interval_ == 0) tracker_->rebuild(design_);
    return tracker_->value();
}

void SwapDeltaState::resync() { tracker_->rebuild(design_); }

SwapDeltaState init_swap_state(const LhsDesign& design, const CriterionSpec& spec) {
    return SwapDeltaState(design.matrix(), spec);
}

CriterionValue apply_swap_delta(SwapDeltaState& state, const LhsDesign& current, std::size_t col, std::size_t row_a,
                                std::size_t row_b) {
    if (current.fingerprint() != state.fingerprint()) {
        throw StaleState("swap state does not track the given design");
    }
    return state.apply(col, row_a, row_b);
}

}  // namespace sfd
