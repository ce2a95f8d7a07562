#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>

#include "sfd/criteria.hpp"
#include "sfd/design.hpp"

namespace sfd {

namespace detail {
class SwapTracker;
}

/// Cached terms that let a criterion be re-evaluated after one elementary swap
/// without a full O(N^2 d) recomputation.
///
/// Discrepancies keep the per-row products and the N x N matrix of pair
/// products; a swap in column k rescales only the products involving the two
/// rows (one multiply/divide per pair). Distance criteria keep the squared
/// distance matrix and rebuild only the 2(N-2) distances to the swapped rows.
///
/// The state owns a copy of the design it tracks. `preview` is side-effect free
/// on the tracked value; `apply` commits. Periodically (every
/// `resync_interval` commits) the cached sums are rebuilt from scratch to bound
/// floating-point drift. A state is owned by one run at a time.
class SwapDeltaState {
public:
    SwapDeltaState(const DesignMatrix& design, CriterionSpec spec);
    ~SwapDeltaState();
    SwapDeltaState(SwapDeltaState&&) noexcept;
    SwapDeltaState& operator=(SwapDeltaState&&) noexcept;
    SwapDeltaState(const SwapDeltaState&) = delete;
    SwapDeltaState& operator=(const SwapDeltaState&) = delete;

    [[nodiscard]] const CriterionSpec& spec() const { return spec_; }
    [[nodiscard]] const DesignMatrix& design() const { return design_; }
    [[nodiscard]] std::uint64_t fingerprint() const { return fingerprint_; }

    [[nodiscard]] CriterionValue value() const;

    /// Criterion value the design would have after swapping rows `row_a` and
    /// `row_b` in `col`. Leaves the tracked design and value unchanged.
    [[nodiscard]] double preview(std::size_t col, std::size_t row_a, std::size_t row_b);

    /// Commits the swap and returns the new value.
    CriterionValue apply(std::size_t col, std::size_t row_a, std::size_t row_b);

    /// Rebuilds every cached term from the tracked design.
    void resync();

    void set_resync_interval(std::size_t commits) { resync_interval_ = commits; }

private:
    void check_indices(std::size_t col, std::size_t row_a, std::size_t row_b) const;

    CriterionSpec spec_;
    DesignMatrix design_;
    std::uint64_t fingerprint_ = 0;
    std::unique_ptr<detail::SwapTracker> tracker_;
    std::size_t commits_ = 0;
    std::size_t resync_interval_ = 4096;
};

[[nodiscard]] SwapDeltaState init_swap_state(const LhsDesign& design, const CriterionSpec& spec);

/// Applies the swap to `state` and returns the new value. `current` is the
/// caller's design before the swap; throws StaleState when the state does not
/// track it.
CriterionValue apply_swap_delta(SwapDeltaState& state, const LhsDesign& current, std::size_t col, std::size_t row_a,
                                std::size_t row_b);

}  // namespace sfd
