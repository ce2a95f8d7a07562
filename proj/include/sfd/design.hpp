#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sfd/rng.hpp"

namespace sfd {

/// N x d matrix of points in the unit hypercube, row-major (row = point,
/// column = input). Every entry lies in [0, 1].
///
/// Indices are 0-based in the library; command-line and file interfaces
/// present them 1-based.
class DesignMatrix {
public:
    DesignMatrix() = default;

    /// Zero-filled n x d design. Throws InvalidArgument on n == 0 or d == 0.
    DesignMatrix(std::size_t n_points, std::size_t n_dims);

    /// Takes ownership of `values` (row-major, size n*d). Throws InvalidArgument
    /// on shape mismatch or entries outside [0, 1].
    DesignMatrix(std::size_t n_points, std::size_t n_dims, std::vector<double> values);

    /// Builds from a list of rows; all rows must share the same length.
    static DesignMatrix from_rows(const std::vector<std::vector<double>>& rows);

    [[nodiscard]] std::size_t n_points() const { return n_points_; }
    [[nodiscard]] std::size_t n_dims() const { return n_dims_; }
    [[nodiscard]] bool empty() const { return values_.empty(); }

    [[nodiscard]] double operator()(std::size_t row, std::size_t col) const {
        return values_[row * n_dims_ + col];
    }
    [[nodiscard]] std::span<const double> row(std::size_t i) const {
        return {values_.data() + i * n_dims_, n_dims_};
    }
    [[nodiscard]] std::vector<double> column(std::size_t j) const;
    [[nodiscard]] std::span<const double> values() const { return values_; }

    /// Sets one entry; throws InvalidArgument when `v` is outside [0, 1].
    void set(std::size_t row, std::size_t col, double v);

    /// Exchanges entries (row_a, col) and (row_b, col).
    void swap_entries(std::size_t col, std::size_t row_a, std::size_t row_b) {
        std::swap(values_[row_a * n_dims_ + col], values_[row_b * n_dims_ + col]);
    }

    friend bool operator==(const DesignMatrix&, const DesignMatrix&) = default;

private:
    std::size_t n_points_ = 0;
    std::size_t n_dims_ = 0;
    std::vector<double> values_;
};

/// Order-independent 64-bit hash of a design's entries and their positions.
/// Supports O(1) update under an elementary swap (see swap_fingerprint).
[[nodiscard]] std::uint64_t fingerprint(const DesignMatrix& design);

/// Fingerprint after exchanging (row_a, col) and (row_b, col), given the
/// fingerprint before.
[[nodiscard]] std::uint64_t swap_fingerprint(std::uint64_t before, const DesignMatrix& design_before,
                                             std::size_t col, std::size_t row_a, std::size_t row_b);

enum class LhsVariant { RandomInCell, Centered };

[[nodiscard]] std::string to_string(LhsVariant v);

/// Stratum of `x` among N equal strata of [0, 1]: [k/N, (k+1)/N), the last one
/// closed at 1. Boundaries are the doubles k/N, so membership is unambiguous.
[[nodiscard]] std::size_t stratum_of(double x, std::size_t n);

/// Latin Hypercube design: the matrix plus, for each column, the stratum index
/// (0-based) of every row. A valid LHS has each column's strata forming a
/// permutation of 0..N-1 and every value inside its stratum.
class LhsDesign {
public:
    LhsDesign() = default;

    /// No Latin check here (use validate_lhs); only shapes are verified.
    LhsDesign(DesignMatrix matrix, std::vector<std::uint32_t> strata, LhsVariant variant);

    /// Infers strata from the values. Throws InvalidArgument if the result is not
    /// a valid LHS. The variant is Centered iff every value is a stratum midpoint.
    static LhsDesign from_matrix(DesignMatrix matrix);

    [[nodiscard]] const DesignMatrix& matrix() const { return matrix_; }
    [[nodiscard]] std::size_t n_points() const { return matrix_.n_points(); }
    [[nodiscard]] std::size_t n_dims() const { return matrix_.n_dims(); }
    [[nodiscard]] LhsVariant variant() const { return variant_; }

    /// 0-based stratum of (row, col); the 1-based permutation value is this + 1.
    [[nodiscard]] std::uint32_t stratum(std::size_t row, std::size_t col) const {
        return strata_[row * n_dims() + col];
    }
    [[nodiscard]] std::vector<std::uint32_t> permutation(std::size_t col) const;

    [[nodiscard]] std::uint64_t fingerprint() const { return fingerprint_; }

    /// In-place elementary swap; same contract and errors as elementary_swap().
    void swap_in_column(std::size_t col, std::size_t row_a, std::size_t row_b);

    friend bool operator==(const LhsDesign& a, const LhsDesign& b) {
        return a.variant_ == b.variant_ && a.matrix_ == b.matrix_ && a.strata_ == b.strata_;
    }

private:
    DesignMatrix matrix_;
    std::vector<std::uint32_t> strata_;
    LhsVariant variant_ = LhsVariant::RandomInCell;
    std::uint64_t fingerprint_ = 0;
};

/// Random LHS: an independent uniform permutation per column, then a uniform
/// position inside each cell. Columns are drawn in order; for each column the
/// shuffle comes first, then the N in-cell offsets.
[[nodiscard]] LhsDesign generate_random_lhs(std::size_t n, std::size_t d, Seed seed);

/// Midpoint LHS: x = (stratum + 0.5) / N.
[[nodiscard]] LhsDesign generate_centered_lhs(std::size_t n, std::size_t d, Seed seed);

/// Midpoint LHS from explicit 0-based strata, one vector per column.
[[nodiscard]] LhsDesign centered_lhs_from_strata(const std::vector<std::vector<std::uint32_t>>& columns);

/// Simple random sample: i.i.d. uniform entries, drawn row by row.
[[nodiscard]] DesignMatrix generate_srs(std::size_t n, std::size_t d, Seed seed);

struct LhsViolation {
    std::size_t row = 0;  ///< 0-based
    std::size_t column = 0;  ///< 0-based
    std::string reason;
};

struct LhsValidation {
    bool ok = true;
    std::vector<LhsViolation> violations;

    explicit operator bool() const { return ok; }
};

[[nodiscard]] LhsValidation validate_lhs(const LhsDesign& design);

/// Returns a copy with entries (row_a, col) and (row_b, col) exchanged, both
/// values and strata. Throws IndexOutOfRange or InvalidArgument (identical rows).
[[nodiscard]] LhsDesign elementary_swap(const LhsDesign& design, std::size_t col, std::size_t row_a,
                                        std::size_t row_b);

/// N x k matrix made of the given columns in the given order. Columns must be
/// distinct and in range.
[[nodiscard]] DesignMatrix extract_subprojection(const DesignMatrix& design, std::span<const std::size_t> columns);

}  // namespace sfd
