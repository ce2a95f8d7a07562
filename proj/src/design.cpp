#include "sfd/design.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "sfd/errors.hpp"

namespace sfd {

namespace {

void check_sizes(std::size_t n, std::size_t d) {
    if (n == 0 || d == 0) {
        throw InvalidArgument(fmt::format("design needs n >= 1 and d >= 1 (got n={}, d={})", n, d));
    }
}

bool in_unit_interval(double v) { return v >= 0.0 && v <= 1.0; }

std::uint64_t entry_hash(std::size_t row, std::size_t col, double v) {
    std::uint64_t h = mix64(static_cast<std::uint64_t>(row) * 0x9e3779b97f4a7c15ULL ^ mix64(col + 1));
    return mix64(h ^ std::bit_cast<std::uint64_t>(v));
}

double lower_bound_of(std::size_t k, std::size_t n) {
    return static_cast<double>(k) / static_cast<double>(n);
}

double midpoint_of(std::size_t k, std::size_t n) {
    return (static_cast<double>(k) + 0.5) / static_cast<double>(n);
}

bool in_stratum(double x, std::size_t k, std::size_t n) {
    const double lo = lower_bound_of(k, n);
    if (k + 1 == n) return x >= lo && x <= 1.0;
    return x >= lo && x < lower_bound_of(k + 1, n);
}

}  // namespace

DesignMatrix::DesignMatrix(std::size_t n_points, std::size_t n_dims)
    : n_points_(n_points), n_dims_(n_dims) {
    check_sizes(n_points, n_dims);
    values_.assign(n_points * n_dims, 0.0);
}

DesignMatrix::DesignMatrix(std::size_t n_points, std::size_t n_dims, std::vector<double> values)
    : n_points_(n_points), n_dims_(n_dims), values_(std::move(values)) {
    check_sizes(n_points, n_dims);
    if (values_.size() != n_points * n_dims) {
        throw InvalidArgument(
            fmt::format("design values have size {}, expected {}x{}", values_.size(), n_points, n_dims));
    }
    for (std::size_t idx = 0; idx < values_.size(); ++idx) {
        if (!in_unit_interval(values_[idx])) {
            throw InvalidArgument(fmt::format("entry ({}, {}) = {} is outside [0, 1]", idx / n_dims + 1,
                                              idx % n_dims + 1, values_[idx]));
        }
    }
}

DesignMatrix DesignMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw InvalidArgument("design needs at least one row");
    const std::size_t d = rows.front().size();
    std::vector<double> values;
    values.reserve(rows.size() * d);
    for (const auto& r : rows) {
        if (r.size() != d) throw InvalidArgument("design rows have different lengths");
        values.insert(values.end(), r.begin(), r.end());
    }
    return DesignMatrix(rows.size(), d, std::move(values));
}

std::vector<double> DesignMatrix::column(std::size_t j) const {
    std::vector<double> out(n_points_);
    for (std::size_t i = 0; i < n_points_; ++i) out[i] = (*this)(i, j);
    return out;
}

void DesignMatrix::set(std::size_t row, std::size_t col, double v) {
    if (!in_unit_interval(v)) throw InvalidArgument(fmt::format("value {} is outside [0, 1]", v));
    values_[row * n_dims_ + col] = v;
}

std::uint64_t fingerprint(const DesignMatrix& design) {
    std::uint64_t h = mix64(design.n_points()) ^ mix64(design.n_dims() << 32);
    for (std::size_t i = 0; i < design.n_points(); ++i) {
        for (std::size_t j = 0; j < design.n_dims(); ++j) h += entry_hash(i, j, design(i, j));
    }
    return h;
}

std::uint64_t swap_fingerprint(std::uint64_t before, const DesignMatrix& design_before, std::size_t col,
                               std::size_t row_a, std::size_t row_b) {
    const double va = design_before(row_a, col);
    const double vb = design_before(row_b, col);
    return before - entry_hash(row_a, col, va) - entry_hash(row_b, col, vb) + entry_hash(row_a, col, vb) +
           entry_hash(row_b, col, va);
}

std::string to_string(LhsVariant v) {
    return v == LhsVariant::Centered ? "centered" : "random-in-cell";
}

std::size_t stratum_of(double x, std::size_t n) {
    if (x >= 1.0) return n - 1;
    if (x <= 0.0) return 0;
    auto k = static_cast<std::size_t>(std::floor(x * static_cast<double>(n)));
    k = std::min(k, n - 1);
    // x * n may round across a boundary; settle against the double boundaries.
    while (k > 0 && x < lower_bound_of(k, n)) --k;
    while (k + 1 < n && x >= lower_bound_of(k + 1, n)) ++k;
    return k;
}

LhsDesign::LhsDesign(DesignMatrix matrix, std::vector<std::uint32_t> strata, LhsVariant variant)
    : matrix_(std::move(matrix)), strata_(std::move(strata)), variant_(variant) {
    if (strata_.size() != matrix_.n_points() * matrix_.n_dims()) {
        throw InvalidArgument("stratum table does not match design shape");
    }
    fingerprint_ = sfd::fingerprint(matrix_);
}

LhsDesign LhsDesign::from_matrix(DesignMatrix matrix) {
    const std::size_t n = matrix.n_points();
    const std::size_t d = matrix.n_dims();
    std::vector<std::uint32_t> strata(n * d);
    bool centered = true;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            const std::size_t k = stratum_of(matrix(i, j), n);
            strata[i * d + j] = static_cast<std::uint32_t>(k);
            centered = centered && matrix(i, j) == midpoint_of(k, n);
        }
    }
    LhsDesign out(std::move(matrix), std::move(strata), centered ? LhsVariant::Centered : LhsVariant::RandomInCell);
    const auto check = validate_lhs(out);
    if (!check.ok) {
        const auto& v = check.violations.front();
        throw InvalidArgument(
            fmt::format("design is not a Latin hypercube: row {}, column {}: {}", v.row + 1, v.column + 1, v.reason));
    }
    return out;
}

std::vector<std::uint32_t> LhsDesign::permutation(std::size_t col) const {
    std::vector<std::uint32_t> out(n_points());
    for (std::size_t i = 0; i < n_points(); ++i) out[i] = stratum(i, col);
    return out;
}

void LhsDesign::swap_in_column(std::size_t col, std::size_t row_a, std::size_t row_b) {
    if (col >= n_dims()) {
        throw IndexOutOfRange(fmt::format("column {} out of range (d = {})", col + 1, n_dims()));
    }
    if (row_a >= n_points() || row_b >= n_points()) {
        throw IndexOutOfRange(fmt::format("row {} or {} out of range (N = {})", row_a + 1, row_b + 1, n_points()));
    }
    if (row_a == row_b) throw InvalidArgument("elementary swap needs two different rows");
    fingerprint_ = swap_fingerprint(fingerprint_, matrix_, col, row_a, row_b);
    matrix_.swap_entries(col, row_a, row_b);
    std::swap(strata_[row_a * n_dims() + col], strata_[row_b * n_dims() + col]);
}

LhsDesign generate_random_lhs(std::size_t n, std::size_t d, Seed seed) {
    check_sizes(n, d);
    Rng rng(seed);
    std::vector<double> values(n * d);
    std::vector<std::uint32_t> strata(n * d);
    std::vector<std::uint32_t> perm(n);
    for (std::size_t j = 0; j < d; ++j) {
        std::iota(perm.begin(), perm.end(), 0u);
        rng.shuffle(std::span<std::uint32_t>(perm));
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t k = perm[i];
            double x = (static_cast<double>(k) + rng.uniform()) / static_cast<double>(n);
            // (k + u) can round up to k + 1 for large k.
            if (k + 1 < n && x >= lower_bound_of(k + 1, n)) x = std::nextafter(lower_bound_of(k + 1, n), 0.0);
            x = std::min(x, 1.0);
            values[i * d + j] = x;
            strata[i * d + j] = perm[i];
        }
    }
    return LhsDesign(DesignMatrix(n, d, std::move(values)), std::move(strata), LhsVariant::RandomInCell);
}

LhsDesign generate_centered_lhs(std::size_t n, std::size_t d, Seed seed) {
    check_sizes(n, d);
    Rng rng(seed);
    std::vector<std::vector<std::uint32_t>> columns(d, std::vector<std::uint32_t>(n));
    for (auto& perm : columns) {
        std::iota(perm.begin(), perm.end(), 0u);
        rng.shuffle(std::span<std::uint32_t>(perm));
    }
    return centered_lhs_from_strata(columns);
}

LhsDesign centered_lhs_from_strata(const std::vector<std::vector<std::uint32_t>>& columns) {
    if (columns.empty()) throw InvalidArgument("need at least one column");
    const std::size_t n = columns.front().size();
    const std::size_t d = columns.size();
    check_sizes(n, d);
    std::vector<double> values(n * d);
    std::vector<std::uint32_t> strata(n * d);
    for (std::size_t j = 0; j < d; ++j) {
        if (columns[j].size() != n) throw InvalidArgument("columns have different lengths");
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint32_t k = columns[j][i];
            if (k >= n) throw InvalidArgument(fmt::format("stratum {} out of range for N = {}", k + 1, n));
            values[i * d + j] = midpoint_of(k, n);
            strata[i * d + j] = k;
        }
    }
    return LhsDesign(DesignMatrix(n, d, std::move(values)), std::move(strata), LhsVariant::Centered);
}

DesignMatrix generate_srs(std::size_t n, std::size_t d, Seed seed) {
    check_sizes(n, d);
    Rng rng(seed);
    std::vector<double> values(n * d);
    for (auto& v : values) v = rng.uniform();
    return DesignMatrix(n, d, std::move(values));
}

LhsValidation validate_lhs(const LhsDesign& design) {
    LhsValidation out;
    const std::size_t n = design.n_points();
    const std::size_t d = design.n_dims();
    auto fail = [&](std::size_t i, std::size_t j, std::string reason) {
        out.ok = false;
        out.violations.push_back({i, j, std::move(reason)});
    };
    std::vector<std::size_t> owner(n);
    for (std::size_t j = 0; j < d; ++j) {
        std::fill(owner.begin(), owner.end(), n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint32_t k = design.stratum(i, j);
            const double x = design.matrix()(i, j);
            if (k >= n) {
                fail(i, j, fmt::format("stratum index {} exceeds N = {}", k + 1, n));
                continue;
            }
            if (owner[k] != n) {
                fail(i, j, fmt::format("column {}: stratum {} already used by row {}", j + 1, k + 1, owner[k] + 1));
            } else {
                owner[k] = i;
            }
            if (!in_stratum(x, k, n)) {
                fail(i, j, fmt::format("column {}: value {} outside stratum {}", j + 1, x, k + 1));
            } else if (design.variant() == LhsVariant::Centered && x != midpoint_of(k, n)) {
                fail(i, j, fmt::format("column {}: value {} is not the midpoint of stratum {}", j + 1, x, k + 1));
            }
        }
        for (std::size_t k = 0; k < n; ++k) {
            if (owner[k] == n) fail(n, j, fmt::format("column {}: stratum {} is empty", j + 1, k + 1));
        }
    }
    return out;
}

LhsDesign elementary_swap(const LhsDesign& design, std::size_t col, std::size_t row_a, std::size_t row_b) {
    LhsDesign out = design;
    out.swap_in_column(col, row_a, row_b);
    return out;
}

DesignMatrix extract_subprojection(const DesignMatrix& design, std::span<const std::size_t> columns) {
    if (columns.empty()) throw InvalidArgument("subprojection needs at least one column");
    std::vector<bool> seen(design.n_dims(), false);
    for (auto c : columns) {
        if (c >= design.n_dims()) {
            throw IndexOutOfRange(fmt::format("column {} out of range (d = {})", c + 1, design.n_dims()));
        }
        if (seen[c]) throw InvalidArgument(fmt::format("column {} selected twice", c + 1));
        seen[c] = true;
    }
    const std::size_t n = design.n_points();
    const std::size_t k = columns.size();
    std::vector<double> values(n * k);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < k; ++c) values[i * k + c] = design(i, columns[c]);
    }
    return DesignMatrix(n, k, std::move(values));
}

}  // namespace sfd
