#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "sfd/design.hpp"
#include "sfd/errors.hpp"

using namespace sfd;

namespace {

std::vector<std::uint32_t> sorted_strata(const LhsDesign& x, std::size_t col) {
    auto p = x.permutation(col);
    std::sort(p.begin(), p.end());
    return p;
}

std::vector<std::uint32_t> iota_u32(std::size_t n) {
    std::vector<std::uint32_t> v(n);
    std::iota(v.begin(), v.end(), 0u);
    return v;
}

}  // namespace

TEST_CASE("random LHS has one point per stratum in every column") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto x = generate_random_lhs(4, 2, Seed{seed});
        for (std::size_t c = 0; c < 2; ++c) CHECK(sorted_strata(x, c) == iota_u32(4));
    }
    const auto big = generate_random_lhs(137, 7, Seed{3});
    for (std::size_t c = 0; c < 7; ++c) {
        CHECK(sorted_strata(big, c) == iota_u32(137));
        for (std::size_t i = 0; i < 137; ++i) CHECK(stratum_of(big.matrix()(i, c), 137) == big.stratum(i, c));
    }
    CHECK(validate_lhs(big));
}

TEST_CASE("single-point LHS lies in the unit cube") {
    const auto x = generate_random_lhs(1, 3, Seed{9});
    for (const double v : x.matrix().values()) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("generators are pure functions of (n, d, seed)") {
    CHECK(generate_random_lhs(100, 10, Seed{42}) == generate_random_lhs(100, 10, Seed{42}));
    CHECK(generate_centered_lhs(30, 4, Seed{1}) == generate_centered_lhs(30, 4, Seed{1}));
    CHECK(generate_srs(3, 2, Seed{5}) == generate_srs(3, 2, Seed{5}));
    CHECK_FALSE(generate_random_lhs(100, 10, Seed{42}) == generate_random_lhs(100, 10, Seed{43}));
}

TEST_CASE("zero sizes are rejected") {
    CHECK_THROWS_AS((void)generate_random_lhs(0, 2, Seed{}), InvalidArgument);
    CHECK_THROWS_AS((void)generate_random_lhs(2, 0, Seed{}), InvalidArgument);
    CHECK_THROWS_AS((void)generate_centered_lhs(0, 1, Seed{}), InvalidArgument);
    CHECK_THROWS_AS((void)generate_srs(0, 1, Seed{}), InvalidArgument);
}

TEST_CASE("centered LHS uses stratum midpoints") {
    SUBCASE("two points") {
        const auto x = centered_lhs_from_strata({{0, 1}});
        CHECK(x.matrix()(0, 0) == 0.25);
        CHECK(x.matrix()(1, 0) == 0.75);
    }
    SUBCASE("permutations from the LHS construction example") {
        // pi_1 = (3,1,4,2), pi_2 = (2,4,1,3), 1-based.
        const auto x = centered_lhs_from_strata({{2, 0, 3, 1}, {1, 3, 0, 2}});
        CHECK(x.matrix().column(0) == std::vector<double>{0.625, 0.125, 0.875, 0.375});
        CHECK(x.matrix().column(1) == std::vector<double>{0.375, 0.875, 0.125, 0.625});
        CHECK(x.variant() == LhsVariant::Centered);
    }
    SUBCASE("symmetric column mean") {
        const auto x = generate_centered_lhs(5, 1, Seed{8});
        const auto col = x.matrix().column(0);
        CHECK(std::accumulate(col.begin(), col.end(), 0.0) / 5.0 == doctest::Approx(0.5).epsilon(1e-15));
    }
}

TEST_CASE("simple random sample") {
    const auto x = generate_srs(1000, 1, Seed{11});
    const auto col = x.column(0);
    // 3 sigma of the mean of 1000 uniforms is about 0.027.
    CHECK(std::abs(std::accumulate(col.begin(), col.end(), 0.0) / 1000.0 - 0.5) < 0.05);
    const auto wide = generate_srs(10, 54, Seed{2});
    CHECK(std::all_of(wide.values().begin(), wide.values().end(), [](double v) { return v >= 0.0 && v <= 1.0; }));
}

TEST_CASE("stratum boundaries") {
    CHECK(stratum_of(0.0, 4) == 0);
    CHECK(stratum_of(0.25, 4) == 1);
    CHECK(stratum_of(std::nextafter(0.25, 0.0), 4) == 0);
    CHECK(stratum_of(1.0, 4) == 3);
    CHECK(stratum_of(0.3, 10) == 3);
    CHECK(stratum_of(0.7, 10) == 7);
}

TEST_CASE("validate_lhs reports violations") {
    SUBCASE("two points in one stratum") {
        // Column 0 holds two points in its first stratum.
        const std::vector<double> values{1.0 / 6, 5.0 / 6, 1.0 / 6, 1.0 / 6, 5.0 / 6, 0.5};
        const std::vector<std::uint32_t> strata{0, 2, 0, 0, 2, 1};
        const LhsDesign bad(DesignMatrix(3, 2, values), strata, LhsVariant::Centered);
        const auto v = validate_lhs(bad);
        CHECK_FALSE(v.ok);
        REQUIRE_FALSE(v.violations.empty());
        CHECK(std::all_of(v.violations.begin(), v.violations.end(), [](const auto& e) { return e.column == 0; }));
    }
    SUBCASE("centered point moved across its stratum boundary") {
        const auto good = generate_centered_lhs(8, 2, Seed{4});
        auto values = std::vector<double>(good.matrix().values().begin(), good.matrix().values().end());
        std::vector<std::uint32_t> strata;
        for (std::size_t i = 0; i < 8; ++i) {
            for (std::size_t c = 0; c < 2; ++c) strata.push_back(good.stratum(i, c));
        }
        const double eps = 1e-9;
        values[0] = std::min(1.0, values[0] + 1.0 / 16.0 + eps);
        if (strata[0] == 7) values[0] = good.matrix()(0, 0) - 1.0 / 16.0 - eps;
        CHECK_FALSE(validate_lhs(LhsDesign(DesignMatrix(8, 2, values), strata, LhsVariant::Centered)).ok);
    }
    CHECK(validate_lhs(generate_random_lhs(50, 6, Seed{1})).ok);
}

TEST_CASE("elementary swap") {
    const auto x = generate_random_lhs(20, 4, Seed{7});
    SUBCASE("is an involution") {
        CHECK(elementary_swap(elementary_swap(x, 2, 3, 11), 2, 3, 11) == x);
    }
    SUBCASE("keeps the Latin property and touches one column") {
        const auto y = elementary_swap(x, 1, 0, 19);
        CHECK(validate_lhs(y));
        for (std::size_t c : {0u, 2u, 3u}) CHECK(y.matrix().column(c) == x.matrix().column(c));
        CHECK(y.matrix()(0, 1) == x.matrix()(19, 1));
        CHECK(y.stratum(19, 1) == x.stratum(0, 1));
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS((void)elementary_swap(x, 4, 0, 1), IndexOutOfRange);
        CHECK_THROWS_AS((void)elementary_swap(x, 0, 0, 20), IndexOutOfRange);
        CHECK_THROWS_AS((void)elementary_swap(x, 0, 3, 3), InvalidArgument);
    }
    SUBCASE("fingerprint follows the swap") {
        auto y = x;
        y.swap_in_column(3, 5, 6);
        CHECK(y.fingerprint() == fingerprint(y.matrix()));
        CHECK(y.fingerprint() != x.fingerprint());
    }
}

TEST_CASE("random swaps never break the Latin property") {
    auto x = generate_random_lhs(15, 3, Seed{21});
    Rng rng(Seed{22});
    for (int i = 0; i < 2000; ++i) {
        const auto col = static_cast<std::size_t>(rng.below(3));
        const auto [a, b] = rng.distinct_pair(15);
        x.swap_in_column(col, a, b);
    }
    CHECK(validate_lhs(x));
}

TEST_CASE("subprojections") {
    const auto x = generate_random_lhs(12, 3, Seed{5});
    const std::vector<std::size_t> all{0, 1, 2};
    CHECK(extract_subprojection(x.matrix(), all) == x.matrix());
    for (std::size_t j = 0; j < 3; ++j) {
        const std::vector<std::size_t> one{j};
        CHECK(validate_lhs(LhsDesign::from_matrix(extract_subprojection(x.matrix(), one))));
    }
    const std::vector<std::size_t> a{2, 0};
    const std::vector<std::size_t> b{0, 2};
    const auto pa = extract_subprojection(x.matrix(), a);
    const auto pb = extract_subprojection(x.matrix(), b);
    CHECK(pa.column(0) == pb.column(1));
    CHECK(pa.column(1) == pb.column(0));
    const std::vector<std::size_t> dup{1, 1};
    const std::vector<std::size_t> out{3};
    CHECK_THROWS((void)extract_subprojection(x.matrix(), dup));
    CHECK_THROWS((void)extract_subprojection(x.matrix(), out));
}

TEST_CASE("from_matrix infers strata and variant") {
    const auto x = generate_random_lhs(9, 2, Seed{3});
    CHECK(LhsDesign::from_matrix(x.matrix()) == x);
    const auto c = generate_centered_lhs(9, 2, Seed{3});
    CHECK(LhsDesign::from_matrix(c.matrix()).variant() == LhsVariant::Centered);
    CHECK_THROWS_AS((void)LhsDesign::from_matrix(generate_srs(9, 2, Seed{1})), InvalidArgument);
}

TEST_CASE("design matrix checks its entries") {
    CHECK_THROWS_AS(DesignMatrix(2, 1, {0.5, 1.5}), InvalidArgument);
    CHECK_THROWS_AS(DesignMatrix(2, 2, {0.5}), InvalidArgument);
    CHECK_THROWS_AS(DesignMatrix(0, 2), InvalidArgument);
    DesignMatrix m(2, 2);
    CHECK_THROWS_AS(m.set(0, 0, -0.1), InvalidArgument);
}
