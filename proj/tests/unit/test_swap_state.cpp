#include <doctest.h>

#include <chrono>
#include <cmath>

#include "sfd/errors.hpp"
#include "sfd/swap_state.hpp"

using namespace sfd;

namespace {

const CriterionSpec kAll[] = {{CriterionKind::CenteredL2}, {CriterionKind::WrapAroundL2}, {CriterionKind::StarL2},
                              {CriterionKind::Mindist}, {CriterionKind::PhiP}};

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("incremental values follow full recomputation") {
    for (const auto& spec : kAll) {
        CAPTURE(spec.name());
        auto x = generate_random_lhs(40, 6, Seed{8});
        auto state = init_swap_state(x, spec);
        Rng rng(Seed{9});
        double worst = 0.0;
        for (int i = 0; i < 400; ++i) {
            const auto col = static_cast<std::size_t>(rng.below(6));
            const auto [a, b] = rng.distinct_pair(40);
            const double preview = state.preview(col, a, b);
            if (rng.uniform() < 0.3) continue;
            const auto v = apply_swap_delta(state, x, col, a, b);
            x.swap_in_column(col, a, b);
            // A commit may resum phi_p exactly, which moves the value by a few ulps.
            CHECK(rel_err(v.value, preview) <= 1e-13);
            worst = std::max(worst, rel_err(v.value, evaluate(x.matrix(), spec).value));
        }
        CHECK(worst <= 1e-10);
        CHECK(state.design() == x.matrix());
    }
}

TEST_CASE("many previews between commits do not disturb the tracked value") {
    // The ESE pattern: J previews, then one commit of the best candidate.
    for (const auto& spec : kAll) {
        CAPTURE(spec.name());
        auto x = generate_random_lhs(50, 5, Seed{3});
        auto state = init_swap_state(x, spec);
        Rng rng(Seed{4});
        double worst = 0.0;
        for (int i = 0; i < 1500; ++i) {
            const auto col = static_cast<std::size_t>(rng.below(5));
            double best = std::numeric_limits<double>::infinity();
            std::pair<std::size_t, std::size_t> chosen{0, 1};
            for (int j = 0; j < 10; ++j) {
                const auto pair = rng.distinct_pair(50);
                const double f = CriterionValue::to_objective(spec, state.preview(col, pair.first, pair.second));
                if (f < best) {
                    best = f;
                    chosen = pair;
                }
            }
            const auto v = apply_swap_delta(state, x, col, chosen.first, chosen.second);
            x.swap_in_column(col, chosen.first, chosen.second);
            worst = std::max(worst, rel_err(v.value, evaluate(x.matrix(), spec).value));
        }
        CHECK(worst <= 1e-10);
    }
}

TEST_CASE("swap then inverse swap restores the value") {
    for (const auto& spec : kAll) {
        const auto x = generate_random_lhs(30, 4, Seed{1});
        auto state = init_swap_state(x, spec);
        const double before = state.value().value;
        state.apply(2, 4, 17);
        state.apply(2, 4, 17);
        CHECK(state.value().value == doctest::Approx(before).epsilon(1e-12));
        CHECK(state.design() == x.matrix());
    }
}

TEST_CASE("preview leaves the state unchanged") {
    const auto x = generate_random_lhs(20, 3, Seed{2});
    auto state = init_swap_state(x, {CriterionKind::PhiP});
    const double v = state.value().value;
    (void)state.preview(0, 1, 2);
    (void)state.preview(1, 5, 9);
    CHECK(state.value().value == v);
    CHECK(state.design() == x.matrix());
    CHECK(state.fingerprint() == x.fingerprint());
}

TEST_CASE("stale state and bad indices") {
    auto x = generate_random_lhs(10, 2, Seed{5});
    auto state = init_swap_state(x, {CriterionKind::CenteredL2});
    (void)apply_swap_delta(state, x, 0, 1, 2);
    // The caller did not apply the swap to its own copy.
    CHECK_THROWS_AS((void)apply_swap_delta(state, x, 0, 3, 4), StaleState);
    CHECK_THROWS_AS((void)state.preview(2, 0, 1), IndexOutOfRange);
    CHECK_THROWS_AS((void)state.preview(0, 0, 10), IndexOutOfRange);
    CHECK_THROWS_AS((void)state.apply(0, 3, 3), InvalidArgument);
}

TEST_CASE("mindist preview matches the swapped design") {
    const auto x = LhsDesign::from_matrix(
        DesignMatrix::from_rows({{0.125, 0.375}, {0.375, 0.125}, {0.625, 0.875}, {0.875, 0.625}}));
    auto md = init_swap_state(x, {CriterionKind::Mindist});
    for (std::size_t a = 0; a < 4; ++a) {
        for (std::size_t b = a + 1; b < 4; ++b) {
            CHECK(md.preview(1, a, b) == doctest::Approx(mindist(elementary_swap(x, 1, a, b).matrix()).value));
        }
    }
}

TEST_CASE("C2 swap update is much cheaper than a full recomputation") {
    const auto x = generate_random_lhs(100, 10, Seed{6});
    auto state = init_swap_state(x, {CriterionKind::CenteredL2});
    Rng rng(Seed{7});
    using clock = std::chrono::steady_clock;
    const int reps = 2000;
    double sink = 0.0;
    auto t0 = clock::now();
    for (int i = 0; i < reps; ++i) {
        const auto [a, b] = rng.distinct_pair(100);
        sink += state.preview(static_cast<std::size_t>(rng.below(10)), a, b);
    }
    const double incremental = std::chrono::duration<double>(clock::now() - t0).count() / reps;
    t0 = clock::now();
    for (int i = 0; i < 50; ++i) sink += centered_l2(x.matrix()).value;
    const double full = std::chrono::duration<double>(clock::now() - t0).count() / 50;
    CHECK(sink != 0.0);
    CAPTURE(full / incremental);
    CHECK(full >= 10.0 * incremental);
}
