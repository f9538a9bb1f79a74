#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "sketchjl/cascade.hpp"
#include "sketchjl/numeric.hpp"

using namespace sketchjl;

namespace {

Bytes seed_of(const char* s) {
    return Bytes(reinterpret_cast<const std::uint8_t*>(s),
                 reinterpret_cast<const std::uint8_t*>(s) + std::strlen(s));
}

std::vector<double> materialized_cascade(const CascadeTransform& t,
                                         std::span<const double> x) {
    std::vector<double> cur(x.begin(), x.end());
    for (const auto& stage : t.stages()) {
        const auto mat = stage.materialize();
        std::vector<double> next(stage.rows());
        for (std::size_t i = 0; i < stage.rows(); ++i) {
            NeumaierSum acc;
            for (std::size_t j = 0; j < stage.cols(); ++j)
                acc.add(mat[i * stage.cols() + j] * cur[j]);
            next[i] = acc.value();
        }
        cur = std::move(next);
    }
    return cur;
}

}  // namespace

TEST_CASE("t-value schedule") {
    // delta' = 2^-16: exactly 256, 16, 4, 2
    const auto t = cascade_t_values(std::ldexp(1.0, -16));
    CHECK(t == std::vector<double>{256.0, 16.0, 4.0, 2.0});

    const auto t64 = cascade_t_values(std::ldexp(1.0, -64));
    CHECK(t64.size() == 6);  // 2^32, 2^16, 2^8, 2^4, 2^2, 2
    CHECK(t64[0] == 4294967296.0);
    CHECK(t64.back() == 2.0);

    // strictly decreasing for arbitrary delta'
    for (double dp : {0.05, 0.011, 1e-6}) {
        const auto seq = cascade_t_values(dp);
        for (std::size_t i = 1; i < seq.size(); ++i) CHECK(seq[i] < seq[i - 1]);
    }
}

TEST_CASE("desk plan at (0.5, 0.1, 1024)") {
    const auto plan = plan_cascade(0.5, 0.1, 1024);
    CHECK(plan.j_star == 1);
    CHECK(plan.delta_prime == doctest::Approx(0.05));
    CHECK(plan.eps_prime == doctest::Approx(0.125));
    CHECK_FALSE(plan.identity());
    // the intermediate stage (k_1 = 287 < final_k) is subsumed by the final
    // stage to ceil(4 * 64 * ln 20) = 767
    REQUIRE(plan.stages.size() == 1);
    CHECK(plan.final_k == 767);
    CHECK(plan.stages[0].input_dim == 1024);
    CHECK(plan.stages[0].output_dim == 767);
    CHECK(plan.stages[0].r == 10);
    CHECK(plan.stages[0].field_prime == 2147483647ULL);  // hosts 767*1024
    CHECK(plan.total_seed_bits == 10 * 31);
    CHECK(plan.start_level == 1);
}

TEST_CASE("two-stage plan appears once d clears k_1") {
    // delta = 2^-15 -> j* = 1, delta' = 2^-16, eps' = 0.0625
    const auto plan = plan_cascade(0.25, std::ldexp(1.0, -15), 1 << 20);
    CHECK(plan.delta_prime == std::ldexp(1.0, -16));
    CHECK(plan.t_trace == std::vector<double>{256.0, 16.0, 4.0, 2.0});
    REQUIRE(plan.stages.size() == 2);
    CHECK(plan.stages[0].output_dim == 65536);  // 256 * 256
    CHECK(plan.stages[0].r == 2);               // 2*ceil(16^2/256)
    CHECK(plan.stages[1].output_dim == plan.final_k);
    CHECK(plan.stages[1].r == 32);
    // dimensions strictly decrease end to end
    std::size_t prev = plan.d;
    for (const auto& s : plan.stages) {
        CHECK(s.input_dim == prev);
        CHECK(s.output_dim < prev);
        prev = s.output_dim;
    }
    CHECK(plan.total_seed_bits == cascade_seed_bits(plan));
}

TEST_CASE("identity plan when d is already small") {
    const auto plan = plan_cascade(0.25, 0.1, 64);
    CHECK(plan.identity());
    CHECK(plan.final_k == 64);
    CHECK(plan.total_seed_bits == 0);

    CascadeTransform t(plan, seed_of("id"));
    std::vector<double> x = {1, 2, 3};
    x.resize(64, 0.5);
    const auto y = t.apply(x);
    CHECK(y == x);
}

TEST_CASE("schedule shape over a delta grid") {
    // stage count stays within log2 log2 (1/delta') + O(1); dims decrease
    for (int e = 4; e <= 40; e += 4) {
        const double delta = std::ldexp(1.0, -e);
        const auto plan = plan_cascade(0.3, delta, std::size_t{1} << 30);
        if (plan.identity()) continue;
        const double L = std::log2(1.0 / plan.delta_prime);
        CHECK(static_cast<double>(plan.stages.size()) <= std::log2(std::max(2.0, std::log2(std::max(2.0, L)))) + 3.0);
        std::size_t prev = plan.d;
        for (const auto& s : plan.stages) {
            CHECK(s.output_dim < prev);
            CHECK(s.r >= 2);
            CHECK(s.r % 2 == 0);
            prev = s.output_dim;
        }
        CHECK(prev == plan.final_k);
    }
    CHECK_THROWS_AS(plan_cascade(0.25, 0.5, 100), InvalidParameterError);
    CHECK_THROWS_AS(plan_cascade(1.0, 0.1, 100), InvalidParameterError);
    CHECK_THROWS_AS(plan_cascade(0.25, 0.1, 0), InvalidParameterError);
}

TEST_CASE("seed bit accounting") {
    CascadePlan plan;
    plan.stages.push_back({300, 100, 8, kDefaultPrime});
    plan.stages.push_back({100, 50, 4, kDefaultPrime});
    CHECK(cascade_seed_bits(plan) == 12 * 61);  // 732

    // adding a stage never decreases the total
    plan.stages.push_back({50, 20, 2, 8191});
    CHECK(cascade_seed_bits(plan) == 12 * 61 + 2 * 13);

    CHECK(cascade_seed_bits(CascadePlan{}) == 0);
}

TEST_CASE("multi-stage apply equals materialized stage product") {
    // hand-built 2-stage desk plan: 256 -> 64 -> 16, fixed seeds
    CascadePlan plan;
    plan.d = 256;
    plan.final_k = 16;
    plan.stages.push_back({256, 64, 8, smallest_field_at_least(64 * 256)});
    plan.stages.push_back({64, 16, 6, smallest_field_at_least(16 * 64)});
    plan.total_seed_bits = cascade_seed_bits(plan);
    CHECK(plan.total_seed_bits == 8 * 17 + 6 * 13);

    CascadeTransform t(plan, seed_of("stages"));
    CHECK(t.stages().size() == 2);
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> dist(-1, 1);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> x(256);
        for (auto& v : x) v = dist(rng);
        const auto fast = t.apply(x);
        const auto slow = materialized_cascade(t, x);
        REQUIRE(fast.size() == slow.size());
        for (std::size_t i = 0; i < fast.size(); ++i) CHECK(fast[i] == slow[i]);
    }

    const std::vector<double> zero(256, 0.0);
    for (double v : t.apply(zero)) CHECK(v == 0.0);
    CHECK_THROWS_AS(t.apply(std::vector<double>(255, 1.0)), ShapeError);
}

TEST_CASE("seed-bit crossover exists on a planning grid") {
    const double epsilons[] = {0.1, 0.25};
    const double deltas[] = {std::ldexp(1.0, -8), std::ldexp(1.0, -16), std::ldexp(1.0, -24)};
    const std::size_t dims[] = {std::size_t{1} << 20, std::size_t{1} << 26, std::size_t{1} << 30};
    const auto table = seed_bits_crossover(epsilons, deltas, dims);
    CHECK(table.size() == 18);
    bool any_win = false;
    for (const auto& cell : table) {
        CHECK(cell.dense_bits > 0);
        if (cell.cascade_bits > 0 && cell.cascade_bits < cell.dense_bits) any_win = true;
    }
    CHECK(any_win);

    // spot check the frozen cell (0.25, 2^-16, 2^30): 1176 vs 1952
    const double one_eps[] = {0.25};
    const double one_delta[] = {std::ldexp(1.0, -16)};
    const std::size_t one_d[] = {std::size_t{1} << 30};
    const auto cell = seed_bits_crossover(one_eps, one_delta, one_d).at(0);
    CHECK(cell.dense_bits == 1952);
    CHECK(cell.cascade_bits == 1176);
}
