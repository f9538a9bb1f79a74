#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "sketchjl/diagnostics.hpp"
#include "sketchjl/numeric.hpp"

using namespace sketchjl;

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Literal pairwise dual formula: 2 * sum_{s<t} x_s^2 x_t^2 [h(s)=h(t)].
double frobenius_sq_pairwise(std::span<const u64> buckets, std::span<const double> xt) {
    NeumaierSum acc;
    for (std::size_t s = 0; s < xt.size(); ++s)
        for (std::size_t t = s + 1; t < xt.size(); ++t)
            if (buckets[s] == buckets[t]) acc.add((xt[s] * xt[s]) * (xt[t] * xt[t]));
    return 2.0 * acc.value();
}

// The worked 4-coordinate instance: x~ = (1/2,..), h collides exactly the
// first two coordinates.
struct WorkedInstance {
    std::vector<u64> buckets = {0, 0, 1, 2};
    std::vector<double> xt = {0.5, 0.5, 0.5, 0.5};
};

std::vector<double> random_xt(SplitMix64& g, std::size_t dim, double cap) {
    std::vector<double> xt(dim);
    for (auto& v : xt) v = (2.0 * u01(g) - 1.0) * cap;
    return xt;
}

}  // namespace

TEST_CASE("collision matrix on the worked instance") {
    WorkedInstance w;
    const auto T = build_collision_matrix(w.buckets, w.xt);
    CHECK(T.dim() == 4);
    CHECK(T.t(0, 1) == 0.25);
    CHECK(T.t(1, 0) == 0.25);
    for (int s = 0; s < 4; ++s) {
        CHECK(T.t(s, s) == 0.0);
        for (int t = 0; t < 4; ++t)
            if (!((s == 0 && t == 1) || (s == 1 && t == 0))) CHECK(T.t(s, t) == 0.0);
    }
    CHECK(T.t.trace() == 0.0);

    CHECK(frobenius_sq(T) == 0.125);  // 2 * (1/4)^2
    CHECK(operator_norm(T) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(collision_frobenius_sq(w.buckets, w.xt, 3) == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(collision_operator_norm(w.buckets, w.xt, 3) == doctest::Approx(0.25).epsilon(1e-12));

    const auto masses = bucket_masses(w.buckets, w.xt, 3);
    CHECK(masses[0] == 0.5);
    CHECK(masses[1] == 0.25);
    CHECK(masses[2] == 0.25);
}

TEST_CASE("injective hash gives T = 0") {
    const std::vector<u64> buckets = {3, 1, 4, 0};
    const std::vector<double> xt = {0.5, -0.25, 0.125, 0.75};
    const auto T = build_collision_matrix(buckets, xt);
    CHECK(frobenius_sq(T) == 0.0);
    CHECK(operator_norm(T) == 0.0);
    CHECK(collision_operator_norm(buckets, xt, 5) == 0.0);
}

TEST_CASE("bucket masses") {
    SUBCASE("zero vector") {
        const std::vector<u64> buckets = {0, 1, 0};
        const std::vector<double> xt(3, 0.0);
        for (double m : bucket_masses(buckets, xt, 2)) CHECK(m == 0.0);
    }
    SUBCASE("single nonzero") {
        const std::vector<u64> buckets = {0, 1, 0};
        const std::vector<double> xt = {0.0, 0.25, 0.0};
        const auto masses = bucket_masses(buckets, xt, 2);
        CHECK(masses[0] == 0.0);
        CHECK(masses[1] == 0.0625);
    }
    SUBCASE("conservation: sum of masses equals the squared norm") {
        SplitMix64 g(101);
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t dim = 16 + g.next() % 512;
            const std::size_t k = 4 + g.next() % 64;
            std::vector<u64> buckets(dim);
            for (auto& b : buckets) b = g.next() % k;
            const auto xt = random_xt(g, dim, 1.0);
            const auto masses = bucket_masses(buckets, xt, k);
            NeumaierSum total;
            for (double m : masses) total.add(m);
            const double norm_sq = sum_squares(xt);
            CHECK(std::abs(total.value() - norm_sq) <= 4 * kEps * norm_sq);
        }
    }
}

TEST_CASE("frobenius dual formulas agree within 4 ulp") {
    SplitMix64 g(202);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t dim = 8 + g.next() % 256;
        const std::size_t k = 2 + g.next() % 64;
        std::vector<u64> buckets(dim);
        for (auto& b : buckets) b = g.next() % k;
        const auto xt = random_xt(g, dim, 1.0);

        const double entry_sum = frobenius_sq(build_collision_matrix(buckets, xt));
        const double pairwise = frobenius_sq_pairwise(buckets, xt);
        const double fast = collision_frobenius_sq(buckets, xt, k);
        const double scale = std::max({entry_sum, pairwise, 1e-300});
        CHECK(std::abs(entry_sum - pairwise) <= 4 * kEps * scale);
        CHECK(std::abs(fast - pairwise) <= 4 * kEps * scale);
    }
}

TEST_CASE("operator norm routes agree") {
    SplitMix64 g(303);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t dim = 8 + g.next() % 128;
        const std::size_t k = 2 + g.next() % 32;
        std::vector<u64> buckets(dim);
        for (auto& b : buckets) b = g.next() % k;
        const auto xt = random_xt(g, dim, 0.5);

        const auto T = build_collision_matrix(buckets, xt);
        const double eig = operator_norm(T);
        const double block = collision_operator_norm(buckets, xt, k);
        const double power = operator_norm_power_iteration(T);
        CHECK(eig == doctest::Approx(block).epsilon(1e-10));
        CHECK(power == doctest::Approx(eig).epsilon(1e-6));
        // norm inequality against the Frobenius norm
        CHECK(eig <= std::sqrt(frobenius_sq(T)) + 1e-12);
    }
}

TEST_CASE("eigenvalue bound holds deterministically") {
    // ||T||_2 <= max(c^2, max bucket mass) on every instance
    SplitMix64 g(404);
    const double c = 0.25;
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t dim = 8 + g.next() % 200;
        const std::size_t k = 2 + g.next() % 64;
        std::vector<u64> buckets(dim);
        for (auto& b : buckets) b = g.next() % k;
        const auto xt = random_xt(g, dim, c);
        const auto masses = bucket_masses(buckets, xt, k);
        double max_mass = 0;
        for (double m : masses) max_mass = std::max(max_mass, m);
        const double norm = operator_norm(build_collision_matrix(buckets, xt));
        CHECK(norm <= std::max(c * c, max_mass) + 1e-9);
    }

    // the family-facing wrapper on the worked 4-coordinate instance:
    // (3x+1 mod 5) mod 3 maps 0,1,2,3 to 1,1,2,0 -- exactly {0,1} collide
    auto h = PolyHashFamily::from_coefficients({1, 3}, 4, 3, FieldPrime(5));
    CHECK(h.eval(0) == h.eval(1));
    CHECK(h.eval(2) != h.eval(0));
    CHECK(h.eval(3) != h.eval(0));
    CHECK(h.eval(3) != h.eval(2));
    const std::vector<double> xt = {0.5, 0.5, 0.5, 0.5};
    const auto res = check_eigenbound(h, xt, 3, 0.5);
    CHECK(res.holds);
    CHECK(res.op_norm == doctest::Approx(0.25).epsilon(1e-12));  // the 2x2 block
    CHECK(res.bound == 0.5);  // max(c^2, max bucket mass) = max(1/4, 1/2)
    CHECK_THROWS_AS(check_eigenbound(h, std::vector<double>{0.6, 0, 0, 0}, 3, 0.5),
                    InvalidInputError);

    // identity hash, no collisions: T = 0 below any bound
    auto ident = PolyHashFamily::from_coefficients({0, 1}, 8, 8, FieldPrime(31));
    const std::vector<double> flat = {0.5, 0.5, 0, 0, 0, 0, 0, 0};
    const auto none = check_eigenbound(ident, flat, 8, 0.5);
    CHECK(none.holds);
    CHECK(none.op_norm == doctest::Approx(0.0));
    CHECK(none.bound == 0.25);
}

TEST_CASE("Z dual routes: quadratic form vs embedding difference") {
    SplitMix64 g(505);
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t d = 1 + rng() % 8;
        const u64 alpha = u64{1} << (1 + rng() % 5);
        const std::size_t k = 4 + rng() % 60;
        auto params = custom_sparse_params(d, k, alpha, 2 + 2 * (rng() % 4), 2 + 2 * (rng() % 4));
        SparseJLTransform t(params, derive_seed(rng(), trial, 20),
                            derive_seed(rng(), trial, 21));

        std::vector<double> x(d);
        for (auto& v : x) v = 2.0 * u01(g) - 1.0;
        const auto xt = spread(x, params);
        const u64 D = params.spread_dim();

        // explicit quadratic form sigma' T sigma
        const auto buckets = hash_buckets(t.row_hash(), D);
        const auto T = build_collision_matrix(buckets, xt);
        std::vector<double> sigma(D);
        for (u64 u = 0; u < D; ++u) sigma[u] = t.sign_hash().sign_at(u);
        NeumaierSum qform;
        for (u64 s = 0; s < D; ++s)
            for (u64 u = 0; u < D; ++u)
                if (T.t(s, u) != 0.0) qform.add(sigma[s] * T.t(s, u) * sigma[u]);
        const double z_quadratic = qform.value();

        const auto y = t.apply(x);
        const double norm_y = sum_squares(y);
        const double norm_xt = sum_squares(xt);
        const double z_embed = norm_y - norm_xt;

        const double scale = std::max(norm_y, norm_xt);
        CHECK(std::abs(z_quadratic - z_embed) <= 8 * kEps * scale);
    }
}

TEST_CASE("capacity guard") {
    std::vector<u64> buckets(kMaxCollisionDim + 1, 0);
    std::vector<double> xt(kMaxCollisionDim + 1, 0.0);
    CHECK_THROWS_AS(build_collision_matrix(buckets, xt), CapacityError);
}

TEST_CASE("test vectors") {
    for (auto kind : {TestVectorKind::e1, TestVectorKind::ones, TestVectorKind::geometric}) {
        const auto x = make_test_vector(kind, 16);
        CHECK(x.size() == 16);
        CHECK(sum_squares(x) == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK(make_test_vector(TestVectorKind::e1, 4) == std::vector<double>{1, 0, 0, 0});
    const auto geo = make_test_vector(TestVectorKind::geometric, 8);
    for (std::size_t i = 1; i < geo.size(); ++i)
        CHECK(geo[i] == doctest::Approx(geo[i - 1] / 2).epsilon(1e-15));
}

TEST_CASE("tail experiment basics") {
    TailParams params;
    params.kind = TailKind::distortion;
    params.sparse = custom_sparse_params(8, 32, 16, 6, 6);
    params.sparse.epsilon = 0.25;
    params.sparse.delta = 0.05;
    params.vector = TestVectorKind::ones;

    SUBCASE("zero trials is degenerate") {
        const auto r = tail_experiment(params, 0, 1);
        CHECK(r.degenerate);
        CHECK_FALSE(r.pass);
        CHECK(r.empirical_rate == 0.0);
    }

    SUBCASE("same seed twice reproduces the report, any thread count") {
        const auto a = tail_experiment(params, 400, 12345, 1);
        const auto b = tail_experiment(params, 400, 12345, 2);
        CHECK(a.failures == b.failures);
        CHECK(a.empirical_rate == b.empirical_rate);
        CHECK(a.p99 == b.p99);
        const auto c = tail_experiment(params, 400, 54321);
        CHECK((c.failures != a.failures || c.p99 != a.p99));  // seed matters
    }

    SUBCASE("frobenius kind on a small desk instance") {
        TailParams fp = params;
        fp.kind = TailKind::frobenius;
        const auto r = tail_experiment(fp, 500, 7);
        CHECK(r.trials == 500);
        CHECK(r.threshold == doctest::Approx(7.0 / 32.0));
        CHECK(r.failures <= 500);
        CHECK(r.p99 > 0.0);
    }

    SUBCASE("operator kind carries the practical threshold") {
        TailParams op = params;
        op.kind = TailKind::operator_norm;
        const auto r = tail_experiment(op, 300, 7);
        CHECK(r.practical_threshold.has_value());
        CHECK(r.practical_failures.has_value());
        CHECK(*r.practical_threshold >= params.sparse.c_squared);
    }
}

TEST_CASE("eigenbound experiment") {
    EigenboundParams params;
    params.dim = 64;
    params.k = 16;
    params.c = 0.25;
    const auto r = eigenbound_experiment(params, 200, 9);
    CHECK(r.trials == 200);
    CHECK(r.failures == 0);
    CHECK(r.pass);

    const auto degenerate = eigenbound_experiment(params, 0, 9);
    CHECK(degenerate.degenerate);
    CHECK_FALSE(degenerate.pass);
}
