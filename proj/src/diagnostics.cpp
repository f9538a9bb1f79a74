#include "sketchjl/diagnostics.hpp"

#include <cmath>
#include <cstdio>

#include <Eigen/Eigenvalues>

#include "sketchjl/numeric.hpp"
#include "sketchjl/parallel.hpp"
#include "sketchjl/stats.hpp"

namespace sketchjl {

namespace {

void check_dim(u64 dim) {
    if (dim > kMaxCollisionDim)
        throw CapacityError("collision matrix dimension exceeds the 4096 guard");
}

std::vector<std::vector<u64>> group_by_bucket(std::span<const u64> buckets,
                                              std::size_t k) {
    std::vector<std::vector<u64>> groups(k);
    for (u64 i = 0; i < buckets.size(); ++i) {
        if (buckets[i] >= k)
            throw InvalidInputError("bucket index out of range");
        groups[buckets[i]].push_back(i);
    }
    return groups;
}

}  // namespace

std::vector<u64> hash_buckets(const PolyHashFamily& h, u64 count) {
    std::vector<u64> out(count);
    h.eval_range(0, count, out.data());
    return out;
}

CollisionMatrix build_collision_matrix(std::span<const u64> buckets,
                                       std::span<const double> xt) {
    if (buckets.size() != xt.size())
        throw ShapeError("collision matrix: bucket and vector lengths differ");
    check_dim(xt.size());
    const Eigen::Index n = static_cast<Eigen::Index>(xt.size());
    CollisionMatrix out;
    out.t = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index s = 0; s < n; ++s)
        for (Eigen::Index t = s + 1; t < n; ++t)
            if (buckets[s] == buckets[t]) {
                const double v = xt[s] * xt[t];
                out.t(s, t) = v;
                out.t(t, s) = v;
            }
    return out;
}

CollisionMatrix build_collision_matrix(const PolyHashFamily& h,
                                       std::span<const double> xt) {
    check_dim(xt.size());
    return build_collision_matrix(hash_buckets(h, xt.size()), xt);
}

double frobenius_sq(const CollisionMatrix& m) {
    NeumaierSum acc;
    const double* data = m.t.data();
    const std::size_t n = static_cast<std::size_t>(m.t.size());
    for (std::size_t i = 0; i < n; ++i) acc.add(data[i] * data[i]);
    return acc.value();
}

double collision_frobenius_sq(std::span<const u64> buckets,
                              std::span<const double> xt, std::size_t k) {
    if (buckets.size() != xt.size())
        throw ShapeError("collision frobenius: bucket and vector lengths differ");
    std::vector<NeumaierSum> mass(k), fourth(k);
    for (u64 i = 0; i < buckets.size(); ++i) {
        const u64 b = buckets[i];
        if (b >= k) throw InvalidInputError("bucket index out of range");
        const double sq = xt[i] * xt[i];
        mass[b].add(sq);
        fourth[b].add(sq * sq);
    }
    NeumaierSum total;
    for (std::size_t j = 0; j < k; ++j) {
        const double a = mass[j].value();
        total.add(a * a - fourth[j].value());
    }
    return total.value();
}

double operator_norm(const CollisionMatrix& m) {
    check_dim(m.dim());
    if (m.dim() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.t,
                                                          Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

double operator_norm_power_iteration(const CollisionMatrix& m, std::size_t iterations) {
    const Eigen::Index n = m.t.rows();
    if (n == 0) return 0.0;
    const double shift = m.t.cwiseAbs().rowwise().sum().maxCoeff();
    if (shift == 0.0) return 0.0;

    auto dominant = [&](double sign) {
        // power iteration on shift*I + sign*T, which is PSD by Gershgorin
        SplitMix64 g(0x9E3779B97F4A7C15ULL);
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = 2.0 * u01(g) - 1.0;
        v.normalize();
        double lambda = 0.0;
        for (std::size_t it = 0; it < iterations; ++it) {
            Eigen::VectorXd w = shift * v + sign * (m.t * v);
            const double norm = w.norm();
            if (norm == 0.0) return 0.0;
            w /= norm;
            const double next = v.dot(shift * w + sign * (m.t * w));
            if (it > 16 && std::abs(next - lambda) <= 1e-13 * std::abs(next)) {
                lambda = next;
                break;
            }
            lambda = next;
            v = std::move(w);
        }
        return lambda - shift;  // eigenvalue of sign*T
    };

    return std::max({dominant(1.0), dominant(-1.0), 0.0});
}

double collision_operator_norm(std::span<const u64> buckets,
                               std::span<const double> xt, std::size_t k) {
    if (buckets.size() != xt.size())
        throw ShapeError("collision operator norm: bucket and vector lengths differ");
    const auto groups = group_by_bucket(buckets, k);
    double best = 0.0;
    for (const auto& idx : groups) {
        if (idx.size() < 2) continue;
        const Eigen::Index b = static_cast<Eigen::Index>(idx.size());
        Eigen::MatrixXd block(b, b);
        for (Eigen::Index s = 0; s < b; ++s)
            for (Eigen::Index t = 0; t < b; ++t)
                block(s, t) = s == t ? 0.0 : xt[idx[s]] * xt[idx[t]];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(block,
                                                              Eigen::EigenvaluesOnly);
        const auto& ev = solver.eigenvalues();
        best = std::max(best, std::max(std::abs(ev(0)), std::abs(ev(b - 1))));
    }
    return best;
}

std::vector<double> bucket_masses(std::span<const u64> buckets,
                                  std::span<const double> xt, std::size_t k) {
    if (buckets.size() != xt.size())
        throw ShapeError("bucket masses: bucket and vector lengths differ");
    std::vector<NeumaierSum> acc(k);
    for (u64 i = 0; i < buckets.size(); ++i) {
        if (buckets[i] >= k) throw InvalidInputError("bucket index out of range");
        acc[buckets[i]].add(xt[i] * xt[i]);
    }
    std::vector<double> out(k);
    for (std::size_t j = 0; j < k; ++j) out[j] = acc[j].value();
    return out;
}

std::vector<double> bucket_masses(const PolyHashFamily& h,
                                  std::span<const double> xt, std::size_t k) {
    return bucket_masses(hash_buckets(h, xt.size()), xt, k);
}

EigenboundResult check_eigenbound(const PolyHashFamily& h, std::span<const double> xt,
                                  std::size_t k, double c) {
    for (double v : xt)
        if (std::abs(v) > c)
            throw InvalidInputError("||x~||_inf exceeds the declared cap c");
    check_dim(xt.size());
    const auto buckets = hash_buckets(h, xt.size());
    const auto masses = bucket_masses(buckets, xt, k);
    double max_mass = 0.0;
    for (double m : masses) max_mass = std::max(max_mass, m);
    EigenboundResult out;
    out.op_norm = operator_norm(build_collision_matrix(buckets, xt));
    out.bound = std::max(c * c, max_mass);
    out.holds = out.op_norm <= out.bound + 1e-9;
    return out;
}

const char* to_string(TailKind kind) {
    switch (kind) {
        case TailKind::frobenius: return "frobenius";
        case TailKind::operator_norm: return "operator";
        case TailKind::distortion: return "distortion";
    }
    return "?";
}

const char* to_string(TestVectorKind kind) {
    switch (kind) {
        case TestVectorKind::e1: return "e1";
        case TestVectorKind::ones: return "ones";
        case TestVectorKind::geometric: return "geometric";
    }
    return "?";
}

std::vector<double> make_test_vector(TestVectorKind kind, std::size_t d) {
    if (d == 0) throw InvalidParameterError("test vector needs d >= 1");
    std::vector<double> x(d, 0.0);
    switch (kind) {
        case TestVectorKind::e1:
            x[0] = 1.0;
            break;
        case TestVectorKind::ones: {
            const double v = 1.0 / std::sqrt(static_cast<double>(d));
            std::fill(x.begin(), x.end(), v);
            break;
        }
        case TestVectorKind::geometric: {
            for (std::size_t i = 0; i < d; ++i) x[i] = std::ldexp(1.0, -static_cast<int>(i) - 1);
            const double norm = std::sqrt(sum_squares(x));
            for (auto& v : x) v /= norm;
            break;
        }
    }
    return x;
}

namespace {

constexpr u64 kSaltRowHash = 0x68617368;   // trial h seeds
constexpr u64 kSaltSignHash = 0x7369676e;  // trial sigma seeds
constexpr u64 kSaltVector = 0x76656374;    // trial vectors (eigenbound)

std::string format_name(const char* kind, const SparseParams& p, TestVectorKind vec) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s[d=%zu,k=%zu,alpha=%llu,c=%.6g,vec=%s]", kind,
                  p.d, p.k, static_cast<unsigned long long>(p.alpha), p.c,
                  to_string(vec));
    return buf;
}

ExperimentReport degenerate_report(std::string name, u64 rng_seed) {
    ExperimentReport r;
    r.name = std::move(name);
    r.rng_seed = rng_seed;
    r.degenerate = true;
    r.pass = false;
    r.empirical_rate = 0.0;
    r.binomial_95_upper = 1.0;
    return r;
}

// Deterministic high-probability cap on max_j alpha_j for ||x~||_inf <= c:
// Bernstein on one bucket (mean mu = ||x~||^2/k, per-term cap c^2) plus a
// union over k buckets, combined with the c^2 eigenvalue floor.
double practical_operator_threshold(const SparseParams& p, double xt_norm_sq) {
    const double mu = xt_norm_sq / static_cast<double>(p.k);
    const double c2 = p.c_squared;
    const double ln_k = std::log(static_cast<double>(p.k));
    const double tail = 3.0 * std::sqrt(c2 * mu * ln_k) + 3.0 * c2 * ln_k;
    return std::max(c2, mu + tail);
}

}  // namespace

ExperimentReport tail_experiment(const TailParams& params, u64 trials, u64 rng_seed,
                                 unsigned threads) {
    const SparseParams& sp = params.sparse;
    const u64 dim = sp.spread_dim();
    if (params.kind != TailKind::distortion) check_dim(dim);

    ExperimentReport report;
    report.name = format_name(to_string(params.kind), sp, params.vector);
    report.rng_seed = rng_seed;
    if (trials == 0) return degenerate_report(std::move(report.name), rng_seed);
    report.trials = trials;

    const std::vector<double> x = make_test_vector(params.vector, sp.d);
    const double target = sum_squares(x);
    const double log2_inv_delta = std::log2(1.0 / sp.delta);

    double threshold = 0.0;
    double pass_bound = sp.delta;
    std::optional<double> practical;
    switch (params.kind) {
        case TailKind::frobenius:
            threshold = 7.0 / static_cast<double>(sp.k);
            break;
        case TailKind::operator_norm: {
            threshold = sp.epsilon / (128.0 * log2_inv_delta);
            const std::vector<double> xt = spread(x, sp);
            practical = practical_operator_threshold(sp, sum_squares(xt));
            break;
        }
        case TailKind::distortion:
            threshold = sp.epsilon;
            pass_bound = 3.0 * sp.delta;
            break;
    }
    report.threshold = threshold;
    report.pass_bound = pass_bound;
    report.practical_threshold = practical;

    std::vector<double> stats(trials);
    if (params.kind == TailKind::distortion) {
        parallel_trials(
            trials,
            [&](u64 i) {
                const Bytes seed_h = derive_seed(rng_seed, i, kSaltRowHash);
                const Bytes seed_s = derive_seed(rng_seed, i, kSaltSignHash);
                const SparseJLTransform t(sp, seed_h, seed_s);
                const std::vector<double> y = t.apply(x);
                stats[i] = std::abs(sum_squares(y) - target) / target;
            },
            threads);
    } else {
        const std::vector<double> xt = spread(x, sp);
        parallel_trials(
            trials,
            [&](u64 i) {
                const Bytes seed_h = derive_seed(rng_seed, i, kSaltRowHash);
                const PolyHashFamily h =
                    PolyHashFamily::sample(sp.r_h, dim, sp.k, seed_h,
                                           FieldPrime(sp.field_prime));
                const auto buckets = hash_buckets(h, dim);
                stats[i] = params.kind == TailKind::frobenius
                               ? collision_frobenius_sq(buckets, xt, sp.k)
                               : collision_operator_norm(buckets, xt, sp.k);
            },
            threads);
    }

    u64 failures = 0;
    u64 practical_failures = 0;
    for (double s : stats) {
        if (s > threshold) ++failures;
        if (practical && s > *practical) ++practical_failures;
    }
    report.failures = failures;
    report.empirical_rate = static_cast<double>(failures) / static_cast<double>(trials);
    report.binomial_95_upper = clopper_pearson_upper(failures, trials);
    report.p99 = percentile(stats, 0.99);
    if (practical) report.practical_failures = practical_failures;
    report.pass = report.binomial_95_upper <= pass_bound;
    return report;
}

ExperimentReport eigenbound_experiment(const EigenboundParams& params, u64 instances,
                                       u64 rng_seed, unsigned threads) {
    check_dim(params.dim);
    char buf[96];
    std::snprintf(buf, sizeof(buf), "eigenbound[D=%llu,k=%zu,c=%.6g]",
                  static_cast<unsigned long long>(params.dim), params.k, params.c);
    if (instances == 0) return degenerate_report(buf, rng_seed);

    std::vector<std::uint8_t> holds(instances, 0);
    parallel_trials(
        instances,
        [&](u64 i) {
            const Bytes seed_h = derive_seed(rng_seed, i, kSaltRowHash);
            const PolyHashFamily h =
                PolyHashFamily::sample(params.r, params.dim, params.k, seed_h);
            SplitMix64 g(fnv1a64(derive_seed(rng_seed, i, kSaltVector)));
            std::vector<double> xt(params.dim);
            for (auto& v : xt) v = (2.0 * u01(g) - 1.0) * params.c;
            holds[i] = check_eigenbound(h, xt, params.k, params.c).holds ? 1 : 0;
        },
        threads);

    ExperimentReport report;
    report.name = buf;
    report.rng_seed = rng_seed;
    report.trials = instances;
    for (auto h : holds)
        if (!h) ++report.failures;
    report.empirical_rate =
        static_cast<double>(report.failures) / static_cast<double>(instances);
    report.binomial_95_upper = clopper_pearson_upper(report.failures, instances);
    report.threshold = 0.0;
    report.pass_bound = 0.0;
    report.pass = report.failures == 0;
    return report;
}

}  // namespace sketchjl
