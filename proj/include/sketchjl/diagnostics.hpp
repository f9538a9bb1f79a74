#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sketchjl/sparse_jl.hpp"

namespace sketchjl {

inline constexpr u64 kMaxCollisionDim = 4096;

// T_{s,t} = x~_s * x~_t * [s != t and h(s) = h(t)]: symmetric, zero diagonal,
// block-diagonal under the bucket permutation with rank-one-minus-diagonal
// blocks.  sigma' T sigma is the embedding error ||A x~||^2 - ||x~||^2.
struct CollisionMatrix {
    Eigen::MatrixXd t;
    u64 dim() const { return static_cast<u64>(t.rows()); }
};

std::vector<u64> hash_buckets(const PolyHashFamily& h, u64 count);

CollisionMatrix build_collision_matrix(std::span<const u64> buckets,
                                       std::span<const double> xt);
CollisionMatrix build_collision_matrix(const PolyHashFamily& h,
                                       std::span<const double> xt);

// Compensated entry sum of T_{s,t}^2.
double frobenius_sq(const CollisionMatrix& m);

// ||T||_F^2 without materializing T: sum_j (alpha_j^2 - sum_{i in bucket j} x~_i^4).
double collision_frobenius_sq(std::span<const u64> buckets,
                              std::span<const double> xt, std::size_t k);

// Largest |eigenvalue| via Eigen's symmetric solver (relative tolerance 1e-10).
double operator_norm(const CollisionMatrix& m);

// Fallback route: power iteration on the shifted PSD matrices s*I + T and
// s*I - T (s = max row 1-norm), so convergence is monotone on both spectrum
// ends.  Agrees with operator_norm to ~1e-6 on well-separated spectra.
double operator_norm_power_iteration(const CollisionMatrix& m,
                                     std::size_t iterations = 3000);

// Exact block route: max over buckets of the norm of v v' - diag(v*v).
double collision_operator_norm(std::span<const u64> buckets,
                               std::span<const double> xt, std::size_t k);

// alpha_j = sum of x~_i^2 over the coordinates hashed to row j.
std::vector<double> bucket_masses(std::span<const u64> buckets,
                                  std::span<const double> xt, std::size_t k);
std::vector<double> bucket_masses(const PolyHashFamily& h,
                                  std::span<const double> xt, std::size_t k);

struct EigenboundResult {
    bool holds = false;
    double op_norm = 0;
    double bound = 0;
};

// ||T||_2 <= max(c^2, max_j alpha_j) + 1e-9; deterministic given h, so it
// must hold on every instance with ||x~||_inf <= c.
EigenboundResult check_eigenbound(const PolyHashFamily& h, std::span<const double> xt,
                                  std::size_t k, double c);

enum class TailKind { frobenius, operator_norm, distortion };
enum class TestVectorKind { e1, ones, geometric };

std::vector<double> make_test_vector(TestVectorKind kind, std::size_t d);
const char* to_string(TailKind kind);
const char* to_string(TestVectorKind kind);

struct TailParams {
    TailKind kind = TailKind::distortion;
    SparseParams sparse;
    TestVectorKind vector = TestVectorKind::ones;
};

struct ExperimentReport {
    std::string name;
    u64 trials = 0;
    u64 failures = 0;
    double empirical_rate = 0;
    double binomial_95_upper = 1.0;
    double threshold = 0;
    double pass_bound = 0;  // the probability the upper bound is held against
    bool pass = false;
    bool degenerate = false;
    double p99 = 0;
    u64 rng_seed = 0;
    std::optional<double> practical_threshold;
    std::optional<u64> practical_failures;
};

// Monte Carlo over fresh hash seeds (trial i uses seeds derived from
// (rng_seed, i)); reproducible and thread-count independent.
//   frobenius:  ||T||_F^2 > 7/k,                      pass bound delta
//   operator:   ||T||_2 > eps/(128*log2(1/delta)),    pass bound delta
//               (plus a practical threshold: the deterministic c^2 term
//                combined with a Bernstein bound on the max bucket mass)
//   distortion: | ||Ax~||^2 - ||x||^2 | > eps*||x||^2, pass bound 3*delta
ExperimentReport tail_experiment(const TailParams& params, u64 trials, u64 rng_seed,
                                 unsigned threads = 0);

struct EigenboundParams {
    u64 dim = 256;
    std::size_t k = 64;
    double c = 0.0625;
    std::size_t r = 8;
};

// Random (h, x~) instances with x~ uniform in [-c, c]^dim; zero failures
// required.
ExperimentReport eigenbound_experiment(const EigenboundParams& params, u64 instances,
                                       u64 rng_seed, unsigned threads = 0);

}  // namespace sketchjl
