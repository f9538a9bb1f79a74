#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "sketchjl/poly_hash.hpp"

namespace sketchjl {

enum class SparseProfile { main_theorem, variant, custom };

struct SparseConstants {
    double c_k = 4.0;
    double c_alpha = 1.0;
    double c_h = 1.0;
    // Exponent knob t in alpha's extra factor eps^(-2t/log2(1/delta)) for the
    // variant profile.
    double variant_exponent = 2.0;
    bool paper_k = false;  // k = 28*64^2 * eps^-2 * log2(1/delta)
};

struct SparseParams {
    double epsilon = 0;
    double delta = 0;
    std::size_t d = 0;
    std::size_t k = 0;
    u64 alpha = 0;          // column sparsity, a power of two
    double c = 0;           // 1/sqrt(alpha)
    double c_squared = 0;   // 1/alpha, exact dyadic; alpha * c_squared == 1
    std::size_t r_h = 0;
    std::size_t r_sigma = 0;
    SparseProfile profile = SparseProfile::main_theorem;
    u64 field_prime = kDefaultPrime;
    std::string note;

    u64 spread_dim() const { return static_cast<u64>(d) * alpha; }
};

// main:    alpha >= c_alpha * eps^-1 * log2(1/delta) * log2(k/delta)
// variant: alpha >= c_alpha * eps^-1 * log2^2(1/delta) * eps^(-2t/log2(1/delta))
// both rounded up to a power of two; k = ceil(c_k * eps^-2 * log2(1/delta))
// (or the paper constant 28*64^2 when paper_k is set).
SparseParams plan_sparse(double epsilon, double delta, std::size_t d,
                         SparseProfile profile = SparseProfile::main_theorem,
                         SparseConstants constants = {},
                         const FieldPrime& field = FieldPrime{});

// Fixture-style parameters with everything pinned by hand.
SparseParams custom_sparse_params(std::size_t d, std::size_t k, u64 alpha,
                                  std::size_t r_h, std::size_t r_sigma,
                                  double epsilon = 0.25, double delta = 0.05,
                                  const FieldPrime& field = FieldPrime{});

// Replication map Q: each input coordinate j becomes alpha copies of c*x[j]
// at positions j*alpha + i (0-based).  Norm-preserving since alpha*c^2 = 1.
std::vector<double> spread(std::span<const double> x, const SparseParams& params);

u64 sparse_seed_bits(std::size_t r_h, std::size_t r_sigma,
                     const FieldPrime& field = FieldPrime{});

struct EmbedStats {
    u64 row_evals = 0;   // evaluations of h
    u64 sign_evals = 0;  // evaluations of sigma
};

struct SparseEntry {
    u64 index = 0;
    double value = 0;
};

// The composed transform A*Q held implicitly: h places each spread coordinate
// u in row h(u) with sign sigma(u).  A has exactly one nonzero per column;
// A*Q has exactly alpha placements of magnitude c per input column.
class SparseJLTransform {
public:
    SparseJLTransform(SparseParams params,
                      std::span<const std::uint8_t> seed_h,
                      std::span<const std::uint8_t> seed_sigma);

    const SparseParams& params() const { return params_; }
    const PolyHashFamily& row_hash() const { return h_; }
    const PolyHashFamily& sign_hash() const { return sigma_; }

    // y = (A*Q) x, touching only alpha*||x||_0 spread coordinates; exactly
    // alpha evaluations of h and of sigma per nonzero (counted in stats).
    void apply(std::span<const double> x, std::span<double> out,
               EmbedStats* stats = nullptr) const;
    std::vector<double> apply(std::span<const double> x,
                              EmbedStats* stats = nullptr) const;
    std::vector<double> apply(std::span<const SparseEntry> entries,
                              EmbedStats* stats = nullptr) const;

    u64 seed_bits() const { return sparse_seed_bits(params_.r_h, params_.r_sigma, h_.field()); }

    // One coordinate's contribution, Neumaier-accumulated into (sums, comps).
    // update_sketch and batch apply share this loop, so a stream that visits
    // each coordinate once in ascending order reproduces the batch embedding
    // bit for bit.
    void accumulate(u64 j, double value, std::span<double> sums,
                    std::span<double> comps, EmbedStats* stats) const;

private:
    SparseParams params_;
    PolyHashFamily h_;
    PolyHashFamily sigma_;
};

// Turnstile accumulator: after any update stream, values() equals the batch
// embedding of the net update vector (exactly, for canonical streams; within
// the documented ulp drift otherwise).  Single writer; values() snapshots.
class TurnstileSketch {
public:
    explicit TurnstileSketch(std::shared_ptr<const SparseJLTransform> transform);

    void update(u64 j, double v);  // 0-based coordinate

    std::vector<double> values() const;
    u64 updates_applied() const { return updates_; }
    const EmbedStats& stats() const { return stats_; }
    const SparseJLTransform& transform() const { return *transform_; }

private:
    std::shared_ptr<const SparseJLTransform> transform_;
    std::vector<double> sums_;
    std::vector<double> comps_;
    u64 updates_ = 0;
    EmbedStats stats_;
};

}  // namespace sketchjl
