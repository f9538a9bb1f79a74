#include "sketchjl/sparse_jl.hpp"

#include <bit>
#include <cmath>

#include "sketchjl/numeric.hpp"

namespace sketchjl {

namespace {

void check_eps_delta(double epsilon, double delta) {
    if (!(epsilon > 0.0) || !(epsilon < 0.5))
        throw InvalidParameterError("epsilon must lie in (0, 1/2)");
    if (!(delta > 0.0) || !(delta < 0.5))
        throw InvalidParameterError("delta must lie in (0, 1/2)");
}

u64 next_pow2_at_least(double bound) {
    u64 a = 1;
    while (static_cast<double>(a) < bound) {
        if (a > (u64{1} << 62)) throw DomainOverflowError("alpha overflows");
        a <<= 1;
    }
    return a;
}

void finish_params(SparseParams& p, const FieldPrime& field) {
    p.field_prime = field.modulus();
    p.c = 1.0 / std::sqrt(static_cast<double>(p.alpha));
    p.c_squared = 1.0 / static_cast<double>(p.alpha);
    if (p.d == 0) throw InvalidParameterError("d must be >= 1");
    const u64 dd = static_cast<u64>(p.d);
    if (p.alpha != 0 && dd > field.modulus() / p.alpha)
        throw DomainOverflowError("spread dimension d*alpha exceeds the hash field");
    if (static_cast<u64>(p.k) > field.modulus())
        throw DomainOverflowError("k exceeds the hash field");
}

constexpr u64 kMaxSpreadMaterialize = u64{1} << 24;

}  // namespace

SparseParams plan_sparse(double epsilon, double delta, std::size_t d,
                         SparseProfile profile, SparseConstants constants,
                         const FieldPrime& field) {
    check_eps_delta(epsilon, delta);
    if (profile == SparseProfile::custom)
        throw InvalidParameterError("custom profile takes explicit parameters");
    SparseParams p;
    p.epsilon = epsilon;
    p.delta = delta;
    p.d = d;
    p.profile = profile;

    const double log2_inv_delta = std::log2(1.0 / delta);
    if (constants.paper_k) {
        p.k = static_cast<std::size_t>(
            std::ceil(28.0 * 64.0 * 64.0 / (epsilon * epsilon) * log2_inv_delta));
        p.note = "paper-faithful constants are analysis-grade; k is far larger than practical";
    } else {
        p.k = static_cast<std::size_t>(
            std::ceil(constants.c_k / (epsilon * epsilon) * log2_inv_delta));
    }

    const double log2_k_delta = std::log2(static_cast<double>(p.k) / delta);
    double alpha_bound;
    std::size_t r_h;
    if (profile == SparseProfile::variant) {
        const double extra =
            std::pow(epsilon, -2.0 * constants.variant_exponent / log2_inv_delta);
        alpha_bound = constants.c_alpha / epsilon * log2_inv_delta * log2_inv_delta * extra;
        r_h = 2 * static_cast<std::size_t>(std::ceil(constants.c_h * log2_inv_delta));
    } else {
        alpha_bound = constants.c_alpha / epsilon * log2_inv_delta * log2_k_delta;
        r_h = 2 * static_cast<std::size_t>(std::ceil(constants.c_h * log2_k_delta));
    }
    p.alpha = next_pow2_at_least(alpha_bound);
    p.r_h = std::max<std::size_t>(r_h, 2);
    p.r_sigma = std::max<std::size_t>(
        2 * static_cast<std::size_t>(std::ceil(log2_inv_delta)), 2);

    finish_params(p, field);
    return p;
}

SparseParams custom_sparse_params(std::size_t d, std::size_t k, u64 alpha,
                                  std::size_t r_h, std::size_t r_sigma,
                                  double epsilon, double delta, const FieldPrime& field) {
    if (alpha == 0 || !std::has_single_bit(alpha))
        throw InvalidParameterError("alpha must be a power of two");
    if (k == 0) throw InvalidParameterError("k must be >= 1");
    if (r_h < 1 || r_sigma < 1) throw InvalidParameterError("independence orders must be >= 1");
    SparseParams p;
    p.epsilon = epsilon;
    p.delta = delta;
    p.d = d;
    p.k = k;
    p.alpha = alpha;
    p.r_h = r_h;
    p.r_sigma = r_sigma;
    p.profile = SparseProfile::custom;
    finish_params(p, field);
    return p;
}

std::vector<double> spread(std::span<const double> x, const SparseParams& params) {
    if (x.size() != params.d)
        throw ShapeError("spread: vector length does not match d");
    const u64 dim = params.spread_dim();
    if (dim > kMaxSpreadMaterialize)
        throw CapacityError("spread vector too large to materialize");
    std::vector<double> out(dim);
    for (std::size_t j = 0; j < params.d; ++j) {
        const double v = params.c * x[j];
        const std::size_t base = j * params.alpha;
        for (u64 i = 0; i < params.alpha; ++i) out[base + i] = v;
    }
    return out;
}

u64 sparse_seed_bits(std::size_t r_h, std::size_t r_sigma, const FieldPrime& field) {
    return static_cast<u64>(r_h + r_sigma) * field.bits();
}

SparseJLTransform::SparseJLTransform(SparseParams params,
                                     std::span<const std::uint8_t> seed_h,
                                     std::span<const std::uint8_t> seed_sigma)
    : params_(std::move(params)),
      h_(PolyHashFamily::sample(params_.r_h, params_.spread_dim(), params_.k, seed_h,
                                FieldPrime(params_.field_prime))),
      sigma_(PolyHashFamily::sample(params_.r_sigma, params_.spread_dim(), 2, seed_sigma,
                                    FieldPrime(params_.field_prime))) {}

void SparseJLTransform::accumulate(u64 j, double value, std::span<double> sums,
                                   std::span<double> comps, EmbedStats* stats) const {
    const u64 alpha = params_.alpha;
    const double cv = params_.c * value;
    const u64 base = j * alpha;
    thread_local std::vector<u64> rows, signs;
    rows.resize(alpha);
    signs.resize(alpha);
    h_.eval_range(base, alpha, rows.data());
    sigma_.eval_range(base, alpha, signs.data());
    if (stats) {
        stats->row_evals += alpha;
        stats->sign_evals += alpha;
    }
    for (u64 i = 0; i < alpha; ++i) {
        const u64 row = rows[i];
        const double term = signs[i] == 0 ? cv : -cv;
        double& s = sums[row];
        double& comp = comps[row];
        const double t = s + term;
        if (std::abs(s) >= std::abs(term))
            comp += (s - t) + term;
        else
            comp += (term - t) + s;
        s = t;
    }
}

void SparseJLTransform::apply(std::span<const double> x, std::span<double> out,
                              EmbedStats* stats) const {
    if (x.size() != params_.d)
        throw ShapeError("sparse apply: vector length does not match d");
    if (out.size() != params_.k)
        throw ShapeError("sparse apply: output length does not match k");
    std::vector<double> sums(params_.k, 0.0), comps(params_.k, 0.0);
    for (std::size_t j = 0; j < x.size(); ++j)
        if (x[j] != 0.0) accumulate(j, x[j], sums, comps, stats);
    for (std::size_t i = 0; i < params_.k; ++i) out[i] = sums[i] + comps[i];
}

std::vector<double> SparseJLTransform::apply(std::span<const double> x,
                                             EmbedStats* stats) const {
    std::vector<double> out(params_.k);
    apply(x, out, stats);
    return out;
}

std::vector<double> SparseJLTransform::apply(std::span<const SparseEntry> entries,
                                             EmbedStats* stats) const {
    std::vector<double> sums(params_.k, 0.0), comps(params_.k, 0.0);
    for (const auto& e : entries) {
        if (e.index >= params_.d)
            throw ShapeError("sparse apply: coordinate index out of range");
        if (e.value != 0.0) accumulate(e.index, e.value, sums, comps, stats);
    }
    std::vector<double> out(params_.k);
    for (std::size_t i = 0; i < params_.k; ++i) out[i] = sums[i] + comps[i];
    return out;
}

TurnstileSketch::TurnstileSketch(std::shared_ptr<const SparseJLTransform> transform)
    : transform_(std::move(transform)),
      sums_(transform_->params().k, 0.0),
      comps_(transform_->params().k, 0.0) {}

void TurnstileSketch::update(u64 j, double v) {
    if (j >= transform_->params().d)
        throw ShapeError("sketch update: coordinate index out of range");
    transform_->accumulate(j, v, sums_, comps_, &stats_);
    ++updates_;
}

std::vector<double> TurnstileSketch::values() const {
    std::vector<double> out(sums_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = sums_[i] + comps_[i];
    return out;
}

}  // namespace sketchjl
