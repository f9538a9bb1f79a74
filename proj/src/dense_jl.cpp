#include "sketchjl/dense_jl.hpp"

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

constexpr std::size_t kMaxMaterialize = 10'000'000;

}  // namespace

DenseJLParams plan_dense(double epsilon, double delta, DenseProfile profile, double c_k) {
    check_eps_delta(epsilon, delta);
    if (!(c_k > 0)) throw InvalidParameterError("c_k must be positive");
    DenseJLParams out;
    out.epsilon = epsilon;
    out.delta = delta;
    out.profile = profile;
    out.c_k = c_k;
    const double inv_eps2 = 1.0 / (epsilon * epsilon);
    if (profile == DenseProfile::paper) {
        out.k = static_cast<std::size_t>(std::ceil(4.0 * 64.0 * 64.0 * inv_eps2 * std::log2(1.0 / delta)));
    } else {
        out.k = static_cast<std::size_t>(std::ceil(c_k * inv_eps2 * std::log(1.0 / delta)));
    }
    out.r = 2 * static_cast<std::size_t>(std::ceil(std::log2(1.0 / delta)));
    if (out.r < 2) out.r = 2;
    return out;
}

DenseJLMatrix::DenseJLMatrix(std::size_t k, std::size_t d, PolyHashFamily signs)
    : k_(k), d_(d), inv_sqrt_k_(1.0 / std::sqrt(static_cast<double>(k))), signs_(std::move(signs)) {}

DenseJLMatrix::DenseJLMatrix(const DenseJLParams& params, std::size_t d,
                             std::span<const std::uint8_t> seed, const FieldPrime& field)
    : DenseJLMatrix(with_order(params.k, params.r, d, seed, field)) {}

DenseJLMatrix DenseJLMatrix::with_order(std::size_t k, std::size_t r, std::size_t d,
                                        std::span<const std::uint8_t> seed,
                                        const FieldPrime& field) {
    if (k == 0 || d == 0) throw InvalidParameterError("matrix dimensions must be positive");
    const u64 n = static_cast<u64>(k) * static_cast<u64>(d);
    if (n / k != d || n > field.modulus())
        throw DomainOverflowError("k*d exceeds the hash field");
    return DenseJLMatrix(k, d, PolyHashFamily::sample(r, n, 2, seed, field));
}

void DenseJLMatrix::apply(std::span<const double> x, std::span<double> out) const {
    if (x.size() != d_ || out.size() != k_)
        throw ShapeError("dense apply: vector length does not match the matrix");
    std::vector<double> scaled(d_);
    for (std::size_t j = 0; j < d_; ++j) scaled[j] = inv_sqrt_k_ * x[j];
    std::vector<u64> bits(d_);
    for (std::size_t i = 0; i < k_; ++i) {
        signs_.eval_range(static_cast<u64>(i) * d_, d_, bits.data());
        NeumaierSum acc;
        for (std::size_t j = 0; j < d_; ++j)
            acc.add(bits[j] == 0 ? scaled[j] : -scaled[j]);
        out[i] = acc.value();
    }
}

std::vector<double> DenseJLMatrix::apply(std::span<const double> x) const {
    std::vector<double> out(k_);
    apply(x, out);
    return out;
}

std::vector<double> DenseJLMatrix::materialize() const {
    if (k_ * d_ > kMaxMaterialize)
        throw CapacityError("dense matrix too large to materialize");
    std::vector<double> out(k_ * d_);
    std::vector<u64> bits(k_ * d_);
    signs_.eval_range(0, bits.size(), bits.data());
    for (std::size_t i = 0; i < bits.size(); ++i)
        out[i] = bits[i] == 0 ? inv_sqrt_k_ : -inv_sqrt_k_;
    return out;
}

}  // namespace sketchjl
