#pragma once

#include <span>
#include <vector>

#include "sketchjl/poly_hash.hpp"

namespace sketchjl {

enum class DenseProfile { practical, paper };

struct DenseJLParams {
    double epsilon = 0;
    double delta = 0;
    std::size_t k = 0;
    std::size_t r = 0;  // independence order, even
    DenseProfile profile = DenseProfile::practical;
    double c_k = 4.0;
};

// practical: k = ceil(c_k * eps^-2 * ln(1/delta))
// paper:     k = ceil(4*64^2 * eps^-2 * log2(1/delta))
// both:      r = 2 * ceil(log2(1/delta))
DenseJLParams plan_dense(double epsilon, double delta,
                         DenseProfile profile = DenseProfile::practical,
                         double c_k = 4.0);

// Implicit k x d matrix with entries sign(i*d + j)/sqrt(k), where the signs
// come from one r-wise independent family over [k*d] (row-major indexing).
class DenseJLMatrix {
public:
    DenseJLMatrix(const DenseJLParams& params, std::size_t d,
                  std::span<const std::uint8_t> seed,
                  const FieldPrime& field = FieldPrime{});

    // Cascade stages pick k and r directly.
    static DenseJLMatrix with_order(std::size_t k, std::size_t r, std::size_t d,
                                    std::span<const std::uint8_t> seed,
                                    const FieldPrime& field = FieldPrime{});

    std::size_t rows() const { return k_; }
    std::size_t cols() const { return d_; }
    double scale() const { return inv_sqrt_k_; }
    const PolyHashFamily& entry_signs() const { return signs_; }

    // out[i] = sum_j sign(i*d+j) * (x[j]/sqrt(k)), Neumaier-accumulated in
    // ascending j.  Bit-identical to a row dot with materialize() in the same
    // order.
    void apply(std::span<const double> x, std::span<double> out) const;
    std::vector<double> apply(std::span<const double> x) const;

    // Row-major k x d entries; guarded (diagnostics/test sizes only).
    std::vector<double> materialize() const;

private:
    DenseJLMatrix(std::size_t k, std::size_t d, PolyHashFamily signs);

    std::size_t k_;
    std::size_t d_;
    double inv_sqrt_k_;
    PolyHashFamily signs_;
};

}  // namespace sketchjl
