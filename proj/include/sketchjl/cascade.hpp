#pragma once

#include <span>
#include <vector>

#include "sketchjl/dense_jl.hpp"

namespace sketchjl {

struct CascadeOptions {
    double c_stop = 1.0;  // stop once t_j <= c_stop * log2^3(1/delta')
    double c_r = 1.0;     // stage independence r_j = 2*ceil(c_r*log2^2(1/delta')/t_j)
    double c_k = 4.0;     // final dimension constant (shared with plan_dense)
};

struct CascadeStage {
    std::size_t input_dim = 0;
    std::size_t output_dim = 0;
    std::size_t r = 0;
    u64 field_prime = 0;  // ladder prime hosting input_dim * output_dim
};

struct CascadePlan {
    double epsilon = 0;
    double delta = 0;
    double eps_prime = 0;
    double delta_prime = 0;
    std::size_t d = 0;
    std::size_t j_star = 0;
    std::size_t start_level = 0;
    std::size_t final_k = 0;              // output dimension (== d for identity)
    std::vector<CascadeStage> stages;     // includes the final stage; empty = identity
    u64 total_seed_bits = 0;
    std::vector<double> t_trace;          // t_j for j = 1.. down to t <= 2

    bool identity() const { return stages.empty(); }
};

// t_j = delta'^(-1/2^j), computed as exp2(log2(1/delta')/2^j) so dyadic
// delta' yields exact values.  Emits until the first value <= floor_t.
std::vector<double> cascade_t_values(double delta_prime, double floor_t = 2.0);

// Gradual reduction schedule: intermediate stages k_j = ceil(eps'^-2 * t_j)
// for j up to j_star (first j with t_j <= c_stop*log2^3(1/delta')), then a
// final stage to ceil(c_k * eps'^-2 * ln(1/delta')).  delta' = delta/(j*+1)
// resolved by two fixed-point iterations, eps' = eps/(2*(j*+1)).  Stages that
// do not strictly shrink the dimension (k_j >= previous dim, or
// k_j <= final_k) are dropped; if even final_k >= d the plan is the identity.
CascadePlan plan_cascade(double epsilon, double delta, std::size_t d,
                         CascadeOptions options = {});

// Sum of r_j * ceil(log2 field_j) over the stages.
u64 cascade_seed_bits(const CascadePlan& plan);

// The chain of dense sign matrices realizing a plan.  Stage i draws its
// entry family from seed || uint32_le(i) over the stage's ladder field.
class CascadeTransform {
public:
    CascadeTransform(CascadePlan plan, std::span<const std::uint8_t> seed);

    const CascadePlan& plan() const { return plan_; }
    const std::vector<DenseJLMatrix>& stages() const { return stages_; }

    std::vector<double> apply(std::span<const double> x) const;

private:
    CascadePlan plan_;
    std::vector<DenseJLMatrix> stages_;
};

// Seed bits of the single r-wise dense family at the same (eps, delta, d),
// with the field picked from the same ladder: the baseline the cascade is
// compared against.
u64 dense_seed_bits_reference(double epsilon, double delta, std::size_t d,
                              double c_k = 4.0);

struct SeedBitsCell {
    double epsilon = 0;
    double delta = 0;
    std::size_t d = 0;
    u64 dense_bits = 0;
    u64 cascade_bits = 0;
};

std::vector<SeedBitsCell> seed_bits_crossover(std::span<const double> epsilons,
                                              std::span<const double> deltas,
                                              std::span<const std::size_t> dims,
                                              CascadeOptions options = {});

}  // namespace sketchjl
