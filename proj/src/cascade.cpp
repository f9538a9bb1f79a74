#include "sketchjl/cascade.hpp"

#include <cmath>

namespace sketchjl {

namespace {

// The cascade's epsilon is the end-to-end distortion; each stage runs at
// eps' = eps/(2*(j*+1)) <= eps/4, so eps up to 1 keeps every stage inside the
// dense planner's domain.
void check_eps_delta(double epsilon, double delta) {
    if (!(epsilon > 0.0) || !(epsilon < 1.0))
        throw InvalidParameterError("epsilon must lie in (0, 1)");
    if (!(delta > 0.0) || !(delta < 0.5))
        throw InvalidParameterError("delta must lie in (0, 1/2)");
}

double t_value(double log2_inv_dp, std::size_t j) {
    return std::exp2(std::ldexp(log2_inv_dp, -static_cast<int>(j)));
}

std::size_t stop_level(double delta_prime, double c_stop) {
    const double L = std::log2(1.0 / delta_prime);
    const double threshold = c_stop * L * L * L;
    for (std::size_t j = 1; j < 64; ++j)
        if (t_value(L, j) <= threshold) return j;
    return 64;
}

}  // namespace

std::vector<double> cascade_t_values(double delta_prime, double floor_t) {
    if (!(delta_prime > 0.0) || !(delta_prime < 1.0))
        throw InvalidParameterError("delta' must lie in (0, 1)");
    const double L = std::log2(1.0 / delta_prime);
    std::vector<double> out;
    for (std::size_t j = 1; j < 64; ++j) {
        const double t = t_value(L, j);
        out.push_back(t);
        if (t <= floor_t) break;
    }
    return out;
}

CascadePlan plan_cascade(double epsilon, double delta, std::size_t d,
                         CascadeOptions options) {
    check_eps_delta(epsilon, delta);
    if (d == 0) throw InvalidParameterError("d must be >= 1");

    CascadePlan plan;
    plan.epsilon = epsilon;
    plan.delta = delta;
    plan.d = d;

    // delta' = delta/(j*+1) with j* depending on delta'; j* moves doubly
    // logarithmically, so two iterations settle it.
    std::size_t j_star = stop_level(delta, options.c_stop);
    double delta_prime = delta / static_cast<double>(j_star + 1);
    j_star = stop_level(delta_prime, options.c_stop);
    delta_prime = delta / static_cast<double>(j_star + 1);

    plan.j_star = j_star;
    plan.delta_prime = delta_prime;
    plan.eps_prime = epsilon / (2.0 * static_cast<double>(j_star + 1));
    plan.t_trace = cascade_t_values(delta_prime);

    const double L = std::log2(1.0 / delta_prime);
    const double inv_eps2 = 1.0 / (plan.eps_prime * plan.eps_prime);
    const std::size_t final_k = static_cast<std::size_t>(
        std::ceil(options.c_k * inv_eps2 * std::log(1.0 / delta_prime)));
    const std::size_t r_final =
        std::max<std::size_t>(2 * static_cast<std::size_t>(std::ceil(L)), 2);

    plan.start_level = 0;
    for (std::size_t j = 1; j <= j_star; ++j) {
        if (static_cast<std::size_t>(std::ceil(inv_eps2 * t_value(L, j))) < d) {
            plan.start_level = j;
            break;
        }
    }

    if (final_k >= d) {
        plan.final_k = d;
        plan.total_seed_bits = 0;
        return plan;
    }
    plan.final_k = final_k;

    std::size_t prev = d;
    for (std::size_t j = 1; j <= j_star; ++j) {
        const double t = t_value(L, j);
        const std::size_t k_j = static_cast<std::size_t>(std::ceil(inv_eps2 * t));
        if (k_j >= prev) continue;   // below the start level or not shrinking
        if (k_j <= final_k) break;   // the final stage subsumes the rest
        CascadeStage stage;
        stage.input_dim = prev;
        stage.output_dim = k_j;
        stage.r = std::max<std::size_t>(
            2 * static_cast<std::size_t>(std::ceil(options.c_r * L * L / t)), 2);
        stage.field_prime =
            smallest_field_at_least(static_cast<u64>(k_j) * static_cast<u64>(prev));
        plan.stages.push_back(stage);
        prev = k_j;
    }

    CascadeStage last;
    last.input_dim = prev;
    last.output_dim = final_k;
    last.r = r_final;
    last.field_prime =
        smallest_field_at_least(static_cast<u64>(final_k) * static_cast<u64>(prev));
    plan.stages.push_back(last);

    plan.total_seed_bits = cascade_seed_bits(plan);
    return plan;
}

u64 cascade_seed_bits(const CascadePlan& plan) {
    u64 total = 0;
    for (const auto& s : plan.stages)
        total += static_cast<u64>(s.r) * FieldPrime(s.field_prime).bits();
    return total;
}

CascadeTransform::CascadeTransform(CascadePlan plan, std::span<const std::uint8_t> seed)
    : plan_(std::move(plan)) {
    stages_.reserve(plan_.stages.size());
    for (std::size_t i = 0; i < plan_.stages.size(); ++i) {
        const auto& s = plan_.stages[i];
        Bytes stage_seed(seed.begin(), seed.end());
        for (int b = 0; b < 4; ++b)
            stage_seed.push_back(static_cast<std::uint8_t>((i >> (8 * b)) & 0xFF));
        stages_.push_back(DenseJLMatrix::with_order(s.output_dim, s.r, s.input_dim,
                                                    stage_seed, FieldPrime(s.field_prime)));
    }
}

std::vector<double> CascadeTransform::apply(std::span<const double> x) const {
    if (x.size() != plan_.d)
        throw ShapeError("cascade apply: vector length does not match d");
    std::vector<double> cur(x.begin(), x.end());
    for (const auto& stage : stages_) cur = stage.apply(cur);
    return cur;
}

u64 dense_seed_bits_reference(double epsilon, double delta, std::size_t d, double c_k) {
    const DenseJLParams params = plan_dense(epsilon, delta, DenseProfile::practical, c_k);
    const u64 field = smallest_field_at_least(static_cast<u64>(params.k) * d);
    return static_cast<u64>(params.r) * FieldPrime(field).bits();
}

std::vector<SeedBitsCell> seed_bits_crossover(std::span<const double> epsilons,
                                              std::span<const double> deltas,
                                              std::span<const std::size_t> dims,
                                              CascadeOptions options) {
    std::vector<SeedBitsCell> out;
    out.reserve(epsilons.size() * deltas.size() * dims.size());
    for (double eps : epsilons)
        for (double delta : deltas)
            for (std::size_t d : dims) {
                SeedBitsCell cell;
                cell.epsilon = eps;
                cell.delta = delta;
                cell.d = d;
                cell.dense_bits = dense_seed_bits_reference(eps, delta, d, options.c_k);
                cell.cascade_bits = plan_cascade(eps, delta, d, options).total_seed_bits;
                out.push_back(cell);
            }
    return out;
}

}  // namespace sketchjl
