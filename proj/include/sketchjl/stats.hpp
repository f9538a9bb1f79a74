#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace sketchjl {

// Regularized incomplete beta I_x(a, b) via the Lentz continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

// One-sided Clopper-Pearson upper confidence bound for a binomial rate:
// the u with BetaCDF(u; failures+1, trials-failures) = confidence
// (1.0 when failures == trials).
double clopper_pearson_upper(std::uint64_t failures, std::uint64_t trials,
                             double confidence = 0.95);

struct MeanStd {
    double mean = 0;
    double stddev = 0;
    double stderr_mean = 0;
    std::uint64_t n = 0;
};

MeanStd mean_std(std::span<const double> values);

// q in [0, 1]; the ceil(q*n)-th smallest value (1-based), so q = 0.99 over
// 10^4 samples picks index 9899.
double percentile(std::vector<double> values, double q);

}  // namespace sketchjl
