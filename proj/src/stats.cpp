#include "sketchjl/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sketchjl/numeric.hpp"

namespace sketchjl {

namespace {

// Continued fraction for I_x(a,b) (Lentz; the classical betacf recurrence).
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kFpMin = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::invalid_argument("incomplete beta requires a, b > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double clopper_pearson_upper(std::uint64_t failures, std::uint64_t trials,
                             double confidence) {
    if (trials == 0) return 1.0;
    if (failures >= trials) return 1.0;
    const double a = static_cast<double>(failures) + 1.0;
    const double b = static_cast<double>(trials - failures);
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (regularized_incomplete_beta(a, b, mid) < confidence)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-15) break;
    }
    return 0.5 * (lo + hi);
}

MeanStd mean_std(std::span<const double> values) {
    MeanStd out;
    out.n = values.size();
    if (values.empty()) return out;
    NeumaierSum sum;
    for (double v : values) sum.add(v);
    out.mean = sum.value() / static_cast<double>(values.size());
    if (values.size() < 2) return out;
    NeumaierSum sq;
    for (double v : values) {
        const double dlt = v - out.mean;
        sq.add(dlt * dlt);
    }
    out.stddev = std::sqrt(sq.value() / static_cast<double>(values.size() - 1));
    out.stderr_mean = out.stddev / std::sqrt(static_cast<double>(values.size()));
    return out;
}

double percentile(std::vector<double> values, double q) {
    if (values.empty())
        throw std::invalid_argument("percentile of an empty sample");
    q = std::clamp(q, 0.0, 1.0);
    std::size_t rank = static_cast<std::size_t>(
        std::ceil(q * static_cast<double>(values.size())));
    if (rank > 0) --rank;
    std::nth_element(values.begin(), values.begin() + rank, values.end());
    return values[rank];
}

}  // namespace sketchjl
