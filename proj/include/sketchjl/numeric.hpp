#pragma once

#include <cmath>
#include <cstdint>
#include <span>

namespace sketchjl {

// Neumaier compensated accumulator.  All norm/row reductions in this library
// use it so that reduction error stays within ~1 ulp of the exact sum; the
// ulp-level agreement contracts (stream vs batch, dual-route Z) rely on this.
struct NeumaierSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }

    double value() const { return sum + comp; }
};

inline double sum_squares(std::span<const double> xs) {
    NeumaierSum acc;
    for (double x : xs) acc.add(x * x);
    return acc.value();
}

inline double sum_abs(std::span<const double> xs) {
    NeumaierSum acc;
    for (double x : xs) acc.add(std::abs(x));
    return acc.value();
}

// SplitMix64 (Steele, Lea, Flood; the java.util.SplittableRandom mixer).
// Used for seed expansion and for per-trial experiment randomness.
struct SplitMix64 {
    std::uint64_t state;

    explicit constexpr SplitMix64(std::uint64_t s) : state(s) {}

    constexpr std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
};

// Uniform double in [0, 1), 53 bits, identical on every platform.
inline double u01(SplitMix64& g) {
    return static_cast<double>(g.next() >> 11) * 0x1.0p-53;
}

}  // namespace sketchjl
