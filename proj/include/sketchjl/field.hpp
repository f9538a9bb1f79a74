#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <string>

#include "sketchjl/errors.hpp"

namespace sketchjl {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

// Default hash field: the Mersenne prime 2^61 - 1.  One field covers every
// domain this library hashes (n = d*alpha <= p) and keeps seed accounting at
// 61 bits per coefficient.
inline constexpr u64 kDefaultPrime = (u64{1} << 61) - 1;

// Prime ladder for stage-sized fields (all Mersenne, so the fast reduction
// applies everywhere).  Seed-bit accounting picks the smallest ladder prime
// that hosts a stage's hash domain.
inline constexpr std::array<u64, 9> kFieldLadder = {
    3, 7, 31, 127, 8191, 131071, 524287, 2147483647ULL, kDefaultPrime};

// Arithmetic modulo a prime p, elements canonically in [0, p).
// Mersenne moduli get a fold-based reduction; anything else falls back to %.
class FieldPrime {
public:
    explicit FieldPrime(u64 p = kDefaultPrime) : p_(p) {
        if (p < 2) throw InvalidParameterError("field modulus must be >= 2");
        bits_ = static_cast<unsigned>(std::bit_width(p - 1));
        mersenne_ = p >= 3 && (p & (p + 1)) == 0;
        mers_k_ = mersenne_ ? static_cast<unsigned>(std::bit_width(p)) : 0;
    }

    u64 modulus() const noexcept { return p_; }

    // ceil(log2 p): bits of seed consumed per sampled coefficient.
    unsigned bits() const noexcept { return bits_; }

    bool is_mersenne() const noexcept { return mersenne_; }

    u64 reduce(u128 x) const noexcept {
        if (mersenne_) {
            const u128 mask = p_;
            u128 t = (x & mask) + (x >> mers_k_);
            u64 r = static_cast<u64>((t & mask) + static_cast<u64>(t >> mers_k_));
            if (r >= p_) r -= p_;
            return r;
        }
        return static_cast<u64>(x % p_);
    }

    // Operands must be canonical.
    u64 add(u64 a, u64 b) const noexcept {
        const u64 s = a + b;
        return s >= p_ ? s - p_ : s;
    }

    u64 sub(u64 a, u64 b) const noexcept {
        return a >= b ? a - b : a + (p_ - b);
    }

    u64 mul(u64 a, u64 b) const noexcept {
        return reduce(static_cast<u128>(a) * b);
    }

    u64 pow(u64 a, u64 e) const noexcept {
        u64 base = a;
        u64 acc = p_ == 1 ? 0 : 1 % p_;
        while (e > 0) {
            if (e & 1) acc = mul(acc, base);
            e >>= 1;
            if (e) base = mul(base, base);
        }
        return acc;
    }

    friend bool operator==(const FieldPrime& a, const FieldPrime& b) {
        return a.p_ == b.p_;
    }

private:
    u64 p_;
    unsigned bits_;
    bool mersenne_;
    unsigned mers_k_;
};

// Smallest ladder prime hosting a hash domain of size n.
inline u64 smallest_field_at_least(u64 n) {
    for (u64 p : kFieldLadder)
        if (n <= p) return p;
    throw DomainOverflowError("hash domain " + std::to_string(n) +
                              " exceeds the largest supported field 2^61-1");
}

}  // namespace sketchjl
