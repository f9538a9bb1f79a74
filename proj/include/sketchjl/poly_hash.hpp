#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sketchjl/field.hpp"

namespace sketchjl {

using Bytes = std::vector<std::uint8_t>;

std::string to_hex(std::span<const std::uint8_t> bytes);
Bytes from_hex(std::string_view hex);  // throws InvalidSeedError on bad input

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes);

// An r-wise independent hash [n] -> [m]: a uniformly random polynomial of
// degree < r over F_p, evaluated at x and reduced mod m.  The coefficient
// vector is the entire state; it is re-derived from the seed on demand and
// never serialized.
//
// Seed expansion (fixed, deterministic): FNV-1a-64 of the seed bytes keys a
// SplitMix64 stream; each output is masked to ceil(log2 p) bits and rejection
// sampled into [0, p).  Identical (r, n, m, seed, p) always reproduce the
// same coefficients.  Range reduction by mod m carries bias <= 1/p per value.
class PolyHashFamily {
public:
    static PolyHashFamily sample(std::size_t r, u64 n, u64 m,
                                 std::span<const std::uint8_t> seed,
                                 const FieldPrime& field = FieldPrime{});

    // Direct construction, mainly for exhaustive enumeration and fixtures.
    static PolyHashFamily from_coefficients(std::vector<u64> coeffs, u64 n, u64 m,
                                            const FieldPrime& field = FieldPrime{});

    u64 eval(u64 x) const;

    // Values at the consecutive points start, start+1, ..., start+count-1.
    // Bit-identical to pointwise eval(); uses forward differences, which cost
    // r-1 modular additions per point instead of r multiplications.
    void eval_range(u64 start, std::size_t count, u64* out) const;

    // Auto-selects Horner or the subproduct-tree path; both are exposed for
    // direct use and are bit-exact equal (field arithmetic is exact).
    std::vector<u64> eval_batch(std::span<const u64> xs) const;
    std::vector<u64> eval_batch_horner(std::span<const u64> xs) const;
    std::vector<u64> eval_batch_multipoint(std::span<const u64> xs) const;

    // Range must be {0,1}: 0 -> +1, 1 -> -1.
    int sign_at(u64 x) const;

    std::size_t order() const { return coeffs_.size(); }  // r
    u64 domain_size() const { return n_; }
    u64 range_size() const { return m_; }
    const FieldPrime& field() const { return field_; }
    std::span<const u64> coefficients() const { return coeffs_; }
    const Bytes& seed() const { return seed_; }

    // r * ceil(log2 p): random bits consumed by this family.
    u64 seed_bits() const { return static_cast<u64>(order()) * field_.bits(); }

private:
    PolyHashFamily(FieldPrime field, std::vector<u64> coeffs, u64 n, u64 m, Bytes seed)
        : field_(field), coeffs_(std::move(coeffs)), n_(n), m_(m), seed_(std::move(seed)) {}

    u64 eval_field(u64 x) const;  // Horner over F_p, before mod m
    void check_domain(u64 x, std::size_t position) const;

    FieldPrime field_;
    std::vector<u64> coeffs_;  // coeffs_[i] multiplies x^i
    u64 n_;
    u64 m_;
    Bytes seed_;
};

// Seed material for a derived purpose: SplitMix64 over (key, index, salt),
// rendered as 16 bytes.  Used to give every Monte-Carlo trial its own seed.
Bytes derive_seed(u64 key, u64 index, u64 salt);

}  // namespace sketchjl
