#include "sketchjl/poly_hash.hpp"

#include <algorithm>
#include <cstdio>

#include "sketchjl/numeric.hpp"

namespace sketchjl {

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xF]);
    }
    return out;
}

Bytes from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0)
        throw InvalidSeedError("hex seed must have even length");
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const int hi = nibble(hex[2 * i]);
        const int lo = nibble(hex[2 * i + 1]);
        if (hi < 0 || lo < 0)
            throw InvalidSeedError("hex seed contains a non-hex character");
        out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
    return out;
}

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (std::uint8_t b : bytes) {
        h ^= b;
        h *= 0x100000001B3ULL;
    }
    return h;
}

Bytes derive_seed(u64 key, u64 index, u64 salt) {
    SplitMix64 g(key ^ (index * 0x9E3779B97F4A7C15ULL) ^ (salt * 0xD1B54A32D192ED03ULL));
    Bytes out(16);
    for (int w = 0; w < 2; ++w) {
        u64 v = g.next();
        for (int i = 0; i < 8; ++i) out[8 * w + i] = static_cast<std::uint8_t>(v >> (8 * i));
    }
    return out;
}

PolyHashFamily PolyHashFamily::sample(std::size_t r, u64 n, u64 m,
                                      std::span<const std::uint8_t> seed,
                                      const FieldPrime& field) {
    if (r < 1) throw InvalidParameterError("hash family order r must be >= 1");
    if (seed.empty()) throw InvalidSeedError("hash family seed must be non-empty");
    const u64 p = field.modulus();
    if (n > p)
        throw UnsupportedParametersError("domain size exceeds field modulus");
    if (m < 2 || m > p)
        throw UnsupportedParametersError("range size must lie in [2, p]");

    SplitMix64 stream(fnv1a64(seed));
    const u64 mask = field.bits() >= 64 ? ~u64{0} : ((u64{1} << field.bits()) - 1);
    std::vector<u64> coeffs(r);
    for (auto& c : coeffs) {
        u64 v;
        do {
            v = stream.next() & mask;
        } while (v >= p);
        c = v;
    }
    return PolyHashFamily(field, std::move(coeffs), n, m,
                          Bytes(seed.begin(), seed.end()));
}

PolyHashFamily PolyHashFamily::from_coefficients(std::vector<u64> coeffs, u64 n, u64 m,
                                                 const FieldPrime& field) {
    if (coeffs.empty()) throw InvalidParameterError("hash family needs >= 1 coefficient");
    const u64 p = field.modulus();
    if (n > p)
        throw UnsupportedParametersError("domain size exceeds field modulus");
    if (m < 2 || m > p)
        throw UnsupportedParametersError("range size must lie in [2, p]");
    for (u64 c : coeffs)
        if (c >= p) throw InvalidParameterError("coefficient outside [0, p)");
    return PolyHashFamily(field, std::move(coeffs), n, m, Bytes{});
}

void PolyHashFamily::check_domain(u64 x, std::size_t position) const {
    if (x >= n_) {
        char buf[128];
        std::snprintf(buf, sizeof(buf),
                      "hash input %llu outside domain [0, %llu) at position %zu",
                      static_cast<unsigned long long>(x),
                      static_cast<unsigned long long>(n_), position);
        throw OutOfDomainError(buf);
    }
}

u64 PolyHashFamily::eval_field(u64 x) const {
    u64 acc = coeffs_.back();
    for (std::size_t i = coeffs_.size() - 1; i-- > 0;)
        acc = field_.add(field_.mul(acc, x), coeffs_[i]);
    return acc;
}

u64 PolyHashFamily::eval(u64 x) const {
    check_domain(x, 0);
    return eval_field(x) % m_;
}

void PolyHashFamily::eval_range(u64 start, std::size_t count, u64* out) const {
    if (count == 0) return;
    if (start >= n_ || count > n_ - start)
        check_domain(start + count - 1, count - 1);

    const std::size_t r = coeffs_.size();
    if (r == 1) {
        const u64 v = coeffs_[0] % m_;
        std::fill(out, out + count, v);
        return;
    }
    if (count < r + 4) {
        for (std::size_t i = 0; i < count; ++i) out[i] = eval_field(start + i) % m_;
        return;
    }

    // Forward-difference table: diff[j] = Δ^j f(start); the (r-1)-th
    // difference of a degree-(r-1) polynomial is constant, so each further
    // point costs r-1 modular additions.
    std::vector<u64> diff(r);
    for (std::size_t i = 0; i < r; ++i) diff[i] = eval_field(start + i);
    for (std::size_t level = 1; level < r; ++level)
        for (std::size_t i = r; i-- > level;)
            diff[i] = field_.sub(diff[i], diff[i - 1]);

    for (std::size_t i = 0; i < count; ++i) {
        out[i] = diff[0] % m_;
        for (std::size_t j = 0; j + 1 < r; ++j)
            diff[j] = field_.add(diff[j], diff[j + 1]);
    }
}

std::vector<u64> PolyHashFamily::eval_batch_horner(std::span<const u64> xs) const {
    std::vector<u64> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        check_domain(xs[i], i);
        out[i] = eval_field(xs[i]) % m_;
    }
    return out;
}

namespace {

// Dense polynomial over F_p, ascending coefficients, used only by the
// subproduct-tree evaluation below.
using Poly = std::vector<u64>;

Poly poly_mul(const FieldPrime& f, const Poly& a, const Poly& b) {
    Poly out(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j)
            out[i + j] = f.add(out[i + j], f.mul(a[i], b[j]));
    }
    return out;
}

// Remainder of a mod b where b is monic.
Poly poly_rem(const FieldPrime& f, Poly a, const Poly& b) {
    const std::size_t db = b.size() - 1;
    while (a.size() > db) {
        const u64 lead = a.back();
        const std::size_t shift = a.size() - 1 - db;
        if (lead != 0)
            for (std::size_t i = 0; i < db; ++i)
                a[shift + i] = f.sub(a[shift + i], f.mul(lead, b[i]));
        a.pop_back();
    }
    if (a.empty()) a.push_back(0);
    return a;
}

// Subproduct tree over one block of points; rems descend f mod each subtree
// product until the leaves hold f(x_i).
void multipoint_block(const FieldPrime& f, const Poly& poly,
                      std::span<const u64> pts, u64* out) {
    const std::size_t s = pts.size();
    if (s == 1) {
        // f mod (x - a) = f(a)
        u64 acc = poly.back();
        for (std::size_t i = poly.size() - 1; i-- > 0;)
            acc = f.add(f.mul(acc, pts[0]), poly[i]);
        out[0] = acc;
        return;
    }
    std::vector<std::vector<Poly>> tree;
    tree.emplace_back();
    tree[0].reserve(s);
    for (u64 x : pts) tree[0].push_back(Poly{f.sub(0, x), 1});
    while (tree.back().size() > 1) {
        const auto& prev = tree.back();
        std::vector<Poly> level;
        level.reserve((prev.size() + 1) / 2);
        for (std::size_t i = 0; i + 1 < prev.size(); i += 2)
            level.push_back(poly_mul(f, prev[i], prev[i + 1]));
        if (prev.size() % 2 == 1) level.push_back(prev.back());
        tree.push_back(std::move(level));
    }

    // Walk back down, reducing the remainder through each level.
    std::vector<Poly> rems{poly_rem(f, poly, tree.back()[0])};
    for (std::size_t lvl = tree.size() - 1; lvl-- > 0;) {
        const auto& nodes = tree[lvl];
        std::vector<Poly> next;
        next.reserve(nodes.size());
        for (std::size_t i = 0; i + 1 < nodes.size(); i += 2) {
            const Poly& parent = rems[i / 2];
            next.push_back(poly_rem(f, parent, nodes[i]));
            next.push_back(poly_rem(f, parent, nodes[i + 1]));
        }
        if (nodes.size() % 2 == 1) next.push_back(rems.back());
        rems = std::move(next);
    }
    for (std::size_t i = 0; i < s; ++i) out[i] = rems[i][0];
}

}  // namespace

std::vector<u64> PolyHashFamily::eval_batch_multipoint(std::span<const u64> xs) const {
    for (std::size_t i = 0; i < xs.size(); ++i) check_domain(xs[i], i);
    std::vector<u64> out(xs.size());
    const std::size_t r = coeffs_.size();
    if (r == 1) {
        std::fill(out.begin(), out.end(), coeffs_[0] % m_);
        return out;
    }
    Poly poly(coeffs_.begin(), coeffs_.end());
    const std::size_t block = std::max<std::size_t>(r, 2);
    for (std::size_t off = 0; off < xs.size(); off += block) {
        const std::size_t len = std::min(block, xs.size() - off);
        multipoint_block(field_, poly, xs.subspan(off, len), out.data() + off);
    }
    for (auto& v : out) v %= m_;
    return out;
}

std::vector<u64> PolyHashFamily::eval_batch(std::span<const u64> xs) const {
    if (xs.size() >= order() && order() >= 32) return eval_batch_multipoint(xs);
    return eval_batch_horner(xs);
}

int PolyHashFamily::sign_at(u64 x) const {
    if (m_ != 2)
        throw WrongRangeError("sign evaluation requires range size 2");
    return eval(x) == 0 ? 1 : -1;
}

}  // namespace sketchjl
