#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "evl/observables.hpp"

// Exact orbits of x -> 3x mod 1 as shifts of random ternary digit strings.

namespace evl {

using u128 = unsigned __int128;

inline constexpr unsigned kWindowDigits = 64;
inline constexpr unsigned kDigitsPerWord = 40;
inline constexpr std::uint64_t kPow3_40 = 12157665459056928801ULL; // 3^40 < 2^64

inline constexpr u128 pow3_u128(unsigned e) {
    u128 r = 1;
    for (unsigned i = 0; i < e; ++i) r *= 3;
    return r;
}

inline constexpr u128 kWindowScale = pow3_u128(kWindowDigits); // 3^64 < 2^102

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Stateless 64-bit word for a (seed, stream, block, attempt) counter.
inline std::uint64_t counter_word(std::uint64_t seed, std::uint64_t stream, std::uint64_t block,
                                  std::uint64_t attempt) {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ stream);
    h = mix64(h ^ (block * 0xd1b54a32d192ed03ULL));
    return mix64(h ^ (attempt + 0x632be59bd9b4e019ULL));
}

/// Uniform ternary digits for one stream, generated 40 at a time by rejection below 3^40.
/// Digit i depends only on (seed, stream, i / 40), so extending the string never changes
/// a prefix.
class DigitStream {
public:
    DigitStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

    void ensure(std::size_t len) {
        while (digits_.size() < len) {
            const std::uint64_t block = digits_.size() / kDigitsPerWord;
            std::uint64_t w;
            for (std::uint64_t attempt = 0;; ++attempt) {
                w = counter_word(seed_, stream_, block, attempt);
                if (w < kPow3_40) break;
            }
            std::array<std::uint8_t, kDigitsPerWord> d{};
            for (int i = kDigitsPerWord - 1; i >= 0; --i) {
                d[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(w % 3);
                w /= 3;
            }
            digits_.insert(digits_.end(), d.begin(), d.end());
        }
    }

    std::size_t size() const noexcept { return digits_.size(); }
    const std::uint8_t* data() const noexcept { return digits_.data(); }
    std::uint8_t operator[](std::size_t i) const { return digits_[i]; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::vector<std::uint8_t> digits_;
};

enum class Verdict { Outside, Inside, Unsure };

/// Membership of orbit points in an exceedance set. A point is known through a run of its
/// ternary digits; the fast path looks at a 64-digit window held in 128 bits, the slow path
/// compares the exact rational bracket of a longer prefix.
class WindowClassifier {
public:
    explicit WindowClassifier(const ExceedanceSet& u) {
        for (const auto& p : u.parts) add(p.part, false);
        if (u.tail) add(*u.tail, true);
        std::sort(parts_.begin(), parts_.end(),
                  [](const Part& a, const Part& b) { return a.lo.lower() < b.lo.lower(); });
        for (std::size_t i = 0; i + 1 < parts_.size(); ++i)
            if (!(parts_[i].hi.upper() <= parts_[i + 1].lo.lower()))
                throw PrecisionExhausted("exceedance parts overlap within their enclosures");
        if (!parts_.empty()) reject_above_ = parts_.back().hi_key.ceil;
    }

    /// x in [key/3^64, (key+1)/3^64].
    Verdict fast(u128 key) const {
        if (parts_.empty() || key > reject_above_) return Verdict::Outside;
        for (const auto& p : parts_) {
            const Side lo = side(key, p.lo_key);
            if (lo == Side::Below) return Verdict::Outside;
            if (lo == Side::Unsure) return Verdict::Unsure;
            const Side hi = side(key, p.hi_key);
            if (hi == Side::Unsure) return Verdict::Unsure;
            if (hi == Side::Below) return p.unknown ? Verdict::Unsure : Verdict::Inside;
        }
        return Verdict::Outside;
    }

    /// Exact test on `count` digits starting at `d`; nullopt if still undecided.
    std::optional<bool> slow(const std::uint8_t* d, std::size_t count) const {
        BigInt num = 0;
        for (std::size_t i = 0; i < count; ++i) num = num * 3 + d[i];
        const BigInt den = detail::pow_ui(3, count);
        const Rational xl(num, den), xh(BigInt(num + 1), den);
        for (const auto& p : parts_) {
            if (xh < p.lo.lower()) return false;
            if (!(xl > p.lo.upper())) return std::nullopt;
            if (xh < p.hi.lower()) {
                if (p.unknown) return std::nullopt;
                return true;
            }
            if (!(xl > p.hi.upper())) return std::nullopt;
        }
        return false;
    }

    std::size_t parts() const noexcept { return parts_.size(); }

private:
    struct Key {
        u128 floor; // floor(lower * 3^64)
        u128 ceil;  // ceil(upper * 3^64)
    };
    struct Part {
        BoundedValue lo, hi;
        Key lo_key, hi_key;
        bool unknown;
    };
    enum class Side { Below, Above, Unsure };

    static u128 to_u128(const BigInt& v) {
        if (v <= 0) return 0;
        const BigInt cap = scale();
        if (v >= cap) return kWindowScale;
        u128 r = 0;
        std::size_t n = mpz_size(v.get_mpz_t());
        for (std::size_t i = n; i-- > 0;) r = (r << 64) | static_cast<u128>(mpz_getlimbn(v.get_mpz_t(), static_cast<mp_size_t>(i)));
        return r;
    }

    static BigInt scale() { return detail::pow_ui(3, kWindowDigits); }

    static Key key_of(const BoundedValue& e) {
        const Rational s(scale());
        return {to_u128(detail::floor(e.lower() * s)), to_u128(detail::ceil(e.upper() * s))};
    }

    // x strictly below e when (key+1)/3^64 < floor(lower 3^64)/3^64; strictly above when
    // key/3^64 > ceil(upper 3^64)/3^64.
    static Side side(u128 key, const Key& e) {
        if (key + 1 < e.floor) return Side::Below;
        if (key > e.ceil) return Side::Above;
        return Side::Unsure;
    }

    void add(const Interval& iv, bool unknown) {
        parts_.push_back({iv.lo, iv.hi, key_of(iv.lo), key_of(iv.hi), unknown});
    }

    std::vector<Part> parts_;
    u128 reject_above_ = 0;
};

/// Window key of the 64 digits starting at d.
inline u128 window_key(const std::uint8_t* d) {
    u128 k = 0;
    for (unsigned i = 0; i < kWindowDigits; ++i) k = k * 3 + d[i];
    return k;
}

inline constexpr u128 kWindowTop = pow3_u128(kWindowDigits - 1);

/// Shift the window one digit: drop `out`, append `in`.
inline u128 roll_key(u128 key, std::uint8_t out, std::uint8_t in) { return (key - out * kWindowTop) * 3 + in; }

} // namespace evl
