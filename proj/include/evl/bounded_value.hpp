#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <cstdlib>
#include <string>
#include <utility>

#include "evl/errors.hpp"

namespace evl {

using BigInt = mpz_class;
using Rational = mpq_class;

namespace detail {

inline Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

inline BigInt pow_ui(unsigned long base, unsigned long exp) {
    BigInt r;
    mpz_ui_pow_ui(r.get_mpz_t(), base, exp);
    return r;
}

// 3^-e as an exact rational.
inline Rational inv_pow3(unsigned long e) {
    Rational r(BigInt(1), pow_ui(3, e));
    r.canonicalize();
    return r;
}

inline BigInt floor(const Rational& q) {
    BigInt r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

inline BigInt ceil(const Rational& q) {
    BigInt r;
    mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

// Smallest power of two that is >= r (r > 0). Keeps radii cheap to carry around.
inline Rational round_up_pow2(const Rational& r) {
    if (r <= 0) return Rational(0);
    const BigInt& num = r.get_num();
    const BigInt& den = r.get_den();
    // find largest k with 2^k * num <= den, i.e. 2^-k >= r
    long k = static_cast<long>(mpz_sizeinbase(den.get_mpz_t(), 2)) -
             static_cast<long>(mpz_sizeinbase(num.get_mpz_t(), 2));
    auto fits = [&](long e) {
        BigInt lhs = num, rhs = den;
        if (e >= 0)
            mpz_mul_2exp(lhs.get_mpz_t(), lhs.get_mpz_t(), static_cast<mp_bitcnt_t>(e));
        else
            mpz_mul_2exp(rhs.get_mpz_t(), rhs.get_mpz_t(), static_cast<mp_bitcnt_t>(-e));
        return lhs <= rhs;
    };
    while (!fits(k)) --k;
    while (fits(k + 1)) ++k;
    Rational out(1);
    if (k >= 0)
        mpq_div_2exp(out.get_mpq_t(), out.get_mpq_t(), static_cast<mp_bitcnt_t>(k));
    else
        mpq_mul_2exp(out.get_mpq_t(), out.get_mpq_t(), static_cast<mp_bitcnt_t>(-k));
    return out;
}

} // namespace detail

/// A real number known through an exact rational centre and a rigorous error radius:
/// the represented real x satisfies |x - value| <= radius.
///
/// Arithmetic never underestimates the radius. Radii of derived values are rounded up to
/// powers of two, so their size does not grow with the depth of the centre.
class BoundedValue {
public:
    BoundedValue() = default;
    BoundedValue(Rational value, Rational radius = 0) : value_(std::move(value)), radius_(std::move(radius)) {
        value_.canonicalize();
        radius_.canonicalize();
        if (radius_ < 0) throw std::invalid_argument("BoundedValue: negative radius");
        settle();
    }
    BoundedValue(long v) : BoundedValue(Rational(v)) {}

    static BoundedValue exact(Rational v) { return BoundedValue(std::move(v)); }
    static BoundedValue from_bounds(const Rational& lo, const Rational& hi) {
        if (hi < lo) throw std::invalid_argument("BoundedValue::from_bounds: hi < lo");
        return BoundedValue(Rational((lo + hi) / 2), Rational((hi - lo) / 2));
    }

    const Rational& value() const noexcept { return value_; }
    const Rational& radius() const noexcept { return radius_; }
    const Rational& lower() const noexcept { return lower_; }
    const Rational& upper() const noexcept { return upper_; }
    bool is_exact() const { return radius_ == 0; }
    bool contains(const Rational& x) const { return lower() <= x && x <= upper(); }
    bool inside(const Rational& lo, const Rational& hi) const { return lo <= lower() && upper() <= hi; }
    bool strictly_inside(const Rational& lo, const Rational& hi) const { return lo < lower() && upper() < hi; }

    BoundedValue widened(const Rational& extra) const {
        return BoundedValue(value_, detail::round_up_pow2(radius_ + detail::abs(extra)));
    }

    double to_double() const { return value_.get_d(); }

    friend BoundedValue operator+(const BoundedValue& a, const BoundedValue& b) {
        return make(a.value_ + b.value_, a.radius_ + b.radius_);
    }
    friend BoundedValue operator-(const BoundedValue& a, const BoundedValue& b) {
        return make(a.value_ - b.value_, a.radius_ + b.radius_);
    }
    friend BoundedValue operator-(const BoundedValue& a) { return BoundedValue(Rational(-a.value_), a.radius_); }
    friend BoundedValue operator*(const BoundedValue& a, const BoundedValue& b) {
        Rational r = detail::abs(a.value_) * b.radius_ + detail::abs(b.value_) * a.radius_ + a.radius_ * b.radius_;
        return make(a.value_ * b.value_, r);
    }
    friend BoundedValue operator*(const BoundedValue& a, const Rational& q) {
        return make(a.value_ * q, a.radius_ * detail::abs(q));
    }
    friend BoundedValue operator*(const Rational& q, const BoundedValue& a) { return a * q; }
    friend BoundedValue operator/(const BoundedValue& a, const Rational& q) {
        if (q == 0) throw std::domain_error("BoundedValue: division by zero");
        return a * Rational(1 / q);
    }
    friend BoundedValue operator/(const BoundedValue& a, const BoundedValue& b) { return a * b.reciprocal(); }

    BoundedValue reciprocal() const {
        Rational m = detail::abs(value_);
        if (m <= radius_) throw PrecisionExhausted("reciprocal of an enclosure containing zero");
        return make(Rational(1 / value_), radius_ / (m * (m - radius_)));
    }

    /// Same centre and same radius. Within one computation endpoints are canonical, so an
    /// identical enclosure denotes the same expression.
    friend bool identical(const BoundedValue& a, const BoundedValue& b) {
        return a.value_ == b.value_ && a.radius_ == b.radius_;
    }

private:
    static BoundedValue make(Rational v, const Rational& r) {
        BoundedValue out;
        out.value_ = std::move(v);
        out.value_.canonicalize();
        out.radius_ = detail::round_up_pow2(r);
        out.settle();
        return out;
    }

    void settle() {
        lower_ = value_ - radius_;
        upper_ = value_ + radius_;
    }

    Rational value_{0};
    Rational radius_{0};
    Rational lower_{0};
    Rational upper_{0};
};

inline BoundedValue midpoint(const BoundedValue& a, const BoundedValue& b) { return (a + b) * Rational(1, 2); }

enum class Ordering { Less, Greater, Equal, Inconclusive };

inline const char* to_string(Ordering o) {
    switch (o) {
    case Ordering::Less: return "Less";
    case Ordering::Greater: return "Greater";
    case Ordering::Equal: return "Equal";
    case Ordering::Inconclusive: return "Inconclusive";
    }
    return "?";
}

/// Conclusive only when the enclosures are separated, or both are the same exact rational.
inline Ordering compare(const BoundedValue& a, const BoundedValue& b) {
    if (a.upper() < b.lower()) return Ordering::Less;
    if (b.upper() < a.lower()) return Ordering::Greater;
    if (a.is_exact() && b.is_exact() && a.value() == b.value()) return Ordering::Equal;
    return Ordering::Inconclusive;
}

/// Ordering of two interval endpoints. Identical enclosures are the same point; anything
/// else that cannot be separated raises PrecisionExhausted.
inline Ordering order_points(const BoundedValue& a, const BoundedValue& b) {
    if (identical(a, b)) return Ordering::Equal;
    Ordering o = compare(a, b);
    if (o == Ordering::Inconclusive) throw PrecisionExhausted("endpoint comparison inconclusive");
    return o;
}

/// Enclosure of min(a, b); never fails.
inline BoundedValue enclosure_min(const BoundedValue& a, const BoundedValue& b) {
    switch (compare(a, b)) {
    case Ordering::Less:
    case Ordering::Equal: return a;
    case Ordering::Greater: return b;
    default: break;
    }
    if (identical(a, b)) return a;
    Rational lo = a.lower() < b.lower() ? a.lower() : b.lower();
    Rational hi = a.upper() < b.upper() ? a.upper() : b.upper();
    return BoundedValue::from_bounds(lo, hi);
}

inline BoundedValue enclosure_max(const BoundedValue& a, const BoundedValue& b) {
    return -enclosure_min(-a, -b);
}

/// Enclosure of max(a, 0).
inline BoundedValue clamp_nonnegative(const BoundedValue& a) {
    if (a.lower() >= 0) return a;
    if (a.upper() <= 0) return BoundedValue(0);
    return BoundedValue::from_bounds(0, a.upper());
}

/// Scientific rendering with `digits` significant digits (display only).
inline std::string to_decimal(const Rational& q, int digits = 30) {
    mpfr_t x;
    mpfr_init2(x, static_cast<mpfr_prec_t>(digits * 4 + 64));
    mpfr_set_q(x, q.get_mpq_t(), MPFR_RNDN);
    char* buf = nullptr;
    mpfr_asprintf(&buf, "%.*Re", digits - 1, x);
    std::string out(buf);
    mpfr_free_str(buf);
    mpfr_clear(x);
    return out;
}

inline std::string to_decimal(const BoundedValue& v, int digits = 30) { return to_decimal(v.value(), digits); }

inline std::string to_fraction(const Rational& q) {
    Rational c = q;
    c.canonicalize();
    if (c.get_den() == 1) return c.get_num().get_str() + "/1";
    return c.get_str();
}

inline Rational parse_rational(const std::string& s) {
    // accepts "p/q", integers, and plain decimals such as "0.25" or "1e-3"
    if (s.find_first_of(".eE") != std::string::npos && s.find('/') == std::string::npos) {
        std::string mant = s;
        long exp10 = 0;
        auto epos = mant.find_first_of("eE");
        if (epos != std::string::npos) {
            exp10 = std::stol(mant.substr(epos + 1));
            mant = mant.substr(0, epos);
        }
        auto dot = mant.find('.');
        if (dot != std::string::npos) {
            exp10 -= static_cast<long>(mant.size() - dot - 1);
            mant.erase(dot, 1);
        }
        Rational r(BigInt(mant, 10));
        BigInt p;
        mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exp10)));
        if (exp10 >= 0)
            r *= p;
        else
            r /= p;
        r.canonicalize();
        return r;
    }
    Rational r(s, 10);
    r.canonicalize();
    return r;
}

} // namespace evl
