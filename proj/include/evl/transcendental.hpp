#pragma once

#include <mpfr.h>

#include <array>

#include "evl/bounded_value.hpp"

// Directed-rounding MPFR evaluations turned into rational enclosures.

namespace evl {

inline constexpr mpfr_prec_t kTranscendentalBits = 256;

namespace detail {

class Mpfr {
public:
    explicit Mpfr(mpfr_prec_t bits = kTranscendentalBits) { mpfr_init2(x_, bits); }
    ~Mpfr() { mpfr_clear(x_); }
    Mpfr(const Mpfr&) = delete;
    Mpfr& operator=(const Mpfr&) = delete;
    mpfr_ptr get() { return x_; }
    mpfr_srcptr get() const { return x_; }

private:
    mpfr_t x_;
};

inline Rational to_rational(mpfr_srcptr x) {
    if (!mpfr_number_p(x)) throw std::domain_error("non-finite MPFR value");
    if (mpfr_zero_p(x)) return Rational(0);
    BigInt m;
    mpfr_exp_t e = mpfr_get_z_2exp(m.get_mpz_t(), x);
    Rational r(m);
    if (e >= 0)
        mpq_mul_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(e));
    else
        mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(-e));
    r.canonicalize();
    return r;
}

} // namespace detail

/// Enclosure of exp(-u) for exact rational u.
inline BoundedValue exp_neg(const Rational& u, mpfr_prec_t bits = kTranscendentalBits) {
    detail::Mpfr t(bits), lo(bits), hi(bits);
    mpfr_set_q(t.get(), u.get_mpq_t(), MPFR_RNDU);
    mpfr_neg(t.get(), t.get(), MPFR_RNDN);
    mpfr_exp(lo.get(), t.get(), MPFR_RNDD);
    mpfr_set_q(t.get(), u.get_mpq_t(), MPFR_RNDD);
    mpfr_neg(t.get(), t.get(), MPFR_RNDN);
    mpfr_exp(hi.get(), t.get(), MPFR_RNDU);
    return BoundedValue::from_bounds(detail::to_rational(lo.get()), detail::to_rational(hi.get()));
}

/// Enclosure of exp(-x) over the whole enclosure of x.
inline BoundedValue exp_neg(const BoundedValue& x, mpfr_prec_t bits = kTranscendentalBits) {
    BoundedValue a = exp_neg(x.upper(), bits);
    BoundedValue b = exp_neg(x.lower(), bits);
    return BoundedValue::from_bounds(a.lower(), b.upper());
}

/// Enclosure of log(x) for an enclosure of a positive x.
inline BoundedValue log_of(const BoundedValue& x, mpfr_prec_t bits = kTranscendentalBits) {
    if (x.lower() <= 0) throw PrecisionExhausted("log of an enclosure reaching zero");
    detail::Mpfr a(bits), b(bits);
    mpfr_set_q(a.get(), x.lower().get_mpq_t(), MPFR_RNDD);
    mpfr_log(a.get(), a.get(), MPFR_RNDD);
    mpfr_set_q(b.get(), x.upper().get_mpq_t(), MPFR_RNDU);
    mpfr_log(b.get(), b.get(), MPFR_RNDU);
    return BoundedValue::from_bounds(detail::to_rational(a.get()), detail::to_rational(b.get()));
}

/// Enclosure of x^p for an enclosure of a positive x and an exact rational exponent.
inline BoundedValue pow_of(const BoundedValue& x, const Rational& p, mpfr_prec_t bits = kTranscendentalBits) {
    if (x.lower() <= 0) throw PrecisionExhausted("power of an enclosure reaching zero");
    // x^p is monotone in each argument on the box, so the extremes sit on rounded corners.
    std::array<Rational, 2> xs{x.lower(), x.upper()};
    std::array<mpfr_rnd_t, 2> modes{MPFR_RNDD, MPFR_RNDU};
    detail::Mpfr base(bits), expo(bits), val(bits);
    bool first = true;
    Rational lo, hi;
    for (const auto& xv : xs)
        for (auto xm : modes)
            for (auto pm : modes) {
                mpfr_set_q(base.get(), xv.get_mpq_t(), xm);
                mpfr_set_q(expo.get(), p.get_mpq_t(), pm);
                mpfr_pow(val.get(), base.get(), expo.get(), MPFR_RNDD);
                Rational l = detail::to_rational(val.get());
                mpfr_pow(val.get(), base.get(), expo.get(), MPFR_RNDU);
                Rational h = detail::to_rational(val.get());
                if (first || l < lo) lo = l;
                if (first || h > hi) hi = h;
                first = false;
            }
    return BoundedValue::from_bounds(lo, hi);
}

} // namespace evl
