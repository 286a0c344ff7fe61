#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "evl/extremal_index.hpp"
#include "evl/ternary_orbit.hpp"

namespace evl {

struct MonteCarloConfig {
    std::uint64_t samples = 20000;
    std::uint64_t seed = 20170901;
    unsigned guard = 64;
    unsigned extensions = 2;     // extra guard-sized extensions before giving up on a point
    unsigned max_redraws = 8;    // per sample, after GuardExhausted
    unsigned workers = 0;        // 0: EVL_WORKERS or hardware concurrency
    std::uint64_t verify_stride = 0; // every stride-th sample is cross-checked against eval()

    void validate() const {
        if (samples == 0) throw BadConfig("samples must be positive");
        if (guard < kWindowDigits) throw BadConfig("guard must be at least 64 digits");
    }
};

struct ExperimentResult {
    LevelPlan plan;
    std::uint64_t samples = 0;
    std::uint64_t hits = 0; // orbits with M_n <= u_n
    Rational p_hat;
    double std_err = 0;
    BoundedValue theta;
    BoundedValue reference; // e^(-theta tau)
    std::uint64_t seed = 0;
    std::uint64_t redraws = 0;
    std::uint64_t verified_points = 0;
};

inline unsigned worker_count(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("EVL_WORKERS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

namespace detail {

inline std::uint64_t stream_id(std::uint64_t sample, std::uint64_t redraw) { return sample ^ (redraw << 48); }

// Runs fn(begin, end, slot) on contiguous index ranges; results land in per-slot storage.
template <class Fn>
void parallel_ranges(std::uint64_t total, unsigned workers, Fn&& fn) {
    workers = static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, workers), std::max<std::uint64_t>(total, 1)));
    if (workers == 1) {
        fn(0, total, 0u);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const std::uint64_t chunk = (total + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::uint64_t b = std::min(total, w * chunk), e = std::min(total, b + chunk);
        pool.emplace_back([&, b, e, w] {
            try {
                fn(b, e, w);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

// Decides orbit point k of the stream, extending the drawn digits when the window is too short.
inline std::optional<bool> classify_point(const WindowClassifier& cls, DigitStream& ds, u128 key, std::size_t k,
                                          std::size_t drawn, unsigned guard, unsigned extensions) {
    Verdict v = cls.fast(key);
    if (v != Verdict::Unsure) return v == Verdict::Inside;
    std::size_t len = drawn;
    for (unsigned ext = 0; ext <= extensions; ++ext) {
        ds.ensure(len);
        if (auto r = cls.slow(ds.data() + k, len - k)) return r;
        len += guard;
    }
    return std::nullopt;
}

struct SampleOutcome {
    bool hit = false; // no exceedance among the first n orbit points
    std::uint64_t redraws = 0;
    std::uint64_t verified = 0;
};

inline Rational digits_midpoint(const DigitStream& ds, std::size_t k, std::size_t count) {
    BigInt num = 0;
    for (std::size_t i = 0; i < count; ++i) num = num * 3 + ds[k + i];
    Rational x(BigInt(2 * num + 1), BigInt(2 * pow_ui(3, count)));
    x.canonicalize();
    return x;
}

inline void verify_point(const ObservableSpec& spec, const SpecialPoints& pts, const BoundedValue& u,
                         const DigitStream& ds, std::size_t k, std::size_t avail, bool inside) {
    const Rational x = digits_midpoint(ds, k, avail);
    BoundedValue phi;
    try {
        phi = eval(spec, pts, x);
    } catch (const Undefined&) {
        return;
    } catch (const PrecisionExhausted&) {
        return;
    }
    Ordering o = compare(phi, u);
    if (o == Ordering::Inconclusive) return;
    if ((o == Ordering::Greater) != inside)
        throw std::logic_error("orbit membership disagrees with direct evaluation at point " + std::to_string(k));
}

inline SampleOutcome run_sample(const WindowClassifier& cls, const BigInt& n_big, std::uint64_t seed,
                                std::uint64_t sample, const MonteCarloConfig& cfg, const ObservableSpec* verify_spec,
                                const SpecialPoints* verify_pts, const BoundedValue* verify_u) {
    const std::size_t n = n_big.get_ui();
    SampleOutcome out;
    for (std::uint64_t redraw = 0;; ++redraw) {
        if (redraw > cfg.max_redraws)
            throw GuardExhausted("sample " + std::to_string(sample) + " stayed ambiguous after " +
                                 std::to_string(cfg.max_redraws) + " redraws");
        DigitStream ds(seed, stream_id(sample, redraw));
        const std::size_t drawn = n + cfg.guard;
        ds.ensure(drawn);
        u128 key = window_key(ds.data());
        bool ambiguous = false, exceeded = false;
        for (std::size_t k = 0; k < n; ++k) {
            if (k > 0) key = roll_key(key, ds[k - 1], ds[k - 1 + kWindowDigits]);
            auto in = classify_point(cls, ds, key, k, drawn, cfg.guard, cfg.extensions);
            if (!in) {
                ambiguous = true;
                break;
            }
            if (verify_spec && (k < 16 || *in)) {
                verify_point(*verify_spec, *verify_pts, *verify_u, ds, k, drawn - k, *in);
                ++out.verified;
            }
            if (*in) {
                exceeded = true;
                break;
            }
        }
        if (ambiguous) {
            ++out.redraws;
            continue;
        }
        out.hit = !exceeded;
        return out;
    }
}

} // namespace detail

/// Reference extremal index: closed form for Example 1, 1 for Example 2, theta_n otherwise.
inline BoundedValue reference_theta(const ObservableSpec& spec, const LevelPlan& plan) {
    switch (spec.kind) {
    case ObservableKind::Example1: return theta_closed_form_ex1(3, spec.precision);
    case ObservableKind::Example2: return BoundedValue(1);
    case ObservableKind::Generic: return analyze_threshold(spec, plan).theta_n;
    }
    return BoundedValue(1);
}

/// Estimates P(M_n <= u_n) from `samples` exact orbits with a known theta.
inline ExperimentResult sample_block_maxima(const ObservableSpec& spec, const LevelPlan& plan,
                                            const MonteCarloConfig& cfg, const BoundedValue& theta) {
    cfg.validate();
    if (!plan.n.fits_ulong_p() || plan.n > BigInt(100'000'000))
        throw CapExceeded("Monte Carlo orbit length n = " + plan.n.get_str() + " is too long");
    const PrecisionConfig pc = spec.kind == ObservableKind::Generic ? PrecisionConfig{1, 1} : spec.precision;
    const SpecialPoints pts(pc);
    const ExceedanceSet U = exceedance_set(spec, pts, plan.u);
    const WindowClassifier cls(U);

    const unsigned workers = worker_count(cfg.workers);
    std::vector<std::uint64_t> hits(workers, 0), redraws(workers, 0), verified(workers, 0);
    detail::parallel_ranges(cfg.samples, workers, [&](std::uint64_t b, std::uint64_t e, unsigned slot) {
        for (std::uint64_t s = b; s < e; ++s) {
            const bool check = cfg.verify_stride > 0 && s % cfg.verify_stride == 0;
            auto o = detail::run_sample(cls, plan.n, cfg.seed, s, cfg, check ? &spec : nullptr,
                                        check ? &pts : nullptr, check ? &plan.u : nullptr);
            hits[slot] += o.hit ? 1 : 0;
            redraws[slot] += o.redraws;
            verified[slot] += o.verified;
        }
    });

    ExperimentResult r;
    r.plan = plan;
    r.samples = cfg.samples;
    r.seed = cfg.seed;
    for (unsigned w = 0; w < workers; ++w) {
        r.hits += hits[w];
        r.redraws += redraws[w];
        r.verified_points += verified[w];
    }
    r.p_hat = Rational(static_cast<unsigned long>(r.hits), static_cast<unsigned long>(r.samples));
    r.p_hat.canonicalize();
    const double p = r.p_hat.get_d();
    r.std_err = std::sqrt(p * (1 - p) / static_cast<double>(r.samples));
    r.theta = theta;
    r.reference = exp_neg(theta * plan.tau);
    return r;
}

inline ExperimentResult sample_block_maxima(const ObservableSpec& spec, const LevelPlan& plan,
                                            const MonteCarloConfig& cfg) {
    return sample_block_maxima(spec, plan, cfg, reference_theta(spec, plan));
}

/// One experiment per tau, all with the same seed.
inline std::vector<ExperimentResult> evl_curve(const ObservableSpec& spec, const BigInt& n,
                                               const std::vector<Rational>& tau_grid, const MonteCarloConfig& cfg) {
    for (std::size_t i = 0; i < tau_grid.size(); ++i) {
        if (tau_grid[i] <= 0) throw BadConfig("tau grid must be positive");
        if (i > 0 && !(tau_grid[i - 1] < tau_grid[i])) throw BadConfig("tau grid must be increasing");
    }
    std::vector<ExperimentResult> out;
    std::optional<BoundedValue> theta;
    for (const auto& tau : tau_grid) {
        LevelPlan plan = level_for_tau(spec, n, tau);
        if (!theta || spec.kind == ObservableKind::Generic) theta = reference_theta(spec, plan);
        out.push_back(sample_block_maxima(spec, plan, cfg, *theta));
    }
    return out;
}

struct RunsEstimate {
    Rational theta_hat;
    std::uint64_t exceedances = 0;
    std::uint64_t cluster_ends = 0; // exceedances followed by >= q non-exceedances
    std::uint64_t orbit_length = 0;
    unsigned q = 0;
    double ci_low = 0;
    double ci_high = 0;
    std::uint64_t block = 0;
    std::uint64_t redraws = 0;
};

/// Runs declustering over one long exact orbit, with a non-overlapping block bootstrap CI.
inline RunsEstimate runs_ei_estimate(const ObservableSpec& spec, const LevelPlan& plan, std::uint64_t orbit_length,
                                     std::uint64_t seed, unsigned replicates = 1000, unsigned guard = 64) {
    if (orbit_length == 0) throw DegenerateSample("orbit of length zero");
    const PrecisionConfig pc = spec.kind == ObservableKind::Generic ? PrecisionConfig{1, 1} : spec.precision;
    const SpecialPoints pts(pc);
    const WindowClassifier cls(exceedance_set(spec, pts, plan.u));
    const unsigned q = plan.q;
    const std::size_t len = static_cast<std::size_t>(orbit_length) + q;

    RunsEstimate est;
    est.q = q;
    est.orbit_length = orbit_length;
    std::vector<std::uint8_t> exceed;
    for (std::uint64_t redraw = 0;; ++redraw) {
        if (redraw > 8) throw GuardExhausted("long orbit stayed ambiguous after 8 redraws");
        DigitStream ds(seed, detail::stream_id(~0ULL >> 16, redraw));
        const std::size_t drawn = len + guard;
        ds.ensure(drawn);
        exceed.assign(len, 0);
        u128 key = window_key(ds.data());
        bool ok = true;
        for (std::size_t k = 0; k < len && ok; ++k) {
            if (k > 0) key = roll_key(key, ds[k - 1], ds[k - 1 + kWindowDigits]);
            auto in = detail::classify_point(cls, ds, key, k, drawn, guard, 2);
            if (!in) ok = false;
            else exceed[k] = *in ? 1 : 0;
        }
        if (ok) break;
        ++est.redraws;
    }

    // per-position indicators over [0, orbit_length)
    auto is_end = [&](std::size_t k) {
        for (unsigned i = 1; i <= q; ++i)
            if (exceed[k + i]) return false;
        return true;
    };
    const std::uint64_t block = std::max<std::uint64_t>(q + 1, orbit_length / 200);
    const std::uint64_t nblocks = orbit_length / block;
    std::vector<std::uint64_t> bnum(nblocks, 0), bden(nblocks, 0);
    for (std::size_t k = 0; k < orbit_length; ++k) {
        if (!exceed[k]) continue;
        const bool end = is_end(k);
        ++est.exceedances;
        if (end) ++est.cluster_ends;
        const std::uint64_t b = k / block;
        if (b < nblocks) {
            ++bden[b];
            if (end) ++bnum[b];
        }
    }
    if (est.exceedances == 0) throw DegenerateSample("no exceedances in an orbit of length " + std::to_string(orbit_length));
    est.theta_hat = Rational(static_cast<unsigned long>(est.cluster_ends), static_cast<unsigned long>(est.exceedances));
    est.theta_hat.canonicalize();
    est.block = block;

    std::vector<double> boot;
    boot.reserve(replicates);
    for (unsigned rep = 0; rep < replicates && nblocks > 0; ++rep) {
        std::uint64_t num = 0, den = 0;
        for (std::uint64_t i = 0; i < nblocks; ++i) {
            const std::uint64_t pick = counter_word(seed, 0x5eedb007ULL, rep, i) % nblocks;
            num += bnum[pick];
            den += bden[pick];
        }
        if (den > 0) boot.push_back(static_cast<double>(num) / static_cast<double>(den));
    }
    if (!boot.empty()) {
        std::sort(boot.begin(), boot.end());
        auto at = [&](double p) { return boot[static_cast<std::size_t>(p * static_cast<double>(boot.size() - 1))]; };
        est.ci_low = at(0.025);
        est.ci_high = at(0.975);
    } else {
        est.ci_low = est.ci_high = est.theta_hat.get_d();
    }
    return est;
}

} // namespace evl
