#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "cfsched/rate.hpp"

namespace cfsched {

// a and -a achieve the same rate, so candidates are stored with the first
// nonzero entry positive.
inline CoeffVector canonicalize(CoeffVector a) {
    for (int x : a) {
        if (x == 0) continue;
        if (x < 0)
            for (int& y : a) y = -y;
        break;
    }
    return a;
}

inline bool is_unit_vector(std::span<const int> a) {
    int nonzero = 0;
    bool mag_one = true;
    for (int x : a)
        if (x != 0) {
            ++nonzero;
            mag_one = mag_one && (x == 1 || x == -1);
        }
    return nonzero == 1 && mag_one;
}

struct SearchResult {
    CoeffVector best;
    Rate rate = 0.0;
    double f_value = 0.0;
    bool is_unit = false;
};

struct CandidateSet {
    std::vector<CoeffVector> vectors;  // canonical, deduplicated, lex-sorted

    std::size_t size() const { return vectors.size(); }
};

namespace detail {

inline std::int64_t norm2_int(std::span<const int> a) {
    std::int64_t s = 0;
    for (int x : a) s += std::int64_t(x) * x;
    return s;
}

// Tie-break: smaller f, then smaller ||a||^2, then lexicographically smaller.
struct BestTracker {
    bool found = false;
    double f = 0.0;
    std::int64_t n2 = 0;
    CoeffVector vec;

    bool offer(double cand_f, std::int64_t cand_n2, std::span<const int> cand) {
        if (found) {
            if (cand_f > f) return false;
            if (cand_f == f) {
                if (cand_n2 > n2) return false;
                if (cand_n2 == n2 &&
                    !std::lexicographical_compare(cand.begin(), cand.end(), vec.begin(), vec.end()))
                    return false;
            }
        }
        found = true;
        f = cand_f;
        n2 = cand_n2;
        vec.assign(cand.begin(), cand.end());
        return true;
    }
};

}  // namespace detail

// All a = round(alpha h) as alpha sweeps the rounding breakpoints
// (m + 1/2)/|h_i| up to alpha_max = sqrt(1 + P||h||^2)/||h||, feasibility-
// filtered by ||a||^2 <= 1 + P||h||^2 and unioned with the unit vectors.
// Coordinates with h_i = 0 never round away from zero.
inline CandidateSet enumerate_candidates(std::span<const double> h, double power) {
    const std::size_t n = h.size();
    const double nh2 = detail::norm2(h);
    if (n == 0 || nh2 == 0.0) throw std::invalid_argument("enumerate_candidates: zero channel");
    if (!(power > 0.0)) throw std::invalid_argument("enumerate_candidates: power must be positive");

    const double feas2 = 1.0 + power * nh2;
    // 1e-9 margin so the boundary candidate is not lost to rounding.
    const double alpha_max = std::sqrt(feas2) / std::sqrt(nh2) * (1.0 + 1e-9);

    std::vector<double> breakpoints;
    for (double hi : h) {
        const double a = std::abs(hi);
        if (a == 0.0) continue;
        for (double m = 0.0;; m += 1.0) {
            const double alpha = (m + 0.5) / a;
            if (alpha > alpha_max) break;
            breakpoints.push_back(alpha);
        }
    }
    breakpoints.push_back(alpha_max);
    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());

    // round(alpha h) is constant between breakpoints; sampling interval
    // midpoints keeps the rounding unambiguous, which sampling the
    // breakpoints themselves does not.
    std::vector<double> probes;
    probes.reserve(breakpoints.size() + 1);
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
        probes.push_back(0.5 * (breakpoints[i] + breakpoints[i + 1]));
    probes.push_back(alpha_max);

    std::vector<CoeffVector> out;
    CoeffVector a(n);
    for (double alpha : probes) {
        std::int64_t n2 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = h[i] == 0.0 ? 0 : int(std::round(alpha * h[i]));
            n2 += std::int64_t(a[i]) * a[i];
        }
        if (n2 == 0 || double(n2) > feas2) continue;
        out.push_back(canonicalize(a));
    }
    for (std::size_t i = 0; i < n; ++i) {
        CoeffVector e(n, 0);
        e[i] = 1;
        out.push_back(std::move(e));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return CandidateSet{std::move(out)};
}

// a^max over the candidate set: minimizes f(a), i.e. maximizes the rate.
inline SearchResult best_coeff(std::span<const double> h, double power) {
    const CandidateSet cands = enumerate_candidates(h, power);
    detail::BestTracker best;
    for (const CoeffVector& a : cands.vectors)
        best.offer(quad_form(h, power, a), detail::norm2_int(a), a);
    SearchResult r;
    r.best = best.vec;
    r.f_value = best.f;
    r.rate = computation_rate(h, r.best, power);
    r.is_unit = is_unit_vector(r.best);
    return r;
}

// Exhaustive oracle over the box [-box_limit, box_limit]^L, canonical half
// only.  Same tie-breaking as best_coeff.
inline SearchResult best_coeff_bruteforce(std::span<const double> h, double power,
                                          int box_limit) {
    const std::size_t n = h.size();
    if (n == 0) throw std::invalid_argument("best_coeff_bruteforce: empty channel");
    if (box_limit < 1) throw std::invalid_argument("best_coeff_bruteforce: box_limit < 1");
    const double points = std::pow(2.0 * box_limit + 1.0, double(n));
    if (points > 1e9) throw std::runtime_error("best_coeff_bruteforce: search space exceeds 1e9");

    const double nh2 = detail::norm2(h);
    detail::BestTracker best;
    CoeffVector a(n, 0);

    // Depth-first with running partial sums; while the prefix is all-zero only
    // nonnegative values are scanned, which enumerates exactly the canonical half.
    auto scan = [&](auto&& self, std::size_t i, double dot, std::int64_t n2,
                    bool prefix_zero) -> void {
        if (i == n) {
            if (n2 == 0) return;
            const double f = double(n2) + power * (double(n2) * nh2 - dot * dot);
            best.offer(f, n2, a);
            return;
        }
        const int lo = prefix_zero ? 0 : -box_limit;
        for (int v = lo; v <= box_limit; ++v) {
            a[i] = v;
            self(self, i + 1, dot + v * h[i], n2 + std::int64_t(v) * v, prefix_zero && v == 0);
        }
        a[i] = 0;
    };
    scan(scan, 0, 0.0, 0, true);

    SearchResult r;
    r.best = best.vec;
    r.f_value = best.f;
    r.rate = computation_rate(h, r.best, power);
    r.is_unit = is_unit_vector(r.best);
    return r;
}

// Best unit vector: e_i with i = argmax h_i^2 (equivalently argmin f(e_i)),
// ties to the lowest index.
inline SearchResult best_unit(std::span<const double> h, double power) {
    const std::size_t n = h.size();
    const double nh2 = detail::norm2(h);
    if (n == 0 || nh2 == 0.0) throw std::invalid_argument("best_unit: zero channel");
    std::size_t arg = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (h[i] * h[i] > h[arg] * h[arg]) arg = i;
    SearchResult r;
    r.best.assign(n, 0);
    r.best[arg] = 1;
    r.f_value = 1.0 + power * (nh2 - h[arg] * h[arg]);
    r.rate = computation_rate(h, r.best, power);
    r.is_unit = true;
    return r;
}

// Sign restoration: |a_i| from a_mag, sign from h (zero h_i keeps +).  The
// optimal coefficient signs always follow the channel signs.
inline CoeffVector sign_match(std::span<const int> a_mag, std::span<const double> h) {
    if (a_mag.size() != h.size()) throw std::invalid_argument("sign_match: dimension mismatch");
    CoeffVector a(a_mag.size());
    for (std::size_t i = 0; i < a_mag.size(); ++i) {
        if (a_mag[i] < 0) throw std::invalid_argument("sign_match: negative magnitude");
        a[i] = h[i] < 0.0 ? -a_mag[i] : a_mag[i];
    }
    return a;
}

// Squared cosine of the angle between a and h, in [0,1].
inline double cos2_angle(std::span<const int> a, std::span<const double> h) {
    const double na2 = detail::norm2(a);
    const double nh2 = detail::norm2(h);
    if (na2 == 0.0 || nh2 == 0.0) throw std::invalid_argument("cos2_angle: zero vector");
    const double d = detail::dot(h, a);
    return std::clamp(d * d / (na2 * nh2), 0.0, 1.0);
}

}  // namespace cfsched
