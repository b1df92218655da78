#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "cfsched/rng.hpp"
#include "cfsched/scheduler.hpp"

namespace cfsched {

// Regularized incomplete beta I_x(a,b) by modified Lentz continued fraction,
// switching to 1 - I_{1-x}(b,a) where the fraction converges faster.
inline double reg_inc_beta(double x, double a, double b) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("reg_inc_beta: x outside [0,1]");
    if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("reg_inc_beta: a,b must be positive");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;

    auto cont_frac = [](double aa, double bb, double xx) {
        constexpr double tiny = 1e-300;
        constexpr int max_iter = 500;
        double c = 1.0;
        double d = 1.0 - (aa + bb) * xx / (aa + 1.0);
        if (std::abs(d) < tiny) d = tiny;
        d = 1.0 / d;
        double frac = d;
        for (int m = 1; m <= max_iter; ++m) {
            const double dm = double(m);
            double coeff = dm * (bb - dm) * xx / ((aa + 2.0 * dm - 1.0) * (aa + 2.0 * dm));
            d = 1.0 + coeff * d;
            if (std::abs(d) < tiny) d = tiny;
            c = 1.0 + coeff / c;
            if (std::abs(c) < tiny) c = tiny;
            d = 1.0 / d;
            frac *= c * d;
            coeff = -(aa + dm) * (aa + bb + dm) * xx / ((aa + 2.0 * dm) * (aa + 2.0 * dm + 1.0));
            d = 1.0 + coeff * d;
            if (std::abs(d) < tiny) d = tiny;
            c = 1.0 + coeff / c;
            if (std::abs(c) < tiny) c = tiny;
            d = 1.0 / d;
            const double delta = c * d;
            frac *= delta;
            if (std::abs(delta - 1.0) < 1e-16) return frac;
        }
        throw std::runtime_error("reg_inc_beta: continued fraction did not converge");
    };

    const double ln_pre = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
    if (x < (a + 1.0) / (a + b + 2.0))
        return std::exp(ln_pre) * cont_frac(a, b, x) / a;
    return 1.0 - std::exp(ln_pre) * cont_frac(b, a, 1.0 - x) / b;
}

// Standard normal CDF.
inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x * std::numbers::sqrt2 * 0.5);
}

// Phi(a) = 1 - 1/||a||^2, the beta-CDF argument of the unit-vector bound.
// Distinct from the normal CDF above; the source material overloads the symbol.
inline double phi_a(std::int64_t a_norm2) {
    if (a_norm2 < 1) throw std::domain_error("phi_a: ||a||^2 must be >= 1");
    return 1.0 - 1.0 / double(a_norm2);
}

// P(f(a) <= min_i f(e_i)) <= 1 - I_{1-1/||a||^2}(1/2, (L-1)/2).
inline double unit_pref_bound_beta(std::int64_t a_norm2, std::size_t n_users) {
    if (a_norm2 < 2) throw std::domain_error("unit_pref_bound_beta: needs ||a||^2 >= 2");
    if (n_users < 2) throw std::domain_error("unit_pref_bound_beta: needs L >= 2");
    return 1.0 - reg_inc_beta(phi_a(a_norm2), 0.5, (double(n_users) - 1.0) / 2.0);
}

// Exponential form ||a||^(-2((L-1)/2 - 1)) of the same bound, valid for L > 3.
inline double unit_pref_bound_exp(std::int64_t a_norm2, std::size_t n_users) {
    if (a_norm2 < 2) throw std::domain_error("unit_pref_bound_exp: needs ||a||^2 >= 2");
    if (n_users <= 3) throw std::domain_error("unit_pref_bound_exp: needs L > 3");
    return std::pow(double(a_norm2), -((double(n_users) - 1.0) / 2.0 - 1.0));
}

struct UDelta {
    double u = 0.0;
    double delta = 0.0;
};

// Channel-gain band parameters: delta = 1/ln L, u = sqrt(2 ln(delta sqrt(L) /
// sqrt(2 pi))) - delta.  Errors out when the inner log is not positive enough
// to give u > 0 (below L ~ 200 the band is undefined).
inline UDelta u_delta(std::size_t n_users) {
    if (n_users < 2) throw std::domain_error("u_delta: L too small");
    const double delta = 1.0 / std::log(double(n_users));
    const double inner = delta * std::sqrt(double(n_users)) / std::sqrt(2.0 * std::numbers::pi);
    if (!(inner > 1.0) || !(2.0 * std::log(inner) > delta * delta))
        throw std::domain_error("u_delta: L below validity threshold");
    return {std::sqrt(2.0 * std::log(inner)) - delta, delta};
}

// p(u,delta) = 2(Phi(u+delta) - Phi(u)), the per-user probability of landing
// in the band.
inline double p_interval(double u, double delta) {
    if (!(u >= 0.0) || !(delta > 0.0)) throw std::domain_error("p_interval: bad arguments");
    return 2.0 * (normal_cdf(u + delta) - normal_cdf(u));
}

// Chernoff lower bound (1 - e^{-(Lp-(k-1))^2 / (2pL)})^L on P(xi), the event
// of k band users in every one of L slots.  Requires Lp >= k-1.
inline double pr_xi_lower(std::size_t n_users, std::size_t k, double p) {
    if (!(p > 0.0 && p <= 1.0)) throw std::domain_error("pr_xi_lower: p outside (0,1]");
    const double lp = double(n_users) * p;
    if (lp < double(k) - 1.0) throw std::domain_error("pr_xi_lower: Chernoff validity Lp >= k-1");
    const double e = (lp - (double(k) - 1.0)) * (lp - (double(k) - 1.0)) / (2.0 * p * double(n_users));
    return std::exp(double(n_users) * std::log1p(-std::exp(-e)));
}

// Per-slot expected-rate lower bound of the window scheduler; the o(1) term
// is instantiated with the full Chernoff expression so the value is valid at
// finite L.
inline Rate scheduled_rate_lower_bound(std::size_t n_users, double power) {
    if (n_users < 4) throw std::domain_error("scheduled_rate_lower_bound: needs L >= 4");
    const std::size_t k = choose_k(n_users);
    const auto [u, delta] = u_delta(n_users);
    const double p = p_interval(u, delta);
    const double pxi = pr_xi_lower(n_users, k, p);
    const double ku2 = double(k) * u * u;
    const double frac = power * ku2 * u * u / ((u + delta) * (u + delta) * (1.0 + power * ku2));
    const double arg = double(k) * (1.0 - frac * pxi);
    return detail::rate_from_arg(arg);
}

// Expected sum-rate ceiling for any single-relay scheduler,
// 1/2 log2(1 + P(2 ln L - ln ln L - ln pi + gamma/2)); the additive o(1) is
// dropped.
inline Rate sumrate_upper_bound(std::size_t n_users, double power) {
    if (n_users < 3) throw std::domain_error("sumrate_upper_bound: needs L >= 3");
    constexpr double euler_gamma = 0.57721566490153286;
    const double ln_l = std::log(double(n_users));
    const double inner = 2.0 * ln_l - std::log(ln_l) - std::log(std::numbers::pi) + euler_gamma / 2.0;
    return 0.5 * std::log2(1.0 + power * inner);
}

// Monte Carlo outage estimate: probability that the minimum window-scheduled
// rate over L-1 slots (and over all relays) falls below the target rate.
inline double outage_estimate(std::size_t n_users, double power, double target_rate,
                              std::size_t trials, std::uint64_t seed,
                              std::size_t n_relays = 1, std::size_t k_override = 0) {
    if (trials < 1) throw std::invalid_argument("outage_estimate: trials < 1");
    const std::size_t k = k_override ? k_override : choose_k(n_users);
    std::size_t outages = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        double worst = std::numeric_limits<double>::infinity();
        for (std::size_t slot = 0; slot + 1 < n_users; ++slot) {
            CounterRng lead_rng(seed, std::uint32_t(t), std::uint32_t(slot), 0);
            const ChannelVector h0 = sample_channel(n_users, lead_rng);
            const SlotSchedule s = schedule_slot(h0, k, power);
            worst = std::min(worst, s.rate);
            for (std::size_t m = 1; m < n_relays; ++m) {
                CounterRng rng(seed, std::uint32_t(t), std::uint32_t(slot), std::uint32_t(m));
                const ChannelVector hm = sample_channel(n_users, rng);
                std::vector<double> hw(k);
                for (std::size_t j = 0; j < k; ++j) hw[j] = hm[s.users[j]];
                const CoeffVector a = sign_match(CoeffVector(k, 1), hw);
                worst = std::min(worst, computation_rate(hw, a, power));
            }
        }
        if (worst < target_rate) ++outages;
    }
    return double(outages) / double(trials);
}

}  // namespace cfsched
