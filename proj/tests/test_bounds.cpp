#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cfsched/bounds.hpp"

using namespace cfsched;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Independent oracle: adaptive Simpson quadrature of the Beta density after
// the substitution t = s^2, which removes the left-endpoint singularity for
// every a >= 1/2:  I_x(a,b) = int_0^sqrt(x) 2 s^(2a-1) (1-s^2)^(b-1) ds / B(a,b).
double beta_integrand(double s, double a, double b) {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    const double ln = (2.0 * a - 1.0) * std::log(s) + (b - 1.0) * std::log1p(-s * s) -
                      (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
    return 2.0 * std::exp(ln);
}

double simpson(double lo, double hi, double fa, double fm, double fb, double a, double b,
               double eps, int depth) {
    const double mid = 0.5 * (lo + hi);
    const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
    const double flm = beta_integrand(lm, a, b), frm = beta_integrand(rm, a, b);
    const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
    const double left = (mid - lo) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (hi - mid) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * eps)
        return left + right + (left + right - whole) / 15.0;
    return simpson(lo, mid, fa, flm, fm, a, b, eps / 2, depth - 1) +
           simpson(mid, hi, fm, frm, fb, a, b, eps / 2, depth - 1);
}

double beta_cdf_quadrature(double x, double a, double b) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double hi = std::sqrt(x);
    return simpson(0.0, hi, beta_integrand(0.0, a, b), beta_integrand(0.5 * hi, a, b),
                   beta_integrand(hi, a, b), a, b, 1e-13, 48);
}

}  // namespace

TEST_CASE("reg_inc_beta closed forms") {
    CHECK(reg_inc_beta(0.0, 0.5, 2.0) == 0.0);
    CHECK(reg_inc_beta(1.0, 0.5, 2.0) == 1.0);
    CHECK_THAT(reg_inc_beta(0.5, 0.5, 0.5), WithinAbs(0.5, 1e-12));
    CHECK_THAT(reg_inc_beta(0.5, 0.5, 1.0), WithinAbs(std::sqrt(0.5), 1e-12));
    // I_x(1/2, 1) = sqrt(x)
    for (double x : {0.01, 0.2, 0.5, 0.77, 0.99})
        CHECK_THAT(reg_inc_beta(x, 0.5, 1.0), WithinAbs(std::sqrt(x), 1e-12));
    // I_x(1, b) = 1 - (1-x)^b
    for (double x : {0.1, 0.6, 0.9})
        CHECK_THAT(reg_inc_beta(x, 1.0, 3.5), WithinAbs(1.0 - std::pow(1.0 - x, 3.5), 1e-12));
    CHECK_THROWS_AS(reg_inc_beta(-0.1, 1, 1), std::domain_error);
    CHECK_THROWS_AS(reg_inc_beta(0.5, 0, 1), std::domain_error);
}

TEST_CASE("reg_inc_beta agrees with quadrature oracle") {
    const double abs_tol = 1e-9;  // quadrature-limited
    for (double a : {0.5, 1.5, 4.5, 14.5})
        for (double b : {0.5, 2.0, 9.5})
            for (double x : {0.05, 0.3, 0.5, 0.8, 0.97})
                REQUIRE_THAT(reg_inc_beta(x, a, b),
                             WithinAbs(beta_cdf_quadrature(x, a, b), abs_tol));
}

TEST_CASE("reg_inc_beta reflection identity") {
    for (int i = 1; i < 100; ++i) {
        const double x = double(i) / 100.0;
        for (auto [a, b] : {std::pair{0.5, 1.5}, {2.0, 3.0}, {0.5, 19.5}, {3.5, 0.5}})
            REQUIRE_THAT(reg_inc_beta(x, a, b) + reg_inc_beta(1.0 - x, b, a),
                         WithinAbs(1.0, 1e-10));
    }
}

TEST_CASE("normal_cdf reference values") {
    CHECK_THAT(normal_cdf(0.0), WithinAbs(0.5, 1e-15));
    CHECK_THAT(normal_cdf(1.96), WithinAbs(0.97500210485177952, 1e-12));
    for (double x : {-2.3, -0.5, 0.9, 3.1})
        CHECK_THAT(normal_cdf(x) + normal_cdf(-x), WithinAbs(1.0, 1e-14));
}

TEST_CASE("unit preference bounds") {
    CHECK_THAT(phi_a(2), WithinAbs(0.5, 1e-15));
    CHECK_THAT(unit_pref_bound_beta(2, 3), WithinAbs(1.0 - std::sqrt(0.5), 1e-12));
    CHECK_THAT(unit_pref_bound_exp(4, 10), WithinAbs(0.0078125, 1e-15));
    CHECK_THAT(unit_pref_bound_exp(2, 5), WithinAbs(0.5, 1e-15));
    CHECK_THROWS_AS(unit_pref_bound_exp(2, 3), std::domain_error);
    CHECK_THROWS_AS(unit_pref_bound_beta(1, 5), std::domain_error);

    for (std::int64_t a2 : {2, 3, 6}) {
        double prev = 1.1;
        for (std::size_t L = 4; L <= 100; ++L) {
            const double v = unit_pref_bound_beta(a2, L);
            REQUIRE(v >= 0.0);
            REQUIRE(v <= 1.0);
            // monotone decreasing in L until it hits the double-precision floor
            if (prev > 1e-12)
                REQUIRE(v < prev);
            else
                REQUIRE(v <= prev);
            prev = v;
        }
    }
}

TEST_CASE("u_delta values and monotonicity") {
    const UDelta ud = u_delta(10000);
    CHECK_THAT(ud.delta, WithinRel(0.10857362047581296, 1e-12));
    CHECK_THAT(ud.u, WithinRel(1.6036791917079324, 1e-9));
    CHECK_THROWS_AS(u_delta(100), std::domain_error);
    CHECK_THROWS_AS(u_delta(165), std::domain_error);  // inner log positive but u <= 0

    double prev_u = 0.0, prev_d = 1.0;
    for (std::size_t L : {200, 500, 1000, 10000, 100000, 1000000, 10000000}) {
        const UDelta v = u_delta(L);
        REQUIRE(v.u > prev_u);
        REQUIRE(v.delta < prev_d);
        prev_u = v.u;
        prev_d = v.delta;
    }
}

TEST_CASE("p_interval behavior") {
    CHECK(p_interval(1.0, 1e-300) < 1e-12);
    CHECK_THAT(p_interval(0.0, 1e9), WithinAbs(1.0, 1e-12));
    CHECK_THROWS_AS(p_interval(-1.0, 0.1), std::domain_error);
    // p(u(L), delta(L)) >= 2/sqrt(L) on the valid grid
    for (std::size_t L : {200, 500, 1000, 10000, 100000, 1000000, 10000000}) {
        const UDelta v = u_delta(L);
        REQUIRE(p_interval(v.u, v.delta) >= 2.0 / std::sqrt(double(L)));
    }
}

TEST_CASE("pr_xi_lower values and domain") {
    CHECK_THAT(pr_xi_lower(100, 6, 0.2), WithinRel(0.69676419027517361, 1e-12));
    CHECK(pr_xi_lower(100, 1, 1.0) > 1.0 - 1e-12);  // certain event
    CHECK_THROWS_AS(pr_xi_lower(100, 50, 0.2), std::domain_error);  // Lp < k-1
    CHECK_THROWS_AS(pr_xi_lower(100, 6, 0.0), std::domain_error);
    // tends to one along L with the asymptotic parameter rules (saturates at 1)
    double prev = 0.0;
    for (std::size_t L : {1000, 10000, 100000, 1000000}) {
        const UDelta v = u_delta(L);
        const double p = p_interval(v.u, v.delta);
        const double val = pr_xi_lower(L, choose_k(L), p);
        REQUIRE(val >= prev);
        if (prev < 1.0 - 1e-12) REQUIRE(val > prev);
        prev = val;
    }
    CHECK(prev > 0.99);
}

TEST_CASE("scheduled-rate lower bound and sum-rate ceiling") {
    CHECK(scheduled_rate_lower_bound(10000, 1000.0) == 0.0);  // log argument >= 1 clamps
    const double lb6 = scheduled_rate_lower_bound(1000000, 1000.0);
    const double lb7 = scheduled_rate_lower_bound(10000000, 1000.0);
    CHECK(lb6 > 0.0);
    CHECK(lb7 > lb6);  // grows once positive
    CHECK(lb6 < sumrate_upper_bound(1000000, 1000.0));
    CHECK(lb7 < sumrate_upper_bound(10000000, 1000.0));

    CHECK_THAT(sumrate_upper_bound(100, 1000.0), WithinRel(6.3686277592195460, 1e-12));
    CHECK_THROWS_AS(sumrate_upper_bound(2, 10.0), std::domain_error);
    double prev = 0.0;
    for (std::size_t L : {3, 10, 100, 1000, 100000}) {
        const double v = sumrate_upper_bound(L, 100.0);
        REQUIRE(v > prev);
        prev = v;
    }
    CHECK(sumrate_upper_bound(100, 10.0) < sumrate_upper_bound(100, 100.0));
}

TEST_CASE("outage_estimate trivial targets") {
    CHECK(outage_estimate(6, 10.0, 0.0, 20, 7) == 0.0);
    CHECK(outage_estimate(6, 10.0, 1e9, 20, 7) == 1.0);
    CHECK_THROWS_AS(outage_estimate(6, 10.0, 0.5, 0, 7), std::invalid_argument);
}
