#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace cfsched {

// Rates are in bits per real channel use throughout (base-2 logs).
using Rate = double;

using ChannelVector = std::vector<double>;
using CoeffVector = std::vector<int>;

namespace detail {

inline double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

inline double norm2(std::span<const int> v) {
    double s = 0.0;
    for (int x : v) s += double(x) * double(x);
    return s;
}

inline double dot(std::span<const double> h, std::span<const int> a) {
    if (h.size() != a.size()) throw std::invalid_argument("dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) s += h[i] * a[i];
    return s;
}

// Rate from the characteristic argument: 1/2 log2+(arg^-1).
// arg <= 0 can only arise from floating cancellation and maps to rate 0.
inline Rate rate_from_arg(double arg) {
    if (!(arg > 0.0) || arg >= 1.0) return 0.0;
    return 0.5 * std::log2(1.0 / arg);
}

}  // namespace detail

// G = (1 + P||h||^2) I - P h h^T, the Gram matrix of the coefficient search
// lattice.  Row-major L x L storage.
struct GramMatrix {
    std::size_t dim = 0;
    std::vector<double> entries;  // dim * dim, row-major

    double operator()(std::size_t i, std::size_t j) const { return entries[i * dim + j]; }
};

inline GramMatrix gram_matrix(std::span<const double> h, double power) {
    if (h.empty()) throw std::invalid_argument("gram_matrix: empty channel");
    if (!(power > 0.0)) throw std::invalid_argument("gram_matrix: power must be positive");
    const std::size_t n = h.size();
    const double diag = 1.0 + power * detail::norm2(h);
    GramMatrix g{n, std::vector<double>(n * n)};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            g.entries[i * n + j] = (i == j ? diag : 0.0) - power * h[i] * h[j];
    return g;
}

// f(a) = a^T G a, evaluated via the expanded form
// ||a||^2 + P (||a||^2 ||h||^2 - (a^T h)^2) to avoid assembling G.
// power == 0 is accepted as a degenerate input and yields ||a||^2.
inline double quad_form(std::span<const double> h, double power, std::span<const int> a) {
    if (h.size() != a.size()) throw std::invalid_argument("quad_form: dimension mismatch");
    if (!(power >= 0.0)) throw std::invalid_argument("quad_form: negative power");
    const double na2 = detail::norm2(a);
    const double nh2 = detail::norm2(h);
    const double d = detail::dot(h, a);
    return na2 + power * (na2 * nh2 - d * d);
}

// MMSE scale coefficient P h^T a / (1 + P ||h||^2).
inline double alpha_mmse(std::span<const double> h, std::span<const int> a, double power) {
    if (h.size() != a.size()) throw std::invalid_argument("alpha_mmse: dimension mismatch");
    return power * detail::dot(h, a) / (1.0 + power * detail::norm2(h));
}

// Computation rate 1/2 log2+ (||a||^2 - P (h^T a)^2 / (1 + P ||h||^2))^-1.
inline Rate computation_rate(std::span<const double> h, std::span<const int> a, double power) {
    if (h.size() != a.size()) throw std::invalid_argument("computation_rate: dimension mismatch");
    bool all_zero = std::all_of(a.begin(), a.end(), [](int x) { return x == 0; });
    if (all_zero) throw std::invalid_argument("computation_rate: all-zero coefficient vector");
    const double d = detail::dot(h, a);
    const double arg = detail::norm2(a) - power * d * d / (1.0 + power * detail::norm2(h));
    return detail::rate_from_arg(arg);
}

// Universal ceiling 1/2 log2(1 + P max_i h_i^2); no coefficient vector beats it.
inline Rate rate_upper_bound(std::span<const double> h, double power) {
    double m = 0.0;
    for (double x : h) m = std::max(m, x * x);
    return 0.5 * std::log2(1.0 + power * m);
}

}  // namespace cfsched
