#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "cfsched/coeff_search.hpp"
#include "cfsched/exact_linalg.hpp"
#include "cfsched/rate.hpp"
#include "cfsched/rng.hpp"

namespace cfsched {

// Scheduled users per slot: k = ceil(ln L) + 1 keeps the decoding matrix
// full rank with high probability while staying O(log L).
inline std::size_t choose_k(std::size_t n_users) {
    if (n_users < 4) throw std::invalid_argument("choose_k: requires L >= 4");
    return std::size_t(std::ceil(std::log(double(n_users)))) + 1;
}

struct SlotSchedule {
    std::vector<std::size_t> users;  // original indices, magnitude-sorted order
    CoeffVector coeff;               // entries +-1 for window schedules
    Rate rate = 0.0;
};

struct SchedParams {
    std::size_t n_users = 0;       // L
    std::size_t slot_users = 0;    // k
    double power = 0.0;            // P
    double target_rate = 0.0;      // R
};

enum class SessionStatus { ok, rank_deficient, rate_violation };

struct SessionResult {
    std::vector<SlotSchedule> slots;  // length L; last slot is a single user
    DecodingMatrix decoding_matrix;
    std::size_t n_slots = 0;  // N
    Rate min_rate = 0.0;      // min over the first L-1 slots
    SessionStatus status = SessionStatus::ok;
};

// Best window of k consecutive entries of the magnitude-sorted channel,
// evaluated with the all-ones pattern; signs restored afterwards.  Ties go to
// the lowest window start, and if every window clamps to rate zero the first
// window is still scheduled.
inline SlotSchedule schedule_slot(std::span<const double> h, std::size_t k, double power) {
    const std::size_t n = h.size();
    if (k < 1 || k > n) throw std::invalid_argument("schedule_slot: need 1 <= k <= L");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(h[a]) < std::abs(h[b]);
    });

    std::size_t best_start = 0;
    double best_rate = 0.0;
    for (std::size_t start = 0; start + k <= n; ++start) {
        double sum_abs = 0.0, sum_sq = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            const double v = h[order[start + j]];
            sum_abs += std::abs(v);
            sum_sq += v * v;
        }
        const double arg = double(k) - power * sum_abs * sum_abs / (1.0 + power * sum_sq);
        const double rate = detail::rate_from_arg(arg);
        if (rate > best_rate) {
            best_rate = rate;
            best_start = start;
        }
    }

    SlotSchedule slot;
    slot.users.assign(order.begin() + best_start, order.begin() + best_start + k);
    std::vector<double> hw(k);
    for (std::size_t j = 0; j < k; ++j) hw[j] = h[slot.users[j]];
    slot.coeff = sign_match(CoeffVector(k, 1), hw);
    slot.rate = computation_rate(hw, slot.coeff, power);
    return slot;
}

// Map a k-length slot coefficient vector to the full L-length row.
inline CoeffVector lift(const SlotSchedule& slot, std::size_t n_users) {
    if (slot.users.size() != slot.coeff.size())
        throw std::invalid_argument("lift: users/coeff size mismatch");
    CoeffVector row(n_users, 0);
    for (std::size_t j = 0; j < slot.users.size(); ++j) {
        if (slot.users[j] >= n_users) throw std::invalid_argument("lift: user index out of range");
        row[slot.users[j]] = slot.coeff[j];
    }
    return row;
}

namespace detail {

inline std::vector<long long> to_ll(std::span<const int> v) {
    return std::vector<long long>(v.begin(), v.end());
}

}  // namespace detail

// Full session: L-1 window slots, then one unit-vector slot chosen to
// complete the decoding matrix.  Reports ok only when the final rank is L and
// the target rate clears both the session minimum and the last slot's SISO rate.
inline SessionResult run_session(const std::function<ChannelVector(std::size_t)>& channel_source,
                                 const SchedParams& params) {
    const std::size_t L = params.n_users;
    const std::size_t k = params.slot_users;
    if (L < 2 || k < 1 || k > L) throw std::invalid_argument("run_session: bad params");
    if (params.target_rate < 0.0) throw std::invalid_argument("run_session: negative rate");

    SessionResult result{.slots = {}, .decoding_matrix = DecodingMatrix(L)};
    double r_min = std::numeric_limits<double>::infinity();

    for (std::size_t slot_idx = 0; slot_idx + 1 < L; ++slot_idx) {
        ChannelVector h = channel_source(slot_idx);
        if (h.size() != L) throw std::invalid_argument("run_session: channel length != L");
        SlotSchedule slot = schedule_slot(h, k, params.power);
        result.decoding_matrix.add_row_if_independent(detail::to_ll(lift(slot, L)));
        r_min = std::min(r_min, slot.rate);
        result.slots.push_back(std::move(slot));
    }

    // Last slot: lowest-index unit vector independent of the accumulated rows.
    ChannelVector h_last = channel_source(L - 1);
    if (h_last.size() != L) throw std::invalid_argument("run_session: channel length != L");
    const std::size_t user = find_completing_unit(result.decoding_matrix);
    SlotSchedule last;
    last.users = {user};
    last.coeff = {1};
    const std::vector<double> h_user{h_last[user]};
    last.rate = computation_rate(h_user, last.coeff, params.power);  // SISO capacity
    CoeffVector unit(L, 0);
    unit[user] = 1;
    result.decoding_matrix.add_row_if_independent(detail::to_ll(unit));
    const Rate siso_rate = last.rate;
    result.slots.push_back(std::move(last));

    result.n_slots = L;
    result.min_rate = r_min;
    if (result.decoding_matrix.rank() < L)
        result.status = SessionStatus::rank_deficient;
    else if (params.target_rate < r_min && params.target_rate < siso_rate)
        result.status = SessionStatus::ok;
    else
        result.status = SessionStatus::rate_violation;
    return result;
}

// Uniform random k-subset of {0..L-1}, ascending.
inline std::vector<std::size_t> random_schedule_slot(std::size_t n_users, std::size_t k,
                                                     CounterRng& rng) {
    if (k > n_users) throw std::invalid_argument("random_schedule_slot: k > L");
    std::vector<std::size_t> pool(n_users);
    std::iota(pool.begin(), pool.end(), 0);
    for (std::size_t j = 0; j < k; ++j) {
        const std::size_t swap_with = j + std::size_t(rng.uniform_below(n_users - j));
        std::swap(pool[j], pool[swap_with]);
    }
    std::vector<std::size_t> subset(pool.begin(), pool.begin() + k);
    std::sort(subset.begin(), subset.end());
    return subset;
}

}  // namespace cfsched
