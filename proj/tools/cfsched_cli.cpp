// Command-line driver: closed-form rate/bound evaluation, coefficient search,
// scheduling, and the seeded Monte Carlo experiments with CSV output.

#include <cmath>
#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cfsched/bounds.hpp"
#include "cfsched/coeff_search.hpp"
#include "cfsched/config.hpp"
#include "cfsched/experiments.hpp"
#include "cfsched/rate.hpp"
#include "cfsched/scheduler.hpp"

namespace {

cfsched::ChannelVector parse_channel(const std::string& s) {
    cfsched::ChannelVector h = cfsched::parse_double_list(s);
    if (h.empty()) throw std::invalid_argument("empty channel vector");
    return h;
}

cfsched::CoeffVector parse_coeff(const std::string& s) {
    cfsched::CoeffVector a;
    for (double x : cfsched::parse_double_list(s)) a.push_back(int(std::lround(x)));
    if (a.empty()) throw std::invalid_argument("empty coefficient vector");
    return a;
}

void print_coeff(const cfsched::CoeffVector& a) {
    std::printf("(");
    for (std::size_t i = 0; i < a.size(); ++i) std::printf("%s%d", i ? "," : "", a[i]);
    std::printf(")");
}

int run_rate(const std::string& channel, const std::string& coeff, double power) {
    const auto h = parse_channel(channel);
    const auto a = parse_coeff(coeff);
    std::printf("rate        %.12g bits/channel use\n", cfsched::computation_rate(h, a, power));
    std::printf("alpha_mmse  %.12g\n", cfsched::alpha_mmse(h, a, power));
    std::printf("f(a)        %.12g\n", cfsched::quad_form(h, power, a));
    std::printf("rate_ub     %.12g\n", cfsched::rate_upper_bound(h, power));
    return 0;
}

int run_search(const std::string& channel, double power, bool brute, int box) {
    const auto h = parse_channel(channel);
    const cfsched::SearchResult r = brute ? cfsched::best_coeff_bruteforce(h, power, box)
                                          : cfsched::best_coeff(h, power);
    std::printf("best a      ");
    print_coeff(r.best);
    std::printf("\nrate        %.12g\nf(a)        %.12g\nis_unit     %s\n", r.rate, r.f_value,
                r.is_unit ? "yes" : "no");
    if (!brute)
        std::printf("candidates  %zu\n", cfsched::enumerate_candidates(h, power).size());
    return 0;
}

int run_schedule(const std::optional<std::string>& channel, std::size_t L, std::size_t M,
                 std::size_t k, double power, double target_rate, std::uint64_t seed) {
    using namespace cfsched;
    if (channel) {
        const auto h = parse_channel(*channel);
        const std::size_t kk = k ? k : choose_k(h.size());
        const SlotSchedule s = schedule_slot(h, kk, power);
        std::printf("users      ");
        for (std::size_t i = 0; i < s.users.size(); ++i)
            std::printf("%s%zu", i ? "," : "", s.users[i]);
        std::printf("\ncoeff      ");
        print_coeff(s.coeff);
        std::printf("\nrate       %.12g\n", s.rate);
        return 0;
    }
    if (L == 0) throw std::invalid_argument("schedule: give --channel or -L");
    if (M > 1) {
        const MultiRelaySession s = run_multirelay_session(L, M, power, seed);
        std::printf("L=%zu M=%zu  N=%zu (phase1=%zu, phase2=%zu)\n", L, M, s.n_slots,
                    s.phase1_slots, s.phase2_slots);
        const double rule_rate = 0.2 * std::log2(std::log2(double(L)));
        std::printf("min_rate   %.12g\nsum_rate   %.12g\nfinal rank %zu\n", s.min_rate,
                    s.sum_rate, s.rank_history.empty() ? 0 : s.rank_history.back());
        std::printf("sum_rate at R=%.4g: %.12g\n", rule_rate, s.sum_rate_at(rule_rate));
        return 0;
    }
    const std::size_t kk = k ? k : choose_k(L);
    SchedParams params{L, kk, power, target_rate};
    const SessionResult s = run_session(
        [&](std::size_t slot) {
            CounterRng rng(seed, 0, std::uint32_t(slot), 0);
            return sample_channel(L, rng);
        },
        params);
    const char* status = s.status == SessionStatus::ok               ? "ok"
                         : s.status == SessionStatus::rank_deficient ? "error: rank-deficient"
                                                                     : "error: rate-violation";
    std::printf("L=%zu k=%zu  N=%zu  status=%s\n", L, kk, s.n_slots, status);
    std::printf("min_rate   %.12g\nrank       %zu\nsum_rate   %.12g\n", s.min_rate,
                s.decoding_matrix.rank(), s.min_rate * double(L) / double(s.n_slots));
    return 0;
}

int run_bounds(std::size_t L, double power) {
    using namespace cfsched;
    if (L < 2) throw std::invalid_argument("bounds: need -L >= 2");
    std::printf("L=%zu P=%.6g\n", L, power);
    for (std::int64_t a2 : {2, 3, 6}) {
        std::printf("unit_pref_bound_beta(a2=%lld)  %.12g\n", (long long)a2,
                    unit_pref_bound_beta(a2, L));
        if (L > 3)
            std::printf("unit_pref_bound_exp(a2=%lld)   %.12g\n", (long long)a2,
                        unit_pref_bound_exp(a2, L));
    }
    if (L >= 3) {
        // Additive o(1) of the ceiling is dropped; the value is slightly optimistic.
        std::printf("sumrate_upper_bound           %.12g\n", sumrate_upper_bound(L, power));
    }
    try {
        const UDelta ud = u_delta(L);
        const double p = p_interval(ud.u, ud.delta);
        std::printf("u(L)=%.12g delta(L)=%.12g p(u,delta)=%.12g\n", ud.u, ud.delta, p);
        const std::size_t k = choose_k(L);
        std::printf("pr_xi_lower(k=%zu)            %.12g\n", k, pr_xi_lower(L, k, p));
        // The o(1) of the lower bound is instantiated with the full Chernoff term.
        std::printf("scheduled_rate_lower_bound              %.12g\n", scheduled_rate_lower_bound(L, power));
    } catch (const std::domain_error& e) {
        std::printf("u_delta: %s\n", e.what());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"compute-and-forward rate, scheduling and Monte Carlo toolbox"};
    app.require_subcommand(1);

    // rate
    auto* c_rate = app.add_subcommand("rate", "computation rate for a channel/coefficient pair");
    std::string channel, coeff;
    double power = 10.0;
    c_rate->add_option("--channel", channel, "comma-separated channel gains")->required();
    c_rate->add_option("--coeff", coeff, "comma-separated integer coefficients")->required();
    c_rate->add_option("--power,-P", power, "transmit power (linear)");

    // search
    auto* c_search = app.add_subcommand("search", "rate-maximizing coefficient vector");
    std::string s_channel;
    double s_power = 10.0;
    bool s_brute = false;
    int s_box = 3;
    c_search->add_option("--channel", s_channel, "comma-separated channel gains")->required();
    c_search->add_option("--power,-P", s_power, "transmit power (linear)");
    c_search->add_flag("--brute", s_brute, "exhaustive box search instead of breakpoints");
    c_search->add_option("--box", s_box, "box limit for --brute");

    // schedule
    auto* c_sched = app.add_subcommand("schedule", "window schedule for one slot or a session");
    std::string d_channel;
    std::size_t d_L = 0, d_M = 1, d_k = 0;
    double d_power = 10.0, d_rate = 0.0;
    std::uint64_t d_seed = 1;
    c_sched->add_option("--channel", d_channel, "single-slot channel gains");
    c_sched->add_option("--users,-L", d_L, "user count for a full session");
    c_sched->add_option("--relays,-M", d_M, "relay count (M>1 runs the heuristic session)");
    c_sched->add_option("--k", d_k, "scheduled users per slot (default ceil(ln L)+1)");
    c_sched->add_option("--power,-P", d_power, "transmit power (linear)");
    c_sched->add_option("--rate,-R", d_rate, "target transmission rate");
    c_sched->add_option("--seed", d_seed, "channel seed");

    // bounds
    auto* c_bounds = app.add_subcommand("bounds", "closed-form bound evaluations");
    std::size_t b_L = 100;
    double b_power = 1000.0;
    c_bounds->add_option("--users,-L", b_L, "user count");
    c_bounds->add_option("--power,-P", b_power, "transmit power (linear)");

    // experiment
    auto* c_exp = app.add_subcommand("experiment", "seeded Monte Carlo experiment, CSV output");
    std::string e_name, e_L, e_P, e_out, e_config;
    std::size_t e_M = 0, e_k = 0, e_trials = 0, e_threads = 0;
    std::uint64_t e_seed = 0;
    double e_phase = -1.0;
    c_exp->add_option("name", e_name, "fig2|fig4|fig5|fig6|fig7|fig8|outage")->required();
    auto* o_L = c_exp->add_option("--users,-L", e_L, "L grid, comma-separated");
    auto* o_M = c_exp->add_option("--relays,-M", e_M, "relay count");
    auto* o_P = c_exp->add_option("--power,-P", e_P, "P grid, comma-separated");
    auto* o_k = c_exp->add_option("--k", e_k, "override scheduled users per slot");
    auto* o_t = c_exp->add_option("--trials", e_trials, "Monte Carlo trials");
    auto* o_s = c_exp->add_option("--seed", e_seed, "RNG seed");
    auto* o_o = c_exp->add_option("--out", e_out, "output CSV path");
    c_exp->add_option("--config", e_config, "key=value config file");
    auto* o_j = c_exp->add_option("--threads,-j", e_threads, "worker threads");
    auto* o_ph = c_exp->add_option("--phase-switch", e_phase, "multi-relay phase-2 trigger factor");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (c_rate->parsed()) return run_rate(channel, coeff, power);
        if (c_search->parsed()) return run_search(s_channel, s_power, s_brute, s_box);
        if (c_sched->parsed())
            return run_schedule(d_channel.empty() ? std::nullopt : std::optional(d_channel), d_L,
                                d_M, d_k, d_power, d_rate, d_seed);
        if (c_bounds->parsed()) return run_bounds(b_L, b_power);
        if (c_exp->parsed()) {
            cfsched::ExperimentConfig cfg;
            cfg.experiment = cfsched::experiment_from_name(e_name);
            if (!e_config.empty()) cfsched::apply_config(cfg, cfsched::parse_config_file(e_config));
            if (o_L->count()) cfg.L_grid = cfsched::parse_size_list(e_L);
            if (o_M->count()) cfg.n_relays = e_M;
            if (o_P->count()) cfg.P_grid = cfsched::parse_double_list(e_P);
            if (o_k->count()) cfg.k_override = e_k;
            if (o_t->count()) cfg.trials = e_trials;
            if (o_s->count()) cfg.seed = e_seed;
            if (o_o->count()) cfg.out_path = e_out;
            if (o_j->count()) cfg.threads = e_threads;
            if (o_ph->count()) cfg.phase_switch = e_phase;
            if (cfg.n_relays < 1) throw std::invalid_argument("need M >= 1");
            if (cfg.threads == 0) cfg.threads = 1;
            if (cfg.out_path.empty()) cfg.out_path = e_name + ".csv";
            const auto rows = cfsched::run_experiment(cfg);
            cfsched::write_csv(cfg.out_path, rows);
            std::printf("%s: %zu rows -> %s\n", e_name.c_str(), rows.size(),
                        cfg.out_path.c_str());
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 1;
}
