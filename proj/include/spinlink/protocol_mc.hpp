#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <queue>
#include <thread>
#include <vector>

#include "spinlink/errors.hpp"
#include "spinlink/rates.hpp"
#include "spinlink/rng.hpp"

namespace spinlink {

// Stochastic model of the full entanglement-delivery sequence: initialize
// both spins, attempt spin-spin entanglement until heralded, swap onto the
// nuclear spins, deliver spin-superconductor entanglement at both nodes in
// synchronized rounds, then perform the Bell measurement.
struct ProtocolConfig {
    TimingParamSet timing_params = TimingParamSet::case_b();
    DerivedTiming timing;
    EfficiencySet efficiencies;
    double r_ee_attempt_hz = 100e3;
    double r_sce_attempt_hz = 500e3;
    std::uint64_t n_trials = 100000;
    std::uint64_t rng_seed = 1;
    int parallel_memories = 1;
    // Sensitivity hook: charge a nuclear re-initialization for every failed
    // spin-superconductor round (default off; the baseline model charges
    // initialization once per delivered pair).
    bool charge_n_init_per_failed_sce = false;

    static ProtocolConfig for_case(const TimingParamSet& t) {
        ProtocolConfig cfg;
        cfg.timing_params = t;
        cfg.timing = derive_gate_times(t);
        return cfg;
    }

    double p_ee() const {
        return 0.5 * efficiencies.eta_e_opt * efficiencies.eta_e_opt;
    }
    double p_sce() const {
        return efficiencies.eta_sc_mw * efficiencies.eta_e_mw;
    }

    void validate() const {
        timing_params.validate();
        efficiencies.validate();
        if (!(r_ee_attempt_hz > 0.0) || !(r_sce_attempt_hz > 0.0))
            throw ConfigError("attempt rates must be > 0");
        if (n_trials < 1) throw ConfigError("n_trials must be >= 1");
        if (!(p_ee() > 0.0))
            throw ConfigError("spin-spin success probability is 0; no trial can finish");
        if (!(p_sce() > 0.0))
            throw ConfigError("spin-superconductor success probability is 0; "
                              "no trial can finish");
    }
};

// Attempt-count histogram; counts[k] holds the number of trials that needed
// k + 1 attempts.
struct Histogram {
    std::vector<std::uint64_t> counts;

    void record(std::uint64_t attempts) {
        if (attempts == 0) throw NumericalError("attempt count must be >= 1");
        if (counts.size() < attempts) counts.resize(attempts, 0);
        ++counts[attempts - 1];
    }
    void merge(const Histogram& other) {
        if (counts.size() < other.counts.size())
            counts.resize(other.counts.size(), 0);
        for (std::size_t i = 0; i < other.counts.size(); ++i)
            counts[i] += other.counts[i];
    }
    std::uint64_t total() const {
        std::uint64_t n = 0;
        for (auto c : counts) n += c;
        return n;
    }
    double mean() const {
        double s = 0.0;
        for (std::size_t i = 0; i < counts.size(); ++i)
            s += double(i + 1) * double(counts[i]);
        return s / double(total());
    }
};

struct PhaseBreakdown {
    double init_s = 0.0, ee_s = 0.0, swap_s = 0.0, sce_s = 0.0, bsm_s = 0.0;
    double sum() const { return init_s + ee_s + swap_s + sce_s + bsm_s; }
};

struct McResult {
    std::uint64_t n_trials = 0;
    double mean_cycle_time_s = 0.0;
    double mean_cycle_stderr_s = 0.0;
    double rate_hz = 0.0;
    double rate_stderr_hz = 0.0;
    Histogram ee_attempts;
    Histogram sce_attempts_node_a, sce_attempts_node_b, sce_attempts_max;
    PhaseBreakdown breakdown; // additive for the serial protocol
    std::string rng_algorithm = kRngAlgorithm;
    int parallel_memories = 1;
};

namespace detail {

struct BlockAccumulator {
    double sum_cycle = 0.0, sum_cycle_sq = 0.0;
    PhaseBreakdown phases;
    Histogram ee, sce_a, sce_b, sce_max;
};

inline constexpr std::uint64_t kBlockSize = 4096;

// Trial bodies draw from a stream keyed by the absolute trial index, and
// block results are reduced in index order, so the outcome is identical for
// any thread count.
template <class TrialFn>
std::vector<BlockAccumulator> run_blocks(std::uint64_t n_trials,
                                         unsigned threads, TrialFn&& trial) {
    const std::uint64_t n_blocks = (n_trials + kBlockSize - 1) / kBlockSize;
    std::vector<BlockAccumulator> blocks(n_blocks);
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::uint64_t b = next.fetch_add(1);
            if (b >= n_blocks) return;
            const std::uint64_t lo = b * kBlockSize;
            const std::uint64_t hi = std::min(n_trials, lo + kBlockSize);
            for (std::uint64_t i = lo; i < hi; ++i) trial(i, blocks[b]);
        }
    };
    unsigned n_threads = threads ? threads : std::thread::hardware_concurrency();
    if (n_threads == 0) n_threads = 1;
    n_threads = static_cast<unsigned>(
        std::min<std::uint64_t>(n_threads, n_blocks));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return blocks;
}

} // namespace detail

inline McResult simulate_protocol(const ProtocolConfig& cfg, unsigned threads = 0) {
    cfg.validate();
    const double p_ee = cfg.p_ee();
    const double p_sce = cfg.p_sce();
    const double tau_ee = 1.0 / cfg.r_ee_attempt_hz;
    const double tau_sce = 1.0 / cfg.r_sce_attempt_hz;
    const DerivedTiming& t = cfg.timing;

    auto trial = [&](std::uint64_t i, detail::BlockAccumulator& acc) {
        SplitMix64 rng = rng_stream(cfg.rng_seed, i);
        const std::uint64_t ee = geometric_attempts(rng, p_ee);
        const std::uint64_t a1 = geometric_attempts(rng, p_sce);
        const std::uint64_t a2 = geometric_attempts(rng, p_sce);
        const std::uint64_t amax = std::max(a1, a2);

        double init = t.tau_init_total_s;
        if (cfg.charge_n_init_per_failed_sce)
            init += double(amax - 1) * t.tau_n_init_s;
        const double ee_time = double(ee) * tau_ee;
        const double sce_time = double(amax) * tau_sce;
        const double cycle =
            init + ee_time + t.tau_n_swap_s + sce_time + t.tau_bsm_s;

        acc.sum_cycle += cycle;
        acc.sum_cycle_sq += cycle * cycle;
        acc.phases.init_s += init;
        acc.phases.ee_s += ee_time;
        acc.phases.swap_s += t.tau_n_swap_s;
        acc.phases.sce_s += sce_time;
        acc.phases.bsm_s += t.tau_bsm_s;
        acc.ee.record(ee);
        acc.sce_a.record(a1);
        acc.sce_b.record(a2);
        acc.sce_max.record(amax);
    };
    const auto blocks = detail::run_blocks(cfg.n_trials, threads, trial);

    McResult r;
    r.n_trials = cfg.n_trials;
    r.parallel_memories = 1;
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& b : blocks) {
        sum += b.sum_cycle;
        sum_sq += b.sum_cycle_sq;
        r.breakdown.init_s += b.phases.init_s;
        r.breakdown.ee_s += b.phases.ee_s;
        r.breakdown.swap_s += b.phases.swap_s;
        r.breakdown.sce_s += b.phases.sce_s;
        r.breakdown.bsm_s += b.phases.bsm_s;
        r.ee_attempts.merge(b.ee);
        r.sce_attempts_node_a.merge(b.sce_a);
        r.sce_attempts_node_b.merge(b.sce_b);
        r.sce_attempts_max.merge(b.sce_max);
    }
    const double n = double(cfg.n_trials);
    r.mean_cycle_time_s = sum / n;
    const double var = std::max(0.0, (sum_sq / n - r.mean_cycle_time_s *
                                                      r.mean_cycle_time_s)) *
                       (n > 1 ? n / (n - 1.0) : 1.0);
    r.mean_cycle_stderr_s = std::sqrt(var / n);
    r.rate_hz = 1.0 / r.mean_cycle_time_s;
    r.rate_stderr_hz =
        r.mean_cycle_stderr_s / (r.mean_cycle_time_s * r.mean_cycle_time_s);
    r.breakdown.init_s /= n;
    r.breakdown.ee_s /= n;
    r.breakdown.swap_s /= n;
    r.breakdown.sce_s /= n;
    r.breakdown.bsm_s /= n;
    return r;
}

struct OracleResult {
    double mean = 0.0;
    double std_error = 0.0;
};

// Sampled E[max of two independent geometric attempt counts]; validates the
// closed form (3 - 2p)/(p (2 - p)) and the series evaluation.
inline OracleResult max_geometric_oracle(double p, std::uint64_t n_trials,
                                         std::uint64_t seed) {
    if (!(p > 0.0 && p <= 1.0))
        throw ConfigError("success probability must be in (0, 1]");
    if (n_trials < 1) throw ConfigError("n_trials must be >= 1");
    double sum = 0.0, sum_sq = 0.0;
    for (std::uint64_t i = 0; i < n_trials; ++i) {
        SplitMix64 rng = rng_stream(seed, i);
        const double m = double(std::max(geometric_attempts(rng, p),
                                         geometric_attempts(rng, p)));
        sum += m;
        sum_sq += m * m;
    }
    const double n = double(n_trials);
    OracleResult r;
    r.mean = sum / n;
    const double var = std::max(0.0, (sum_sq / n - r.mean * r.mean)) *
                       (n > 1 ? n / (n - 1.0) : 1.0);
    r.std_error = std::sqrt(var / n);
    return r;
}

// Event-driven pipeline with parallel_memories independent memories sharing
// one delivery channel (spin-superconductor rounds plus Bell measurement are
// serialized on the superconducting qubit; preparation runs concurrently on
// idle memories). Handoff between memories is instantaneous. Single-threaded
// by construction, so results never depend on the thread count.
inline McResult simulate_parallel(const ProtocolConfig& cfg) {
    cfg.validate();
    if (cfg.parallel_memories < 2)
        throw ConfigError("parallel simulation requires parallel_memories >= 2");
    const double p_ee = cfg.p_ee();
    const double p_sce = cfg.p_sce();
    const double tau_ee = 1.0 / cfg.r_ee_attempt_hz;
    const double tau_sce = 1.0 / cfg.r_sce_attempt_hz;
    const DerivedTiming& t = cfg.timing;
    const int n_mem = cfg.parallel_memories;

    McResult r;
    r.n_trials = cfg.n_trials;
    r.parallel_memories = n_mem;

    std::vector<SplitMix64> streams;
    streams.reserve(n_mem);
    for (int m = 0; m < n_mem; ++m) streams.push_back(rng_stream(cfg.rng_seed, m));

    auto sample_prep = [&](int m) {
        const std::uint64_t ee = geometric_attempts(streams[m], p_ee);
        r.ee_attempts.record(ee);
        const double ee_time = double(ee) * tau_ee;
        r.breakdown.init_s += t.tau_init_total_s;
        r.breakdown.ee_s += ee_time;
        r.breakdown.swap_s += t.tau_n_swap_s;
        return t.tau_init_total_s + ee_time + t.tau_n_swap_s;
    };
    auto sample_delivery = [&](int m) {
        const std::uint64_t a1 = geometric_attempts(streams[m], p_sce);
        const std::uint64_t a2 = geometric_attempts(streams[m], p_sce);
        const std::uint64_t amax = std::max(a1, a2);
        r.sce_attempts_node_a.record(a1);
        r.sce_attempts_node_b.record(a2);
        r.sce_attempts_max.record(amax);
        const double sce_time = double(amax) * tau_sce;
        r.breakdown.sce_s += sce_time;
        r.breakdown.bsm_s += t.tau_bsm_s;
        return sce_time + t.tau_bsm_s;
    };

    // (ready time, memory) min-queue of prepared pairs waiting for delivery.
    // Earliest-prepared pair is delivered first.
    using Ready = std::pair<double, int>;
    std::priority_queue<Ready, std::vector<Ready>, std::greater<>> ready;
    for (int m = 0; m < n_mem; ++m) ready.emplace(sample_prep(m), m);

    const std::uint64_t warmup =
        std::min<std::uint64_t>(cfg.n_trials / 10, 10000);
    double channel_free = 0.0;
    double prev_end = 0.0;
    double sum_gap = 0.0, sum_gap_sq = 0.0;
    std::uint64_t measured = 0;

    for (std::uint64_t k = 0; k < cfg.n_trials + warmup; ++k) {
        const auto [ready_at, m] = ready.top();
        ready.pop();
        const double start = std::max(channel_free, ready_at);
        const double end = start + sample_delivery(m);
        channel_free = end;
        ready.emplace(end + sample_prep(m), m);

        if (k >= warmup) {
            const double gap = end - prev_end;
            sum_gap += gap;
            sum_gap_sq += gap * gap;
            ++measured;
        }
        prev_end = end;
    }

    const double n = double(measured);
    r.mean_cycle_time_s = sum_gap / n;
    const double var = std::max(0.0, (sum_gap_sq / n - r.mean_cycle_time_s *
                                                           r.mean_cycle_time_s)) *
                       (n > 1 ? n / (n - 1.0) : 1.0);
    r.mean_cycle_stderr_s = std::sqrt(var / n);
    r.rate_hz = 1.0 / r.mean_cycle_time_s;
    r.rate_stderr_hz =
        r.mean_cycle_stderr_s / (r.mean_cycle_time_s * r.mean_cycle_time_s);
    // Per-pair phase means over every sampled pair (warmup included; phases
    // overlap across memories, so these do not sum to the cycle time here).
    const double preps = double(cfg.n_trials + warmup + n_mem);
    const double deliveries = double(cfg.n_trials + warmup);
    r.breakdown.init_s /= preps;
    r.breakdown.ee_s /= preps;
    r.breakdown.swap_s /= preps;
    r.breakdown.sce_s /= deliveries;
    r.breakdown.bsm_s /= deliveries;
    return r;
}

} // namespace spinlink
