#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "spinlink/errors.hpp"

namespace spinlink {

// Primitive control/readout parameters of one operating point of the
// spin-memory interface. Frequencies are cyclic (Hz), times in seconds.
struct TimingParamSet {
    std::string label = "custom";
    double hyperfine_a_hz = 0.0;
    double rabi_e_hz = 0.0;
    std::optional<double> rabi_n_hz;
    double tau_e_init_s = 0.0;
    double tau_ee_attempt_s = 0.0; // one electron-electron entangling round
    double tau_e_ss_s = 0.0;       // single-shot electron readout
    double tau_mw_emit_s = 0.0;
    double tau_mw_abs_s = 0.0;
    // Electron-controlled nuclear flip taken from a reference value instead
    // of 1/(2 Omega_n); used when the hyperfine coupling is too weak for a
    // direct driven gate.
    std::optional<double> tau_cen_override_s;
    // Nuclear-controlled electron flip realised as a 2*pi geometric gate
    // (full rotation) rather than a pi pulse.
    bool geometric_cne = false;

    void validate() const {
        if (!(hyperfine_a_hz > 0))
            throw ConfigError("timing '" + label + "': hyperfine coupling must be > 0");
        if (!(rabi_e_hz > 0))
            throw ConfigError("timing '" + label + "': electron Rabi frequency must be > 0");
        if (rabi_n_hz && !(*rabi_n_hz > 0))
            throw ConfigError("timing '" + label + "': nuclear Rabi frequency must be > 0");
        for (double t : {tau_e_init_s, tau_ee_attempt_s, tau_e_ss_s,
                         tau_mw_emit_s, tau_mw_abs_s})
            if (!(t > 0))
                throw ConfigError("timing '" + label + "': all primitive times must be > 0");
        if (tau_cen_override_s && !(*tau_cen_override_s > 0))
            throw ConfigError("timing '" + label + "': C_eNOT_n override must be > 0");
    }

    // The three reference operating points: (A) moderate hyperfine coupling
    // and weak drive, (B) strong hyperfine coupling and moderate drive,
    // (C) strong hyperfine coupling and strong drive.
    static TimingParamSet case_a() {
        TimingParamSet p;
        p.label = "A";
        p.hyperfine_a_hz = 1e6;
        p.rabi_e_hz = 0.5e6;
        p.tau_e_init_s = 5e-6;
        p.tau_ee_attempt_s = 10e-6;
        p.tau_e_ss_s = 10e-6;
        p.tau_mw_emit_s = 1e-6;
        p.tau_mw_abs_s = 1e-6;
        p.tau_cen_override_s = 10e-6;
        p.geometric_cne = true;
        return p;
    }
    static TimingParamSet case_b() {
        TimingParamSet p;
        p.label = "B";
        p.hyperfine_a_hz = 100e6;
        p.rabi_e_hz = 10e6;
        p.rabi_n_hz = 0.4e6;
        p.tau_e_init_s = 5e-6;
        p.tau_ee_attempt_s = 10e-6;
        p.tau_e_ss_s = 10e-6;
        p.tau_mw_emit_s = 1e-6;
        p.tau_mw_abs_s = 1e-6;
        return p;
    }
    static TimingParamSet case_c() {
        TimingParamSet p = case_b();
        p.label = "C";
        p.rabi_e_hz = 100e6;
        p.rabi_n_hz = 4e6;
        return p;
    }
};

struct DerivedTiming {
    double tau_pi2_e_s = 0.0;     // electron pi/2 pulse
    double tau_cen_s = 0.0;       // electron-controlled nuclear NOT
    double tau_cne_s = 0.0;       // nuclear-controlled electron NOT
    double tau_n_init_s = 0.0;
    double tau_n_swap_s = 0.0;
    double tau_init_total_s = 0.0;
    double tau_bsm_s = 0.0;
};

// Pi-pulse gate times from the drive Rabi frequencies, plus the composite
// sequence durations built from them. The Bell-measurement sequence is
// C_eNOT_n, electron pi/2, C_nNOT_e, then single-shot readout of both spins.
inline DerivedTiming derive_gate_times(const TimingParamSet& p) {
    p.validate();
    DerivedTiming d;
    d.tau_pi2_e_s = 1.0 / (4.0 * p.rabi_e_hz);
    if (p.tau_cen_override_s) {
        d.tau_cen_s = *p.tau_cen_override_s;
    } else if (p.rabi_n_hz) {
        d.tau_cen_s = 1.0 / (2.0 * *p.rabi_n_hz);
    } else {
        throw ConfigError("timing '" + p.label +
                          "': nuclear Rabi frequency required unless a C_eNOT_n "
                          "override is given");
    }
    d.tau_cne_s = p.geometric_cne ? 1.0 / p.rabi_e_hz : 1.0 / (2.0 * p.rabi_e_hz);
    d.tau_n_init_s = d.tau_cen_s + d.tau_cne_s + p.tau_e_init_s;
    d.tau_n_swap_s = d.tau_cen_s + d.tau_cne_s;
    d.tau_init_total_s = p.tau_e_init_s + d.tau_n_init_s;
    d.tau_bsm_s = d.tau_cen_s + d.tau_pi2_e_s + d.tau_cne_s + 2.0 * p.tau_e_ss_s;
    return d;
}

struct EfficiencySet {
    double eta_e_opt = 1.0;  // optical detection chain of the spin photon
    double eta_sc_mw = 1.0;  // microwave emission/absorption, superconductor side
    double eta_e_mw = 1.0;   // microwave emission/absorption, spin side
    double eta_dc = 0.1;     // microwave-to-optical transducer efficiency
    double eta_loss_dc = 1.0;

    void validate() const {
        for (double e : {eta_e_opt, eta_sc_mw, eta_e_mw, eta_dc, eta_loss_dc})
            if (!(e >= 0.0 && e <= 1.0))
                throw ConfigError("efficiencies must lie in [0, 1]");
    }
};

// Heralded spin-spin rate: half the attempts produce a distinguishable Bell
// state, and both photons must survive the optical chain.
inline double rate_ee(double r_ee_hz, double eta_e_opt) {
    return 0.5 * r_ee_hz * eta_e_opt * eta_e_opt;
}

inline double rate_sc_e(double r_sce_hz, double eta_sc_mw, double eta_e_mw) {
    return r_sce_hz * eta_sc_mw * eta_e_mw;
}

// Expected number of synchronized rounds until two independent Bernoulli(p)
// processes have each succeeded: E[max(G1, G2)] = (3 - 2p) / (p (2 - p)).
inline double expected_max_geometric_attempts(double p) {
    if (!(p > 0.0 && p <= 1.0))
        throw NumericalError("attempt success probability must be in (0, 1]");
    return (3.0 - 2.0 * p) / (p * (2.0 - p));
}

// Same expectation evaluated as the explicit series
//   p^2 + sum_i (i+2) p^2 q^{i+1} [ q^{i+1} + 2 sum_{j<=i} q^j ],  q = 1-p,
// i.e. sum over k of k * P(max = k). Truncated when the analytic tail bound
// drops below rel_tol of the partial sum.
inline double expected_max_geometric_attempts_series(double p,
                                                     double rel_tol = 1e-12) {
    if (!(p > 0.0 && p <= 1.0))
        throw NumericalError("attempt success probability must be in (0, 1]");
    const double q = 1.0 - p;
    double sum = p * p; // both succeed on the first round
    if (q == 0.0) return sum;

    double q_pow = q; // q^{i+1}
    for (std::uint64_t i = 0;; ++i) {
        const double attempts = static_cast<double>(i) + 2.0;
        const double geom_partial = (1.0 - q_pow) / p; // sum_{j<=i} q^j
        sum += attempts * p * p * q_pow * (q_pow + 2.0 * geom_partial);
        q_pow *= q;
        // Tail bound: term_k <= (k+2) p^2 q^{k+1} (1 + 2/p); summed for k > i
        // this is p^2 (1+2/p) q^{i+2} [ (i+3)/p + q/p^2 ].
        const double tail = p * p * (1.0 + 2.0 / p) * q_pow *
                            ((attempts + 1.0) / p + q / (p * p));
        if (tail < rel_tol * sum) break;
        if (i > 100000000ULL)
            throw NumericalError("attempt-count series failed to converge");
    }
    return sum;
}

enum class TauScEMode { series, closed_form };

// Mean time to deliver spin-superconductor entanglement at both nodes, with
// per-round success probability p at each node and round rate r.
inline double tau_sc_e(double p_succ, double r_sce_hz,
                       TauScEMode mode = TauScEMode::closed_form) {
    if (!(p_succ > 0.0))
        throw NumericalError("tau_sc_e diverges: per-attempt success probability is 0");
    if (!(r_sce_hz > 0.0))
        throw ConfigError("attempt rate must be > 0");
    const double attempts = mode == TauScEMode::series
                                ? expected_max_geometric_attempts_series(p_succ)
                                : expected_max_geometric_attempts(p_succ);
    return attempts / r_sce_hz;
}

// End-to-end rate of the memory-based scheme: initialization, heralded
// spin-spin entanglement, swap onto the nuclear spins, spin-superconductor
// delivery at both nodes, Bell measurement.
inline double rate_sc_sc_mem(const DerivedTiming& t, const EfficiencySet& e,
                             double r_ee_hz, double r_sce_hz) {
    e.validate();
    const double r_ee = rate_ee(r_ee_hz, e.eta_e_opt);
    if (!(r_ee > 0.0))
        throw NumericalError("memory-scheme rate diverges: spin-spin rate is 0");
    const double p_sce = e.eta_sc_mw * e.eta_e_mw;
    const double t_sce = tau_sc_e(p_sce, r_sce_hz);
    const double cycle = t.tau_init_total_s + 1.0 / r_ee + t.tau_n_swap_s +
                         t_sce + t.tau_bsm_s;
    return 1.0 / cycle;
}

// Rate with spin-spin preparation fully hidden behind the Bell measurement
// of a parallel memory; only delivery and measurement remain on the path.
inline double parallel_memory_rate(const DerivedTiming& t,
                                   const EfficiencySet& e, double r_sce_hz) {
    e.validate();
    const double p_sce = e.eta_sc_mw * e.eta_e_mw;
    const double t_sce = tau_sc_e(p_sce, r_sce_hz);
    return 1.0 / (t_sce + t.tau_bsm_s);
}

// Direct microwave-to-optical conversion scheme.
inline double rate_dc(double r_scsc_hz, double eta_dc, double eta_loss_dc) {
    return 0.5 * r_scsc_hz * (eta_dc * eta_dc) * (eta_loss_dc * eta_loss_dc);
}

struct SchemeRateRow {
    double eta = 0.0;         // eta_e_mw for "memory", eta_dc for "dc"
    std::string scheme;       // "memory" or "dc"
    std::string case_label;   // timing case for memory rows, "-" for dc
    double rate_hz = 0.0;
};

struct CrossoverRow {
    std::string case_label;
    double eta = 0.0;
    double mem_rate_hz = 0.0;
    double dc_rate_hz = 0.0;
    std::string winner; // "memory", "dc", or "degenerate"
};

struct ComparisonTable {
    std::vector<SchemeRateRow> rows;
    std::vector<CrossoverRow> crossover;
};

// Memory-scheme rate as a function of eta_e_mw per timing case, the direct
// conversion rate as a function of eta_dc, and a head-to-head winner at
// matched efficiency. Other efficiencies are held at 1.
inline ComparisonTable crossover_table(const std::vector<TimingParamSet>& cases,
                                       const std::vector<double>& eta_grid,
                                       const std::vector<double>& dc_grid,
                                       double r_ee_hz, double r_sce_hz,
                                       double r_scsc_hz) {
    if (eta_grid.empty() || dc_grid.empty())
        throw ConfigError("comparison grids must be non-empty");
    ComparisonTable table;
    auto mem_rate_at = [&](const DerivedTiming& t, double eta) {
        if (eta <= 0.0) return 0.0;
        EfficiencySet e;
        e.eta_e_mw = eta;
        return rate_sc_sc_mem(t, e, r_ee_hz, r_sce_hz);
    };
    for (const auto& c : cases) {
        const DerivedTiming t = derive_gate_times(c);
        for (double eta : eta_grid)
            table.rows.push_back({eta, "memory", c.label, mem_rate_at(t, eta)});
        for (double eta : eta_grid) {
            const double mem = mem_rate_at(t, eta);
            const double dc = rate_dc(r_scsc_hz, eta, 1.0);
            std::string winner = mem > dc ? "memory" : "dc";
            if (mem == 0.0 && dc == 0.0) winner = "degenerate";
            table.crossover.push_back({c.label, eta, mem, dc, winner});
        }
    }
    for (double eta : dc_grid)
        table.rows.push_back({eta, "dc", "-", rate_dc(r_scsc_hz, eta, 1.0)});
    return table;
}

} // namespace spinlink
