#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "spinlink/rates.hpp"

using namespace spinlink;
using Catch::Approx;

TEST_CASE("derived gate times, case B") {
    const DerivedTiming d = derive_gate_times(TimingParamSet::case_b());
    CHECK(d.tau_pi2_e_s == Approx(0.025e-6).epsilon(1e-12));
    CHECK(d.tau_cen_s == Approx(1.25e-6).epsilon(1e-12));
    CHECK(d.tau_cne_s == Approx(0.05e-6).epsilon(1e-12));
    CHECK(d.tau_n_init_s == Approx(6.3e-6).epsilon(1e-12));
    CHECK(d.tau_n_swap_s == Approx(1.3e-6).epsilon(1e-12));
    CHECK(d.tau_init_total_s == Approx(11.3e-6).epsilon(1e-12));
    CHECK(d.tau_bsm_s == Approx(21.325e-6).epsilon(1e-12));
}

TEST_CASE("derived gate times, case A uses override and geometric gate") {
    const DerivedTiming d = derive_gate_times(TimingParamSet::case_a());
    CHECK(d.tau_pi2_e_s == Approx(0.5e-6).epsilon(1e-12));
    CHECK(d.tau_cen_s == Approx(10e-6).epsilon(1e-12));
    CHECK(d.tau_cne_s == Approx(2e-6).epsilon(1e-12));
    CHECK(d.tau_n_init_s == Approx(17e-6).epsilon(1e-12));
    CHECK(d.tau_n_swap_s == Approx(12e-6).epsilon(1e-12));
    CHECK(d.tau_bsm_s == Approx(32.5e-6).epsilon(1e-12));
}

TEST_CASE("derived gate times, case C") {
    const DerivedTiming d = derive_gate_times(TimingParamSet::case_c());
    CHECK(d.tau_pi2_e_s == Approx(0.0025e-6).epsilon(1e-12));
    CHECK(d.tau_cen_s == Approx(0.125e-6).epsilon(1e-12));
    CHECK(d.tau_cne_s == Approx(0.005e-6).epsilon(1e-12));
    CHECK(d.tau_n_init_s == Approx(5.13e-6).epsilon(1e-12));
    CHECK(d.tau_n_swap_s == Approx(0.13e-6).epsilon(1e-12));
}

TEST_CASE("derivation is idempotent and matches printed reference precision") {
    for (const auto& t : {TimingParamSet::case_a(), TimingParamSet::case_b(),
                          TimingParamSet::case_c()}) {
        const DerivedTiming d1 = derive_gate_times(t);
        const DerivedTiming d2 = derive_gate_times(t);
        CHECK(d1.tau_n_init_s == d2.tau_n_init_s);
        CHECK(d1.tau_bsm_s == d2.tau_bsm_s);
    }
    // Values rounded the way the reference table prints them.
    auto us2 = [](double s) { return std::round(s * 1e6 * 100.0) / 100.0; };
    CHECK(us2(derive_gate_times(TimingParamSet::case_b()).tau_n_init_s) == 6.3);
    CHECK(us2(derive_gate_times(TimingParamSet::case_c()).tau_n_init_s) == 5.13);
    CHECK(us2(derive_gate_times(TimingParamSet::case_a()).tau_n_swap_s) == 12.0);
}

TEST_CASE("missing nuclear Rabi frequency without override is rejected") {
    TimingParamSet t = TimingParamSet::case_b();
    t.rabi_n_hz.reset();
    CHECK_THROWS_AS(derive_gate_times(t), ConfigError);
    t.tau_cen_override_s = 1e-6;
    CHECK_NOTHROW(derive_gate_times(t));
}

TEST_CASE("spin-spin rate") {
    CHECK(rate_ee(100e3, 1.0) == Approx(50e3).epsilon(1e-12));
    CHECK(rate_ee(100e3, 0.0) == 0.0);
    CHECK(rate_ee(100e3, 0.9) == Approx(40.5e3).epsilon(1e-12));
}

TEST_CASE("spin-superconductor rate") {
    CHECK(rate_sc_e(500e3, 1.0, 0.1) == Approx(50e3).epsilon(1e-12));
    CHECK(rate_sc_e(500e3, 1.0, 0.02) == Approx(10e3).epsilon(1e-12));
    CHECK(rate_sc_e(500e3, 0.9, 0.1) == Approx(45e3).epsilon(1e-12));
}

TEST_CASE("expected delivery time: closed form") {
    CHECK(tau_sc_e(1.0, 500e3) == Approx(2e-6).epsilon(1e-12));
    CHECK(tau_sc_e(0.1, 500e3) == Approx(2.9473684210526316e-5).epsilon(1e-12));
    CHECK(tau_sc_e(0.5, 500e3) == Approx(5.333333333333333e-6).epsilon(1e-12));
    CHECK_THROWS_AS(tau_sc_e(0.0, 500e3), NumericalError);
}

TEST_CASE("expected delivery time: series agrees with closed form") {
    for (double p : {0.01, 0.05, 0.1, 0.3, 0.5, 0.9, 1.0}) {
        const double series = expected_max_geometric_attempts_series(p);
        const double closed = expected_max_geometric_attempts(p);
        CHECK(series == Approx(closed).epsilon(1e-9));
        CHECK(tau_sc_e(p, 500e3, TauScEMode::series) ==
              Approx(tau_sc_e(p, 500e3, TauScEMode::closed_form)).epsilon(1e-9));
    }
}

TEST_CASE("memory-scheme rate reproduces the reference table") {
    EfficiencySet unit;
    struct Row {
        TimingParamSet t;
        double printed_khz;
    };
    for (const Row& row : {Row{TimingParamSet::case_a(), 11.0},
                           Row{TimingParamSet::case_b(), 18.0},
                           Row{TimingParamSet::case_c(), 19.0}}) {
        const double r = rate_sc_sc_mem(derive_gate_times(row.t), unit, 100e3, 500e3);
        CHECK(std::round(r / 1e3) == row.printed_khz);
    }
    // Exact denominators assembled from the frozen gate times.
    const double r_b = rate_sc_sc_mem(derive_gate_times(TimingParamSet::case_b()),
                                      unit, 100e3, 500e3);
    CHECK(r_b == Approx(1.0 / 55.925e-6).epsilon(1e-12));
    const double r_a = rate_sc_sc_mem(derive_gate_times(TimingParamSet::case_a()),
                                      unit, 100e3, 500e3);
    CHECK(r_a == Approx(1.0 / 88.5e-6).epsilon(1e-12));
}

TEST_CASE("memory-scheme rate diverges without a spin-spin channel") {
    EfficiencySet e;
    e.eta_e_opt = 0.0;
    CHECK_THROWS_AS(rate_sc_sc_mem(derive_gate_times(TimingParamSet::case_b()), e,
                                   100e3, 500e3),
                    NumericalError);
}

TEST_CASE("memory-scheme rate is monotone in efficiencies and times") {
    const DerivedTiming d = derive_gate_times(TimingParamSet::case_b());
    EfficiencySet base;
    const double r0 = rate_sc_sc_mem(d, base, 100e3, 500e3);
    for (double eta : {0.9, 0.5, 0.2}) {
        EfficiencySet e;
        e.eta_e_mw = eta;
        CHECK(rate_sc_sc_mem(d, e, 100e3, 500e3) <= r0);
        e = EfficiencySet{};
        e.eta_e_opt = eta;
        CHECK(rate_sc_sc_mem(d, e, 100e3, 500e3) <= r0);
    }
    DerivedTiming slower = d;
    slower.tau_bsm_s *= 2.0;
    CHECK(rate_sc_sc_mem(slower, base, 100e3, 500e3) < r0);
}

TEST_CASE("memory-scheme rate is scale invariant") {
    const double k = 3.7;
    DerivedTiming d = derive_gate_times(TimingParamSet::case_b());
    DerivedTiming scaled = d;
    scaled.tau_init_total_s *= k;
    scaled.tau_n_swap_s *= k;
    scaled.tau_bsm_s *= k;
    EfficiencySet e;
    e.eta_e_mw = 0.3;
    const double r = rate_sc_sc_mem(d, e, 100e3, 500e3);
    const double r_scaled = rate_sc_sc_mem(scaled, e, 100e3 / k, 500e3 / k);
    CHECK(r_scaled == Approx(r / k).epsilon(1e-12));
}

TEST_CASE("direct-conversion rate") {
    CHECK(rate_dc(1e6, 0.1, 1.0) == Approx(5e3).epsilon(1e-12));
    CHECK(rate_dc(1e6, 0.0, 1.0) == 0.0);
    CHECK(rate_dc(1e6, 1.0, 1.0) == Approx(500e3).epsilon(1e-12));
    // Quadratic in the conversion efficiency.
    CHECK(rate_dc(1e6, 0.2, 0.7) / rate_dc(1e6, 0.1, 0.7) == Approx(4.0).epsilon(1e-12));
}

TEST_CASE("parallel-memory delivery-limited rate") {
    EfficiencySet unit;
    const double r_b = parallel_memory_rate(
        derive_gate_times(TimingParamSet::case_b()), unit, 500e3);
    CHECK(r_b == Approx(1.0 / 23.325e-6).epsilon(1e-12)); // ~43 kHz
    CHECK(r_b > 40e3);
    CHECK(r_b < 47e3);
    const double r_c = parallel_memory_rate(
        derive_gate_times(TimingParamSet::case_c()), unit, 500e3);
    CHECK(r_c == Approx(1.0 / 22.1325e-6).epsilon(1e-12)); // ~45 kHz
    // Diverging measurement time kills the rate.
    DerivedTiming slow = derive_gate_times(TimingParamSet::case_b());
    slow.tau_bsm_s = 1e6;
    CHECK(parallel_memory_rate(slow, unit, 500e3) < 1e-5);
}

TEST_CASE("crossover table matches the head-to-head points") {
    const std::vector<TimingParamSet> cases = {TimingParamSet::case_b()};
    const ComparisonTable table =
        crossover_table(cases, {0.1, 1.0}, {0.1, 1.0}, 100e3, 500e3, 1e6);

    REQUIRE(table.crossover.size() == 2);
    const CrossoverRow& at_01 = table.crossover[0];
    CHECK(at_01.eta == 0.1);
    CHECK(at_01.mem_rate_hz == Approx(11990.6).epsilon(1e-3));
    CHECK(at_01.dc_rate_hz == Approx(5e3).epsilon(1e-12));
    CHECK(at_01.winner == "memory");

    const CrossoverRow& at_1 = table.crossover[1];
    CHECK(at_1.mem_rate_hz == Approx(1.0 / 55.925e-6).epsilon(1e-9));
    CHECK(at_1.dc_rate_hz == Approx(500e3).epsilon(1e-12));
    CHECK(at_1.winner == "dc");
}

TEST_CASE("crossover table flags the degenerate zero-efficiency point") {
    const std::vector<TimingParamSet> cases = {TimingParamSet::case_b()};
    const ComparisonTable table =
        crossover_table(cases, {0.0}, {0.0}, 100e3, 500e3, 1e6);
    REQUIRE(table.crossover.size() == 1);
    CHECK(table.crossover[0].mem_rate_hz == 0.0);
    CHECK(table.crossover[0].dc_rate_hz == 0.0);
    CHECK(table.crossover[0].winner == "degenerate");
}

TEST_CASE("timing validation rejects non-positive inputs") {
    TimingParamSet t = TimingParamSet::case_b();
    t.rabi_e_hz = 0.0;
    CHECK_THROWS_AS(t.validate(), ConfigError);
    t = TimingParamSet::case_b();
    t.tau_e_init_s = -1.0;
    CHECK_THROWS_AS(t.validate(), ConfigError);
    EfficiencySet e;
    e.eta_dc = 1.5;
    CHECK_THROWS_AS(e.validate(), ConfigError);
}
