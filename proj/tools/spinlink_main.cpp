// Command-line front end: loads one JSON config (or the built-in defaults),
// dispatches the subcommand, writes CSV/JSON artifacts into the output
// directory and prints a one-line summary. Exit codes: 0 success, 2 config
// error, 3 numerical error, 4 I/O error.

#include <clocale>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spinlink/config.hpp"
#include "spinlink/csv.hpp"
#include "spinlink/errors.hpp"
#include "spinlink/heralding.hpp"
#include "spinlink/lindblad.hpp"
#include "spinlink/numformat.hpp"
#include "spinlink/protocol_mc.hpp"
#include "spinlink/rates.hpp"
#include "spinlink/spin_levels.hpp"
#include "spinlink/thermal.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace spinlink;

namespace {

struct GlobalArgs {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
};

fs::path resolve_out_dir(const GlobalArgs& g) {
    if (!g.out_dir.empty()) return g.out_dir;
    if (const char* env = std::getenv("SPINLINK_OUT")) return env;
    return ".";
}

RunConfig load_config(const GlobalArgs& g) {
    RunConfig cfg = g.config_path.empty() ? RunConfig::defaults()
                                          : RunConfig::load(g.config_path);
    if (g.seed) cfg.mc.seed = *g.seed;
    return cfg;
}

fs::path prepare_out(const GlobalArgs& g) {
    fs::path dir = resolve_out_dir(g);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec && !fs::is_directory(dir))
        throw IoError("cannot create output directory '" + dir.string() + "'");
    return dir;
}

void write_json_file(const fs::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failure on '" + path.string() + "'");
}

std::string khz(double rate_hz) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", rate_hz / 1e3);
    return std::string(buf) + " kHz";
}

std::vector<std::string> case_list(const RunConfig& cfg, const std::string& sel) {
    if (sel != "all") return {sel};
    std::vector<std::string> labels;
    for (const auto& [label, t] : cfg.timing_cases) labels.push_back(label);
    return labels;
}

int run_transfer(const RunConfig& cfg, const fs::path& out) {
    EvolveOptions opt;
    opt.frame = cfg.evolution.frame;
    opt.store_stride = cfg.evolution.store_stride;
    const Trajectory traj =
        evolve(single_photon_initial_state(cfg.tripartite), cfg.tripartite,
               cfg.evolution.t_end_s, cfg.evolution.dt_s, opt);
    const SpinPopulationPeak peak = max_spin_population(traj);

    CsvFile csv(out / "transfer_trajectory.csv", {"t_s", "pop_mw", "pop_m", "pop_e"});
    for (std::size_t i = 0; i < traj.t_s.size(); ++i)
        csv.row_values({traj.t_s[i], traj.pop_mw[i], traj.pop_m[i], traj.pop_e[i]});

    json meta;
    meta["frame"] = cfg.evolution.frame == Frame::lab ? "lab" : "rotating";
    meta["integrator"] = "fixed-step RK4";
    meta["spin_dissipator"] =
        "number-operator dephasing at rate gamma_e in the (gamma/2)(2 c rho "
        "c+ - {c+ c, rho}) form";
    meta["basis_order"] = "microwave mode (x) mechanical mode (x) spin";
    meta["units"] = "cyclic Hz in, seconds out";
    meta["max_pop_e"] = peak.eta_e_mw;
    meta["t_peak_s"] = peak.t_peak_s;
    write_json_file(out / "transfer_meta.json", meta);

    std::cout << "transfer: max spin population " << format_sig12(peak.eta_e_mw)
              << " at t = " << format_sig12(peak.t_peak_s * 1e9)
              << " ns -> transfer_trajectory.csv\n";
    return 0;
}

int run_sweep_transfer(const RunConfig& cfg, const fs::path& out, unsigned threads) {
    const auto g_grid = log_grid(cfg.sweep.g_min_hz, cfg.sweep.g_max_hz,
                                 cfg.sweep.g_points);
    const auto q_grid = log_grid(cfg.sweep.q_min, cfg.sweep.q_max,
                                 cfg.sweep.q_points);
    SweepOptions opt;
    opt.dt = cfg.evolution.dt_s;
    opt.t_end_base = cfg.evolution.t_end_s;
    opt.threads = threads;
    const SweepGrid grid = sweep_transfer(g_grid, q_grid, cfg.tripartite, opt);

    CsvFile csv(out / "transfer_sweep.csv", {"g_hz", "q_mw", "eta_e_mw"});
    for (const auto& pt : grid.points)
        csv.row_values({pt.g_hz, pt.q_mw, pt.eta_e_mw});
    std::cout << "sweep-transfer: " << g_grid.size() << "x" << q_grid.size()
              << " grid -> transfer_sweep.csv\n";
    return 0;
}

int run_rates(const RunConfig& cfg, const fs::path& out, const std::string& sel) {
    CsvFile csv(out / "rates_table.csv",
                {"case", "hyperfine_a_hz", "rabi_e_hz", "rabi_n_hz",
                 "tau_e_init_s", "tau_ee_attempt_s", "tau_e_ss_s",
                 "tau_mw_emit_s", "tau_mw_abs_s", "tau_pi2_e_s", "tau_cen_s",
                 "tau_cne_s", "tau_n_init_s", "tau_n_swap_s",
                 "tau_init_total_s", "tau_bsm_s", "tau_sc_e_s", "r_ee_hz",
                 "r_sc_sc_mem_hz", "r_parallel_hz"});
    std::string summary;
    for (const std::string& label : case_list(cfg, sel)) {
        const TimingParamSet& t = cfg.timing_case(label);
        const DerivedTiming d = derive_gate_times(t);
        const double p_sce = cfg.efficiencies.eta_sc_mw * cfg.efficiencies.eta_e_mw;
        const double t_sce = tau_sc_e(p_sce, cfg.attempt_rates.r_sce_hz);
        const double r_ee_val = rate_ee(cfg.attempt_rates.r_ee_hz,
                                        cfg.efficiencies.eta_e_opt);
        const double r_mem = rate_sc_sc_mem(d, cfg.efficiencies,
                                            cfg.attempt_rates.r_ee_hz,
                                            cfg.attempt_rates.r_sce_hz);
        const double r_par = parallel_memory_rate(d, cfg.efficiencies,
                                                  cfg.attempt_rates.r_sce_hz);
        csv.row({label, format_sig12(t.hyperfine_a_hz), format_sig12(t.rabi_e_hz),
                 t.rabi_n_hz ? format_sig12(*t.rabi_n_hz) : "",
                 format_sig12(t.tau_e_init_s), format_sig12(t.tau_ee_attempt_s),
                 format_sig12(t.tau_e_ss_s), format_sig12(t.tau_mw_emit_s),
                 format_sig12(t.tau_mw_abs_s), format_sig12(d.tau_pi2_e_s),
                 format_sig12(d.tau_cen_s), format_sig12(d.tau_cne_s),
                 format_sig12(d.tau_n_init_s), format_sig12(d.tau_n_swap_s),
                 format_sig12(d.tau_init_total_s), format_sig12(d.tau_bsm_s),
                 format_sig12(t_sce), format_sig12(r_ee_val),
                 format_sig12(r_mem), format_sig12(r_par)});
        if (!summary.empty()) summary += "; ";
        summary += "case " + label + ": " + khz(r_mem);
    }
    std::cout << "rates: " << summary << " -> rates_table.csv\n";
    return 0;
}

int run_compare(const RunConfig& cfg, const fs::path& out) {
    std::vector<TimingParamSet> cases;
    for (const auto& [label, t] : cfg.timing_cases) cases.push_back(t);
    const auto eta_grid = log_grid(cfg.compare.eta_min, cfg.compare.eta_max,
                                   cfg.compare.eta_points);
    const ComparisonTable table =
        crossover_table(cases, eta_grid, eta_grid, cfg.attempt_rates.r_ee_hz,
                        cfg.attempt_rates.r_sce_hz, cfg.attempt_rates.r_scsc_hz);

    CsvFile csv(out / "scheme_compare.csv", {"eta", "scheme", "case", "rate_hz"});
    for (const auto& row : table.rows)
        csv.row({format_sig12(row.eta), row.scheme, row.case_label,
                 format_sig12(row.rate_hz)});
    CsvFile cross(out / "scheme_crossover.csv",
                  {"case", "eta", "mem_rate_hz", "dc_rate_hz", "winner"});
    std::size_t memory_wins = 0;
    for (const auto& row : table.crossover) {
        cross.row({row.case_label, format_sig12(row.eta),
                   format_sig12(row.mem_rate_hz), format_sig12(row.dc_rate_hz),
                   row.winner});
        if (row.winner == "memory") ++memory_wins;
    }
    std::cout << "compare: memory scheme wins " << memory_wins << "/"
              << table.crossover.size()
              << " matched efficiencies -> scheme_compare.csv\n";
    return 0;
}

int run_protocol_mc(const RunConfig& cfg, const fs::path& out,
                    const std::string& case_label, bool parallel,
                    unsigned threads) {
    ProtocolConfig pc = cfg.protocol_config(case_label);
    const McResult res =
        parallel ? simulate_parallel(pc) : simulate_protocol(pc, threads);

    json j;
    j["case"] = case_label;
    j["mode"] = parallel ? "parallel" : "serial";
    j["parallel_memories"] = res.parallel_memories;
    j["n_trials"] = res.n_trials;
    j["seed"] = pc.rng_seed;
    j["rng"] = res.rng_algorithm;
    j["efficiencies"] = {{"eta_e_opt", pc.efficiencies.eta_e_opt},
                         {"eta_sc_mw", pc.efficiencies.eta_sc_mw},
                         {"eta_e_mw", pc.efficiencies.eta_e_mw}};
    j["mean_cycle_time_s"] = res.mean_cycle_time_s;
    j["mean_cycle_stderr_s"] = res.mean_cycle_stderr_s;
    j["rate_hz"] = res.rate_hz;
    j["rate_stderr_hz"] = res.rate_stderr_hz;
    j["phase_breakdown_s"] = {{"init", res.breakdown.init_s},
                              {"ee", res.breakdown.ee_s},
                              {"swap", res.breakdown.swap_s},
                              {"sce", res.breakdown.sce_s},
                              {"bsm", res.breakdown.bsm_s}};
    write_json_file(out / "protocol_mc.json", j);

    auto dump_hist = [&](const Histogram& h, const std::string& name) {
        CsvFile csv(out / ("protocol_mc_hist_" + name + ".csv"),
                    {"attempts", "count"});
        for (std::size_t i = 0; i < h.counts.size(); ++i)
            if (h.counts[i])
                csv.row({format_u64(i + 1), format_u64(h.counts[i])});
    };
    dump_hist(res.ee_attempts, "ee");
    dump_hist(res.sce_attempts_node_a, "sce_node_a");
    dump_hist(res.sce_attempts_node_b, "sce_node_b");
    dump_hist(res.sce_attempts_max, "sce_max");

    std::cout << "protocol-mc (" << j["mode"].get<std::string>() << ", case "
              << case_label << "): rate " << khz(res.rate_hz) << " +- "
              << khz(res.rate_stderr_hz) << " -> protocol_mc.json\n";
    return 0;
}

int run_herald(const RunConfig& cfg, const fs::path& out) {
    CsvFile csv(out / "herald.csv",
                {"theta_rad", "protocol", "fidelity", "p_herald"});
    const int n = cfg.herald.theta_points;
    for (int i = 0; i < n; ++i) {
        const double theta = kTwoPi * double(i) / double(n);
        const HeraldedOutcome single = run_single_photon_protocol(theta);
        // Detector A and B herald with equal probability and mirrored sign.
        csv.row({format_sig12(theta), "single_photon",
                 format_sig12(bell_fidelity(*single.post_state, +1)),
                 format_sig12(2.0 * single.probability)});
        const auto both_rounds = run_two_photon_all_patterns(theta);
        double p_herald = 0.0, fid_min = 1.0;
        for (const auto& t : both_rounds) {
            p_herald += t.probability;
            fid_min = std::min(fid_min, bell_fidelity(t.post_state, t.bell_sign));
        }
        csv.row({format_sig12(theta), "two_photon", format_sig12(fid_min),
                 format_sig12(p_herald)});
    }
    std::cout << "herald: " << n << " phases x 2 protocols -> herald.csv\n";
    return 0;
}

int run_heat(const RunConfig& cfg, const fs::path& out) {
    const HeatReport r = heat_budget(cfg.heat);
    json j;
    j["b_field_t"] = r.b_field_t;
    j["current_a"] = r.current_a;
    j["input_power_rms_w"] = r.input_power_rms_w;
    j["input_power_amplitude_w"] = r.input_power_amplitude_w;
    j["drive_power_w"] = r.drive_power_w;
    j["dissipated_drive_w"] = r.dissipated_drive_w;
    j["contact_dissipation_w"] = r.contact_dissipation_w;
    j["optical_power_w"] = r.optical_power_w;
    j["total_heat_w"] = r.total_heat_w;
    j["cooling_power_w"] = r.cooling_power_w;
    j["cooling_margin"] = r.cooling_margin;
    json comps = json::array();
    for (const auto& c : r.comparisons)
        comps.push_back({{"scheme", c.scheme},
                         {"heat_w", c.heat_w},
                         {"rate_lo_hz", c.rate_lo_hz},
                         {"rate_hi_hz", c.rate_hi_hz},
                         {"heat_ratio", c.heat_ratio}});
    j["comparisons"] = comps;
    write_json_file(out / "heat_report.json", j);
    std::cout << "heat: total " << format_sig12(r.total_heat_w * 1e9)
              << " nW, cooling margin " << format_sig12(r.cooling_margin)
              << "x -> heat_report.json\n";
    return 0;
}

int run_levels(const RunConfig& cfg, const fs::path& out) {
    const Nv0Levels lv = nv0_levels(cfg.nv0);
    const MixingResult mix = orbital_mixing(cfg.nv0);
    CsvFile csv(out / "nv0_levels.csv",
                {"eigenvalue_hz", "orbit_character", "spin_character"});
    for (int i = 0; i < 4; ++i)
        csv.row({format_sig12(lv.eigenvalues_hz(i)), lv.orbit_character[i],
                 lv.spin_character[i]});
    std::cout << "levels: basis (orbit +/-) (x) (spin up/down); mixing angle "
              << format_sig12(mix.angle_rad) << " rad (" << to_string(mix.regime)
              << ") -> nv0_levels.csv\n";
    return 0;
}

int run_efficiency(const RunConfig& cfg, const fs::path& out) {
    const EfficiencyBreakdown b = transmission_efficiency(cfg.optical_chain);
    CsvFile csv(out / "efficiency.csv",
                {"c_opt_coh", "eta_int", "eta_coupling", "eta_loss", "eta_det",
                 "eta_e_opt"});
    csv.row_values({b.cooperativity, b.eta_int, b.eta_coupling, b.eta_loss,
                    b.eta_det, b.eta_e_opt});
    std::cout << "efficiency: eta_e_opt = " << format_sig12(b.eta_e_opt)
              << " -> efficiency.csv\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_ALL, "C");
    CLI::App app{"spinlink: entanglement-rate and heat-budget toolkit for "
                 "spin-memory microwave/optical interfaces"};
    app.require_subcommand(1);

    GlobalArgs g;
    app.add_option("--config", g.config_path, "JSON config file (defaults used if absent)");
    app.add_option("--out", g.out_dir, "output directory (default: $SPINLINK_OUT or .)");
    std::uint64_t seed_flag = 0;
    auto* seed_opt = app.add_option("--seed", seed_flag, "override RNG seed");
    app.add_option("--threads", g.threads, "worker threads (0 = all cores)");

    auto* transfer = app.add_subcommand("transfer", "single photon-to-spin transfer trajectory");
    auto* sweep = app.add_subcommand("sweep-transfer", "transfer efficiency over (g, Q) grid");
    auto* rates_cmd = app.add_subcommand("rates", "derived gate times and scheme rates");
    auto* compare = app.add_subcommand("compare", "memory vs direct-conversion rates");
    auto* mc = app.add_subcommand("protocol-mc", "Monte-Carlo protocol simulation");
    auto* herald = app.add_subcommand("herald", "heralded-entanglement fidelity vs path phase");
    auto* heat = app.add_subcommand("heat", "in-refrigerator heat budget");
    auto* levels = app.add_subcommand("levels", "color-center ground-state levels");
    auto* efficiency = app.add_subcommand("efficiency", "optical transmission chain");

    std::string rates_case = "all";
    rates_cmd->add_option("--case", rates_case, "timing case label or 'all'");

    std::string mc_case = "B";
    bool mc_parallel = false;
    std::uint64_t mc_trials = 0;
    double mc_eta_e_mw = -1.0;
    int mc_parallel_memories = 0;
    mc->add_option("--case", mc_case, "timing case label");
    mc->add_flag("--parallel", mc_parallel, "pipelined multi-memory mode");
    mc->add_option("--trials", mc_trials, "number of Monte-Carlo trials");
    mc->add_option("--eta-e-mw", mc_eta_e_mw, "override spin-side microwave efficiency");
    mc->add_option("--parallel-memories", mc_parallel_memories,
                   "memories in the pipelined mode (>= 2)");

    double heat_drive_power = -1.0, heat_duty = -1.0, heat_rabi = -1.0;
    heat->add_option("--drive-power", heat_drive_power, "drive power at the cold plate (W)");
    heat->add_option("--duty", heat_duty, "drive duty cycle");
    heat->add_option("--rabi", heat_rabi, "target Rabi frequency (Hz)");

    double transfer_t_end = -1.0, transfer_dt = -1.0;
    transfer->add_option("--t-end", transfer_t_end, "integration horizon (s)");
    transfer->add_option("--dt", transfer_dt, "integration step (s)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfigError;
    }

    try {
        if (!seed_opt->empty()) g.seed = seed_flag;
        RunConfig cfg = load_config(g);

        if (*transfer) {
            if (transfer_t_end > 0) cfg.evolution.t_end_s = transfer_t_end;
            if (transfer_dt > 0) cfg.evolution.dt_s = transfer_dt;
        }
        if (*mc) {
            if (mc_trials > 0) cfg.mc.n_trials = mc_trials;
            if (mc_eta_e_mw >= 0) cfg.efficiencies.eta_e_mw = mc_eta_e_mw;
            if (mc_parallel_memories > 0)
                cfg.mc.parallel_memories = mc_parallel_memories;
        }
        if (*heat) {
            if (heat_drive_power > 0) cfg.heat.drive_power_w = heat_drive_power;
            if (heat_duty >= 0) cfg.heat.duty_cycle = heat_duty;
            if (heat_rabi > 0) cfg.heat.rabi_target_hz = heat_rabi;
        }
        cfg.validate();
        const fs::path out = prepare_out(g);

        if (*transfer) return run_transfer(cfg, out);
        if (*sweep) return run_sweep_transfer(cfg, out, g.threads);
        if (*rates_cmd) return run_rates(cfg, out, rates_case);
        if (*compare) return run_compare(cfg, out);
        if (*mc) return run_protocol_mc(cfg, out, mc_case, mc_parallel, g.threads);
        if (*herald) return run_herald(cfg, out);
        if (*heat) return run_heat(cfg, out);
        if (*levels) return run_levels(cfg, out);
        if (*efficiency) return run_efficiency(cfg, out);
        throw ConfigError("no subcommand selected");
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kExitNumericalError;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kExitIoError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumericalError;
    }
}
