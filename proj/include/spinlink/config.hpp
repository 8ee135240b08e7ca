#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinlink/errors.hpp"
#include "spinlink/lindblad.hpp"
#include "spinlink/protocol_mc.hpp"
#include "spinlink/rates.hpp"
#include "spinlink/spin_levels.hpp"
#include "spinlink/thermal.hpp"

namespace spinlink {

using nlohmann::json;

struct EvolutionSettings {
    double dt_s = 1e-9;
    double t_end_s = 2e-6;
    Frame frame = Frame::rotating;
    int store_stride = 1;
};

struct AttemptRates {
    double r_ee_hz = 100e3;
    double r_sce_hz = 500e3;
    double r_scsc_hz = 1e6;

    void validate() const {
        if (!(r_ee_hz > 0) || !(r_sce_hz > 0) || !(r_scsc_hz > 0))
            throw ConfigError("attempt rates must be > 0");
    }
};

struct SweepSettings {
    double g_min_hz = 0.1e6;
    double g_max_hz = 10e6;
    int g_points = 25;
    double q_min = 1e2;
    double q_max = 1e6;
    int q_points = 25;

    void validate() const {
        if (!(g_min_hz > 0) || !(g_max_hz >= g_min_hz) || g_points < 1 ||
            !(q_min > 0) || !(q_max >= q_min) || q_points < 1)
            throw ConfigError("invalid sweep grid specification");
    }
};

struct CompareSettings {
    double eta_min = 1e-3;
    double eta_max = 1.0;
    int eta_points = 25;

    void validate() const {
        if (!(eta_min > 0) || !(eta_max >= eta_min) || eta_points < 1)
            throw ConfigError("invalid comparison grid specification");
        if (eta_max > 1.0) throw ConfigError("comparison grid must stay within [0, 1]");
    }
};

struct HeraldSettings {
    int theta_points = 100;

    void validate() const {
        if (theta_points < 1) throw ConfigError("herald grid needs >= 1 point");
    }
};

struct McSettings {
    std::uint64_t n_trials = 100000;
    std::uint64_t seed = 1;
    int parallel_memories = 2;
    bool charge_n_init_per_failed_sce = false;
};

inline std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = lo;
        return v;
    }
    const double ratio = std::log(hi / lo) / double(n - 1);
    for (int i = 0; i < n; ++i) v[i] = lo * std::exp(ratio * i);
    v.back() = hi;
    return v;
}

// Full run configuration. Defaults reproduce the reference operating points
// of every subcommand with no user input.
struct RunConfig {
    TripartiteParams tripartite;
    EvolutionSettings evolution;
    std::map<std::string, TimingParamSet> timing_cases = {
        {"A", TimingParamSet::case_a()},
        {"B", TimingParamSet::case_b()},
        {"C", TimingParamSet::case_c()},
    };
    EfficiencySet efficiencies;
    AttemptRates attempt_rates;
    SweepSettings sweep;
    CompareSettings compare;
    HeraldSettings herald;
    HeatScenario heat;
    Nv0Params nv0;
    EfficiencyChain optical_chain;
    McSettings mc;

    void validate() const {
        tripartite.validate();
        if (!(evolution.dt_s > 0) || !(evolution.t_end_s >= evolution.dt_s) ||
            evolution.store_stride < 1)
            throw ConfigError("invalid evolution settings");
        if (timing_cases.empty()) throw ConfigError("no timing cases defined");
        for (const auto& [label, t] : timing_cases) {
            t.validate();
            if (t.label != label)
                throw ConfigError("timing case key '" + label +
                                  "' does not match its label");
        }
        efficiencies.validate();
        attempt_rates.validate();
        sweep.validate();
        compare.validate();
        herald.validate();
        heat.validate();
        nv0.validate();
        optical_chain.validate();
        if (mc.n_trials < 1) throw ConfigError("mc.n_trials must be >= 1");
        if (mc.parallel_memories < 1)
            throw ConfigError("mc.parallel_memories must be >= 1");
    }

    const TimingParamSet& timing_case(const std::string& label) const {
        auto it = timing_cases.find(label);
        if (it == timing_cases.end())
            throw ConfigError("unknown timing case '" + label + "'");
        return it->second;
    }

    ProtocolConfig protocol_config(const std::string& case_label) const {
        ProtocolConfig cfg = ProtocolConfig::for_case(timing_case(case_label));
        cfg.efficiencies = efficiencies;
        cfg.r_ee_attempt_hz = attempt_rates.r_ee_hz;
        cfg.r_sce_attempt_hz = attempt_rates.r_sce_hz;
        cfg.n_trials = mc.n_trials;
        cfg.rng_seed = mc.seed;
        cfg.parallel_memories = mc.parallel_memories;
        cfg.charge_n_init_per_failed_sce = mc.charge_n_init_per_failed_sce;
        return cfg;
    }

    static RunConfig defaults() { return RunConfig{}; }
    static RunConfig from_json(const json& j);
    static RunConfig load(const std::filesystem::path& path);
    json to_json() const;
};

namespace detail {

class StrictObject {
public:
    StrictObject(const json& j, std::string section) : section_(std::move(section)) {
        if (!j.is_object())
            throw ConfigError("config section '" + section_ + "' must be an object");
        obj_ = &j;
    }

    template <class T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        auto it = obj_->find(key);
        if (it == obj_->end()) return;
        try {
            out = it->get<T>();
        } catch (const json::exception&) {
            throw ConfigError("config key '" + section_ + "." + key +
                              "' has the wrong type");
        }
    }

    template <class T>
    void get_optional(const char* key, std::optional<T>& out) {
        seen_.insert(key);
        auto it = obj_->find(key);
        if (it == obj_->end()) return;
        if (it->is_null()) {
            out.reset();
            return;
        }
        try {
            out = it->get<T>();
        } catch (const json::exception&) {
            throw ConfigError("config key '" + section_ + "." + key +
                              "' has the wrong type");
        }
    }

    const json* subobject(const char* key) {
        seen_.insert(key);
        auto it = obj_->find(key);
        return it == obj_->end() ? nullptr : &*it;
    }

    // Unknown keys are rejected so typos cannot silently fall back to
    // defaults.
    void finish() const {
        for (auto it = obj_->begin(); it != obj_->end(); ++it)
            if (!seen_.count(it.key()))
                throw ConfigError("unknown config key '" + section_ + "." +
                                  it.key() + "'");
    }

private:
    const json* obj_;
    std::string section_;
    std::set<std::string> seen_;
};

inline TimingParamSet parse_timing_case(const json& j, const std::string& label,
                                        TimingParamSet base) {
    StrictObject o(j, "timing_cases." + label);
    base.label = label;
    o.get("hyperfine_a_hz", base.hyperfine_a_hz);
    o.get("rabi_e_hz", base.rabi_e_hz);
    o.get_optional("rabi_n_hz", base.rabi_n_hz);
    o.get("tau_e_init_s", base.tau_e_init_s);
    o.get("tau_ee_attempt_s", base.tau_ee_attempt_s);
    o.get("tau_e_ss_s", base.tau_e_ss_s);
    o.get("tau_mw_emit_s", base.tau_mw_emit_s);
    o.get("tau_mw_abs_s", base.tau_mw_abs_s);
    o.get_optional("tau_cen_override_s", base.tau_cen_override_s);
    o.get("geometric_cne", base.geometric_cne);
    o.finish();
    return base;
}

} // namespace detail

inline RunConfig RunConfig::from_json(const json& j) {
    RunConfig cfg;
    detail::StrictObject root(j, "root");

    if (const json* s = root.subobject("tripartite")) {
        detail::StrictObject o(*s, "tripartite");
        o.get("omega_mw_hz", cfg.tripartite.omega_mw_hz);
        o.get("omega_m_hz", cfg.tripartite.omega_m_hz);
        o.get("omega_e_hz", cfg.tripartite.omega_e_hz);
        o.get("g_mw_m_hz", cfg.tripartite.g_mw_m_hz);
        o.get("g_m_e_hz", cfg.tripartite.g_m_e_hz);
        o.get("gamma_mw_hz", cfg.tripartite.gamma_mw_hz);
        o.get("gamma_m_hz", cfg.tripartite.gamma_m_hz);
        o.get("gamma_e_hz", cfg.tripartite.gamma_e_hz);
        o.get("fock_cutoff", cfg.tripartite.fock_cutoff);
        o.finish();
    }
    if (const json* s = root.subobject("evolution")) {
        detail::StrictObject o(*s, "evolution");
        o.get("dt_s", cfg.evolution.dt_s);
        o.get("t_end_s", cfg.evolution.t_end_s);
        std::string frame = cfg.evolution.frame == Frame::lab ? "lab" : "rotating";
        o.get("frame", frame);
        if (frame == "lab") cfg.evolution.frame = Frame::lab;
        else if (frame == "rotating") cfg.evolution.frame = Frame::rotating;
        else throw ConfigError("evolution.frame must be 'lab' or 'rotating'");
        o.get("store_stride", cfg.evolution.store_stride);
        o.finish();
    }
    if (const json* s = root.subobject("timing_cases")) {
        if (!s->is_object())
            throw ConfigError("config section 'timing_cases' must be an object");
        for (auto it = s->begin(); it != s->end(); ++it) {
            auto found = cfg.timing_cases.find(it.key());
            TimingParamSet base = found != cfg.timing_cases.end()
                                      ? found->second
                                      : TimingParamSet{};
            cfg.timing_cases[it.key()] =
                detail::parse_timing_case(*it, it.key(), base);
        }
    }
    if (const json* s = root.subobject("efficiencies")) {
        detail::StrictObject o(*s, "efficiencies");
        o.get("eta_e_opt", cfg.efficiencies.eta_e_opt);
        o.get("eta_sc_mw", cfg.efficiencies.eta_sc_mw);
        o.get("eta_e_mw", cfg.efficiencies.eta_e_mw);
        o.get("eta_dc", cfg.efficiencies.eta_dc);
        o.get("eta_loss_dc", cfg.efficiencies.eta_loss_dc);
        o.finish();
    }
    if (const json* s = root.subobject("attempt_rates")) {
        detail::StrictObject o(*s, "attempt_rates");
        o.get("r_ee_hz", cfg.attempt_rates.r_ee_hz);
        o.get("r_sce_hz", cfg.attempt_rates.r_sce_hz);
        o.get("r_scsc_hz", cfg.attempt_rates.r_scsc_hz);
        o.finish();
    }
    if (const json* s = root.subobject("sweep")) {
        detail::StrictObject o(*s, "sweep");
        o.get("g_min_hz", cfg.sweep.g_min_hz);
        o.get("g_max_hz", cfg.sweep.g_max_hz);
        o.get("g_points", cfg.sweep.g_points);
        o.get("q_min", cfg.sweep.q_min);
        o.get("q_max", cfg.sweep.q_max);
        o.get("q_points", cfg.sweep.q_points);
        o.finish();
    }
    if (const json* s = root.subobject("compare")) {
        detail::StrictObject o(*s, "compare");
        o.get("eta_min", cfg.compare.eta_min);
        o.get("eta_max", cfg.compare.eta_max);
        o.get("eta_points", cfg.compare.eta_points);
        o.finish();
    }
    if (const json* s = root.subobject("herald")) {
        detail::StrictObject o(*s, "herald");
        o.get("theta_points", cfg.herald.theta_points);
        o.finish();
    }
    if (const json* s = root.subobject("heat")) {
        detail::StrictObject o(*s, "heat");
        o.get("rabi_target_hz", cfg.heat.rabi_target_hz);
        o.get("gyromagnetic_hz_per_t", cfg.heat.gyromagnetic_hz_per_t);
        o.get("conductor_distance_m", cfg.heat.conductor_distance_m);
        o.get("line_impedance_ohm", cfg.heat.line_impedance_ohm);
        o.get("attenuation_db_per_m", cfg.heat.attenuation_db_per_m);
        o.get("line_length_m", cfg.heat.line_length_m);
        o.get("duty_cycle", cfg.heat.duty_cycle);
        o.get("drive_power_w", cfg.heat.drive_power_w);
        o.get("optical_power_w", cfg.heat.optical_power_w);
        o.get("cooling_power_w", cfg.heat.cooling_power_w);
        o.get("contact_resistance_ohm", cfg.heat.contact_resistance_ohm);
        o.get("drive_power_multiplier", cfg.heat.drive_power_multiplier);
        o.finish();
    }
    if (const json* s = root.subobject("nv0")) {
        detail::StrictObject o(*s, "nv0");
        o.get("g_spin", cfg.nv0.g_spin);
        o.get("l_orb", cfg.nv0.l_orb);
        o.get("lambda_so_hz", cfg.nv0.lambda_so_hz);
        o.get("eps_perp_hz", cfg.nv0.eps_perp_hz);
        o.get("d_perp_hz", cfg.nv0.d_perp_hz);
        o.get("b_z_t", cfg.nv0.b_z_t);
        o.finish();
    }
    if (const json* s = root.subobject("optical_chain")) {
        detail::StrictObject o(*s, "optical_chain");
        o.get("g_opt_hz", cfg.optical_chain.g_opt_hz);
        o.get("kappa_hz", cfg.optical_chain.kappa_hz);
        o.get("gamma_rad_hz", cfg.optical_chain.gamma_rad_hz);
        o.get("gamma_nonrad_hz", cfg.optical_chain.gamma_nonrad_hz);
        o.get("gamma_dp_hz", cfg.optical_chain.gamma_dp_hz);
        o.get("eta_coupling", cfg.optical_chain.eta_coupling);
        o.get("eta_loss", cfg.optical_chain.eta_loss);
        o.get("eta_det", cfg.optical_chain.eta_det);
        o.finish();
    }
    if (const json* s = root.subobject("mc")) {
        detail::StrictObject o(*s, "mc");
        o.get("n_trials", cfg.mc.n_trials);
        o.get("seed", cfg.mc.seed);
        o.get("parallel_memories", cfg.mc.parallel_memories);
        o.get("charge_n_init_per_failed_sce", cfg.mc.charge_n_init_per_failed_sce);
        o.finish();
    }
    root.finish();
    cfg.validate();
    return cfg;
}

inline RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config file '" + path.string() +
                          "' is not valid JSON: " + e.what());
    }
    return from_json(j);
}

inline json RunConfig::to_json() const {
    json j;
    j["tripartite"] = {{"omega_mw_hz", tripartite.omega_mw_hz},
                       {"omega_m_hz", tripartite.omega_m_hz},
                       {"omega_e_hz", tripartite.omega_e_hz},
                       {"g_mw_m_hz", tripartite.g_mw_m_hz},
                       {"g_m_e_hz", tripartite.g_m_e_hz},
                       {"gamma_mw_hz", tripartite.gamma_mw_hz},
                       {"gamma_m_hz", tripartite.gamma_m_hz},
                       {"gamma_e_hz", tripartite.gamma_e_hz},
                       {"fock_cutoff", tripartite.fock_cutoff}};
    j["evolution"] = {{"dt_s", evolution.dt_s},
                      {"t_end_s", evolution.t_end_s},
                      {"frame", evolution.frame == Frame::lab ? "lab" : "rotating"},
                      {"store_stride", evolution.store_stride}};
    json cases = json::object();
    for (const auto& [label, t] : timing_cases) {
        json c = {{"hyperfine_a_hz", t.hyperfine_a_hz},
                  {"rabi_e_hz", t.rabi_e_hz},
                  {"tau_e_init_s", t.tau_e_init_s},
                  {"tau_ee_attempt_s", t.tau_ee_attempt_s},
                  {"tau_e_ss_s", t.tau_e_ss_s},
                  {"tau_mw_emit_s", t.tau_mw_emit_s},
                  {"tau_mw_abs_s", t.tau_mw_abs_s},
                  {"geometric_cne", t.geometric_cne}};
        if (t.rabi_n_hz) c["rabi_n_hz"] = *t.rabi_n_hz;
        if (t.tau_cen_override_s) c["tau_cen_override_s"] = *t.tau_cen_override_s;
        cases[label] = c;
    }
    j["timing_cases"] = cases;
    j["efficiencies"] = {{"eta_e_opt", efficiencies.eta_e_opt},
                         {"eta_sc_mw", efficiencies.eta_sc_mw},
                         {"eta_e_mw", efficiencies.eta_e_mw},
                         {"eta_dc", efficiencies.eta_dc},
                         {"eta_loss_dc", efficiencies.eta_loss_dc}};
    j["attempt_rates"] = {{"r_ee_hz", attempt_rates.r_ee_hz},
                          {"r_sce_hz", attempt_rates.r_sce_hz},
                          {"r_scsc_hz", attempt_rates.r_scsc_hz}};
    j["sweep"] = {{"g_min_hz", sweep.g_min_hz}, {"g_max_hz", sweep.g_max_hz},
                  {"g_points", sweep.g_points}, {"q_min", sweep.q_min},
                  {"q_max", sweep.q_max},       {"q_points", sweep.q_points}};
    j["compare"] = {{"eta_min", compare.eta_min},
                    {"eta_max", compare.eta_max},
                    {"eta_points", compare.eta_points}};
    j["herald"] = {{"theta_points", herald.theta_points}};
    j["heat"] = {{"rabi_target_hz", heat.rabi_target_hz},
                 {"gyromagnetic_hz_per_t", heat.gyromagnetic_hz_per_t},
                 {"conductor_distance_m", heat.conductor_distance_m},
                 {"line_impedance_ohm", heat.line_impedance_ohm},
                 {"attenuation_db_per_m", heat.attenuation_db_per_m},
                 {"line_length_m", heat.line_length_m},
                 {"duty_cycle", heat.duty_cycle},
                 {"drive_power_w", heat.drive_power_w},
                 {"optical_power_w", heat.optical_power_w},
                 {"cooling_power_w", heat.cooling_power_w},
                 {"contact_resistance_ohm", heat.contact_resistance_ohm},
                 {"drive_power_multiplier", heat.drive_power_multiplier}};
    j["nv0"] = {{"g_spin", nv0.g_spin},           {"l_orb", nv0.l_orb},
                {"lambda_so_hz", nv0.lambda_so_hz}, {"eps_perp_hz", nv0.eps_perp_hz},
                {"d_perp_hz", nv0.d_perp_hz},     {"b_z_t", nv0.b_z_t}};
    j["optical_chain"] = {{"g_opt_hz", optical_chain.g_opt_hz},
                          {"kappa_hz", optical_chain.kappa_hz},
                          {"gamma_rad_hz", optical_chain.gamma_rad_hz},
                          {"gamma_nonrad_hz", optical_chain.gamma_nonrad_hz},
                          {"gamma_dp_hz", optical_chain.gamma_dp_hz},
                          {"eta_coupling", optical_chain.eta_coupling},
                          {"eta_loss", optical_chain.eta_loss},
                          {"eta_det", optical_chain.eta_det}};
    j["mc"] = {{"n_trials", mc.n_trials},
               {"seed", mc.seed},
               {"parallel_memories", mc.parallel_memories},
               {"charge_n_init_per_failed_sce", mc.charge_n_init_per_failed_sce}};
    return j;
}

} // namespace spinlink
