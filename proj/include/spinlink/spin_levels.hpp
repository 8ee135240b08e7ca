#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "spinlink/errors.hpp"

namespace spinlink {

inline constexpr double kBohrMagnetonHzPerT = 1.3996244936e10; // mu_B / h

// Ground-state model of a spin-1/2 color center with an orbital doublet.
// All energies are cyclic (Hz); the strain and electric-field terms arrive
// already multiplied into frequency units.
struct Nv0Params {
    double g_spin = 2.0;
    double l_orb = 0.1;
    double lambda_so_hz = 5e9; // zero-strain ground splitting is 2*lambda
    double eps_perp_hz = 0.0;
    double d_perp_hz = 0.0;
    double b_z_t = 0.0;

    void validate() const {
        if (!(lambda_so_hz > 0.0))
            throw ConfigError("spin-orbit parameter must be > 0");
    }
};

// Basis ordering is (orbit |+>, |->) (x) (spin up, down), orbit index first:
//   0: |+, up>   1: |+, down>   2: |-, up>   3: |-, down>
// L_z = sigma_z on the orbit, S_z = sigma_z/2 on the spin,
// L+ + L- = sigma_x on the orbit. Strain and electric field enter with the
// same operator structure and are summed as given.
inline Eigen::Matrix4d nv0_hamiltonian(const Nv0Params& p) {
    p.validate();
    const double zeeman_s = p.g_spin * kBohrMagnetonHzPerT * p.b_z_t;
    const double zeeman_l = p.l_orb * kBohrMagnetonHzPerT * p.b_z_t;
    const double mix = p.eps_perp_hz + p.d_perp_hz;
    Eigen::Matrix4d h = Eigen::Matrix4d::Zero();
    const std::array<double, 4> lz = {1, 1, -1, -1};
    const std::array<double, 4> sz = {0.5, -0.5, 0.5, -0.5};
    for (int i = 0; i < 4; ++i)
        h(i, i) = zeeman_s * sz[i] + zeeman_l * lz[i] +
                  2.0 * p.lambda_so_hz * lz[i] * sz[i];
    h(0, 2) = h(2, 0) = mix;
    h(1, 3) = h(3, 1) = mix;
    return h;
}

struct Nv0Levels {
    Eigen::Vector4d eigenvalues_hz;  // ascending
    Eigen::Matrix4d eigenvectors;    // columns, same order
    std::array<std::string, 4> orbit_character;
    std::array<std::string, 4> spin_character;
};

namespace detail {

inline std::string classify_orbit(const Eigen::Vector4d& v) {
    const double w_plus = v(0) * v(0) + v(1) * v(1);
    const double w_minus = v(2) * v(2) + v(3) * v(3);
    // |X> = (-|+> + |->)/sqrt(2), |Y> = i(|+> + |->)/sqrt(2); for the real
    // eigenvectors of this Hamiltonian the overlaps reduce to combinations
    // of the +/- amplitudes per spin component.
    double w_x = 0.0, w_y = 0.0;
    for (int s = 0; s < 2; ++s) {
        const double a_plus = v(0 + s), a_minus = v(2 + s);
        w_x += 0.5 * (a_minus - a_plus) * (a_minus - a_plus);
        w_y += 0.5 * (a_minus + a_plus) * (a_minus + a_plus);
    }
    const std::array<std::pair<double, const char*>, 4> wts = {
        {{w_plus, "+"}, {w_minus, "-"}, {w_x, "X"}, {w_y, "Y"}}};
    auto best = std::max_element(wts.begin(), wts.end(),
                                 [](auto& a, auto& b) { return a.first < b.first; });
    return best->first > 0.75 ? best->second : "mixed";
}

inline std::string classify_spin(const Eigen::Vector4d& v) {
    const double w_up = v(0) * v(0) + v(2) * v(2);
    if (w_up > 0.75) return "up";
    if (w_up < 0.25) return "down";
    return "mixed";
}

} // namespace detail

inline Nv0Levels nv0_levels(const Nv0Params& p) {
    const Eigen::Matrix4d h = nv0_hamiltonian(p);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(h);
    Nv0Levels out;
    out.eigenvalues_hz = es.eigenvalues();
    out.eigenvectors = es.eigenvectors();
    for (int i = 0; i < 4; ++i) {
        out.orbit_character[i] = detail::classify_orbit(out.eigenvectors.col(i));
        out.spin_character[i] = detail::classify_spin(out.eigenvectors.col(i));
    }
    return out;
}

enum class StrainRegime { zero_strain, moderate, high_strain };

inline const char* to_string(StrainRegime r) {
    switch (r) {
        case StrainRegime::zero_strain: return "zero-strain";
        case StrainRegime::moderate: return "moderate";
        case StrainRegime::high_strain: return "high-strain";
    }
    return "?";
}

struct MixingThresholds {
    double zero_below = 1e-2; // (eps+d)/lambda below this counts as unstrained
    double high_above = 10.0;
};

struct MixingResult {
    double angle_rad = 0.0; // 0 at zero strain, -> pi/4 deep in the mixed regime
    double ratio = 0.0;     // (eps+d)/lambda
    StrainRegime regime = StrainRegime::zero_strain;
};

// Mixing angle of the lower orbital doublet at B_z = 0:
// tan(2 theta) = (eps + d)/lambda.
inline MixingResult orbital_mixing(const Nv0Params& p,
                                   const MixingThresholds& th = {}) {
    p.validate();
    MixingResult r;
    r.ratio = std::abs(p.eps_perp_hz + p.d_perp_hz) / p.lambda_so_hz;
    r.angle_rad = 0.5 * std::atan(r.ratio);
    r.regime = r.ratio < th.zero_below  ? StrainRegime::zero_strain
               : r.ratio > th.high_above ? StrainRegime::high_strain
                                         : StrainRegime::moderate;
    return r;
}

// Effective Rabi frequency of the red-sideband transition driven through a
// phonon mode: g sqrt(n) Omega0 / omega_m. All cyclic Hz.
inline double sideband_rabi(double g_m_e_hz, unsigned n_phonons,
                            double omega0_hz, double omega_m_hz) {
    if (!(omega_m_hz > 0.0))
        throw ConfigError("mechanical frequency must be > 0");
    return g_m_e_hz * std::sqrt(static_cast<double>(n_phonons)) * omega0_hz /
           omega_m_hz;
}

struct ThreeLevelRabi {
    double rabi_hz = 0.0;
    bool adiabatic = false;
};

// Two-quantum absorption through a detuned intermediate level:
// g Omega0 / Delta, flagged adiabatic when Delta >= factor * max(g, Omega0).
inline ThreeLevelRabi three_level_rabi(double g_m_e_hz, double omega0_hz,
                                       double delta_hz,
                                       double adiabatic_factor = 10.0) {
    if (delta_hz == 0.0)
        throw ConfigError("three-level drive requires nonzero detuning");
    ThreeLevelRabi r;
    r.rabi_hz = g_m_e_hz * omega0_hz / delta_hz;
    r.adiabatic =
        std::abs(delta_hz) >= adiabatic_factor * std::max(g_m_e_hz, omega0_hz);
    return r;
}

struct EfficiencyChain {
    double g_opt_hz = 1.58113883008e9; // gives cooperativity 100 with the rates below
    double kappa_hz = 1e9;
    double gamma_rad_hz = 90e6;
    double gamma_nonrad_hz = 5e6;
    double gamma_dp_hz = 5e6;
    double eta_coupling = 0.9;
    double eta_loss = 0.98855309488; // 10 dB/km fiber over 5 m
    double eta_det = 0.99;

    void validate() const {
        if (g_opt_hz < 0.0) throw ConfigError("optical coupling must be >= 0");
        for (double v : {kappa_hz, gamma_rad_hz, gamma_nonrad_hz, gamma_dp_hz})
            if (!(v > 0.0))
                throw ConfigError("cavity and emitter rates must be > 0");
        for (double e : {eta_coupling, eta_loss, eta_det})
            if (!(e >= 0.0 && e <= 1.0))
                throw ConfigError("chain efficiencies must lie in [0, 1]");
    }
};

// Coherent cooperativity 4 g^2 / (kappa (gamma_rad + gamma_nonrad + gamma_dp)).
inline double optical_cooperativity(const EfficiencyChain& c) {
    c.validate();
    const double gamma_total = c.gamma_rad_hz + c.gamma_nonrad_hz + c.gamma_dp_hz;
    return 4.0 * c.g_opt_hz * c.g_opt_hz / (c.kappa_hz * gamma_total);
}

inline double internal_efficiency(double cooperativity) {
    return cooperativity / (1.0 + cooperativity);
}

struct EfficiencyBreakdown {
    double cooperativity = 0.0;
    double eta_int = 0.0;
    double eta_coupling = 0.0;
    double eta_loss = 0.0;
    double eta_det = 0.0;
    double eta_e_opt = 0.0;
};

inline EfficiencyBreakdown transmission_efficiency(const EfficiencyChain& c) {
    EfficiencyBreakdown b;
    b.cooperativity = optical_cooperativity(c);
    b.eta_int = internal_efficiency(b.cooperativity);
    b.eta_coupling = c.eta_coupling;
    b.eta_loss = c.eta_loss;
    b.eta_det = c.eta_det;
    b.eta_e_opt = b.eta_int * c.eta_coupling * c.eta_loss * c.eta_det;
    return b;
}

inline double fiber_transmission(double loss_db_per_km, double length_m) {
    return std::pow(10.0, -loss_db_per_km * (length_m / 1000.0) / 10.0);
}

} // namespace spinlink
