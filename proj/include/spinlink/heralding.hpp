#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "spinlink/errors.hpp"

namespace spinlink {

using Complex = std::complex<double>;

// Joint pure state of two node spins and the photon occupation of the two
// optical paths, ordered (spin_A, spin_B, photons_A, photons_B), each binary:
//   index = ((sA*2 + sB)*2 + nA)*2 + nB.
struct DualRailState {
    Eigen::Matrix<Complex, 16, 1> amp = Eigen::Matrix<Complex, 16, 1>::Zero();

    static constexpr int index(int s_a, int s_b, int n_a, int n_b) {
        return ((s_a * 2 + s_b) * 2 + n_a) * 2 + n_b;
    }

    double norm() const { return amp.norm(); }

    void validate() const {
        if (std::abs(norm() - 1.0) > 1e-12)
            throw NumericalError("dual-rail state is not normalized");
    }
};

enum class ClickPattern { detector_a, detector_b, none, both };

inline const char* to_string(ClickPattern p) {
    switch (p) {
        case ClickPattern::detector_a: return "detector_a";
        case ClickPattern::detector_b: return "detector_b";
        case ClickPattern::none: return "none";
        case ClickPattern::both: return "both";
    }
    return "?";
}

// One post-selected measurement branch. post_state is the normalized joint
// spin state, present only for the single-click patterns; relative_phase is
// the argument of the |10> amplitude relative to |01>.
struct HeraldedOutcome {
    ClickPattern pattern = ClickPattern::none;
    double probability = 0.0;
    std::optional<Eigen::Vector4cd> post_state;
    double relative_phase = 0.0;
};

inline Eigen::Vector2cd plus_superposition() {
    return Eigen::Vector2cd(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
}

// Bell states (|01> + sign |10>)/sqrt(2) on the joint spin space.
inline Eigen::Vector4cd bell_state(int sign) {
    Eigen::Vector4cd b = Eigen::Vector4cd::Zero();
    b(1) = 1.0 / std::sqrt(2.0);
    b(2) = static_cast<double>(sign) / std::sqrt(2.0);
    return b;
}

inline double bell_fidelity(const Eigen::Vector4cd& state, int sign) {
    return std::norm(bell_state(sign).dot(state));
}

// Photon emission conditioned on the spin: a spin in |0> leaves one photon
// in its node's path, a spin in |1> leaves none.
inline DualRailState entangle_photons(const Eigen::Vector4cd& spins) {
    DualRailState out;
    for (int s_a = 0; s_a < 2; ++s_a)
        for (int s_b = 0; s_b < 2; ++s_b)
            out.amp(DualRailState::index(s_a, s_b, s_a == 0 ? 1 : 0,
                                         s_b == 0 ? 1 : 0)) =
                spins(s_a * 2 + s_b);
    return out;
}

inline DualRailState emit_entangled_photon(
    const Eigen::Vector2cd& spin_a = plus_superposition(),
    const Eigen::Vector2cd& spin_b = plus_superposition()) {
    Eigen::Vector4cd joint;
    for (int s_a = 0; s_a < 2; ++s_a)
        for (int s_b = 0; s_b < 2; ++s_b)
            joint(s_a * 2 + s_b) = spin_a(s_a) * spin_b(s_b);
    return entangle_photons(joint);
}

// Propagation phase per path: amplitudes with a photon in path A gain
// e^{i theta_A}, path B gains e^{i theta_B}.
inline DualRailState apply_path_phase(const DualRailState& state, double theta_a,
                                      double theta_b) {
    const Complex ph_a = std::polar(1.0, theta_a);
    const Complex ph_b = std::polar(1.0, theta_b);
    DualRailState out = state;
    for (int s_a = 0; s_a < 2; ++s_a)
        for (int s_b = 0; s_b < 2; ++s_b)
            for (int n_a = 0; n_a < 2; ++n_a)
                for (int n_b = 0; n_b < 2; ++n_b) {
                    Complex& a = out.amp(DualRailState::index(s_a, s_b, n_a, n_b));
                    if (n_a) a *= ph_a;
                    if (n_b) a *= ph_b;
                }
    return out;
}

// 50:50 beamsplitter in the convention a_A -> (a_A + a_B)/sqrt(2),
// a_B -> (a_A - a_B)/sqrt(2), written on the photon-number basis
// {00, 10, 01, 11, 20, 02}. The two-photon input |11> bunches into
// (|20> - |02>)/sqrt(2).
inline Eigen::Matrix<Complex, 6, 6> beamsplitter_unitary() {
    const double s = 1.0 / std::sqrt(2.0);
    Eigen::Matrix<Complex, 6, 6> u = Eigen::Matrix<Complex, 6, 6>::Zero();
    u(0, 0) = 1.0;
    u(1, 1) = s;  u(2, 1) = s;   // |10> -> (|10> + |01>)/sqrt2
    u(1, 2) = s;  u(2, 2) = -s;  // |01> -> (|10> - |01>)/sqrt2
    u(4, 3) = s;  u(5, 3) = -s;  // |11> -> (|20> - |02>)/sqrt2
    u(4, 4) = 0.5; u(5, 4) = 0.5; u(3, 4) = s;   // |20> -> (|20>+|02>)/2 + |11>/sqrt2
    u(4, 5) = 0.5; u(5, 5) = 0.5; u(3, 5) = -s;  // |02> -> (|20>+|02>)/2 - |11>/sqrt2
    return u;
}

namespace detail {

inline double relative_phase_of(const Eigen::Vector4cd& spins) {
    const Complex c01 = spins(1), c10 = spins(2);
    if (std::abs(c01) < 1e-15 || std::abs(c10) < 1e-15) return 0.0;
    return std::arg(c10 / c01);
}

} // namespace detail

// Applies the beamsplitter and projects on the four click patterns. "none"
// and "both" count total photon number 0 and 2; a single photon at output A
// or B heralds the entangled spin branches.
inline std::vector<HeraldedOutcome> beamsplit_and_herald(const DualRailState& state) {
    state.validate();
    const double s = 1.0 / std::sqrt(2.0);
    Eigen::Vector4cd at_a = Eigen::Vector4cd::Zero();
    Eigen::Vector4cd at_b = Eigen::Vector4cd::Zero();
    double p_none = 0.0, p_both = 0.0;
    for (int s_a = 0; s_a < 2; ++s_a)
        for (int s_b = 0; s_b < 2; ++s_b) {
            const int spin = s_a * 2 + s_b;
            const Complex c00 = state.amp(DualRailState::index(s_a, s_b, 0, 0));
            const Complex c10 = state.amp(DualRailState::index(s_a, s_b, 1, 0));
            const Complex c01 = state.amp(DualRailState::index(s_a, s_b, 0, 1));
            const Complex c11 = state.amp(DualRailState::index(s_a, s_b, 1, 1));
            at_a(spin) = s * (c10 + c01);
            at_b(spin) = s * (c10 - c01);
            p_none += std::norm(c00);
            p_both += std::norm(c11); // (|20> - |02>)/sqrt2, unit branch norm
        }

    auto single = [](ClickPattern pat, const Eigen::Vector4cd& v) {
        HeraldedOutcome o;
        o.pattern = pat;
        o.probability = v.squaredNorm();
        if (o.probability > 1e-30) {
            o.post_state = v.normalized();
            o.relative_phase = detail::relative_phase_of(*o.post_state);
        }
        return o;
    };

    std::vector<HeraldedOutcome> outcomes;
    outcomes.push_back(single(ClickPattern::detector_a, at_a));
    outcomes.push_back(single(ClickPattern::detector_b, at_b));
    outcomes.push_back({ClickPattern::none, p_none, std::nullopt, 0.0});
    outcomes.push_back({ClickPattern::both, p_both, std::nullopt, 0.0});
    return outcomes;
}

namespace detail {

inline HeraldedOutcome outcome_for(const std::vector<HeraldedOutcome>& outcomes,
                                   ClickPattern pat) {
    for (const auto& o : outcomes)
        if (o.pattern == pat) return o;
    throw NumericalError("missing click pattern in herald outcome list");
}

} // namespace detail

// One emission round with an unstabilized path-length phase theta, heralded
// on detector A. The surviving spin state is (|01> + e^{i theta}|10>)/sqrt2,
// so the Bell fidelity decays as cos^2(theta/2).
inline HeraldedOutcome run_single_photon_protocol(double theta) {
    DualRailState st = emit_entangled_photon();
    st = apply_path_phase(st, 0.0, theta);
    return detail::outcome_for(beamsplit_and_herald(st), ClickPattern::detector_a);
}

// Both rounds of the two-photon protocol with a fixed detector pattern.
struct TwoRoundOutcome {
    ClickPattern first = ClickPattern::detector_a;
    ClickPattern second = ClickPattern::detector_a;
    double probability = 0.0; // joint over both rounds
    Eigen::Vector4cd post_state = Eigen::Vector4cd::Zero();
    int bell_sign = +1; // + for same detector, - for different
};

// Second emission round after flipping both spins. The path phase factors
// out globally, so every detector combination reaches its Bell state exactly.
inline std::vector<TwoRoundOutcome> run_two_photon_all_patterns(double theta) {
    DualRailState first = apply_path_phase(emit_entangled_photon(), 0.0, theta);
    const auto round1 = beamsplit_and_herald(first);

    std::vector<TwoRoundOutcome> results;
    for (ClickPattern d1 : {ClickPattern::detector_a, ClickPattern::detector_b}) {
        const HeraldedOutcome o1 = detail::outcome_for(round1, d1);
        if (!o1.post_state) continue;
        Eigen::Vector4cd flipped;
        flipped(0) = (*o1.post_state)(3); // X (x) X on both spins
        flipped(1) = (*o1.post_state)(2);
        flipped(2) = (*o1.post_state)(1);
        flipped(3) = (*o1.post_state)(0);
        DualRailState second =
            apply_path_phase(entangle_photons(flipped), 0.0, theta);
        const auto round2 = beamsplit_and_herald(second);
        for (ClickPattern d2 :
             {ClickPattern::detector_a, ClickPattern::detector_b}) {
            const HeraldedOutcome o2 = detail::outcome_for(round2, d2);
            if (!o2.post_state) continue;
            TwoRoundOutcome t;
            t.first = d1;
            t.second = d2;
            t.probability = o1.probability * o2.probability;
            t.post_state = *o2.post_state;
            t.bell_sign = d1 == d2 ? +1 : -1;
            results.push_back(t);
        }
    }
    return results;
}

// The detector-A/detector-A branch of the two-photon protocol.
inline HeraldedOutcome run_two_photon_protocol(double theta) {
    for (const auto& t : run_two_photon_all_patterns(theta)) {
        if (t.first == ClickPattern::detector_a &&
            t.second == ClickPattern::detector_a) {
            HeraldedOutcome o;
            o.pattern = ClickPattern::detector_a;
            o.probability = t.probability;
            o.post_state = t.post_state;
            o.relative_phase = detail::relative_phase_of(t.post_state);
            return o;
        }
    }
    throw NumericalError("two-photon protocol produced no detector-A/A branch");
}

} // namespace spinlink
