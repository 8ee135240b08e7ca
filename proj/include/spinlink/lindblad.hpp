#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <cmath>
#include <complex>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "spinlink/errors.hpp"

namespace spinlink {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Microwave cavity <-> mechanical mode <-> electron spin chain. Frequencies,
// couplings and decay rates are cyclic (Hz); the integrator converts to
// angular units internally. fock_cutoff is the highest Fock level kept per
// bosonic mode (so each mode has fock_cutoff + 1 levels).
struct TripartiteParams {
    double omega_mw_hz = 5e9;
    double omega_m_hz = 5e9;
    double omega_e_hz = 5e9;
    double g_mw_m_hz = 1e6;
    double g_m_e_hz = 1e6;
    double gamma_mw_hz = 500e3; // cavity photon loss (T1)
    double gamma_m_hz = 500e3;  // phonon loss (T1)
    double gamma_e_hz = 10e3;   // spin dephasing (T2-type, number operator)
    int fock_cutoff = 1;

    int mode_levels() const { return fock_cutoff + 1; }
    int dim() const { return mode_levels() * mode_levels() * 2; }

    void validate() const {
        for (double w : {omega_mw_hz, omega_m_hz, omega_e_hz})
            if (!(w > 0.0)) throw ConfigError("mode frequencies must be > 0");
        for (double g : {g_mw_m_hz, g_m_e_hz, gamma_mw_hz, gamma_m_hz, gamma_e_hz})
            if (g < 0.0)
                throw ConfigError("couplings and decay rates must be >= 0");
        if (fock_cutoff < 1) throw ConfigError("fock_cutoff must be >= 1");
    }
};

enum class Frame { lab, rotating };

namespace detail {

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline Eigen::MatrixXcd lowering(int levels) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(levels, levels);
    for (int n = 1; n < levels; ++n) a(n - 1, n) = std::sqrt(double(n));
    return a;
}

} // namespace detail

// Full-space operators on (mw mode) (x) (mechanical mode) (x) (spin).
struct TripartiteOperators {
    Eigen::MatrixXcd a_mw, b_m, sigma_e; // lowering operators
    Eigen::MatrixXcd n_mw, n_m, n_e;     // occupation operators
};

inline TripartiteOperators make_operators(const TripartiteParams& p) {
    p.validate();
    const int m = p.mode_levels();
    const Eigen::MatrixXcd id_mode = Eigen::MatrixXcd::Identity(m, m);
    const Eigen::MatrixXcd id_spin = Eigen::MatrixXcd::Identity(2, 2);
    const Eigen::MatrixXcd a = detail::lowering(m);
    Eigen::MatrixXcd sigma = Eigen::MatrixXcd::Zero(2, 2);
    sigma(0, 1) = 1.0;

    TripartiteOperators ops;
    ops.a_mw = detail::kron(detail::kron(a, id_mode), id_spin);
    ops.b_m = detail::kron(detail::kron(id_mode, a), id_spin);
    ops.sigma_e = detail::kron(detail::kron(id_mode, id_mode), sigma);
    ops.n_mw = ops.a_mw.adjoint() * ops.a_mw;
    ops.n_m = ops.b_m.adjoint() * ops.b_m;
    ops.n_e = ops.sigma_e.adjoint() * ops.sigma_e;
    return ops;
}

// System Hamiltonian in cyclic-frequency units (Hz): mode energies plus
// beam-splitter couplings a b^dag + a^dag b and b sigma^dag + b^dag sigma.
// In the rotating frame the reference omega_mw is subtracted from every
// occupation (exact here, since the couplings conserve total excitation).
inline Eigen::MatrixXcd build_hamiltonian(const TripartiteParams& p,
                                          Frame frame = Frame::lab) {
    const TripartiteOperators ops = make_operators(p);
    const double w_ref = frame == Frame::rotating ? p.omega_mw_hz : 0.0;
    Eigen::MatrixXcd h = (p.omega_mw_hz - w_ref) * ops.n_mw +
                         (p.omega_m_hz - w_ref) * ops.n_m +
                         (p.omega_e_hz - w_ref) * ops.n_e;
    h += p.g_mw_m_hz * (ops.a_mw * ops.b_m.adjoint() + ops.a_mw.adjoint() * ops.b_m);
    h += p.g_m_e_hz * (ops.b_m * ops.sigma_e.adjoint() + ops.b_m.adjoint() * ops.sigma_e);
    return h;
}

// Dense Hermitian state, trace-normalized at construction.
class DensityMatrix {
public:
    static DensityMatrix from_matrix(Eigen::MatrixXcd m) {
        if (m.rows() != m.cols()) throw ConfigError("density matrix must be square");
        const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
        if (herm > 1e-10)
            throw ConfigError("density matrix is not Hermitian (max deviation " +
                              std::to_string(herm) + ")");
        const double tr = m.trace().real();
        if (!(tr > 1e-12)) throw ConfigError("density matrix has non-positive trace");
        m /= tr;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
        if (es.eigenvalues().minCoeff() < -1e-8)
            throw ConfigError("density matrix has a negative eigenvalue");
        return DensityMatrix(std::move(m));
    }

    static DensityMatrix pure_basis_state(int dim, int index) {
        if (index < 0 || index >= dim)
            throw ConfigError("basis-state index out of range");
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
        m(index, index) = 1.0;
        return DensityMatrix(std::move(m));
    }

    const Eigen::MatrixXcd& entries() const { return m_; }
    int dim() const { return static_cast<int>(m_.rows()); }

private:
    explicit DensityMatrix(Eigen::MatrixXcd m) : m_(std::move(m)) {}
    Eigen::MatrixXcd m_;
};

// One microwave photon in the cavity, everything else in the ground state.
inline DensityMatrix single_photon_initial_state(const TripartiteParams& p) {
    p.validate();
    const int idx = p.mode_levels() * 2; // (n_mw=1, n_m=0, spin=0)
    return DensityMatrix::pure_basis_state(p.dim(), idx);
}

// Time series of mode occupations.
struct Trajectory {
    std::vector<double> t_s;
    std::vector<double> pop_mw, pop_m, pop_e;

    void validate() const {
        const std::size_t n = t_s.size();
        if (!n || pop_mw.size() != n || pop_m.size() != n || pop_e.size() != n)
            throw NumericalError("trajectory series have inconsistent lengths");
        for (std::size_t i = 1; i < n; ++i)
            if (!(t_s[i] > t_s[i - 1]))
                throw NumericalError("trajectory times must be strictly increasing");
        for (const auto* series : {&pop_mw, &pop_m, &pop_e})
            for (double v : *series)
                if (v < -1e-8 || v > 1.0 + 1e-8)
                    throw NumericalError("trajectory population out of [0, 1]");
    }
};

struct EvolveOptions {
    Frame frame = Frame::rotating;
    double trace_tolerance = 1e-6;
    int store_stride = 1;
    // Invoked on every stored step with the current state; used by the
    // verification suites to audit trace/Hermiticity/positivity.
    std::function<void(double /*t_s*/, const Eigen::MatrixXcd&)> observer;
};

namespace detail {

// One Lindblad channel, pre-scaled: rate (angular) plus the jump operator
// and its adjoint.
template <class Mat>
struct Channel {
    double rate;
    Mat op;
    Mat op_adj;
};

// Fixed-step RK4 on d rho/dt = -i(H_eff rho - rho H_eff^dag) + sum_k
// gamma_k c_k rho c_k^dag with H_eff = H - (i/2) sum gamma c^dag c. The
// non-Hermitian split keeps the right-hand side at one product per channel
// pair plus one for the drift.
template <class Mat>
class MasterEquationRk4 {
public:
    MasterEquationRk4(Mat h_angular, std::vector<Channel<Mat>> channels)
        : channels_(std::move(channels)) {
        h_eff_ = std::move(h_angular);
        for (const auto& ch : channels_)
            h_eff_ -= std::complex<double>(0.0, 0.5 * ch.rate) * (ch.op_adj * ch.op);
        const auto n = h_eff_.rows();
        k1_.resizeLike(h_eff_); k2_.resizeLike(h_eff_); k3_.resizeLike(h_eff_);
        k4_.resizeLike(h_eff_); stage_.resizeLike(h_eff_);
        prod_.resizeLike(h_eff_); jump_.resizeLike(h_eff_);
        (void)n;
    }

    void derivative(const Mat& rho, Mat& out) {
        prod_.noalias() = h_eff_ * rho;
        out = std::complex<double>(0.0, -1.0) * (prod_ - prod_.adjoint());
        for (const auto& ch : channels_) {
            jump_.noalias() = ch.op * rho;
            out.noalias() += ch.rate * (jump_ * ch.op_adj);
        }
    }

    void step(Mat& rho, double dt) {
        derivative(rho, k1_);
        stage_ = rho + (0.5 * dt) * k1_;
        derivative(stage_, k2_);
        stage_ = rho + (0.5 * dt) * k2_;
        derivative(stage_, k3_);
        stage_ = rho + dt * k3_;
        derivative(stage_, k4_);
        rho += (dt / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
    }

private:
    Mat h_eff_;
    std::vector<Channel<Mat>> channels_;
    Mat k1_, k2_, k3_, k4_, stage_, prod_, jump_;
};

// Shared driver: integrates and hands (step, t, rho) to a sink after every
// step (including step 0). The sink returns nothing; trace is watched here.
template <class Mat, class Sink>
void integrate_master_equation(const TripartiteParams& p,
                               const Eigen::MatrixXcd& rho0, double t_end,
                               double dt, const EvolveOptions& opt, Sink&& sink) {
    Mat h = (kTwoPi * build_hamiltonian(p, opt.frame)).template cast<std::complex<double>>();
    const TripartiteOperators ops = make_operators(p);
    std::vector<Channel<Mat>> channels;
    auto add_channel = [&](double rate_hz, const Eigen::MatrixXcd& op) {
        if (rate_hz <= 0.0) return;
        Channel<Mat> ch;
        ch.rate = kTwoPi * rate_hz;
        ch.op = op;
        ch.op_adj = op.adjoint();
        channels.push_back(std::move(ch));
    };
    add_channel(p.gamma_mw_hz, ops.a_mw);
    add_channel(p.gamma_m_hz, ops.b_m);
    add_channel(p.gamma_e_hz, ops.n_e); // pure dephasing: number operator

    MasterEquationRk4<Mat> rk(std::move(h), std::move(channels));
    Mat rho = rho0;
    const long n_steps = static_cast<long>(std::llround(t_end / dt));
    sink(0L, 0.0, rho);
    for (long s = 1; s <= n_steps; ++s) {
        rk.step(rho, dt);
        const std::complex<double> tr = rho.trace();
        const double drift = std::abs(tr - std::complex<double>(1.0, 0.0));
        if (!(drift <= opt.trace_tolerance) || !std::isfinite(drift)) {
            std::ostringstream msg;
            msg << "master-equation integration unstable: trace drift " << drift
                << " at t = " << s * dt << " s (dt = " << dt << " s)";
            throw NumericalError(msg.str());
        }
        sink(s, s * dt, rho);
    }
}

template <class Sink>
void integrate_dispatch(const TripartiteParams& p, const Eigen::MatrixXcd& rho0,
                        double t_end, double dt, const EvolveOptions& opt,
                        Sink&& sink) {
    using Fixed8 = Eigen::Matrix<std::complex<double>, 8, 8>;
    if (p.dim() == 8)
        integrate_master_equation<Fixed8>(p, rho0, t_end, dt, opt,
                                          std::forward<Sink>(sink));
    else
        integrate_master_equation<Eigen::MatrixXcd>(p, rho0, t_end, dt, opt,
                                                    std::forward<Sink>(sink));
}

} // namespace detail

inline Trajectory evolve(const DensityMatrix& rho0, const TripartiteParams& p,
                         double t_end, double dt, const EvolveOptions& opt = {}) {
    p.validate();
    if (rho0.dim() != p.dim())
        throw ConfigError("initial state dimension does not match parameters");
    if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
    if (!(t_end >= dt)) throw ConfigError("t_end must be >= dt");
    if (opt.store_stride < 1) throw ConfigError("store_stride must be >= 1");

    const TripartiteOperators ops = make_operators(p);
    const Eigen::VectorXd w_mw = ops.n_mw.diagonal().real();
    const Eigen::VectorXd w_m = ops.n_m.diagonal().real();
    const Eigen::VectorXd w_e = ops.n_e.diagonal().real();
    const long n_steps = static_cast<long>(std::llround(t_end / dt));

    Trajectory traj;
    traj.t_s.reserve(n_steps / opt.store_stride + 2);
    auto sink = [&](long step, double t, const auto& rho) {
        if (step % opt.store_stride != 0 && step != n_steps) return;
        double p_mw = 0.0, p_m = 0.0, p_e = 0.0;
        for (int k = 0; k < rho.rows(); ++k) {
            const double d = rho(k, k).real();
            p_mw += w_mw(k) * d;
            p_m += w_m(k) * d;
            p_e += w_e(k) * d;
        }
        traj.t_s.push_back(t);
        traj.pop_mw.push_back(p_mw);
        traj.pop_m.push_back(p_m);
        traj.pop_e.push_back(p_e);
        if (opt.observer) opt.observer(t, Eigen::MatrixXcd(rho));
    };
    detail::integrate_dispatch(p, rho0.entries(), t_end, dt, opt, sink);
    traj.validate();
    return traj;
}

struct SpinPopulationPeak {
    double eta_e_mw = 0.0;
    double t_peak_s = 0.0;
};

// Maximum spin occupation over the trajectory and the first time it is
// attained; this is the transfer-efficiency estimate for the interface.
inline SpinPopulationPeak max_spin_population(const Trajectory& traj) {
    if (traj.t_s.empty()) throw ConfigError("trajectory is empty");
    SpinPopulationPeak peak{traj.pop_e[0], traj.t_s[0]};
    for (std::size_t i = 1; i < traj.t_s.size(); ++i) {
        if (traj.pop_e[i] > peak.eta_e_mw) {
            peak.eta_e_mw = traj.pop_e[i];
            peak.t_peak_s = traj.t_s[i];
        }
    }
    return peak;
}

struct SweepOptions {
    double dt = 1e-9;
    double t_end_base = 2e-6;
    double t_end_cap = 20e-6;
    unsigned threads = 0; // 0 -> hardware concurrency
};

struct SweepPoint {
    double g_hz = 0.0;
    double q_mw = 0.0;
    double eta_e_mw = 0.0;
    double t_peak_s = 0.0;
};

struct SweepGrid {
    std::vector<double> g_values_hz;
    std::vector<double> q_values;
    std::vector<SweepPoint> points; // row-major: g outer, Q inner
};

namespace detail {

// Long enough to cover both the coherent swap (~1/(2 sqrt(2) g)) and, when a
// mode is overdamped, the slow effective transfer at 4 g^2 / gamma.
inline double sweep_horizon(const TripartiteParams& p, const SweepOptions& opt) {
    const double g_min = std::min(p.g_mw_m_hz, p.g_m_e_hz);
    double t_end = opt.t_end_base;
    if (g_min > 0.0)
        t_end = std::max(t_end, 1.5 / (2.0 * std::sqrt(2.0) * g_min));
    if (p.gamma_mw_hz > 2.0 * p.g_mw_m_hz && p.g_mw_m_hz > 0.0)
        t_end = std::max(t_end, 3.0 * p.gamma_mw_hz / (4.0 * p.g_mw_m_hz * p.g_mw_m_hz));
    if (p.gamma_m_hz > 2.0 * p.g_m_e_hz && p.g_m_e_hz > 0.0)
        t_end = std::max(t_end, 3.0 * p.gamma_m_hz / (4.0 * p.g_m_e_hz * p.g_m_e_hz));
    return std::max(opt.t_end_base, std::min(t_end, opt.t_end_cap));
}

} // namespace detail

// Transfer efficiency over a (mechanical-spin coupling, microwave cavity Q)
// grid: for each point g_m_e = g and gamma_mw = omega_mw / Q, starting from
// one photon in the cavity. Points are independent and run on a thread pool;
// results land in input order regardless of scheduling.
inline SweepGrid sweep_transfer(const std::vector<double>& g_values_hz,
                                const std::vector<double>& q_values,
                                const TripartiteParams& base,
                                const SweepOptions& opt = {}) {
    base.validate();
    if (g_values_hz.empty() || q_values.empty())
        throw ConfigError("sweep grids must be non-empty");
    for (double g : g_values_hz)
        if (!(g > 0.0)) throw ConfigError("sweep couplings must be > 0");
    for (double q : q_values)
        if (!(q > 0.0)) throw ConfigError("sweep quality factors must be > 0");

    SweepGrid grid;
    grid.g_values_hz = g_values_hz;
    grid.q_values = q_values;
    grid.points.resize(g_values_hz.size() * q_values.size());

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= grid.points.size() || failed.load()) return;
            const double g = g_values_hz[i / q_values.size()];
            const double q = q_values[i % q_values.size()];
            TripartiteParams p = base;
            p.g_m_e_hz = g;
            p.gamma_mw_hz = p.omega_mw_hz / q;
            try {
                const double t_end = detail::sweep_horizon(p, opt);
                SpinPopulationPeak peak{0.0, 0.0};
                EvolveOptions eopt;
                eopt.frame = Frame::rotating;
                const TripartiteOperators ops = make_operators(p);
                const Eigen::VectorXd w_e = ops.n_e.diagonal().real();
                auto sink = [&](long, double t, const auto& rho) {
                    double pop = 0.0;
                    for (int k = 0; k < rho.rows(); ++k)
                        pop += w_e(k) * rho(k, k).real();
                    if (pop > peak.eta_e_mw) {
                        peak.eta_e_mw = pop;
                        peak.t_peak_s = t;
                    }
                };
                detail::integrate_dispatch(p, single_photon_initial_state(p).entries(),
                                           t_end, opt.dt, eopt, sink);
                grid.points[i] = {g, q, peak.eta_e_mw, peak.t_peak_s};
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!failed.exchange(true)) {
                    std::ostringstream msg;
                    msg << "sweep point g = " << g << " Hz, Q = " << q
                        << " failed: " << e.what();
                    error = std::make_exception_ptr(NumericalError(msg.str()));
                }
                return;
            }
        }
    };

    unsigned n_threads = opt.threads ? opt.threads : std::thread::hardware_concurrency();
    if (n_threads == 0) n_threads = 1;
    n_threads = std::min<std::size_t>(n_threads, grid.points.size());
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);
    return grid;
}

} // namespace spinlink
