#include "crio/rydberg.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "crio/linalg.hpp"
#include "crio/parallel.hpp"

namespace crio {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Basis index of |c t> with levels {0, 1, R} = {0, 1, 2}.
int idx(int c, int t) { return 3 * c + t; }

// Computational basis embedded in the 9-level register.
const int kComp[4] = {idx(0, 0), idx(0, 1), idx(1, 0), idx(1, 1)};

Vec embed_computational(const Vec& c4) {
    Vec v = Vec::Zero(kRydDim);
    for (int k = 0; k < 4; ++k) v(kComp[k]) = c4(k);
    return v;
}

void check_params(const DrivingParams& p) {
    if (p.omega0 <= 0.0 || p.delta0 <= 0.0 || p.delta1 <= 0.0 || p.delta2 <= 0.0)
        throw InvalidInput("rydberg: omega0 and detunings must be positive");
    if (std::abs(p.v - (p.delta1 - p.delta0 + p.v0)) > 1e-9)
        throw InvalidInput("rydberg: V inconsistent with delta1 - delta0 + V0");
}

Mat bare_couplings(const DrivingParams& p) {
    Mat h = Mat::Zero(kRydDim, kRydDim);
    // Control |1> <-> |R> for every target level.
    for (int t = 0; t < 3; ++t) h(idx(1, t), idx(2, t)) += p.omega0 / 2.0;
    // Target |0> <-> |R> and |1> <-> |R> for every control level.
    for (int c = 0; c < 3; ++c) {
        h(idx(c, 0), idx(c, 2)) += p.omega1 / 2.0;
        h(idx(c, 1), idx(c, 2)) += p.omega2 / 2.0;
    }
    return h + h.adjoint().eval();
}

}  // namespace

DrivingParams DrivingParams::operating_point(double v0) {
    DrivingParams p;
    const double omega = 20.0 * kPi;  // Omega/2pi = 10 MHz
    p.omega0 = omega;
    p.omega1 = Complex(omega, 0.0);
    p.omega2 = Complex(omega, 0.0);
    p.delta0 = 10.0 * omega;
    p.delta1 = 30.0 * omega;
    p.delta2 = 30.0 * omega;
    p.v0 = v0;
    p.v = p.delta1 - p.delta0 + v0;
    p.base_unit = omega;
    return p;
}

DrivingParams DrivingParams::for_angles(double theta, double phi, double v0) {
    DrivingParams p = operating_point(v0);
    const double s2 = std::sqrt(2.0) * p.base_unit;
    p.omega1 = s2 * std::sin(theta / 2.0) *
               Complex(std::cos(phi), std::sin(phi));
    p.omega2 = Complex(-s2 * std::cos(theta / 2.0), 0.0);
    return p;
}

std::string to_string(GateMode mode) {
    switch (mode) {
        case GateMode::IdealUnitary: return "IdealUnitary";
        case GateMode::EffectiveResonant: return "EffectiveResonant";
        case GateMode::EffectiveDynamical: return "EffectiveDynamical";
        case GateMode::FullResonant: return "FullResonant";
        case GateMode::FullDynamical: return "FullDynamical";
    }
    throw InvalidInput("unknown gate mode");
}

GateMode gate_mode_from_string(const std::string& name) {
    for (GateMode m : {GateMode::IdealUnitary, GateMode::EffectiveResonant,
                       GateMode::EffectiveDynamical, GateMode::FullResonant,
                       GateMode::FullDynamical}) {
        if (to_string(m) == name) return m;
    }
    throw InvalidInput("unknown gate mode: " + name);
}

StateVector input_state(const InputStateParams& p) {
    const Complex e4(std::cos(p.beta4), std::sin(p.beta4));
    const Complex e5(std::cos(p.beta5), std::sin(p.beta5));
    const Complex e6(std::cos(p.beta6), std::sin(p.beta6));
    Vec c(4);
    c << std::sin(p.beta1),
        std::cos(p.beta1) * e4 * std::sin(p.beta2),
        std::cos(p.beta1) * std::cos(p.beta2) * e5 * std::sin(p.beta3),
        std::cos(p.beta1) * std::cos(p.beta2) * e6 * std::cos(p.beta3);
    return StateVector({2, 2}, std::move(c));
}

HamiltonianFn build_full_hamiltonian(const DrivingParams& p) {
    check_params(p);
    return [p](double t) {
        auto phase = [t](double w) {
            return Complex(std::cos(w * t), std::sin(w * t));
        };
        Mat h = Mat::Zero(kRydDim, kRydDim);
        const Complex p0 = phase(-p.delta0);
        h(idx(1, 0), idx(2, 0)) += p.omega0 / 2.0 * p0;
        h(idx(1, 1), idx(2, 1)) += p.omega0 / 2.0 * p0;
        h(idx(0, 0), idx(0, 2)) += p.omega1 / 2.0 * phase(p.delta1);
        h(idx(1, 0), idx(1, 2)) += p.omega1 / 2.0 * phase(p.delta1);
        h(idx(0, 1), idx(0, 2)) += p.omega2 / 2.0 * phase(p.delta2);
        h(idx(1, 1), idx(1, 2)) += p.omega2 / 2.0 * phase(p.delta2);
        h(idx(1, 2), idx(2, 2)) += p.omega0 / 2.0 * phase(-(p.delta0 + p.v));
        h(idx(2, 0), idx(2, 2)) += p.omega1 / 2.0 * phase(p.delta1 - p.v);
        h(idx(2, 1), idx(2, 2)) += p.omega2 / 2.0 * phase(p.delta2 - p.v);
        h = (h + h.adjoint().eval()).eval();
        h(idx(2, 2), idx(2, 2)) = p.v;
        return h;
    };
}

Mat build_static_hamiltonian(const DrivingParams& p) {
    check_params(p);
    Mat h = bare_couplings(p);
    // Laser-frame energies.
    for (int i = 0; i < 2; ++i) {
        h(idx(2, i), idx(2, i)) += p.delta0;   // |R0>, |R1>
        h(idx(i, 2), idx(i, 2)) += -p.delta1;  // |0R>, |1R>
    }
    h(idx(2, 2), idx(2, 2)) += p.v0;
    // Ground-state light shifts compensated by auxiliary fields.
    const double e00 = std::norm(p.omega1) / (4.0 * p.delta1);
    const double e01 = std::norm(p.omega2) / (4.0 * p.delta2);
    const double ec = p.omega0 * p.omega0 / (4.0 * p.delta0);
    h(idx(0, 0), idx(0, 0)) -= e00;
    h(idx(0, 1), idx(0, 1)) -= e01;
    h(idx(1, 0), idx(1, 0)) -= e00 - ec;
    h(idx(1, 1), idx(1, 1)) -= e01 - ec;
    // Cross-Raman |.0> <-> |.1> term through the target's |R>, also
    // cancelled by the compensation fields.
    const Complex g = p.omega1 * std::conj(p.omega2) / 8.0 *
                      (1.0 / p.delta1 + 1.0 / p.delta2);
    h(idx(0, 0), idx(0, 1)) -= g;
    h(idx(1, 0), idx(1, 1)) -= g;
    h(idx(0, 1), idx(0, 0)) -= std::conj(g);
    h(idx(1, 1), idx(1, 0)) -= std::conj(g);
    return h;
}

EffectiveCouplings effective_couplings(const DrivingParams& p) {
    check_params(p);
    EffectiveCouplings e;
    auto regime = [&e](double detuning, double amp) {
        if (amp <= 0.0) return;
        const double ratio = detuning / amp;
        if (ratio < 5.0)
            throw InvalidInput(
                "effective_couplings: detuning/amplitude ratio below 5");
        if (ratio < 10.0) e.regime_warning = true;
    };
    regime(p.delta0, p.omega0);
    regime(p.delta1, std::abs(p.omega1));
    regime(p.delta2, std::abs(p.omega2));

    e.omega_eff_10 = p.omega0 * p.omega1 / 4.0 *
                     (1.0 / p.delta1 + 1.0 / (p.delta0 + p.v) -
                      1.0 / p.delta0 - 1.0 / (p.delta1 - p.v));
    e.omega_eff_11 = p.omega0 * p.omega2 / 4.0 *
                     (1.0 / p.delta2 + 1.0 / (p.delta0 + p.v) -
                      1.0 / p.delta0 - 1.0 / (p.delta2 - p.v));
    e.delta_rr = p.omega0 * p.omega0 / (4.0 * (p.delta0 + p.v)) -
                 std::norm(p.omega1) / (4.0 * (p.delta1 - p.v)) -
                 std::norm(p.omega2) / (4.0 * (p.delta2 - p.v));
    e.delta = p.v0 + e.delta_rr;
    const double a10 = std::abs(e.omega_eff_10);
    const double a11 = std::abs(e.omega_eff_11);
    e.omega_eff = std::hypot(a10, a11);
    e.theta = 2.0 * std::atan2(a10, a11);
    if (a10 > 1e-14 * e.omega_eff && a11 > 1e-14 * e.omega_eff) {
        e.phi = std::arg(-e.omega_eff_10 / e.omega_eff_11);
    } else {
        e.phi = 0.0;
    }
    return e;
}

Operator build_effective_hamiltonian(const EffectiveCouplings& e,
                                     GateMode mode) {
    if (mode != GateMode::EffectiveResonant &&
        mode != GateMode::EffectiveDynamical)
        throw InvalidInput(
            "build_effective_hamiltonian: mode must be an effective mode");
    Mat h = Mat::Zero(3, 3);  // basis {|10>, |11>, |RR>}
    h(0, 2) = e.omega_eff_10 / 2.0;
    h(1, 2) = e.omega_eff_11 / 2.0;
    h = (h + h.adjoint().eval()).eval();
    if (mode == GateMode::EffectiveDynamical) {
        if (std::abs(e.delta) < 3.0 * (e.omega_eff / 2.0))
            throw InvalidInput(
                "build_effective_hamiltonian: dynamical regime needs "
                "|delta| >= 3 * omega_eff / 2");
        h(2, 2) = e.delta;
    }
    return Operator(std::move(h), false, true);
}

Operator holonomic_target_unitary(double theta, double phi) {
    Mat u = Mat::Identity(4, 4);
    const Complex e_ip(std::cos(phi), std::sin(phi));
    u(2, 2) = std::cos(theta);
    u(2, 3) = std::sin(theta) * e_ip;
    u(3, 2) = std::sin(theta) * std::conj(e_ip);
    u(3, 3) = -std::cos(theta);
    return Operator(std::move(u), true, true);
}

std::vector<Mat> rydberg_lindblads(const NoiseParams& n) {
    for (double r : {n.gamma0, n.gamma1, n.kappa_c, n.kappa_t}) {
        if (r < 0.0) throw InvalidInput("rydberg_lindblads: negative rate");
    }
    const Mat i3 = Mat::Identity(3, 3);
    std::vector<Mat> out;
    for (int atom = 0; atom < 2; ++atom) {
        for (int k = 0; k < 2; ++k) {
            Mat l = Mat::Zero(3, 3);
            l(k, 2) = std::sqrt(k == 0 ? n.gamma0 : n.gamma1);
            out.push_back(atom == 0 ? kron(l, i3) : kron(i3, l));
        }
        Mat lp = Mat::Zero(3, 3);
        const double s = std::sqrt(atom == 0 ? n.kappa_c : n.kappa_t);
        lp(0, 0) = s;
        lp(1, 1) = s;
        lp(2, 2) = -s;
        out.push_back(atom == 0 ? kron(lp, i3) : kron(i3, lp));
    }
    return out;
}

namespace {

double delta_rr_at(double v0, double omega, double d0, double d1, double d2) {
    const double v = d1 - d0 + v0;
    return omega * omega / (4.0 * (d0 + v)) - omega * omega / (4.0 * (d1 - v)) -
           omega * omega / (4.0 * (d2 - v));
}

}  // namespace

double solve_resonant_v0(double omega, double delta0, double delta1,
                         double delta2) {
    double v0 = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double next = -delta_rr_at(v0, omega, delta0, delta1, delta2);
        if (std::abs(next - v0) < 1e-12 * omega) return next;
        v0 = next;
    }
    throw NumericalError("solve_resonant_v0: fixed point did not converge");
}

double solve_dynamical_v0(double delta, double omega, double delta0,
                          double delta1, double delta2) {
    double drr = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double v0 = delta - drr;
        const double next = delta_rr_at(v0, omega, delta0, delta1, delta2);
        if (std::abs(next - drr) < 1e-12 * omega) return delta - next;
        drr = next;
    }
    throw NumericalError("solve_dynamical_v0: fixed point did not converge");
}

IntegratorOptions gate_integrator() {
    IntegratorOptions opt;
    opt.rtol = 1e-7;
    opt.atol = 1e-9;
    opt.n_samples = 2001;
    return opt;
}

namespace {

struct PreparedGate {
    Mat h9;          // propagation Hamiltonian (9x9, static)
    double t_gate;   // calibrated gate time
    double t_nominal;
    Mat u9_target;   // ideal unitary embedded in 9 levels
    Vec target4;     // unused placeholder
};

Mat embed_target_unitary(const EffectiveCouplings& e) {
    Mat u9 = Mat::Identity(kRydDim, kRydDim);
    const Mat u4 = holonomic_target_unitary(e.theta, e.phi).mat;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) u9(kComp[a], kComp[b]) = u4(a, b);
    return u9;
}

Mat effective_h9(const EffectiveCouplings& e, GateMode mode) {
    const Mat h3 = build_effective_hamiltonian(e, mode).mat;
    const int basis[3] = {idx(1, 0), idx(1, 1), idx(2, 2)};
    Mat h9 = Mat::Zero(kRydDim, kRydDim);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) h9(basis[a], basis[b]) = h3(a, b);
    return h9;
}

/// Noiseless probe-fidelity maximization over [0.9, 1.3] x t0 (4001 points).
double calibrate_gate_time(const Mat& h9, const Mat& u9_target, double t0) {
    Vec probe = Vec::Zero(kRydDim);
    for (int k = 0; k < 4; ++k) probe(kComp[k]) = 0.5;
    const Vec target = u9_target * probe;
    Eigen::SelfAdjointEigenSolver<Mat> es(h9);
    if (es.info() != Eigen::Success)
        throw NumericalError("calibrate_gate_time: eigendecomposition failed");
    const Vec c = es.eigenvectors().adjoint() * probe;
    const Vec d = es.eigenvectors().adjoint() * target;
    const Vec w = es.eigenvalues().cast<Complex>();
    double best_t = t0, best_f = -1.0;
    const int n = 4001;
    for (int i = 0; i < n; ++i) {
        const double t = t0 * (0.9 + 0.4 * i / (n - 1));
        Complex amp = 0.0;
        for (int k = 0; k < kRydDim; ++k)
            amp += std::conj(d(k)) * c(k) *
                   std::exp(Complex(0.0, -w(k).real() * t));
        const double f = std::norm(amp);
        if (f > best_f) {
            best_f = f;
            best_t = t;
        }
    }
    return best_t;
}

PreparedGate prepare_gate(const DrivingParams& p, GateMode mode,
                          const EffectiveCouplings& e) {
    PreparedGate g;
    g.u9_target = embed_target_unitary(e);
    const bool dynamical = (mode == GateMode::EffectiveDynamical ||
                            mode == GateMode::FullDynamical);
    if (dynamical) {
        const double omega_d = e.omega_eff * e.omega_eff / (4.0 * e.delta);
        if (omega_d == 0.0)
            throw InvalidInput("simulate_gate: dynamical mode needs delta != 0");
        g.t_nominal = kPi / std::abs(omega_d);
    } else {
        if (e.omega_eff <= 0.0)
            throw InvalidInput("simulate_gate: vanishing effective coupling");
        g.t_nominal = kPi / (e.omega_eff / 2.0);
    }
    g.t_gate = g.t_nominal;
    switch (mode) {
        case GateMode::IdealUnitary:
            g.h9 = Mat::Zero(kRydDim, kRydDim);
            break;
        case GateMode::EffectiveResonant:
        case GateMode::EffectiveDynamical:
            g.h9 = effective_h9(e, mode);
            break;
        case GateMode::FullResonant:
        case GateMode::FullDynamical:
            g.h9 = build_static_hamiltonian(p);
            g.t_gate = calibrate_gate_time(g.h9, g.u9_target, g.t_nominal);
            break;
    }
    return g;
}

void record_observables(Trajectory& traj, const Vec& target9) {
    auto& obs = traj.observables;
    for (const char* k : {"p00", "p01", "p10", "p11", "pRR", "fidelity"})
        obs[k].clear();
    for (const auto& rho : traj.states) {
        obs["p00"].push_back(rho.mat(kComp[0], kComp[0]).real());
        obs["p01"].push_back(rho.mat(kComp[1], kComp[1]).real());
        obs["p10"].push_back(rho.mat(kComp[2], kComp[2]).real());
        obs["p11"].push_back(rho.mat(kComp[3], kComp[3]).real());
        obs["pRR"].push_back(rho.mat(8, 8).real());
        const Complex f = target9.dot(rho.mat * target9);
        obs["fidelity"].push_back(f.real());
    }
}

bool has_noise(const NoiseParams* n) {
    return n && (n->gamma0 > 0.0 || n->gamma1 > 0.0 || n->kappa_c > 0.0 ||
                 n->kappa_t > 0.0);
}

}  // namespace

GateResult simulate_gate(const DrivingParams& p, const NoiseParams* noise,
                         GateMode mode, const StateVector& psi0,
                         const IntegratorOptions& opt) {
    if (psi0.dims != std::vector<int>{2, 2})
        throw InvalidInput("simulate_gate: psi0 must be a two-qubit state");
    const EffectiveCouplings e = effective_couplings(p);
    const PreparedGate g = prepare_gate(p, mode, e);
    const Vec psi9 = embed_computational(psi0.amps);
    const Vec target9 = g.u9_target * psi9;

    GateResult res;
    res.mode = mode;
    res.t_gate = g.t_gate;
    res.t_nominal = g.t_nominal;

    if (mode == GateMode::IdealUnitary) {
        res.traj.times = {0.0, g.t_gate};
        res.traj.states.push_back(
            DensityMatrix({kRydDim}, psi9 * psi9.adjoint()));
        res.traj.states.push_back(
            DensityMatrix({kRydDim}, target9 * target9.adjoint()));
    } else if (has_noise(noise)) {
        const Mat h9 = g.h9;
        res.traj = integrate_master_equation(
            [h9](double) { return h9; }, rydberg_lindblads(*noise),
            DensityMatrix({kRydDim}, psi9 * psi9.adjoint()), 0.0, g.t_gate,
            opt);
    } else {
        Eigen::SelfAdjointEigenSolver<Mat> es(g.h9);
        if (es.info() != Eigen::Success)
            throw NumericalError("simulate_gate: eigendecomposition failed");
        const Vec c = es.eigenvectors().adjoint() * psi9;
        const int n = std::max(2, opt.n_samples);
        for (int i = 0; i < n; ++i) {
            const double t = g.t_gate * i / (n - 1);
            Vec phases(kRydDim);
            for (int k = 0; k < kRydDim; ++k)
                phases(k) =
                    std::exp(Complex(0.0, -es.eigenvalues()(k) * t)) * c(k);
            const Vec psi_t = es.eigenvectors() * phases;
            res.traj.times.push_back(t);
            res.traj.states.push_back(
                DensityMatrix({kRydDim}, psi_t * psi_t.adjoint()));
        }
    }
    record_observables(res.traj, target9);
    res.fidelity = res.traj.observables["fidelity"].back();
    const auto& prr = res.traj.observables["pRR"];
    res.max_p_rr = *std::max_element(prr.begin(), prr.end());
    return res;
}

double average_fidelity_angles(const DrivingParams& base,
                               const NoiseParams* noise, GateMode mode,
                               const StateVector& psi0, const AngleGrid& grid,
                               const IntegratorOptions& opt) {
    if (grid.n_theta < 1 || grid.n_phi < 1)
        throw InvalidInput("average_fidelity_angles: empty grid");
    const int n = grid.n_theta * grid.n_phi;
    auto fs = parallel_map(n, [&](int i) {
        const int a = i / grid.n_phi;
        const int b = i % grid.n_phi;
        const double theta = 2.0 * kPi * a / grid.n_theta;
        const double phi = 2.0 * kPi * b / grid.n_phi;
        DrivingParams p = base;
        const double s2 = std::sqrt(2.0) * base.base_unit;
        p.omega1 = s2 * std::sin(theta / 2.0) *
                   Complex(std::cos(phi), std::sin(phi));
        p.omega2 = Complex(-s2 * std::cos(theta / 2.0), 0.0);
        return simulate_gate(p, noise, mode, psi0, opt).fidelity;
    });
    return pairwise_sum(fs) / n;
}

double average_fidelity_inputs(const DrivingParams& p, const NoiseParams* noise,
                               GateMode mode, double theta, double phi,
                               const InputGrid& grid,
                               const IntegratorOptions& opt) {
    if (grid.n_linear < 1 || grid.n_phase < 1)
        throw InvalidInput("average_fidelity_inputs: empty grid");
    DrivingParams pa = p;
    const double s2 = std::sqrt(2.0) * p.base_unit;
    pa.omega1 =
        s2 * std::sin(theta / 2.0) * Complex(std::cos(phi), std::sin(phi));
    pa.omega2 = Complex(-s2 * std::cos(theta / 2.0), 0.0);
    const EffectiveCouplings e = effective_couplings(pa);
    const PreparedGate g = prepare_gate(pa, mode, e);

    // Channel matrix on the computational subspace by operator-basis
    // linearity: G[a][b] = U_target^+ E(|a><b|) U_target restricted to the
    // computational levels.
    std::array<std::array<Mat, 4>, 4> gmat;
    auto channel = [&](const Mat& m0) -> Mat {
        if (mode == GateMode::IdealUnitary)
            return g.u9_target * m0 * g.u9_target.adjoint();
        if (has_noise(noise)) {
            const Mat h9 = g.h9;
            return propagate_lindblad_matrix([h9](double) { return h9; },
                                             rydberg_lindblads(*noise), m0,
                                             0.0, g.t_gate, opt);
        }
        const Mat u = expm_i_hermitian(g.h9, g.t_gate);
        return u * m0 * u.adjoint();
    };
    parallel_map(10, [&](int task) {
        // Upper triangle including diagonal; the rest follows by hermiticity.
        static const int pairs[10][2] = {{0, 0}, {0, 1}, {0, 2}, {0, 3},
                                         {1, 1}, {1, 2}, {1, 3}, {2, 2},
                                         {2, 3}, {3, 3}};
        const int a = pairs[task][0];
        const int b = pairs[task][1];
        Mat m0 = Mat::Zero(kRydDim, kRydDim);
        m0(kComp[a], kComp[b]) = 1.0;
        const Mat out = g.u9_target.adjoint() * channel(m0) * g.u9_target;
        Mat r(4, 4);
        for (int x = 0; x < 4; ++x)
            for (int y = 0; y < 4; ++y) r(x, y) = out(kComp[x], kComp[y]);
        gmat[a][b] = r;
        return 0.0;
    });
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < a; ++b) gmat[a][b] = gmat[b][a].adjoint();

    std::vector<double> lin(grid.n_linear), ph(grid.n_phase);
    for (int i = 0; i < grid.n_linear; ++i)
        lin[i] = grid.n_linear == 1 ? 0.0
                                    : kPi / 2.0 * i / (grid.n_linear - 1);
    for (int i = 0; i < grid.n_phase; ++i) ph[i] = 2.0 * kPi * i / grid.n_phase;

    std::vector<double> fs;
    fs.reserve(static_cast<size_t>(grid.n_linear) * grid.n_linear *
               grid.n_linear * grid.n_phase * grid.n_phase * grid.n_phase);
    for (double b1 : lin)
        for (double b2 : lin)
            for (double b3 : lin)
                for (double b4 : ph)
                    for (double b5 : ph)
                        for (double b6 : ph) {
                            const Vec c =
                                input_state({b1, b2, b3, b4, b5, b6}).amps;
                            Mat eop = Mat::Zero(4, 4);
                            for (int a = 0; a < 4; ++a)
                                for (int b = 0; b < 4; ++b)
                                    eop += c(a) * std::conj(c(b)) * gmat[a][b];
                            const Complex f = c.dot(eop * c);
                            fs.push_back(f.real());
                        }
    return pairwise_sum(fs) / static_cast<double>(fs.size());
}

}  // namespace crio
