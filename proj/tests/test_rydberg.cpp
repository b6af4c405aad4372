#include <doctest.h>

#include <cmath>
#include <random>

#include "crio/linalg.hpp"
#include "crio/rydberg.hpp"

using namespace crio;

namespace {

const double OMEGA = 20.0 * M_PI;  // rad/us

int idx(int c, int t) { return 3 * c + t; }

StateVector default_psi0() {
    const double s3 = std::sqrt(3.0);
    Vec a(2), b(2);
    a << 1.0 / s3, std::sqrt(2.0) / s3;
    b << s3 / 2.0, 0.5;
    Vec c(4);
    c << a(0) * b(0), a(0) * b(1), a(1) * b(0), a(1) * b(1);
    return StateVector({2, 2}, std::move(c));
}

}  // namespace

TEST_CASE("input_state parameterization") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> lin(0.0, M_PI / 2);
    std::uniform_real_distribution<double> ph(0.0, 2 * M_PI);
    for (int k = 0; k < 100; ++k) {
        StateVector s = input_state(
            {lin(rng), lin(rng), lin(rng), ph(rng), ph(rng), ph(rng)});
        CHECK(std::abs(s.amps.squaredNorm() - 1.0) < 1e-12);
    }
    StateVector s00 = input_state({M_PI / 2, 0, 0, 0, 0, 0});
    CHECK(std::abs(s00.amps(0) - 1.0) < 1e-12);
}

TEST_CASE("full Hamiltonian structure") {
    DrivingParams p = DrivingParams::operating_point(0.0);
    HamiltonianFn h = build_full_hamiltonian(p);
    Mat h0 = h(0.0);
    CHECK(std::abs(h0(idx(2, 0), idx(1, 0)) - p.omega0 / 2.0) < 1e-12);
    CHECK(std::abs(h0(idx(0, 0), idx(0, 2)) - p.omega1 / 2.0) < 1e-12);
    CHECK(std::abs(h0(idx(0, 1), idx(0, 2)) - p.omega2 / 2.0) < 1e-12);
    CHECK(std::abs(h0(idx(2, 2), idx(2, 2)) - p.v) < 1e-12);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ud(0.0, 10.0);
    for (int k = 0; k < 100; ++k) {
        Mat ht = h(ud(rng));
        CHECK((ht - ht.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(std::abs(ht(idx(2, 2), idx(2, 2)) - p.v) < 1e-12);
    }
}

TEST_CASE("driving parameter validation") {
    DrivingParams p = DrivingParams::operating_point(0.0);
    p.v += 1.0;  // breaks v = delta1 - delta0 + v0
    CHECK_THROWS_AS(build_full_hamiltonian(p), InvalidInput);
    CHECK_THROWS_AS(effective_couplings(p), InvalidInput);
}

TEST_CASE("effective couplings at the reference point") {
    // v0 = Omega/30 reference values.
    DrivingParams p = DrivingParams::operating_point(OMEGA / 30.0);
    EffectiveCouplings e = effective_couplings(p);
    CHECK(std::abs(e.omega_eff_10.real() / OMEGA - (-0.03343)) < 5e-5);
    CHECK(std::abs(e.omega_eff_10.imag()) < 1e-12);
    CHECK(std::abs(e.omega_eff_11 - e.omega_eff_10) < 1e-12);  // symmetric drive
    CHECK(std::abs(e.delta_rr / OMEGA - (-0.04184)) < 5e-5);
    CHECK(e.theta == doctest::Approx(M_PI / 2).epsilon(1e-10));
    // Blockade shift: V = delta1 - delta0 + v0 = (20 + 1/30) Omega.
    const double v_mhz = p.v / (2 * M_PI);
    CHECK(std::abs(v_mhz - 200.33) < 0.01);
}

TEST_CASE("effective couplings regime guard") {
    DrivingParams p = DrivingParams::operating_point(0.0);
    p.delta0 = 4.0 * OMEGA;  // ratio 4 < 5
    p.v = p.delta1 - p.delta0 + p.v0;
    CHECK_THROWS_AS(effective_couplings(p), InvalidInput);

    p.delta0 = 8.0 * OMEGA;  // ratio in [5, 10): warning only
    p.v = p.delta1 - p.delta0 + p.v0;
    CHECK(effective_couplings(p).regime_warning);

    CHECK_FALSE(
        effective_couplings(DrivingParams::operating_point(0.0)).regime_warning);
}

TEST_CASE("effective Hamiltonian") {
    DrivingParams p = DrivingParams::operating_point(
        solve_resonant_v0(OMEGA, 10 * OMEGA, 30 * OMEGA, 30 * OMEGA));
    EffectiveCouplings e = effective_couplings(p);
    Mat h = build_effective_hamiltonian(e, GateMode::EffectiveResonant).mat;
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    CHECK(std::abs(es.eigenvalues()(0) + e.omega_eff / 2.0) < 1e-10);
    CHECK(std::abs(es.eigenvalues()(1)) < 1e-10);
    CHECK(std::abs(es.eigenvalues()(2) - e.omega_eff / 2.0) < 1e-10);

    // Dark state is decoupled from |RR>.
    Vec d(3);
    d << -std::conj(e.omega_eff_11), std::conj(e.omega_eff_10), 0.0;
    d /= d.norm();
    CHECK(std::abs((h * d)(2)) < 1e-12);

    // Dynamical mode keeps the |RR> detuning and rejects shallow detunings.
    DrivingParams pd = DrivingParams::operating_point(solve_dynamical_v0(
        0.336 * OMEGA, OMEGA, 10 * OMEGA, 30 * OMEGA, 30 * OMEGA));
    EffectiveCouplings ed = effective_couplings(pd);
    Mat hd = build_effective_hamiltonian(ed, GateMode::EffectiveDynamical).mat;
    CHECK(hd(2, 2).real() == doctest::Approx(ed.delta).epsilon(1e-10));
    CHECK_THROWS_AS(
        build_effective_hamiltonian(e, GateMode::EffectiveDynamical),
        InvalidInput);
}

TEST_CASE("holonomic target unitary") {
    Mat u = holonomic_target_unitary(M_PI / 2, M_PI).mat;
    CHECK(std::abs(u(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(u(1, 1) - 1.0) < 1e-15);
    CHECK(std::abs(u(2, 2)) < 1e-15);
    CHECK(std::abs(u(2, 3) + 1.0) < 1e-12);
    CHECK(std::abs(u(3, 2) + 1.0) < 1e-12);
    CHECK(std::abs(u(3, 3)) < 1e-15);

    Mat uz = holonomic_target_unitary(0.0, 0.3).mat;
    CHECK(std::abs(uz(2, 2) - 1.0) < 1e-15);
    CHECK(std::abs(uz(3, 3) + 1.0) < 1e-15);

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> ud(0.0, 2 * M_PI);
    for (int k = 0; k < 20; ++k) {
        Operator op = holonomic_target_unitary(ud(rng), ud(rng));
        CHECK(op.unitary);
        CHECK(op.hermitian);
    }
}

TEST_CASE("operating-point solvers") {
    const double v0_res = solve_resonant_v0(OMEGA, 10 * OMEGA, 30 * OMEGA,
                                            30 * OMEGA);
    CHECK(std::abs(v0_res / OMEGA - 0.041889) < 1e-5);
    // Fixed point: v0 = -delta_rr(v0), i.e. delta = 0.
    EffectiveCouplings e =
        effective_couplings(DrivingParams::operating_point(v0_res));
    CHECK(std::abs(e.delta) < 1e-9 * OMEGA);

    const double v0_dyn = solve_dynamical_v0(0.336 * OMEGA, OMEGA, 10 * OMEGA,
                                             30 * OMEGA, 30 * OMEGA);
    CHECK(std::abs(v0_dyn / OMEGA - 0.379745) < 1e-5);
    EffectiveCouplings ed =
        effective_couplings(DrivingParams::operating_point(v0_dyn));
    CHECK(std::abs(ed.delta - 0.336 * OMEGA) < 1e-9 * OMEGA);
}

TEST_CASE("lindblad operators") {
    NoiseParams n = NoiseParams::lifetime(400.0);
    auto ls = rydberg_lindblads(n);
    REQUIRE(ls.size() == 6);
    for (const auto& l : ls) {
        CHECK(l.rows() == kRydDim);
        CHECK(l.cols() == kRydDim);
    }
    NoiseParams bad = n;
    bad.gamma0 = -1.0;
    CHECK_THROWS_AS(rydberg_lindblads(bad), InvalidInput);
}

TEST_CASE("ideal unitary gate") {
    DrivingParams p = DrivingParams::for_angles(
        M_PI / 2, M_PI,
        solve_resonant_v0(OMEGA, 10 * OMEGA, 30 * OMEGA, 30 * OMEGA));
    GateResult r =
        simulate_gate(p, nullptr, GateMode::IdealUnitary, default_psi0());
    CHECK(std::abs(r.fidelity - 1.0) < 1e-12);
    CHECK(r.max_p_rr < 1e-12);
}

TEST_CASE("resonant gate: full model") {
    const double v0 =
        solve_resonant_v0(OMEGA, 10 * OMEGA, 30 * OMEGA, 30 * OMEGA);
    DrivingParams p = DrivingParams::for_angles(M_PI / 2, M_PI, v0);
    GateResult ideal =
        simulate_gate(p, nullptr, GateMode::FullResonant, default_psi0());
    CHECK(std::abs(ideal.t_nominal - 2.113914) < 1e-4);
    CHECK(std::abs(ideal.t_gate - 2.129346) < 1e-4);
    CHECK(std::abs(ideal.fidelity - 0.998863) < 5e-4);

    NoiseParams noise = NoiseParams::lifetime(400.0);
    GateResult noisy =
        simulate_gate(p, &noise, GateMode::FullResonant, default_psi0());
    CHECK(std::abs(noisy.fidelity - 0.985302) < 1e-3);
    // The resonant holonomy cycles the bright state through |RR>, so the
    // intermediate Rydberg population is large by design.
    CHECK(noisy.max_p_rr > 0.5);
}

TEST_CASE("resonant gate: effective model with noise") {
    const double v0 =
        solve_resonant_v0(OMEGA, 10 * OMEGA, 30 * OMEGA, 30 * OMEGA);
    DrivingParams p = DrivingParams::for_angles(M_PI / 2, M_PI, v0);
    NoiseParams noise = NoiseParams::lifetime(400.0);
    GateResult r =
        simulate_gate(p, &noise, GateMode::EffectiveResonant, default_psi0());
    CHECK(std::abs(r.fidelity - 0.986529) < 5e-4);
}

TEST_CASE("dynamical gate: effective model with noise") {
    const double v0 = solve_dynamical_v0(0.336 * OMEGA, OMEGA, 10 * OMEGA,
                                         30 * OMEGA, 30 * OMEGA);
    DrivingParams p = DrivingParams::for_angles(M_PI / 2, M_PI, v0);
    NoiseParams noise = NoiseParams::lifetime(400.0);
    GateResult r =
        simulate_gate(p, &noise, GateMode::EffectiveDynamical, default_psi0());
    CHECK(std::abs(r.fidelity - 0.990511) < 5e-4);
}

TEST_CASE("dynamical gate: full model") {
    const double v0 = solve_dynamical_v0(0.336 * OMEGA, OMEGA, 10 * OMEGA,
                                         30 * OMEGA, 30 * OMEGA);
    DrivingParams p = DrivingParams::for_angles(M_PI / 2, M_PI, v0);
    GateResult ideal =
        simulate_gate(p, nullptr, GateMode::FullDynamical, default_psi0());
    CHECK(std::abs(ideal.t_nominal - 28.353596) < 1e-3);
    CHECK(std::abs(ideal.t_gate - 30.312830) < 1e-3);
    CHECK(std::abs(ideal.fidelity - 0.999254) < 5e-4);

    NoiseParams noise = NoiseParams::lifetime(400.0);
    GateResult noisy =
        simulate_gate(p, &noise, GateMode::FullDynamical, default_psi0());
    CHECK(std::abs(noisy.fidelity - 0.992645) < 1e-3);
    CHECK(std::abs(noisy.max_p_rr - 0.013123) < 2e-3);
}

TEST_CASE("dark state is invariant under the effective gate") {
    const double v0 =
        solve_resonant_v0(OMEGA, 10 * OMEGA, 30 * OMEGA, 30 * OMEGA);
    DrivingParams p = DrivingParams::for_angles(M_PI / 2, M_PI, v0);
    EffectiveCouplings e = effective_couplings(p);
    Vec c = Vec::Zero(4);
    c(2) = -std::conj(e.omega_eff_11);
    c(3) = std::conj(e.omega_eff_10);
    c /= c.norm();
    StateVector dark({2, 2}, c);
    GateResult r =
        simulate_gate(p, nullptr, GateMode::EffectiveResonant, dark);
    CHECK(std::abs(r.fidelity - 1.0) < 1e-6);
    CHECK(r.max_p_rr < 1e-6);
}

TEST_CASE("holonomy: bright state acquires a pi phase, dark state none") {
    const double v0 =
        solve_resonant_v0(OMEGA, 10 * OMEGA, 30 * OMEGA, 30 * OMEGA);
    DrivingParams p = DrivingParams::for_angles(M_PI / 2, M_PI, v0);
    EffectiveCouplings e = effective_couplings(p);
    Mat h = build_effective_hamiltonian(e, GateMode::EffectiveResonant).mat;
    const double t = M_PI / (e.omega_eff / 2.0);
    Mat u = expm_i_hermitian(h, t);
    Vec bright(3), dark(3);
    bright << e.omega_eff_10, e.omega_eff_11, 0.0;
    bright /= bright.norm();
    dark << -std::conj(e.omega_eff_11), std::conj(e.omega_eff_10), 0.0;
    dark /= dark.norm();
    CHECK((u * bright + bright).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((u * dark - dark).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("zero-rate Lindblad evolution matches the unitary one") {
    const double v0 =
        solve_resonant_v0(OMEGA, 10 * OMEGA, 30 * OMEGA, 30 * OMEGA);
    DrivingParams p = DrivingParams::for_angles(M_PI / 2, M_PI, v0);
    GateResult closed =
        simulate_gate(p, nullptr, GateMode::FullResonant, default_psi0());

    // Same propagation through the master-equation stepper with all-zero
    // Lindblad operators.
    Mat h9 = build_static_hamiltonian(p);
    Vec psi9 = Vec::Zero(kRydDim);
    psi9(0) = default_psi0().amps(0);
    psi9(1) = default_psi0().amps(1);
    psi9(3) = default_psi0().amps(2);
    psi9(4) = default_psi0().amps(3);
    IntegratorOptions tight = gate_integrator();
    tight.rtol = 1e-9;
    tight.atol = 1e-11;
    tight.n_samples = 2;
    auto traj = integrate_master_equation(
        [h9](double) { return h9; }, rydberg_lindblads(NoiseParams::none()),
        DensityMatrix({kRydDim}, psi9 * psi9.adjoint()), 0.0, closed.t_gate,
        tight);
    const Mat& final_closed = closed.traj.states.back().mat;
    CHECK((traj.states.back().mat - final_closed).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("averaging machinery: ideal channel averages to one") {
    DrivingParams p = DrivingParams::operating_point(
        solve_resonant_v0(OMEGA, 10 * OMEGA, 30 * OMEGA, 30 * OMEGA));
    const double a = average_fidelity_angles(p, nullptr, GateMode::IdealUnitary,
                                             default_psi0(), {2, 2});
    CHECK(std::abs(a - 1.0) < 1e-12);
    const double b = average_fidelity_inputs(
        p, nullptr, GateMode::IdealUnitary, M_PI / 2, M_PI, {2, 2});
    CHECK(std::abs(b - 1.0) < 1e-12);
}
