#include <benchmark/benchmark.h>

#include <cmath>

#include "crio/cavity.hpp"
#include "crio/linalg.hpp"
#include "crio/master_equation.hpp"
#include "crio/protocol.hpp"
#include "crio/rydberg.hpp"

using namespace crio;

namespace {

const double OMEGA = 20.0 * M_PI;

StateVector bench_psi0() {
    const StateVector c =
        StateVector::qubit(1.0 / std::sqrt(3.0), std::sqrt(2.0 / 3.0));
    const StateVector t = StateVector::qubit(std::sqrt(3.0) / 2.0, 0.5);
    return kron(c, t);
}

void BM_FeSweepPoint(benchmark::State& state) {
    const double s = 1.0 / std::sqrt(2.0);
    const CavityParams p{2.0, 0.2, 1.0, 0.0};
    const StateVector ideal = prepare_h3(s, s, s, s, s, s);
    const StateVector ideal_n({2, 2, 2}, ideal.amps / ideal.amps.norm());
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            fidelity_efficiency(prepare_h3(s, s, s, s, s, s, &p), ideal_n));
    }
}
BENCHMARK(BM_FeSweepPoint);

void BM_ProtocolRun3(benchmark::State& state) {
    CrioConfig cfg;
    cfg.n_parties = 3;
    cfg.alphas = {0.7};
    cfg.axes = {{1.1, 0.4}};
    cfg.targets = {StateVector::qubit(0.6, 0.8)};
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_crio(cfg));
    }
}
BENCHMARK(BM_ProtocolRun3);

void BM_ProtocolRun5(benchmark::State& state) {
    CrioConfig cfg;
    cfg.n_parties = 5;
    cfg.alphas = {0.7, 1.9};
    cfg.axes = {{1.1, 0.4}, {0.3, 2.0}};
    cfg.targets = {StateVector::qubit(0.6, 0.8), StateVector::plus()};
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_crio(cfg));
    }
}
BENCHMARK(BM_ProtocolRun5);

void BM_EmbedTwoQubitGate(benchmark::State& state) {
    const std::vector<int> dims = {2, 2, 2, 2, 2, 2};
    const Mat cz = cz_gate();
    for (auto _ : state) {
        benchmark::DoNotOptimize(embed(cz, {1, 4}, dims));
    }
}
BENCHMARK(BM_EmbedTwoQubitGate);

void BM_MasterEquationShortRun(benchmark::State& state) {
    NoiseParams noise = NoiseParams::lifetime(400.0);
    const double v0 =
        solve_resonant_v0(OMEGA, 10 * OMEGA, 30 * OMEGA, 30 * OMEGA);
    DrivingParams p = DrivingParams::for_angles(M_PI / 2, M_PI, v0);
    const Mat h9 = build_static_hamiltonian(p);
    Vec psi9 = Vec::Zero(kRydDim);
    const Vec c4 = bench_psi0().amps;
    const int comp[4] = {0, 1, 3, 4};
    for (int k = 0; k < 4; ++k) psi9(comp[k]) = c4(k);
    const DensityMatrix rho0({kRydDim}, psi9 * psi9.adjoint());
    IntegratorOptions opt;
    opt.rtol = 1e-7;
    opt.atol = 1e-9;
    opt.n_samples = 2;
    for (auto _ : state) {
        benchmark::DoNotOptimize(integrate_master_equation(
            [&h9](double) { return h9; }, rydberg_lindblads(noise), rho0, 0.0,
            0.1, opt));
    }
}
BENCHMARK(BM_MasterEquationShortRun);

void BM_EffectiveGateNoisy(benchmark::State& state) {
    NoiseParams noise = NoiseParams::lifetime(400.0);
    const double v0 =
        solve_resonant_v0(OMEGA, 10 * OMEGA, 30 * OMEGA, 30 * OMEGA);
    DrivingParams p = DrivingParams::for_angles(M_PI / 2, M_PI, v0);
    IntegratorOptions opt = gate_integrator();
    opt.n_samples = 2;
    const StateVector psi0 = bench_psi0();
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            simulate_gate(p, &noise, GateMode::EffectiveResonant, psi0, opt));
    }
}
BENCHMARK(BM_EffectiveGateNoisy);

}  // namespace

BENCHMARK_MAIN();
