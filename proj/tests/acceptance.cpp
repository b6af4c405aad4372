// Acceptance suite: one pass/fail line per criterion. Exits nonzero when any
// criterion fails. Criterion 7 exercises the installed CLI binary (path taken
// from the CRIO_CLI environment variable).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "crio/cavity.hpp"
#include "crio/linalg.hpp"
#include "crio/protocol.hpp"
#include "crio/rydberg.hpp"

using namespace crio;

namespace {

const double OMEGA = 20.0 * M_PI;
bool g_all_ok = true;

void report(int n, bool ok, const std::string& what) {
    std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << n << ": "
              << what << std::endl;
    if (!ok) g_all_ok = false;
}

std::mt19937_64 rng(2026);

StateVector random_qubit() {
    std::normal_distribution<double> nd;
    Vec v(2);
    v << Complex(nd(rng), nd(rng)), Complex(nd(rng), nd(rng));
    v /= v.norm();
    return StateVector({2}, v);
}

BlochAxis random_axis() {
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    return {std::acos(2 * ud(rng) - 1), 2 * M_PI * ud(rng)};
}

StateVector default_psi0() {
    const StateVector c = StateVector::qubit(1.0 / std::sqrt(3.0),
                                             std::sqrt(2.0 / 3.0));
    const StateVector t = StateVector::qubit(std::sqrt(3.0) / 2.0, 0.5);
    return kron(c, t);
}

IntegratorOptions average_integrator() {
    IntegratorOptions opt;
    opt.rtol = 1e-6;
    opt.atol = 1e-8;
    opt.n_samples = 2;
    return opt;
}

// --------------------------------------------------------------------------
// Criterion 1: cavity fidelity/efficiency triplets.

void criterion_1() {
    const double s = 1.0 / std::sqrt(2.0);
    StateVector ideal = prepare_h3(s, s, s, s, s, s);
    StateVector ideal_n({2, 2, 2}, ideal.amps / ideal.amps.norm());
    struct Row {
        double kappa, gamma, f, e;
    };
    const Row rows[] = {
        {2.0, 0.2, 0.9954, 0.9092},
        {1.0, 0.2, 0.9988, 0.9524},
        {1.0, 0.1, 0.9997, 0.9756},
    };
    bool ok = true;
    std::ostringstream detail;
    for (const Row& r : rows) {
        CavityParams p{r.kappa, r.gamma, 1.0, 0.0};
        FEResult fe =
            fidelity_efficiency(prepare_h3(s, s, s, s, s, s, &p), ideal_n);
        if (std::abs(fe.F - r.f) >= 5e-4 || std::abs(fe.E - r.e) >= 5e-4)
            ok = false;
        detail << " (" << r.kappa << "," << r.gamma << ")->F=" << fe.F
               << ",E=" << fe.E;
    }
    report(1, ok, "cavity preparation F/E vs reference triplets within 5e-4;" +
                      detail.str());
}

// --------------------------------------------------------------------------
// Criterion 2: protocol branches reach unit fidelity.

void criterion_2() {
    const auto t0 = std::chrono::steady_clock::now();
    std::uniform_real_distribution<double> ud(0.0, 2 * M_PI);
    bool ok = true;
    for (int trial = 0; trial < 100 && ok; ++trial) {
        CrioConfig cfg;
        cfg.n_parties = 3;
        cfg.alphas = {ud(rng)};
        cfg.axes = {random_axis()};
        cfg.targets = {random_qubit()};
        for (const auto& b : run_crio(cfg).branches) {
            for (double f : b.fidelities)
                if (std::abs(f - 1.0) > 1e-10) ok = false;
        }
    }
    for (int trial = 0; trial < 20 && ok; ++trial) {
        CrioConfig cfg;
        cfg.n_parties = 5;
        cfg.alphas = {ud(rng), ud(rng)};
        cfg.axes = {random_axis(), random_axis()};
        cfg.targets = {random_qubit(), random_qubit()};
        for (const auto& b : run_crio(cfg).branches) {
            for (double f : b.fidelities)
                if (std::abs(f - 1.0) > 1e-10) ok = false;
        }
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (wall >= 5.0) ok = false;
    std::ostringstream detail;
    detail << "100 random 3-party + 20 random 5-party runs, every branch at "
              "fidelity 1 within 1e-10, in "
           << wall << " s";
    report(2, ok, detail.str());
}

// --------------------------------------------------------------------------
// Criterion 3: eigenoperator identity of the stator.

void criterion_3() {
    std::uniform_real_distribution<double> ud(0.0, 2 * M_PI);
    bool ok = true;
    for (int trial = 0; trial < 200 && ok; ++trial) {
        const BlochAxis axis = random_axis();
        const double alpha = ud(rng);
        const Mat sn = bloch_operator(axis).mat;
        const Mat id = Mat::Identity(2, 2);
        Mat s(4, 2);
        s.topRows(2) = id / std::sqrt(2.0);
        s.bottomRows(2) = sn / std::sqrt(2.0);
        const Mat rot_b =
            std::cos(alpha) * id + Complex(0, 1) * std::sin(alpha) * pauli_x();
        const Mat rot_c =
            std::cos(alpha) * id + Complex(0, 1) * std::sin(alpha) * sn;
        const Mat lhs = kron(rot_b, id) * s;
        const Mat rhs = s * rot_c;
        if ((lhs - rhs).cwiseAbs().maxCoeff() > 1e-12) ok = false;
    }
    report(3, ok,
           "exp(i a sigma_x) S = exp(i a sigma_n) S elementwise within 1e-12 "
           "for 200 random (alpha, axis) draws");
}

// --------------------------------------------------------------------------
// Criterion 4: full-model gate fidelities at the operating points.

void criterion_4() {
    NoiseParams noise = NoiseParams::lifetime(400.0);

    const double v0_res =
        solve_resonant_v0(OMEGA, 10 * OMEGA, 30 * OMEGA, 30 * OMEGA);
    DrivingParams pr = DrivingParams::for_angles(M_PI / 2, M_PI, v0_res);
    GateResult res =
        simulate_gate(pr, &noise, GateMode::FullResonant, default_psi0());

    const double v0_dyn = solve_dynamical_v0(0.336 * OMEGA, OMEGA, 10 * OMEGA,
                                             30 * OMEGA, 30 * OMEGA);
    DrivingParams pd = DrivingParams::for_angles(M_PI / 2, M_PI, v0_dyn);
    GateResult dyn =
        simulate_gate(pd, &noise, GateMode::FullDynamical, default_psi0());

    const bool ok = res.fidelity > 0.9835 && res.fidelity < 0.9895 &&
                    dyn.fidelity > 0.9881 && dyn.fidelity < 0.9941 &&
                    dyn.max_p_rr < 0.05;
    std::ostringstream detail;
    detail << "noisy full-model gates: resonant F=" << res.fidelity
           << " in (0.9835, 0.9895), dynamical F=" << dyn.fidelity
           << " in (0.9881, 0.9941), max pRR=" << dyn.max_p_rr << " < 0.05";
    report(4, ok, detail.str());
}

// --------------------------------------------------------------------------
// Criterion 5: averaged gate fidelities.

void criterion_5() {
    NoiseParams noise = NoiseParams::lifetime(400.0);
    const IntegratorOptions opt = average_integrator();

    const double v0_res =
        solve_resonant_v0(OMEGA, 10 * OMEGA, 30 * OMEGA, 30 * OMEGA);
    const double v0_dyn = solve_dynamical_v0(0.336 * OMEGA, OMEGA, 10 * OMEGA,
                                             30 * OMEGA, 30 * OMEGA);
    DrivingParams pr = DrivingParams::operating_point(v0_res);
    DrivingParams pd = DrivingParams::operating_point(v0_dyn);

    const double ang_res = average_fidelity_angles(
        pr, &noise, GateMode::FullResonant, default_psi0(), {8, 8}, opt);
    const double ang_dyn = average_fidelity_angles(
        pd, &noise, GateMode::FullDynamical, default_psi0(), {8, 8}, opt);
    const double inp_res = average_fidelity_inputs(
        pr, &noise, GateMode::FullResonant, M_PI / 2, M_PI, {5, 4}, opt);
    const double inp_dyn = average_fidelity_inputs(
        pd, &noise, GateMode::FullDynamical, M_PI / 2, M_PI, {5, 4}, opt);

    const bool ok = std::abs(ang_res - 0.9919) < 0.004 &&
                    std::abs(ang_dyn - 0.9961) < 0.004 &&
                    std::abs(inp_res - 0.9950) < 0.004 &&
                    std::abs(inp_dyn - 0.9976) < 0.004;
    std::ostringstream detail;
    detail << "averaged noisy fidelities within 0.004: angle avg resonant="
           << ang_res << " (ref 0.9919), dynamical=" << ang_dyn
           << " (ref 0.9961); input avg resonant=" << inp_res
           << " (ref 0.9950), dynamical=" << inp_dyn << " (ref 0.9976)";
    report(5, ok, detail.str());
}

// --------------------------------------------------------------------------
// Criterion 6: structural invariants.

void criterion_6() {
    bool ok = true;
    std::ostringstream fails;

    // Graph-state amplitude pattern.
    {
        const double a = 1.0 / (2.0 * std::sqrt(2.0));
        Vec want(8);
        want << a, a, a, a, a, -a, -a, a;
        if ((prepare_graph_state(3).amps - want).cwiseAbs().maxCoeff() > 1e-12) {
            ok = false;
            fails << " [graph state]";
        }
    }

    // Trace and positivity along a noisy gate trajectory.
    {
        NoiseParams noise = NoiseParams::lifetime(400.0);
        const double v0 =
            solve_resonant_v0(OMEGA, 10 * OMEGA, 30 * OMEGA, 30 * OMEGA);
        DrivingParams p = DrivingParams::for_angles(M_PI / 2, M_PI, v0);
        GateResult r =
            simulate_gate(p, &noise, GateMode::FullResonant, default_psi0());
        for (const auto& st : r.traj.states) {
            if (std::abs(st.mat.trace().real() - 1.0) > 1e-7) ok = false;
            Eigen::SelfAdjointEigenSolver<Mat> es(st.mat);
            if (es.eigenvalues().minCoeff() < -1e-7) ok = false;
        }
        if (!ok) fails << " [trace/positivity]";

        // Full model tracks the effective one.
        GateResult full =
            simulate_gate(p, nullptr, GateMode::FullResonant, default_psi0());
        GateResult eff = simulate_gate(p, nullptr, GateMode::EffectiveResonant,
                                       default_psi0());
        const double overlap =
            (full.traj.states.back().mat * eff.traj.states.back().mat)
                .trace()
                .real();
        if (overlap < 0.99) {
            ok = false;
            fails << " [full-vs-effective " << overlap << "]";
        }

        // Dark state stays put.
        EffectiveCouplings e = effective_couplings(p);
        Vec c = Vec::Zero(4);
        c(2) = -std::conj(e.omega_eff_11);
        c(3) = std::conj(e.omega_eff_10);
        c /= c.norm();
        GateResult dark = simulate_gate(p, nullptr, GateMode::EffectiveResonant,
                                        StateVector({2, 2}, c));
        if (std::abs(dark.fidelity - 1.0) > 1e-6 || dark.max_p_rr > 1e-6) {
            ok = false;
            fails << " [dark state]";
        }
    }

    // Eigenoperator identity (random spot checks).
    {
        std::uniform_real_distribution<double> ud(0.0, 2 * M_PI);
        for (int k = 0; k < 50; ++k) {
            const BlochAxis axis = random_axis();
            const double alpha = ud(rng);
            const Mat sn = bloch_operator(axis).mat;
            const Mat id = Mat::Identity(2, 2);
            Mat s(4, 2);
            s.topRows(2) = id / std::sqrt(2.0);
            s.bottomRows(2) = sn / std::sqrt(2.0);
            const Mat lhs =
                kron(std::cos(alpha) * id +
                         Complex(0, 1) * std::sin(alpha) * pauli_x(),
                     id) *
                s;
            const Mat rhs = s * (std::cos(alpha) * id +
                                 Complex(0, 1) * std::sin(alpha) * sn);
            if ((lhs - rhs).cwiseAbs().maxCoeff() > 1e-12) {
                ok = false;
                fails << " [eigenoperator]";
                break;
            }
        }
    }

    // Cavity fidelity decreases monotonically in kappa and gamma.
    {
        const std::vector<double> kappas = {0.5, 1.0, 2.0};
        const std::vector<double> gammas = {0.05, 0.1, 0.2};
        auto rows = fe_sweep(kappas, gammas, 0.0);
        auto f_at = [&](size_t ki, size_t gi) {
            return rows[ki * gammas.size() + gi].fe.F;
        };
        for (size_t ki = 0; ki + 1 < kappas.size(); ++ki)
            for (size_t gi = 0; gi < gammas.size(); ++gi)
                if (f_at(ki + 1, gi) >= f_at(ki, gi)) ok = false;
        for (size_t ki = 0; ki < kappas.size(); ++ki)
            for (size_t gi = 0; gi + 1 < gammas.size(); ++gi)
                if (f_at(ki, gi + 1) >= f_at(ki, gi)) ok = false;
        for (const auto& r : rows)
            if (r.fe.E > r.fe.F + 1e-12) ok = false;
        if (!ok && fails.str().find("monotone") == std::string::npos)
            fails << " [sweep monotonicity]";
    }

    report(6, ok,
           "structural invariants (graph state, trace/positivity, "
           "full-vs-effective overlap, dark state, eigenoperator identity, "
           "sweep monotonicity)" +
               (ok ? std::string() : "; failed:" + fails.str()));
}

// --------------------------------------------------------------------------
// Criterion 7: CLI determinism.

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
}

int run_cli(const std::string& cli, const std::string& args, int workers) {
    std::ostringstream cmd;
    cmd << "CRIO_NUM_WORKERS=" << workers << " \"" << cli << "\" " << args
        << " 2> /dev/null";
    const int rc = std::system(cmd.str().c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

void criterion_7() {
    const char* cli = std::getenv("CRIO_CLI");
    if (!cli || !*cli) {
        report(7, false, "CRIO_CLI environment variable not set");
        return;
    }
    bool ok = true;
    std::ostringstream fails;

    // Identical invocations produce byte-identical payloads.
    write_file("accept_sweep.cfg",
               "kappa_list = 0.5, 1, 2\n"
               "gamma_list = 0.05, 0.1, 0.2\n"
               "omega = 0\n");
    for (int run = 0; run < 2; ++run) {
        const int rc = run_cli(cli,
                               "sweep-fe --config accept_sweep.cfg --out "
                               "accept_sweep_" + std::to_string(run) + ".csv",
                               2);
        if (rc != 0) ok = false;
    }
    if (slurp("accept_sweep_0.csv").empty() ||
        slurp("accept_sweep_0.csv") != slurp("accept_sweep_1.csv")) {
        ok = false;
        fails << " [sweep-fe repeatability]";
    }

    // Bit-stability across worker counts for an averaged run.
    write_file("accept_avg.cfg",
               "kind = angles\n"
               "mode = EffectiveResonant\n"
               "n_theta = 2\n"
               "n_phi = 2\n"
               "noise = true\n");
    for (int workers : {1, 3}) {
        const int rc = run_cli(cli,
                               "avg-fidelity --config accept_avg.cfg --format "
                               "json --out accept_avg_" +
                                   std::to_string(workers) + ".json",
                               workers);
        if (rc != 0) ok = false;
    }
    if (slurp("accept_avg_1.json").empty() ||
        slurp("accept_avg_1.json") != slurp("accept_avg_3.json")) {
        ok = false;
        fails << " [worker bit-stability]";
    }

    // Config errors exit with code 2.
    write_file("accept_bad.cfg", "not_a_key = 1\n");
    if (run_cli(cli, "sweep-fe --config accept_bad.cfg --out accept_bad.out",
                1) != 2) {
        ok = false;
        fails << " [config error exit code]";
    }

    report(7, ok,
           "CLI determinism (byte-identical reruns, worker-count "
           "bit-stability, config-error exit code)" +
               (ok ? std::string() : "; failed:" + fails.str()));
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    std::cout << (g_all_ok ? "acceptance: ALL PASS" : "acceptance: FAILURES")
              << std::endl;
    return g_all_ok ? 0 : 1;
}
