#include "crio/cavity.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

namespace crio {

Operator hwp_operator(double theta) {
    Mat m(2, 2);
    m << std::cos(2 * theta), std::sin(2 * theta), std::sin(2 * theta),
        -std::cos(2 * theta);
    return Operator(std::move(m), true, true);
}

ReflectionCoeffs reflection_coefficients(const CavityParams& p, bool clamp_r0) {
    if (p.kappa < 0 || p.gamma < 0)
        throw InvalidInput("reflection_coefficients: negative rate");
    if (p.kappa == 0.0 && p.omega == 0.0)
        throw InvalidInput("reflection_coefficients: kappa = omega = 0 is singular");
    const Complex iw(0.0, p.omega);
    const Complex a = iw + p.kappa / 2.0;
    const double g2 = p.g * p.g;
    const Complex d = 2.0 * g2 + a * (iw + p.gamma / 2.0);
    ReflectionCoeffs c;
    c.r_h1 = ((iw - p.kappa / 2.0) + p.kappa * g2 / d) / a;
    c.r_h2 = p.kappa * g2 / (a * d);
    c.r0 = clamp_r0 ? Complex(-1.0, 0.0) : (iw - p.kappa / 2.0) / a;
    for (Complex r : {c.r_h1, c.r_h2, c.r0}) {
        if (std::abs(r) > 1.0 + 1e-12)
            throw NumericalError("reflection_coefficients: |r| > 1");
    }
    return c;
}

Operator scatter_map(const ReflectionCoeffs& c) {
    // Basis index = photon * 2 + atom with {H=0, V=1} x {g_v=0, g_h=1}.
    Mat m = Mat::Zero(4, 4);
    m(0, 0) = c.r0;    // |H g_v> -> r0 |H g_v>
    m(3, 3) = c.r0;    // |V g_h> -> r0 |V g_h>
    m(1, 1) = c.r_h1;  // |H g_h> -> r_h1 |H g_h> + r_h2 |V g_v>
    m(2, 1) = c.r_h2;
    m(2, 2) = c.r_h1;  // |V g_v> -> r_h2 |H g_h> + r_h1 |V g_v>
    m(1, 2) = c.r_h2;
    const bool unitary =
        (m.adjoint() * m - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12;
    return Operator(std::move(m), unitary, false);
}

Operator ideal_scatter_map() {
    return scatter_map({Complex(0.0), Complex(1.0), Complex(-1.0)});
}

StateVector prepare_h3(Complex a1, Complex a2, Complex b1, Complex b2,
                       Complex c1, Complex c2, const CavityParams* noise,
                       bool clamp_r0, double transmission) {
    for (auto [x, y] : {std::pair{a1, a2}, {b1, b2}, {c1, c2}}) {
        if (std::abs(std::norm(x) + std::norm(y) - 1.0) > 1e-10)
            throw InvalidInput("prepare_h3: input amplitude pair not normalized");
    }
    const Operator scatter =
        noise ? scatter_map(reflection_coefficients(*noise, clamp_r0))
              : ideal_scatter_map();
    const Operator hwp0 = hwp_operator(0.0);

    // Photon is factor 0, atoms are factors 1 (Bob) and 2 (Charlie).
    // Encoding: photon {H=0, V=1}, atoms {g_v=0, g_h=1}.
    Vec photon(2), atom1(2), atom2(2);
    photon << a1, a2;
    atom1 << b2, b1;  // b1 g_h + b2 g_v
    atom2 << c2, c1;
    StateVector psi0 = kron(kron(StateVector({2}, photon, false),
                                 StateVector({2}, atom1, false)),
                            StateVector({2}, atom2, false));

    // PBS: H stays in line l1 untouched, V goes to l2 and scatters.
    Vec amps_h = psi0.amps;
    Vec amps_v = psi0.amps;
    amps_h.segment(4, 4).setZero();
    amps_v.segment(0, 4).setZero();
    StateVector l2({2, 2, 2}, std::move(amps_v), false);
    for (int atom : {1, 2}) {
        l2 = apply(scatter, {0, atom}, l2);
        l2 = apply(hwp0, {0}, l2);
        l2 = apply(scatter, {0, atom}, l2);
    }
    return StateVector({2, 2, 2}, amps_h + transmission * l2.amps, false);
}

FEResult fidelity_efficiency(const StateVector& psi_eff,
                             const StateVector& psi_ideal) {
    if (psi_eff.dim() != psi_ideal.dim())
        throw InvalidInput("fidelity_efficiency: dimension mismatch");
    FEResult r;
    r.N = psi_eff.amps.norm();
    if (r.N < 1e-14) throw InvalidInput("fidelity_efficiency: zero-norm state");
    r.E = std::norm(psi_eff.amps.dot(psi_ideal.amps));
    r.F = r.E / (r.N * r.N);
    return r;
}

std::vector<FESweepRow> fe_sweep(const std::vector<double>& kappas,
                                 const std::vector<double>& gammas,
                                 double omega) {
    if (kappas.empty() || gammas.empty())
        throw InvalidInput("fe_sweep: empty grid");
    const Complex s = 1.0 / std::sqrt(2.0);
    const StateVector ideal = prepare_h3(s, s, s, s, s, s);
    const StateVector ideal_n({2, 2, 2}, ideal.amps / ideal.amps.norm());
    std::vector<FESweepRow> rows;
    rows.reserve(kappas.size() * gammas.size());
    for (double k : kappas) {
        for (double g : gammas) {
            CavityParams p{k, g, 1.0, omega};
            FESweepRow row{k, g, omega, {}};
            row.fe = fidelity_efficiency(prepare_h3(s, s, s, s, s, s, &p),
                                         ideal_n);
            rows.push_back(row);
        }
    }
    return rows;
}

void write_fe_csv(std::ostream& os, const std::vector<FESweepRow>& rows) {
    os << "kappa_over_g,gamma_over_g,omega_over_g,F,E\n";
    os << std::fixed << std::setprecision(6);
    for (const auto& r : rows) {
        os << r.kappa_over_g << ',' << r.gamma_over_g << ',' << r.omega_over_g
           << ',' << r.fe.F << ',' << r.fe.E << '\n';
    }
}

}  // namespace crio
