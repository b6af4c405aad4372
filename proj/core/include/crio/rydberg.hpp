#pragma once

#include "crio/master_equation.hpp"
#include "crio/types.hpp"

namespace crio {

/// Two-atom register over {|0>, |1>, |R>} per atom; basis index = 3*c + t for
/// control level c and target level t: {00,01,0R,10,11,1R,R0,R1,RR}.
inline constexpr int kRydDim = 9;

/// Laser drive: omega0 couples the control's |1> <-> |R| (red detuning
/// delta0); omega1/omega2 couple the target's |0>/|1> <-> |R> (blue detunings
/// delta1/delta2). All rates rad/us, times us. The blockade offset v0 fixes
/// the van der Waals shift via v = delta1 - delta0 + v0.
struct DrivingParams {
    double omega0 = 0.0;
    Complex omega1{0.0, 0.0};
    Complex omega2{0.0, 0.0};
    double delta0 = 0.0;
    double delta1 = 0.0;
    double delta2 = 0.0;
    double v = 0.0;
    double v0 = 0.0;
    double base_unit = 0.0;  // Omega reference

    /// Operating point: Omega/2pi = 10 MHz (Omega = 20pi rad/us),
    /// delta0 = 10 Omega, delta1 = delta2 = 30 Omega, equal drive amplitudes.
    static DrivingParams operating_point(double v0);

    /// Same operating point with the amplitudes realizing U(theta, phi):
    /// omega1 = sqrt(2) Omega sin(theta/2) e^{i phi},
    /// omega2 = -sqrt(2) Omega cos(theta/2).
    static DrivingParams for_angles(double theta, double phi, double v0);
};

struct EffectiveCouplings {
    Complex omega_eff_10{0.0, 0.0};
    Complex omega_eff_11{0.0, 0.0};
    double delta_rr = 0.0;   // Stark shift of |RR>
    double delta = 0.0;      // v0 + delta_rr
    double omega_eff = 0.0;  // sqrt(|O10|^2 + |O11|^2)
    double theta = 0.0;      // target-gate rotation angles
    double phi = 0.0;
    bool regime_warning = false;  // any detuning/amplitude ratio in [5, 10)
};

/// Rydberg decay and dephasing rates (rad/us). The defaults reproduce the
/// reported gate fidelities: every channel at 1/tau with tau = 400 us.
struct NoiseParams {
    double tau = 400.0;
    double gamma0 = 1.0 / 400.0;   // |R> -> |0> decay, per atom
    double gamma1 = 1.0 / 400.0;   // |R> -> |1> decay, per atom
    double kappa_c = 1.0 / 400.0;  // control-atom dephasing
    double kappa_t = 1.0 / 400.0;  // target-atom dephasing

    static NoiseParams lifetime(double tau_us) {
        const double r = 1.0 / tau_us;
        return {tau_us, r, r, r, r};
    }
    static NoiseParams none() { return {400.0, 0.0, 0.0, 0.0, 0.0}; }
};

enum class GateMode {
    IdealUnitary,
    EffectiveResonant,
    EffectiveDynamical,
    FullResonant,
    FullDynamical,
};

std::string to_string(GateMode mode);
GateMode gate_mode_from_string(const std::string& name);

/// beta1..beta3 in [0, pi/2], beta4..beta6 in [0, 2pi):
/// |Psi0> = sin b1 |00> + cos b1 [ e^{i b4} sin b2 |01>
///        + cos b2 ( e^{i b5} sin b3 |10> + e^{i b6} cos b3 |11> ) ].
struct InputStateParams {
    double beta1 = 0.0, beta2 = 0.0, beta3 = 0.0;
    double beta4 = 0.0, beta5 = 0.0, beta6 = 0.0;
};

/// Two-qubit computational state (dims {2, 2}) from the beta parameterization.
StateVector input_state(const InputStateParams& p);

/// Literal interaction-picture Hamiltonian with explicit e^{+-i Delta t}
/// phases and the V |RR><RR| term.
HamiltonianFn build_full_hamiltonian(const DrivingParams& p);

/// Static laser-frame equivalent used for propagation: diagonal frame
/// energies (+delta0 on |R0>,|R1>, -delta1 on |0R>,|1R>, +v0 on |RR>) with
/// the ground-state light-shift compensation and cross-Raman cancellation
/// terms subtracted (the auxiliary compensation fields assumed perfect).
Mat build_static_hamiltonian(const DrivingParams& p);

/// Second-order perturbative couplings; hard error when any detuning to
/// amplitude ratio is below 5, warning flag below 10.
EffectiveCouplings effective_couplings(const DrivingParams& p);

/// 3x3 effective Hamiltonian on {|10>, |11>, |RR>}. Resonant mode absorbs
/// the |RR> Stark shift (delta = 0); dynamical mode keeps delta and requires
/// |delta| / (omega_eff / 2) >= 3 (warning flag is on EffectiveCouplings).
Operator build_effective_hamiltonian(const EffectiveCouplings& e,
                                     GateMode mode);

/// U(theta, phi): identity on {|00>, |01>},
/// [[cos t, sin t e^{i p}], [sin t e^{-i p}, -cos t]] on {|10>, |11>}.
Operator holonomic_target_unitary(double theta, double phi);

/// Four decay and two dephasing Lindblad operators of the two-atom register.
std::vector<Mat> rydberg_lindblads(const NoiseParams& n);

/// Fixed point of v0 = -delta_rr(v0) (|RR> shift absorbed, resonant gate).
double solve_resonant_v0(double omega, double delta0, double delta1,
                         double delta2);
/// Fixed point of v0 = delta - delta_rr(v0) for a prescribed detuning delta.
double solve_dynamical_v0(double delta, double omega, double delta0,
                          double delta1, double delta2);

/// Default tolerances for the 9-level gate simulations.
IntegratorOptions gate_integrator();

struct GateResult {
    GateMode mode = GateMode::IdealUnitary;
    double t_gate = 0.0;    // us (calibrated for full modes)
    double t_nominal = 0.0; // pi / (omega_eff / 2) or pi / omega_d
    double fidelity = 0.0;  // F = tr(rho(T) |Psi_t><Psi_t|)
    double max_p_rr = 0.0;  // max population of |RR> over the sampled run
    Trajectory traj;        // observables: p00,p01,p10,p11,pRR,fidelity
};

/// Evolve psi0 (two-qubit computational state) over one gate cycle under the
/// selected model; noise == nullptr runs the closed system. Full modes
/// calibrate the gate time by maximizing the noiseless fidelity of the
/// uniform four-state probe over [0.9, 1.3] x nominal T (4001-point scan).
GateResult simulate_gate(const DrivingParams& p, const NoiseParams* noise,
                         GateMode mode, const StateVector& psi0,
                         const IntegratorOptions& opt = gate_integrator());

struct AngleGrid {
    int n_theta = 8;  // uniform over [0, 2pi)
    int n_phi = 8;
};

/// Mean final fidelity over the (theta, phi) grid, with the drive amplitudes
/// re-realized per angle pair. Grid points are distributed across workers and
/// reduced pairwise in a fixed tree (bit-stable across worker counts).
double average_fidelity_angles(const DrivingParams& base,
                               const NoiseParams* noise, GateMode mode,
                               const StateVector& psi0,
                               const AngleGrid& grid = {},
                               const IntegratorOptions& opt = gate_integrator());

struct InputGrid {
    int n_linear = 5;  // beta1..beta3 uniform over [0, pi/2]
    int n_phase = 4;   // beta4..beta6 uniform over [0, 2pi)
};

/// Mean fidelity over the beta grid at a fixed angle pair. The channel is
/// propagated once per computational basis operator (16 runs) and applied to
/// every grid state by linearity.
double average_fidelity_inputs(const DrivingParams& p, const NoiseParams* noise,
                               GateMode mode, double theta, double phi,
                               const InputGrid& grid = {},
                               const IntegratorOptions& opt = gate_integrator());

}  // namespace crio
