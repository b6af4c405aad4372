#pragma once

#include <iosfwd>

#include "crio/linalg.hpp"
#include "crio/types.hpp"

namespace crio {

/// Single-sided cavity + Lambda atom, all rates in units of the coupling g.
struct CavityParams {
    double kappa = 0.0;  // cavity damping rate
    double gamma = 0.0;  // atomic decay rate
    double g = 1.0;      // coupling strength (normalization)
    double omega = 0.0;  // photon detuning
};

struct ReflectionCoeffs {
    Complex r_h1;
    Complex r_h2;
    Complex r0;
};

struct FEResult {
    double F = 0.0;  // |<eff|ideal>/N|^2
    double E = 0.0;  // |<eff|ideal>|^2
    double N = 0.0;  // norm of the (unnormalized) effective state
};

struct FESweepRow {
    double kappa_over_g = 0.0;
    double gamma_over_g = 0.0;
    double omega_over_g = 0.0;
    FEResult fe;
};

/// Half-wave plate at angle theta to the vertical:
/// [[cos 2t, sin 2t], [sin 2t, -cos 2t]] in the {H, V} basis.
/// HWP(0) = sigma_z, HWP(pi/8) = Hadamard.
Operator hwp_operator(double theta);

/// Reflection coefficients of the coupled photon-cavity-atom scattering.
/// r0 follows the decoupled (g = 0) formula (i w - k/2)/(i w + k/2) unless
/// `clamp_r0` is set, in which case the deep-overdamped value r0 = -1 is used
/// (this is the regime assumed by the paper's noise analysis).
ReflectionCoeffs reflection_coefficients(const CavityParams& p,
                                         bool clamp_r0 = true);

/// Ideal scattering map on photon (x) atom with encoding
/// {H = 0, V = 1} x {g_v = 0, g_h = 1}:
///   |H g_h> -> |V g_v>,  |H g_v> -> -|H g_v>,
///   |V g_h> -> -|V g_h>, |V g_v> -> |H g_h>.
Operator ideal_scatter_map();

/// Noisy scattering map with the same encoding:
///   |H g_h> -> r_h1 |H g_h> + r_h2 |V g_v>   (and V g_v symmetrically),
///   decoupled rows scaled by r0. Generally non-unitary.
Operator scatter_map(const ReflectionCoeffs& c);

/// Full h3-preparation pipeline: PBS split, double pass through cavity 1 with
/// HWP(0) between reflections, the same for cavity 2, PBS remix. Photon is
/// factor 0, atoms are factors 1 and 2. Ideal when `noise` is null; otherwise
/// returns the unnormalized effective state. `transmission` scales the
/// fiber-routed V branch (default lossless).
StateVector prepare_h3(Complex a1, Complex a2, Complex b1, Complex b2,
                       Complex c1, Complex c2,
                       const CavityParams* noise = nullptr,
                       bool clamp_r0 = true, double transmission = 1.0);

/// N = ||psi_eff||, E = |<psi_eff|psi_ideal>|^2, F = E / N^2.
FEResult fidelity_efficiency(const StateVector& psi_eff,
                             const StateVector& psi_ideal);

/// prepare_h3 + fidelity_efficiency with balanced inputs per grid point,
/// emitted in row-major (kappa outer, gamma inner) order.
std::vector<FESweepRow> fe_sweep(const std::vector<double>& kappas,
                                 const std::vector<double>& gammas,
                                 double omega);

/// CSV with header kappa_over_g,gamma_over_g,omega_over_g,F,E (6 decimals).
void write_fe_csv(std::ostream& os, const std::vector<FESweepRow>& rows);

}  // namespace crio
