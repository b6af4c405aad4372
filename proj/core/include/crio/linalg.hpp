#pragma once

#include "crio/types.hpp"

namespace crio {

/// Kronecker products; dims concatenate, left factor most significant.
StateVector kron(const StateVector& a, const StateVector& b);
Operator kron(const Operator& a, const Operator& b);
Mat kron(const Mat& a, const Mat& b);

/// sigma_n = sin(t)cos(p) X + sin(t)sin(p) Y + cos(t) Z; hermitian and unitary.
Operator bloch_operator(const BlochAxis& axis);

/// Embed `op` on the listed subsystems (identity elsewhere) and apply it.
StateVector apply(const Operator& op, const std::vector<int>& targets,
                  const StateVector& state);
DensityMatrix apply(const Operator& op, const std::vector<int>& targets,
                    const DensityMatrix& state);

/// Expand `op` acting on `targets` to the full register described by dims.
Mat embed(const Mat& op, const std::vector<int>& targets,
          const std::vector<int>& dims);

/// Trace out all factors not listed in `keep` (kept order follows `keep`).
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep);

/// One projective-measurement outcome branch.
struct Branch {
    std::string label;
    double prob = 0.0;
    StateVector post;
};

/// Enumerate all outcome branches of measuring `subsystem` in `basis`.
/// Zero-probability branches (p < 1e-12) are pruned.
std::vector<Branch> measure_branches(const StateVector& state, int subsystem,
                                     const std::vector<Vec>& basis,
                                     const std::vector<std::string>& labels);

/// Contract one subsystem with <bra| and drop that factor (unnormalized).
StateVector project_out(const StateVector& state, int subsystem, const Vec& bra);

/// F = <psi| rho |psi>.
double state_fidelity(const DensityMatrix& rho, const StateVector& psi);

/// |<a|b>|^2 for pure states (global-phase insensitive).
double overlap2(const StateVector& a, const StateVector& b);

/// exp(-i H t) for hermitian H, via eigendecomposition.
Mat expm_i_hermitian(const Mat& h, double t);

}  // namespace crio
