#pragma once

#include <functional>

#include "crio/types.hpp"

namespace crio {

struct IntegratorOptions {
    double rtol = 1e-8;
    double atol = 1e-10;
    long max_steps = 400'000'000L;
    /// Number of uniformly spaced output samples (including both endpoints)
    /// when no explicit sample grid is given.
    int n_samples = 201;
};

using HamiltonianFn = std::function<Mat(double)>;

/// Integrate d rho/dt = -i[H(t), rho] + sum_k (L rho L^+ - 1/2 {L^+L, rho})
/// with an adaptive Dormand-Prince 5(4) stepper. Deterministic for identical
/// inputs. Output states are recorded on the sample grid.
Trajectory integrate_master_equation(const HamiltonianFn& h,
                                     const std::vector<Mat>& lindblads,
                                     const DensityMatrix& rho0, double t0,
                                     double t1,
                                     const IntegratorOptions& opt = {},
                                     std::vector<double> sample_times = {});

/// Same stepper acting on an arbitrary (not necessarily hermitian) matrix by
/// linearity of the Lindblad generator; used to propagate operator-basis
/// elements. No hermiticity or trace guards.
Mat propagate_lindblad_matrix(const HamiltonianFn& h,
                              const std::vector<Mat>& lindblads, Mat m0,
                              double t0, double t1,
                              const IntegratorOptions& opt = {});

}  // namespace crio
