#include "crio/master_equation.hpp"

#include <algorithm>
#include <cmath>

namespace crio {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// 4th-order embedded weights.
constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                 e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;

struct LindbladRhs {
    const HamiltonianFn& h;
    const std::vector<Mat>& ls;
    Mat gamma_half;  // (1/2) sum L^+ L
    bool check_hermitian;

    LindbladRhs(const HamiltonianFn& h_, const std::vector<Mat>& ls_,
                int dim, bool check)
        : h(h_), ls(ls_), check_hermitian(check) {
        gamma_half = Mat::Zero(dim, dim);
        for (const Mat& l : ls) gamma_half += 0.5 * (l.adjoint() * l);
    }

    Mat operator()(double t, const Mat& rho) const {
        Mat ht = h(t);
        if (check_hermitian &&
            (ht - ht.adjoint()).cwiseAbs().maxCoeff() > 1e-9)
            throw NumericalError("integrate_master_equation: H(t) not hermitian");
        Mat out = Complex(0, -1) * (ht * rho - rho * ht);
        out -= gamma_half * rho + rho * gamma_half;
        for (const Mat& l : ls) out += l * rho * l.adjoint();
        return out;
    }
};

double error_norm(const Mat& err, const Mat& y0, const Mat& y1, double rtol,
                  double atol) {
    double acc = 0.0;
    const auto* e = err.data();
    const auto* a = y0.data();
    const auto* b = y1.data();
    const Eigen::Index n = err.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double sc = atol + rtol * std::max(std::abs(a[i]), std::abs(b[i]));
        const double r = std::abs(e[i]) / sc;
        acc += r * r;
    }
    return std::sqrt(acc / static_cast<double>(n));
}

// Advance y from t0 to t1, invoking `on_step` is not needed; returns final y.
Mat advance(const LindbladRhs& rhs, Mat y, double t0, double t1, double rtol,
            double atol, long& steps_left, double& h_hint) {
    const double span = t1 - t0;
    if (span <= 0.0) return y;
    double t = t0;
    double h = std::min(h_hint > 0 ? h_hint : span / 100.0, span);
    Mat k1 = rhs(t, y);
    while (t < t1) {
        if (steps_left-- <= 0)
            throw NumericalError("integrate_master_equation: step budget exhausted");
        h = std::min(h, t1 - t);
        if (h < 1e-14 * std::max(1.0, std::abs(t)))
            throw NumericalError("integrate_master_equation: step size underflow (stiff?)");
        Mat k2 = rhs(t + c2 * h, y + h * (a21 * k1));
        Mat k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
        Mat k4 = rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        Mat k5 = rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        Mat k6 = rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        Mat y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        Mat k7 = rhs(t + h, y5);
        Mat y4 = y + h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double err = error_norm(y5 - y4, y, y5, rtol, atol);
        if (err <= 1.0) {
            t += h;
            y = std::move(y5);
            k1 = std::move(k7);  // FSAL
        }
        const double fac = (err > 0.0)
                               ? 0.9 * std::pow(err, -0.2)
                               : 5.0;
        h *= std::clamp(fac, 0.2, 5.0);
    }
    h_hint = h;
    return y;
}

}  // namespace

Trajectory integrate_master_equation(const HamiltonianFn& h,
                                     const std::vector<Mat>& lindblads,
                                     const DensityMatrix& rho0, double t0,
                                     double t1, const IntegratorOptions& opt,
                                     std::vector<double> sample_times) {
    const int dim = rho0.dim();
    for (const Mat& l : lindblads)
        if (l.rows() != dim || l.cols() != dim)
            throw InvalidInput("integrate_master_equation: Lindblad dim mismatch");
    if (t1 < t0) throw InvalidInput("integrate_master_equation: t1 < t0");

    if (sample_times.empty()) {
        const int n = std::max(2, opt.n_samples);
        sample_times.resize(n);
        for (int i = 0; i < n; ++i)
            sample_times[i] = t0 + (t1 - t0) * i / (n - 1);
    }
    if (!std::is_sorted(sample_times.begin(), sample_times.end()))
        throw InvalidInput("integrate_master_equation: sample times not sorted");

    LindbladRhs rhs(h, lindblads, dim, /*check=*/true);
    Trajectory traj;
    Mat y = rho0.mat;
    double t = t0;
    double h_hint = 0.0;
    long steps_left = opt.max_steps;
    const double trace0 = rho0.mat.trace().real();
    for (double ts : sample_times) {
        y = advance(rhs, std::move(y), t, ts, opt.rtol, opt.atol, steps_left, h_hint);
        t = ts;
        // Re-symmetrize the accumulated floating-point skew before recording.
        Mat sym = 0.5 * (y + y.adjoint().eval());
        if (std::abs(sym.trace().real() - trace0) > 1e-5)
            throw NumericalError("integrate_master_equation: trace drift too large");
        traj.times.push_back(ts);
        traj.states.emplace_back(rho0.dims, std::move(sym));
    }
    return traj;
}

Mat propagate_lindblad_matrix(const HamiltonianFn& h,
                              const std::vector<Mat>& lindblads, Mat m0,
                              double t0, double t1,
                              const IntegratorOptions& opt) {
    LindbladRhs rhs(h, lindblads, static_cast<int>(m0.rows()), /*check=*/false);
    double h_hint = 0.0;
    long steps_left = opt.max_steps;
    return advance(rhs, std::move(m0), t0, t1, opt.rtol, opt.atol, steps_left, h_hint);
}

}  // namespace crio
