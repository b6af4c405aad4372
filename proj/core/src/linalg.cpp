#include "crio/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace crio {

Mat pauli_x() {
    Mat m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

Mat pauli_y() {
    Mat m(2, 2);
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return m;
}

Mat pauli_z() {
    Mat m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

Mat hadamard() {
    Mat m(2, 2);
    m << 1, 1, 1, -1;
    return m / std::sqrt(2.0);
}

Mat cz_gate() {
    Mat m = Mat::Identity(4, 4);
    m(3, 3) = -1;
    return m;
}

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

StateVector kron(const StateVector& a, const StateVector& b) {
    std::vector<int> dims = a.dims;
    dims.insert(dims.end(), b.dims.begin(), b.dims.end());
    Vec out(a.dim() * b.dim());
    for (int i = 0; i < a.dim(); ++i)
        out.segment(i * b.dim(), b.dim()) = a.amps(i) * b.amps;
    return StateVector(std::move(dims), std::move(out), a.normalized && b.normalized);
}

Operator kron(const Operator& a, const Operator& b) {
    return Operator(kron(a.mat, b.mat), a.unitary && b.unitary,
                    a.hermitian && b.hermitian);
}

Operator bloch_operator(const BlochAxis& axis) {
    Mat m = std::sin(axis.theta) * std::cos(axis.phi) * pauli_x() +
            std::sin(axis.theta) * std::sin(axis.phi) * pauli_y() +
            std::cos(axis.theta) * pauli_z();
    return Operator(std::move(m), true, true);
}

namespace {

// Strides (in amplitude-index units) of each subsystem, leftmost most significant.
std::vector<int> strides(const std::vector<int>& dims) {
    std::vector<int> s(dims.size());
    int acc = 1;
    for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
        s[k] = acc;
        acc *= dims[k];
    }
    return s;
}

}  // namespace

Mat embed(const Mat& op, const std::vector<int>& targets,
          const std::vector<int>& dims) {
    const int n = product(dims);
    const auto str = strides(dims);
    int dt = 1;
    for (int t : targets) {
        if (t < 0 || t >= static_cast<int>(dims.size()))
            throw InvalidInput("embed: target index out of range");
        dt *= dims[t];
    }
    if (op.rows() != dt)
        throw InvalidInput("embed: operator dim does not match targeted subsystems");

    // Per-target strides inside the operator's own index (left significant).
    std::vector<int> tstr(targets.size());
    {
        int acc = 1;
        for (int k = static_cast<int>(targets.size()) - 1; k >= 0; --k) {
            tstr[k] = acc;
            acc *= dims[targets[k]];
        }
    }

    Mat out = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        // Decompose i into the operator part ti and the fixed remainder.
        int ti = 0;
        int rest = i;
        for (size_t k = 0; k < targets.size(); ++k) {
            const int idx = (i / str[targets[k]]) % dims[targets[k]];
            ti += idx * tstr[k];
            rest -= idx * str[targets[k]];
        }
        for (int tj = 0; tj < dt; ++tj) {
            if (op(ti, tj) == Complex(0.0)) continue;
            int j = rest;
            for (size_t k = 0; k < targets.size(); ++k)
                j += ((tj / tstr[k]) % dims[targets[k]]) * str[targets[k]];
            out(i, j) = op(ti, tj);
        }
    }
    return out;
}

StateVector apply(const Operator& op, const std::vector<int>& targets,
                  const StateVector& state) {
    Mat full = embed(op.mat, targets, state.dims);
    return StateVector(state.dims, full * state.amps, state.normalized && op.unitary);
}

DensityMatrix apply(const Operator& op, const std::vector<int>& targets,
                    const DensityMatrix& state) {
    Mat full = embed(op.mat, targets, state.dims);
    return DensityMatrix(state.dims, full * state.mat * full.adjoint());
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep) {
    const auto str = strides(rho.dims);
    std::vector<int> kdims;
    for (int k : keep) {
        if (k < 0 || k >= static_cast<int>(rho.dims.size()))
            throw InvalidInput("partial_trace: keep index out of range");
        kdims.push_back(rho.dims[k]);
    }
    std::vector<int> traced;
    for (int k = 0; k < static_cast<int>(rho.dims.size()); ++k)
        if (std::find(keep.begin(), keep.end(), k) == keep.end()) traced.push_back(k);

    const int nk = product(kdims);
    std::vector<int> kstr(keep.size());
    {
        int acc = 1;
        for (int k = static_cast<int>(keep.size()) - 1; k >= 0; --k) {
            kstr[k] = acc;
            acc *= kdims[k];
        }
    }
    int nt = 1;
    for (int t : traced) nt *= rho.dims[t];

    Mat out = Mat::Zero(nk, nk);
    for (int a = 0; a < nk; ++a) {
        for (int b = 0; b < nk; ++b) {
            // Base indices with kept factors fixed at (a, b).
            int ia = 0, ib = 0;
            for (size_t k = 0; k < keep.size(); ++k) {
                ia += ((a / kstr[k]) % kdims[k]) * str[keep[k]];
                ib += ((b / kstr[k]) % kdims[k]) * str[keep[k]];
            }
            Complex sum = 0.0;
            for (int t = 0; t < nt; ++t) {
                int off = 0, rem = t;
                for (int k = static_cast<int>(traced.size()) - 1; k >= 0; --k) {
                    const int d = rho.dims[traced[k]];
                    off += (rem % d) * str[traced[k]];
                    rem /= d;
                }
                sum += rho.mat(ia + off, ib + off);
            }
            out(a, b) = sum;
        }
    }
    return DensityMatrix(std::move(kdims), std::move(out));
}

std::vector<Branch> measure_branches(const StateVector& state, int subsystem,
                                     const std::vector<Vec>& basis,
                                     const std::vector<std::string>& labels) {
    if (subsystem < 0 || subsystem >= static_cast<int>(state.dims.size()))
        throw InvalidInput("measure_branches: subsystem index out of range");
    const int d = state.dims[subsystem];
    if (static_cast<int>(basis.size()) != d)
        throw InvalidInput("measure_branches: basis does not span the subsystem");
    for (size_t i = 0; i < basis.size(); ++i) {
        if (basis[i].size() != d)
            throw InvalidInput("measure_branches: basis vector dimension mismatch");
        for (size_t j = 0; j <= i; ++j) {
            const Complex ip = basis[j].dot(basis[i]);
            const double want = (i == j) ? 1.0 : 0.0;
            if (std::abs(ip - want) > 1e-10)
                throw InvalidInput("measure_branches: basis not orthonormal");
        }
    }

    std::vector<Branch> out;
    for (int b = 0; b < d; ++b) {
        Mat proj = basis[b] * basis[b].adjoint();
        Mat full = embed(proj, {subsystem}, state.dims);
        Vec post = full * state.amps;
        const double p = post.squaredNorm();
        if (p < 1e-12) continue;
        Branch br;
        br.label = labels.empty() ? std::to_string(b) : labels.at(b);
        br.prob = p;
        br.post = StateVector(state.dims, post / std::sqrt(p));
        out.push_back(std::move(br));
    }
    return out;
}

StateVector project_out(const StateVector& state, int subsystem, const Vec& bra) {
    if (subsystem < 0 || subsystem >= static_cast<int>(state.dims.size()))
        throw InvalidInput("project_out: subsystem index out of range");
    const int d = state.dims[subsystem];
    if (bra.size() != d) throw InvalidInput("project_out: bra dimension mismatch");
    const auto str = strides(state.dims);
    std::vector<int> ndims;
    for (int k = 0; k < static_cast<int>(state.dims.size()); ++k)
        if (k != subsystem) ndims.push_back(state.dims[k]);
    if (ndims.empty()) ndims.push_back(1);

    const int n_out = product(ndims);
    Vec out = Vec::Zero(n_out);
    std::vector<int> nstr(ndims.size());
    {
        int acc = 1;
        for (int k = static_cast<int>(ndims.size()) - 1; k >= 0; --k) {
            nstr[k] = acc;
            acc *= ndims[k];
        }
    }
    for (int o = 0; o < n_out; ++o) {
        // Map the reduced index back to a full index with subsystem at 0.
        int base = 0, kk = 0;
        for (int k = 0; k < static_cast<int>(state.dims.size()); ++k) {
            if (k == subsystem) continue;
            base += ((o / nstr[kk]) % ndims[kk]) * str[k];
            ++kk;
        }
        Complex sum = 0.0;
        for (int m = 0; m < d; ++m) sum += std::conj(bra(m)) * state.amps(base + m * str[subsystem]);
        out(o) = sum;
    }
    return StateVector(std::move(ndims), std::move(out), false);
}

double state_fidelity(const DensityMatrix& rho, const StateVector& psi) {
    if (rho.dim() != psi.dim())
        throw InvalidInput("state_fidelity: dimension mismatch");
    const Complex f = psi.amps.dot(rho.mat * psi.amps);
    if (std::abs(f.imag()) > 1e-8)
        throw NumericalError("state_fidelity: non-negligible imaginary part");
    return f.real();
}

double overlap2(const StateVector& a, const StateVector& b) {
    return std::norm(a.amps.dot(b.amps));
}

Mat expm_i_hermitian(const Mat& h, double t) {
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    if (es.info() != Eigen::Success)
        throw NumericalError("expm_i_hermitian: eigendecomposition failed");
    Vec phases = (Complex(0, -t) * es.eigenvalues().cast<Complex>().array()).exp();
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace crio
