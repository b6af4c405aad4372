#pragma once

#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace crio {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

/// Thrown when a computation fails for numerical reasons (stiffness,
/// non-convergence, invariant violation along a trajectory).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown on malformed inputs (dimension mismatches, invalid parameters).
struct InvalidInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

inline int product(const std::vector<int>& dims) {
    int p = 1;
    for (int d : dims) {
        if (d < 1) throw InvalidInput("subsystem dimension must be >= 1");
        p *= d;
    }
    return p;
}

/// Pure state over an ordered list of subsystem factors.
/// The leftmost factor is the most significant in the amplitude index.
struct StateVector {
    std::vector<int> dims;
    Vec amps;
    bool normalized = true;

    StateVector() = default;
    StateVector(std::vector<int> dims_, Vec amps_, bool normalized_ = true)
        : dims(std::move(dims_)), amps(std::move(amps_)), normalized(normalized_) {
        if (amps.size() != product(dims))
            throw InvalidInput("StateVector: amplitude length does not match dims");
        if (normalized && std::abs(amps.squaredNorm() - 1.0) > 1e-10)
            throw InvalidInput("StateVector: flagged normalized but norm deviates");
    }

    int dim() const { return static_cast<int>(amps.size()); }
    double norm() const { return amps.norm(); }

    /// Computational basis state |index> of a register with the given dims.
    static StateVector basis(std::vector<int> dims_, int index) {
        Vec v = Vec::Zero(product(dims_));
        v(index) = 1.0;
        return StateVector(std::move(dims_), std::move(v));
    }

    /// Single qubit in (a|0> + b|1>), normalized by the caller.
    static StateVector qubit(Complex a, Complex b) {
        Vec v(2);
        v << a, b;
        return StateVector({2}, std::move(v));
    }

    /// |+> = (|0>+|1>)/sqrt(2).
    static StateVector plus() {
        return qubit(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
    }
};

/// Mixed state over an ordered list of subsystem factors.
struct DensityMatrix {
    std::vector<int> dims;
    Mat mat;

    DensityMatrix() = default;
    DensityMatrix(std::vector<int> dims_, Mat mat_)
        : dims(std::move(dims_)), mat(std::move(mat_)) {
        const int n = product(dims);
        if (mat.rows() != n || mat.cols() != n)
            throw InvalidInput("DensityMatrix: matrix size does not match dims");
        if ((mat - mat.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
            throw InvalidInput("DensityMatrix: not hermitian");
    }

    int dim() const { return static_cast<int>(mat.rows()); }

    static DensityMatrix pure(const StateVector& psi) {
        return DensityMatrix(psi.dims, psi.amps * psi.amps.adjoint());
    }
};

/// Dense operator with optional verified predicates.
struct Operator {
    Mat mat;
    bool unitary = false;
    bool hermitian = false;

    Operator() = default;
    explicit Operator(Mat m, bool unitary_ = false, bool hermitian_ = false)
        : mat(std::move(m)), unitary(unitary_), hermitian(hermitian_) {
        if (mat.rows() != mat.cols()) throw InvalidInput("Operator: matrix must be square");
        if (unitary) {
            Mat err = mat.adjoint() * mat - Mat::Identity(mat.rows(), mat.cols());
            if (err.cwiseAbs().maxCoeff() > 1e-10)
                throw InvalidInput("Operator: tagged unitary but U^dag U != I");
        }
        if (hermitian && (mat - mat.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
            throw InvalidInput("Operator: tagged hermitian but M != M^dag");
    }

    int dim() const { return static_cast<int>(mat.rows()); }

    static Operator identity(int n) {
        return Operator(Mat::Identity(n, n), true, true);
    }
};

/// Bloch-sphere axis n = (sin t cos p, sin t sin p, cos t).
struct BlochAxis {
    double theta = 0.0;
    double phi = 0.0;
};

/// Time series of density matrices with optional named observable traces.
struct Trajectory {
    std::vector<double> times;
    std::vector<DensityMatrix> states;
    std::map<std::string, std::vector<double>> observables;
};

// Pauli matrices and common gates.
Mat pauli_x();
Mat pauli_y();
Mat pauli_z();
Mat hadamard();
Mat cz_gate();

}  // namespace crio
