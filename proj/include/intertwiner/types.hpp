#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace intertwiner {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Default for every tolerance that is optional in the API. Absolute, scaled
// by the Frobenius norm of the operand at each use site.
inline constexpr double default_tol = 1e-10;

// Malformed or out-of-contract input. CLI exit code 1.
struct InputError : std::runtime_error {
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Solver failure, overflow, residual blow-up. CLI exit code 2.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Spectrum has no usable antilinear symmetry, or no seed could be found.
// CLI exit code 3.
struct NoSymmetryError : std::runtime_error {
    explicit NoSymmetryError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace intertwiner
