#pragma once

#include <complex>

#include <Eigen/Core>

namespace vibq {

template <typename Real>
using Complex = std::complex<Real>;

template <typename Real>
using ComplexVector = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
using ComplexMatrix = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using Matrix2c = Eigen::Matrix<Complex<Real>, 2, 2>;

template <typename Real>
using Matrix4c = Eigen::Matrix<Complex<Real>, 4, 4>;

template <typename Real>
using Vector4c = Eigen::Matrix<Complex<Real>, 4, 1>;

/// Basis index of the qubit states. Excited comes first everywhere: the qubit
/// basis is {|e>, |g>} and the two-qubit basis {|ee>, |eg>, |ge>, |gg>}.
enum QubitLevel : int { kExcited = 0, kGround = 1 };

}  // namespace vibq
