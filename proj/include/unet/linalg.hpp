#pragma once

#include <vector>

#include "unet/lattice.hpp"

namespace unet {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kPi = 3.1415926535897932384626433832795;

/// Phase reduced to [0, 2pi).
double wrap_phase(double theta);
/// Distance on the circle R / 2pi Z.
double circle_distance(double a, double b);
/// Phase of a (nonzero) complex number in [0, 2pi).
inline double phase_of(cplx z) { return wrap_phase(std::arg(z)); }

/// Eigendecomposition of a unitary (normal) matrix via complex Schur form.
/// Columns of `vectors` are orthonormal; phases are sorted ascending in [0, 2pi).
struct UnitaryEigen {
    Eigen::VectorXd phases;
    Vector eigenvalues;
    Matrix vectors;
    /// Frobenius norm of the strictly upper part of the Schur factor; zero for
    /// an exactly normal input.
    double schur_offdiag = 0.0;
};

UnitaryEigen unitary_eigen(const Matrix& u);
/// Eigenphases only, sorted ascending in [0, 2pi).
Eigen::VectorXd unitary_phases(const Matrix& u);

struct HermitianEigen {
    Eigen::VectorXd values; // ascending
    Matrix vectors;
};

HermitianEigen hermitian_eigen(const Matrix& h);
Eigen::VectorXd hermitian_eigenvalues(const Matrix& h);

/// Operator 2-norm (largest singular value).
double spectral_norm(const Matrix& a);

/// Largest circle distance between two equally sized multisets of phases,
/// after pairing them in circular order.
double max_phase_deviation(std::vector<double> a, std::vector<double> b);

} // namespace unet

#include <functional>

namespace unet {

/// Worker threads used for embarrassingly parallel loops (grid eigensolves,
/// independent instances). 0 selects std::thread::hardware_concurrency().
void set_worker_threads(int n);
int worker_threads();

/// Runs fn(i) for i in [0, n) on worker_threads() threads. Each index is
/// handled exactly once; results must be written to per-index slots so the
/// output does not depend on scheduling. The first exception is rethrown.
void parallel_for(long n, const std::function<void(long)>& fn);

} // namespace unet
