#pragma once

#include <vector>

#include "unet/arcs.hpp"
#include "unet/lattice.hpp"

namespace unet {

inline constexpr long kDenseDiagonalizeLimit = 16384;

struct Diagonalization {
    Eigen::VectorXd phases; // ascending in [0, 2pi)
    Matrix vectors;
    /// ||U - V diag(e^{i phases}) V^*||_F
    double residual = 0.0;
};

/// Dense Schur diagonalization. Throws ValidationError above
/// kDenseDiagonalizeLimit and NumericalError if the residual exceeds 1e-10.
Diagonalization diagonalize(const NetworkOperator& u);

struct Trajectory {
    LatticeShape shape;
    /// Site of the largest initial probability; positions are measured from it.
    long center = 0;
    int steps = 0;
    /// marginals[t][site] = sum_tau |psi_t(tau, site)|^2, t = 0..steps
    std::vector<std::vector<double>> marginals;
    /// mean[t][axis] = <X_axis>
    std::vector<std::vector<double>> mean;
    /// <|X|^2>
    std::vector<double> second_moment;
    std::vector<double> norm;
};

/// psi_t = U^t psi0 for t <= T. Requires T * bandwidth <= L/2 - 2.
Trajectory evolve(const NetworkOperator& u, const StateVector& psi0, int steps);

/// Least-squares slope of log <X^2> against log t over t in [burn_in, T],
/// using the steps with <X^2> > 0 (at least 50 of them).
double spreading_exponent(const Trajectory& traj, int burn_in = 20);

struct SpectralDensity {
    std::vector<double> theta;
    std::vector<double> density;
    /// c_n = <psi, U^n psi>, n = 0..n_max
    std::vector<cplx> autocorrelation;
    /// Riemann sum of the density over the grid
    double mass = 0.0;
};

/// Fejer-smoothed spectral density
///   rho(theta) = 1/2pi sum_{|n| <= N} (1 - |n|/(N+1)) c_n e^{-i n theta}
/// sampled at `points` equispaced phases. psi is normalized first.
/// Requires n_max * bandwidth < L/2.
SpectralDensity spectral_measure_estimate(const NetworkOperator& u, const StateVector& psi, int n_max,
                                          int points = 1024);

/// Fraction of the density's mass inside `set`, by Riemann sum.
double mass_inside(const SpectralDensity& rho, const ArcSet& set);

struct ArcStatistics {
    Arc arc;
    long count = 0;
    /// Nearest-neighbour gaps between consecutive phases in the arc.
    double min_gap = 0.0;
    double mean_gap = 0.0;
    double max_gap = 0.0;
};

struct EigenStatistics {
    std::vector<ArcStatistics> arcs;
    long unassigned = 0;
    long total = 0;
};

/// Each phase is counted in the first arc containing it (slack 1e-9).
EigenStatistics arc_eigen_statistics(const Eigen::VectorXd& phases, const std::vector<Arc>& arcs);
EigenStatistics arc_eigen_statistics(const NetworkOperator& u, const std::vector<Arc>& arcs);

} // namespace unet
