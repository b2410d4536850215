#pragma once

#include <functional>
#include <string>
#include <vector>

#include "unet/fibered.hpp"

namespace unet {

// ---------------------------------------------------------------- perturbations

/// Site-dependent deviation profile b(j) bounding ||C(j) - 1||, |j| the
/// Euclidean length of the minimal-image coordinates.
struct PerturbationProfile {
    enum class Kind { Compact, PowerLaw, Custom };
    Kind kind = Kind::Compact;
    /// Compact: b = c for |j| <= radius. PowerLaw: b = c (1 + |j|)^{-1-eps}.
    double c = 0.0;
    double eps = 1.0;
    double radius = 0.0;
    /// Custom: b as a function of |j|.
    std::function<double(double)> custom;

    double bound(double r) const;
};

/// Coins C_inf exp(-i theta_j sigma_y) (rotation in the first two coin
/// slots) with ||exp(-i theta_j sigma_y) - 1|| = 2 sin(theta_j / 2) = b(j).
CoinField perturbed_field(const LatticeShape& shape, const UnitaryMatrix& c_inf, const PerturbationProfile& profile);

/// ||C(j) - 1|| per site for the factor C(j) = C_inf^{-1} coin(j).
std::vector<double> perturbation_deviation(const CoinField& field, const UnitaryMatrix& c_inf);

struct RegularityEstimate {
    /// Trapezoid estimate of int_1^{r_max} sup_{a r <= |j| <= b r} ||C(j) - 1|| dr.
    double integral = 0.0;
    /// Slope of log(integrand) against log r on the upper half of the range;
    /// NaN if the integrand vanishes there.
    double exponent = 0.0;
    /// "regular" or "inconclusive".
    std::string verdict;
    std::string explanation;
    std::vector<double> r;
    std::vector<double> integrand;
};

/// Evaluates the regularity integral of a coin field relative to the
/// identity (pass C(j) directly, or the factor via perturbation_deviation).
RegularityEstimate regularity_integral(const LatticeShape& shape, const std::vector<double>& deviation, double a,
                                       double b, double r_max);

// ---------------------------------------------------------------- conjugate operator

struct ConjugateOperator {
    LatticeShape shape;
    ArcSet delta;
    MGoodCertificate certificate;
    /// Band data on the Fourier grid of the truncation (N = L).
    BandStructure bands;
    /// cutoff[j][p]: eta_j at grid point p.
    std::vector<std::vector<double>> cutoff;
    /// Transition width of each eta_j in grid cells.
    std::vector<int> transition_cells;
    /// f[(p * dprime + k) * d + axis] = grad theta_k at p (Hellmann-Feynman).
    std::vector<double> f;
    Matrix a;
    double symmetry_defect = 0.0;
};

/// Assembles A = 1/2 sum_j eta_j (sum_k pi_k (f_k.J + J.f_k) pi_k) eta_j on
/// the torus. Throws NumericalError when delta is not M-good or when the
/// grid leaves fewer than 2 cells for a cutoff transition.
ConjugateOperator build_conjugate(const Symbol& sym, const ArcSet& delta, const LatticeShape& shape);

/// Lattice position J_axis in (-L/2, L/2] for every basis index.
Eigen::VectorXd position_operator(const LatticeShape& shape, int axis);

/// Lattice-space matrix of a Fourier multiplier sampled on the grid
/// (values[p] is d' x d').
Matrix fourier_multiplier(const LatticeShape& shape, const std::vector<Matrix>& values);

/// U^* A U - A with the position commutator [J, U] evaluated in
/// minimal-image displacement, symmetrized.
Matrix mourre_commutator(const NetworkOperator& u, const ConjugateOperator& a);

/// Frobenius norm of the entries coupling sites farther apart than `distance`.
double offdiagonal_tail(const Matrix& m, const LatticeShape& shape, int distance);

struct MourreResult {
    double lambda_min = 0.0;
    double c_delta = 0.0;
    double margin = 0.0;
    /// 2 ||(1 - T) E_Delta|| ||B|| with T the Fourier multiplier sum_j eta_j^2.
    double tail = 0.0;
    /// Grid-step variation of |grad theta|^2 over the preimage of Delta.
    double resolution = 0.0;
    long window_dim = 0;
    bool pass = false;
    /// Spectrum of the compressed commutator, ascending.
    Eigen::VectorXd spectrum;
};

MourreResult mourre_check(const NetworkOperator& u, const ConjugateOperator& a, const ArcSet& delta);

// ---------------------------------------------------------------- eigenvalue stability

struct StabilityReport {
    std::vector<int> L;
    std::vector<long> counts;
    /// Isolated phases per L.
    std::vector<std::vector<double>> isolated;
    bool stable = false;
};

/// Counts eigenphases of build(L) in delta_prime lying more than 3 local
/// spacings away from the symbol grid {theta_k(2 pi m / L)}. Refuses
/// (NumericalError) unless delta is M-good and contains delta_prime, and
/// delta_prime keeps 2 grid steps away from tau_M.
StabilityReport eigenvalue_stability(const std::function<NetworkOperator(int)>& build, const Symbol& sym,
                                     const ArcSet& delta, const ArcSet& delta_prime, const std::vector<int>& Ls);

} // namespace unet
