#pragma once

#include <string>
#include <vector>

#include "unet/models.hpp"

namespace unet {

/// Residual of an operator identity. The norm is the operator 2-norm for
/// dimensions up to kDenseNormLimit and the Frobenius norm above.
struct Residual {
    double value = 0.0;
    std::string norm_kind;
    long dimension = 0;
};

inline constexpr long kDenseNormLimit = 4096;

Residual residual_norm(const Matrix& r);

/// Permutation I : l^2((Z/LZ)^2) -> C^4 (x) l^2((Z/(L/2)Z)^2) with
/// I|2j> = |-2>|j>, I|2j+(1,0)> = |+1>|j>, I|2j+(1,1)> = |+2>|j>, I|2j+(0,1)> = |-1>|j>.
SparseMatrix cc_intertwiner(int L);
/// || I U(phi) I^-1 - U~(phi) ||
Residual verify_cc(const CcParams& p);

/// Interleaving I|+1 (x) k> = |2k>, I|-1 (x) k> = |2k+1> from C^2 (x) l^2(Z/LZ)
/// onto l^2(Z/2LZ).
SparseMatrix qw_bb_interleaving(long L);
/// BB parameters on 2L sites with I U_QW I^-1 = U_BB.
BbParams qw_to_bb(const QwCoinParams& qw);
/// || I U_QW I^-1 - U_BB(qw_to_bb(qw)) ||
Residual verify_qw_bb(const QwCoinParams& qw);

struct QwSquare {
    QwCoinParams qw;
    /// Unitary from l^2 (+) l^2 onto C^2 (x) l^2, in the walk's index layout.
    Matrix w;
    /// || U_QW^2 - W diag(U_BB, U_BB) W^-1 ||
    Residual residual;
};

/// Quantum walk whose square is two copies of U_BB:
/// alpha_k = -t_k e^{-i gamma_k}, beta_k = i r_k e^{-i nu_k}, eta_k = theta_k + pi/2,
/// W = I_e^-1 (+) I_o^-1 D_o^*(r, theta, nu, gamma), where
/// I_e|+1 (x) 2k> = |2k>, I_e|-1 (x) 2k> = |2k+1>,
/// I_o|+1 (x) 2k+1> = |2k+1>, I_o|-1 (x) 2k+1> = |2k+2>.
QwSquare bb_to_qw_square(const BbParams& bb);

/// Raised when a gamma field cannot be gauged away on the torus.
class GaugeObstruction : public NumericalError {
public:
    explicit GaugeObstruction(double holonomy);
    /// sum_k gamma_k reduced to (-pi, pi].
    double holonomy() const { return holonomy_; }

private:
    double holonomy_;
};

/// Diagonal of V(gamma): e^{i zeta_k}, zeta_0 = 0, zeta_k = -sum_{j<k} gamma_j.
/// Throws GaugeObstruction unless sum_k gamma_k = 0 mod 2pi within tol.
Vector gauge_diagonal(const std::vector<double>& gamma, double tol = kParameterTol);

struct GaugeResult {
    Vector v;
    BbParams gauged;
    /// || V^-1 U_BB(r, theta, nu, gamma) V - U_BB(r, theta, nu, 0) ||
    Residual residual;
};

GaugeResult gauge_transform(const BbParams& bb);

struct CyclicCmv {
    /// <phi, U^n phi> for n = 0..n_max.
    std::vector<cplx> autocorrelation;
    VerblunskiSeq seq;
    Matrix cmv;
    /// max_n |<phi, U^n phi> - <e_0, CMV^n e_0>| over n = 0..roundtrip_max_n.
    double roundtrip_error = 0.0;
    /// n_max when the recursion terminated on a unimodular coefficient,
    /// n_max / 2 otherwise.
    long roundtrip_max_n = 0;
    /// Smallest over largest singular value of the Krylov matrix.
    double krylov_ratio = 0.0;
};

/// Throws NumericalError naming the Krylov defect when phi is not cyclic for
/// u (ratio below cyclic_tol), ValidationError if ||phi|| != 1.
CyclicCmv cyclic_to_cmv(const Matrix& u, const Vector& phi, long n_max, double cyclic_tol = 1e-10);

/// U^- (+) U^+ on indices -n..n-1 (position i + n), with
/// <-(j+1)|U^-|-(k+1)> = <j|U^+|k>.
Matrix cmv_two_sided_duplicate(const Matrix& uplus);

} // namespace unet
