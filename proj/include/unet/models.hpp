#pragma once

#include <string>
#include <vector>

#include "unet/lattice.hpp"

namespace unet {

// ---------------------------------------------------------------- quantum walks

/// 2x2 coin e^{-i eta} [[alpha, -conj(beta)], [beta, conj(alpha)]].
/// Throws ValidationError when |alpha|^2 + |beta|^2 deviates from 1.
UnitaryMatrix qw_coin(cplx alpha, cplx beta, double eta, const std::string& field = "coin");

/// Site-dependent 1-d coin parameters, one entry per site of (Z/LZ).
struct QwCoinParams {
    std::vector<cplx> alpha;
    std::vector<cplx> beta;
    std::vector<double> eta;

    long size() const { return static_cast<long>(alpha.size()); }
    static QwCoinParams homogeneous(long L, cplx alpha, cplx beta, double eta);
    /// Throws ValidationError("coin[k]") on the first invalid site.
    void validate() const;
};

CoinField coin_field_1d(const QwCoinParams& params);

/// Homogeneous coins by name: "identity" (any d), and for d = 1
/// "hadamard" (1/sqrt2)[[1,-1],[1,1]], "hadamard-standard" (1/sqrt2)[[1,1],[1,-1]],
/// "antidiagonal" [[0,-1],[1,0]].
UnitaryMatrix named_coin(const std::string& name, int d);

/// U = S C.
NetworkOperator build_qw(const CoinField& field);

// ---------------------------------------------------------------- BB / CMV

/// Scattering parameters (r_k, t_k, theta_k, nu_k, gamma_k), k in Z/LZ.
struct BbParams {
    std::vector<double> r, t, theta, nu, gamma;

    long size() const { return static_cast<long>(r.size()); }
    static BbParams identity(long L);
    /// Throws ValidationError("scattering[k]") if r_k^2 + t_k^2 != 1,
    /// r_k or t_k outside [0, 1], or the vectors differ in length.
    void validate() const;
};

/// S_k in the ordered basis (|k>, |k+1>).
Matrix scattering_matrix(const BbParams& p, long k);

/// Block-diagonal operator on l^2(Z/LZ) carrying blocks[k] on the pairs
/// (k, k+1) for k of the given parity; the odd pair (L-1, 0) wraps.
NetworkOperator pair_operator(long L, const std::vector<Matrix>& blocks, int parity);

NetworkOperator build_bb_even(const BbParams& p);
NetworkOperator build_bb_odd(const BbParams& p);
/// U_BB = D_o D_e.
NetworkOperator build_bb(const BbParams& p);

struct VerblunskiSeq {
    std::vector<cplx> a;
    /// Set when a Verblunski recursion stopped before the requested length
    /// (measure supported on finitely many points).
    bool truncated = false;

    long size() const { return static_cast<long>(a.size()); }
    /// Throws ValidationError("verblunski[k]") when |a_k| > 1.
    void validate() const;
};

/// CMV scattering block [[-a, rho], [rho, conj(a)]], rho = sqrt(1 - |a|^2).
Matrix cmv_block(cplx a);
/// The parameter substitution theta = pi/2, nu = pi/2 - arg a, r = |a|,
/// t = sqrt(1 - |a|^2), gamma = 0.
BbParams cmv_to_bb(const VerblunskiSeq& seq);
/// Two-sided CMV matrix on l^2(Z/LZ), a_k indexed mod L.
NetworkOperator build_cmv(const VerblunskiSeq& seq);
/// One-sided CMV truncation on span{e_0, ..., e_{n-1}} with S_{-1} = 1.
/// Blocks reaching past e_{n-1} contribute 1 on the remaining diagonal entry,
/// except that a unimodular a_{n-1} contributes -a_{n-1}.
Matrix build_cmv_one_sided(const VerblunskiSeq& seq);

/// Verblunski coefficients a_0, ..., a_{n_max-1} of the probability measure
/// with trigonometric moments c_n = int z^{-n} dmu (c_0 = 1; at least
/// n_max + 1 moments). Convention: a_n = Phi_{n+1}(0) for the monic
/// orthogonal polynomials Phi_n. The recursion stops early with `truncated`
/// set once ||Phi_{n+1}||^2 falls below rank_tol.
VerblunskiSeq verblunski_from_measure(const std::vector<cplx>& moments, long n_max, double rank_tol = 1e-12);

// ---------------------------------------------------------------- Chalker-Coddington

struct CcParams {
    double phi = 0.0;
    int L = 8;
    /// Diagonal of D on l^2((Z/LZ)^2), indexed by the site index of the
    /// (d = 2, L, coin_dim = 1) lattice.
    std::vector<cplx> d_field;

    static CcParams uniform(double phi, int L);
    void validate() const;
};

/// U(phi) = D (cos phi S_ccw + i sin phi S_cw) on l^2((Z/LZ)^2).
NetworkOperator build_cc_original(const CcParams& p);
/// The counter-clockwise and clockwise plaquette permutations.
NetworkOperator cc_rotation_ccw(int L);
NetworkOperator cc_rotation_cw(int L);

/// The coin rotation R|+-1> = |+-2>, R|+-2> = |-+1> in slot order (+1,-1,+2,-2).
Matrix cc_coin_rotation();
/// Diagonal D(j) of the quantum-walk form at QW site j of the (L/2)-torus.
CoinField cc_qw_d_field(const CcParams& p);
/// D (cos phi R x 1 + i sin phi (R^-1 x 1) S) on C^4 (x) l^2((Z/(L/2)Z)^2).
NetworkOperator build_cc_qw(const CcParams& p);

} // namespace unet
