#include "unet/equivalence.hpp"

#include <cmath>
#include <string>

#include <Eigen/SVD>

#include "unet/linalg.hpp"

namespace unet {

namespace {

using Triplet = Eigen::Triplet<cplx, long>;
const cplx I1(0.0, 1.0);

SparseMatrix from_triplets(long rows, long cols, const std::vector<Triplet>& trips)
{
    SparseMatrix m(rows, cols);
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

} // namespace

Residual residual_norm(const Matrix& r)
{
    Residual out;
    out.dimension = r.rows();
    if (r.rows() <= kDenseNormLimit && r.cols() <= kDenseNormLimit) {
        out.value = spectral_norm(r);
        out.norm_kind = "operator-2";
    } else {
        out.value = r.norm();
        out.norm_kind = "frobenius";
    }
    return out;
}

// ---------------------------------------------------------------- Chalker-Coddington

SparseMatrix cc_intertwiner(int L)
{
    if (L < 8 || L % 2 != 0)
        throw ConfigurationError("cc_intertwiner: need an even L >= 8 (quantum-walk side >= 4), got " +
                                 std::to_string(L));
    const LatticeShape orig = LatticeShape::make(2, L, 1);
    const LatticeShape qw = LatticeShape::make(2, L / 2, 4);
    // slot of the walk that receives 2j + offset
    static const int off[4][2] = {{1, 0}, {0, 1}, {1, 1}, {0, 0}};
    std::vector<Triplet> trips;
    trips.reserve(orig.sites());
    for (long s = 0; s < qw.sites(); ++s) {
        const auto j = qw.site_coords(s);
        for (int slot = 0; slot < 4; ++slot) {
            const int c[2] = {2 * j[0] + off[slot][0], 2 * j[1] + off[slot][1]};
            trips.emplace_back(qw.index(slot, s), orig.site_index(c), 1.0);
        }
    }
    return from_triplets(qw.dimension(), orig.dimension(), trips);
}

Residual verify_cc(const CcParams& p)
{
    const SparseMatrix i = cc_intertwiner(p.L);
    const Matrix u = build_cc_original(p).dense();
    const Matrix ut = build_cc_qw(p).dense();
    const Matrix conj = i * (u * Matrix(i.adjoint()));
    return residual_norm(conj - ut);
}

// ---------------------------------------------------------------- QW <-> BB

SparseMatrix qw_bb_interleaving(long L)
{
    const LatticeShape qw = LatticeShape::make(1, static_cast<int>(L), 2);
    std::vector<Triplet> trips;
    for (long k = 0; k < L; ++k) {
        trips.emplace_back(2 * k, qw.index(0, k), 1.0);
        trips.emplace_back(2 * k + 1, qw.index(1, k), 1.0);
    }
    return from_triplets(2 * L, 2 * L, trips);
}

BbParams qw_to_bb(const QwCoinParams& qw)
{
    qw.validate();
    const long L = qw.size();
    BbParams bb{std::vector<double>(2 * L), std::vector<double>(2 * L), std::vector<double>(2 * L),
                std::vector<double>(2 * L), std::vector<double>(2 * L)};
    for (long j = 0; j < L; ++j) {
        // S_{2j} = -i e^{-i eta} [[beta, conj alpha], [alpha, -conj beta]]
        const double ra = std::abs(qw.alpha[j]);
        const double rb = std::abs(qw.beta[j]);
        const double norm = std::sqrt(ra * ra + rb * rb);
        bb.r[2 * j] = rb / norm;
        bb.t[2 * j] = ra / norm;
        bb.theta[2 * j] = qw.eta[j];
        bb.nu[2 * j] = rb > 0.0 ? kPi / 2 - std::arg(qw.beta[j]) : 0.0;
        bb.gamma[2 * j] = ra > 0.0 ? kPi - std::arg(qw.alpha[j]) : 0.0;
        // S_{2j+1} = i sigma_x
        bb.r[2 * j + 1] = 0.0;
        bb.t[2 * j + 1] = 1.0;
        bb.theta[2 * j + 1] = 0.0;
        bb.nu[2 * j + 1] = 0.0;
        bb.gamma[2 * j + 1] = 0.0;
    }
    return bb;
}

Residual verify_qw_bb(const QwCoinParams& qw)
{
    const SparseMatrix i = qw_bb_interleaving(qw.size());
    const Matrix u = build_qw(coin_field_1d(qw)).dense();
    const Matrix ubb = build_bb(qw_to_bb(qw)).dense();
    return residual_norm(i * (u * Matrix(i.adjoint())) - ubb);
}

QwSquare bb_to_qw_square(const BbParams& bb)
{
    bb.validate();
    const long L = bb.size();
    if (L % 2 != 0)
        throw ConfigurationError("bb_to_qw_square: need an even number of sites");
    QwSquare out;
    out.qw = QwCoinParams{std::vector<cplx>(L), std::vector<cplx>(L), std::vector<double>(L)};
    // The even-sublattice square is D_o D_e with S_k = swap * C(k).
    for (long k = 0; k < L; ++k) {
        out.qw.alpha[k] = -bb.t[k] * std::exp(-I1 * bb.gamma[k]);
        out.qw.beta[k] = I1 * bb.r[k] * std::exp(-I1 * bb.nu[k]);
        out.qw.eta[k] = bb.theta[k] + kPi / 2;
    }

    const LatticeShape qw = LatticeShape::make(1, static_cast<int>(L), 2);
    // I_e^-1 on the first copy, I_o^-1 on the second
    Matrix ie_inv = Matrix::Zero(2 * L, L);
    Matrix io_inv = Matrix::Zero(2 * L, L);
    for (long k = 0; k < L; k += 2) {
        ie_inv(qw.index(0, k), k) = 1.0;
        ie_inv(qw.index(1, k), k + 1) = 1.0;
        io_inv(qw.index(0, k + 1), k + 1) = 1.0;
        io_inv(qw.index(1, k + 1), (k + 2) % L) = 1.0;
    }
    // odd sublattice: D_e D_o = D_o^* U_BB D_o
    const Matrix d_o_star = build_bb_odd(bb).dense().adjoint();
    out.w.resize(2 * L, 2 * L);
    out.w.leftCols(L) = ie_inv;
    out.w.rightCols(L) = io_inv * d_o_star;

    const Matrix ubb = build_bb(bb).dense();
    Matrix blk = Matrix::Zero(2 * L, 2 * L);
    blk.topLeftCorner(L, L) = ubb;
    blk.bottomRightCorner(L, L) = ubb;
    const Matrix u = build_qw(coin_field_1d(out.qw)).dense();
    out.residual = residual_norm(u * u - out.w * blk * out.w.adjoint());
    return out;
}

// ---------------------------------------------------------------- gauge

GaugeObstruction::GaugeObstruction(double holonomy)
    : NumericalError("gamma field cannot be gauged away on the torus: holonomy sum(gamma) = " +
                     std::to_string(holonomy) + " (mod 2pi)"),
      holonomy_(holonomy)
{
}

Vector gauge_diagonal(const std::vector<double>& gamma, double tol)
{
    const long n = static_cast<long>(gamma.size());
    double total = 0.0;
    Vector v(n);
    for (long k = 0; k < n; ++k) {
        v[k] = std::exp(-I1 * total);
        total += gamma[k];
    }
    double hol = wrap_phase(total);
    if (hol > kPi)
        hol -= kTwoPi;
    if (std::abs(hol) > tol)
        throw GaugeObstruction(hol);
    return v;
}

GaugeResult gauge_transform(const BbParams& bb)
{
    bb.validate();
    GaugeResult out;
    out.v = gauge_diagonal(bb.gamma);
    out.gauged = bb;
    std::fill(out.gauged.gamma.begin(), out.gauged.gamma.end(), 0.0);
    const Matrix u = build_bb(bb).dense();
    const Matrix u0 = build_bb(out.gauged).dense();
    const Matrix conj = out.v.conjugate().asDiagonal() * u * out.v.asDiagonal();
    out.residual = residual_norm(conj - u0);
    return out;
}

// ---------------------------------------------------------------- cyclic unitaries and CMV

CyclicCmv cyclic_to_cmv(const Matrix& u, const Vector& phi, long n_max, double cyclic_tol)
{
    const long dim = u.rows();
    if (u.cols() != dim || phi.size() != dim)
        throw ConfigurationError("cyclic_to_cmv: matrix and vector sizes differ");
    if (std::abs(phi.norm() - 1.0) > kParameterTol)
        throw ValidationError("phi", "cyclic vector must have unit norm");

    Matrix krylov(dim, dim);
    Vector x = phi;
    for (long k = 0; k < dim; ++k) {
        krylov.col(k) = x;
        x = u * x;
    }
    const Eigen::JacobiSVD<Matrix> svd(krylov);
    const auto& sv = svd.singularValues();
    CyclicCmv out;
    out.krylov_ratio = sv[dim - 1] / sv[0];
    if (!(out.krylov_ratio > cyclic_tol))
        throw NumericalError("vector is not cyclic: Krylov matrix has smallest/largest singular value " +
                             std::to_string(out.krylov_ratio) + ", defect " +
                             std::to_string((sv.array() <= cyclic_tol * sv[0]).count()) + " of " +
                             std::to_string(dim));

    std::vector<cplx> conj_moments(n_max + 1);
    out.autocorrelation.resize(n_max + 1);
    x = phi;
    for (long n = 0; n <= n_max; ++n) {
        out.autocorrelation[n] = phi.dot(x);
        conj_moments[n] = std::conj(out.autocorrelation[n]);
        x = u * x;
    }
    out.seq = verblunski_from_measure(conj_moments, n_max);
    out.cmv = build_cmv_one_sided(out.seq);

    // A unimodular last coefficient means the CMV block is the full cyclic
    // subspace; otherwise the boundary is felt after about n_max / 2 steps.
    const bool exact = out.seq.size() > 0 && std::abs(std::abs(out.seq.a.back()) - 1.0) <= kParameterTol;
    out.roundtrip_max_n = exact ? n_max : n_max / 2;
    Vector e = Vector::Zero(out.cmv.rows());
    e[0] = 1.0;
    Vector y = e;
    for (long n = 0; n <= out.roundtrip_max_n; ++n) {
        out.roundtrip_error = std::max(out.roundtrip_error, std::abs(out.autocorrelation[n] - y[0]));
        y = out.cmv * y;
    }
    return out;
}

Matrix cmv_two_sided_duplicate(const Matrix& uplus)
{
    const long n = uplus.rows();
    Matrix out = Matrix::Zero(2 * n, 2 * n);
    out.bottomRightCorner(n, n) = uplus;
    for (long j = 0; j < n; ++j)
        for (long k = 0; k < n; ++k)
            out(n - (j + 1), n - (k + 1)) = uplus(j, k);
    return out;
}

} // namespace unet
