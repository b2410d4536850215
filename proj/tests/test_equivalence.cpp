#include <gtest/gtest.h>

#include "oracles.hpp"
#include "unet/equivalence.hpp"
#include "unet/linalg.hpp"

using namespace unet;
using oracle::pi;

namespace {

const cplx I1(0.0, 1.0);

std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

BbParams random_bb(long L, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, 2 * pi), m(0.05, pi / 2 - 0.05);
    BbParams p;
    for (long k = 0; k < L; ++k) {
        const double s = m(rng);
        p.r.push_back(std::cos(s));
        p.t.push_back(std::sin(s));
        p.theta.push_back(u(rng));
        p.nu.push_back(u(rng));
        p.gamma.push_back(u(rng));
    }
    return p;
}

QwCoinParams random_qw(long L, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, 2 * pi), m(0.05, pi / 2 - 0.05);
    QwCoinParams q = QwCoinParams::homogeneous(L, 1.0, 0.0, 0.0);
    for (long k = 0; k < L; ++k) {
        const double s = m(rng);
        q.alpha[k] = std::polar(std::cos(s), u(rng));
        q.beta[k] = std::polar(std::sin(s), u(rng));
        q.eta[k] = u(rng);
    }
    return q;
}

// spectra of two unitaries agree as multisets
double spectral_distance(const Matrix& a, const Matrix& b)
{
    return max_phase_deviation(to_vec(unitary_phases(a)), to_vec(unitary_phases(b)));
}

} // namespace

TEST(Residual, NormKindSwitchesAtLimit)
{
    Matrix r = Matrix::Zero(3, 3);
    r(0, 0) = 3.0;
    r(1, 1) = 4.0;
    const Residual small = residual_norm(r);
    EXPECT_NEAR(small.value, 4.0, 1e-12);
    EXPECT_EQ(small.dimension, 3);
    EXPECT_NE(small.norm_kind.find("2"), std::string::npos);
}

TEST(CcEquivalence, IntertwinerFollowsItsDefinition)
{
    const int L = 8, h = L / 2;
    const SparseMatrix i = cc_intertwiner(L);
    ASSERT_EQ(i.rows(), L * L);
    // slots (+1, -1, +2, -2); CC site (a, b) -> index a * L + b; walk site j -> j0 * h + j1
    Matrix expect = Matrix::Zero(L * L, L * L);
    auto put = [&](int slot, int j0, int j1, int a, int b) { expect(slot * h * h + j0 * h + j1, a * L + b) = 1.0; };
    for (int j0 = 0; j0 < h; ++j0)
        for (int j1 = 0; j1 < h; ++j1) {
            put(3, j0, j1, 2 * j0, 2 * j1);
            put(0, j0, j1, 2 * j0 + 1, 2 * j1);
            put(2, j0, j1, 2 * j0 + 1, 2 * j1 + 1);
            put(1, j0, j1, 2 * j0, 2 * j1 + 1);
        }
    EXPECT_LT((Matrix(i) - expect).norm(), 1e-15);
    EXPECT_LT(unitarity_defect(Matrix(i)), 1e-13);
}

TEST(CcEquivalence, ResidualSmallOverPhi)
{
    for (double phi : {0.0, 0.3, pi / 4, 1.2, pi / 2}) {
        const Residual r = verify_cc(CcParams::uniform(phi, 8));
        EXPECT_LT(r.value, 1e-13) << phi;
    }
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ang(0.0, 2 * pi);
    CcParams p = CcParams::uniform(0.7, 12);
    for (auto& z : p.d_field)
        z = std::polar(1.0, ang(rng));
    EXPECT_LT(verify_cc(p).value, 1e-13);
    // and the two operators are unitarily equivalent as a consequence
    EXPECT_LT(spectral_distance(build_cc_original(p).dense(), build_cc_qw(p).dense()), 1e-10);
}

TEST(QwBb, InterleavingAndSpectrum)
{
    const long L = 12;
    const SparseMatrix i = qw_bb_interleaving(L);
    Matrix expect = Matrix::Zero(2 * L, 2 * L);
    for (long k = 0; k < L; ++k) {
        expect(2 * k, k) = 1.0;         // |+1> (x) |k> -> |2k>
        expect(2 * k + 1, L + k) = 1.0; // |-1> (x) |k> -> |2k+1>
    }
    EXPECT_LT((Matrix(i) - expect).norm(), 1e-15);
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 10; ++trial) {
        const QwCoinParams q = random_qw(L, rng);
        EXPECT_LT(verify_qw_bb(q).value, 1e-13);
        const BbParams b = qw_to_bb(q);
        ASSERT_EQ(b.size(), 2 * L);
        for (long k = 0; k < b.size(); ++k)
            EXPECT_NEAR(b.r[k] * b.r[k] + b.t[k] * b.t[k], 1.0, 1e-12);
        EXPECT_LT(spectral_distance(build_qw(coin_field_1d(q)).dense(), build_bb(b).dense()), 1e-10);
    }
}

TEST(QwBb, ParameterMapInvertsOnCoins)
{
    std::mt19937_64 rng(78);
    const QwCoinParams q = random_qw(16, rng);
    const BbParams b = qw_to_bb(q);
    Matrix isx = Matrix::Zero(2, 2);
    isx(0, 1) = I1;
    isx(1, 0) = I1;
    for (long j = 0; j < 16; ++j) {
        // even scatterer carries the coin, odd one is i sigma_x
        const Matrix s = scattering_matrix(b, 2 * j);
        const cplx ph = I1 * std::exp(I1 * b.theta[2 * j]);
        EXPECT_NEAR(b.theta[2 * j], q.eta[j], 1e-15);
        EXPECT_LT(std::abs(ph * s(1, 0) - q.alpha[j]), 1e-12);
        EXPECT_LT(std::abs(ph * s(0, 0) - q.beta[j]), 1e-12);
        EXPECT_LT(std::abs(ph * s(0, 1) - std::conj(q.alpha[j])), 1e-12);
        EXPECT_LT(std::abs(ph * s(1, 1) + std::conj(q.beta[j])), 1e-12);
        EXPECT_LT((scattering_matrix(b, 2 * j + 1) - isx).norm(), 1e-15);
    }
}

TEST(QwSquare, SquareSpectrumIsDoubledBbSpectrum)
{
    std::mt19937_64 rng(9);
    for (long L : {8L, 16L}) {
        const BbParams bb = random_bb(L, rng);
        const QwSquare sq = bb_to_qw_square(bb);
        EXPECT_LT(sq.residual.value, 1e-12);
        EXPECT_LT(unitarity_defect(sq.w), 1e-13);
        const Matrix u = build_qw(coin_field_1d(sq.qw)).dense();
        std::vector<double> two = to_vec(unitary_phases(build_bb(bb).dense()));
        const std::vector<double> one = two;
        two.insert(two.end(), one.begin(), one.end());
        EXPECT_LT(max_phase_deviation(to_vec(unitary_phases(u * u)), two), 1e-10);
    }
}

TEST(QwSquare, OddLengthRejected)
{
    std::mt19937_64 rng(1);
    EXPECT_ANY_THROW(bb_to_qw_square(random_bb(7, rng)));
}

TEST(Gauge, ConsistentGammaRemoved)
{
    const long L = 16;
    std::mt19937_64 rng(3);
    BbParams bb = random_bb(L, rng);
    double sum = 0.0;
    for (long k = 0; k + 1 < L; ++k)
        sum += bb.gamma[k];
    bb.gamma[L - 1] = 4 * pi - sum;
    const GaugeResult g = gauge_transform(bb);
    EXPECT_LT(g.residual.value, 1e-12);
    for (double x : g.gauged.gamma)
        EXPECT_EQ(x, 0.0);
    // diagonal formula
    double zeta = 0.0;
    for (long k = 0; k < L; ++k) {
        EXPECT_LT(std::abs(g.v[k] - std::polar(1.0, zeta)), 1e-12);
        zeta -= bb.gamma[k];
    }
    const Matrix v = g.v.asDiagonal();
    const Matrix lhs = v.adjoint() * build_bb(bb).dense() * v;
    EXPECT_LT((lhs - build_bb(g.gauged).dense()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Gauge, ObstructionReportsHolonomy)
{
    std::vector<double> gamma(8, 0.0);
    gamma[2] = 0.25;
    try {
        gauge_diagonal(gamma);
        FAIL();
    } catch (const GaugeObstruction& e) {
        EXPECT_NEAR(e.holonomy(), 0.25, 1e-15);
    }
    gamma[3] = 2 * pi - 0.25;
    EXPECT_NO_THROW(gauge_diagonal(gamma));
}

TEST(Cyclic, RoundTripOnRandomUnitary)
{
    std::mt19937_64 rng(11);
    const Matrix u = oracle::random_unitary(24, rng);
    const Vector phi = oracle::random_vector(24, rng);
    const CyclicCmv c = cyclic_to_cmv(u, phi, 20);
    EXPECT_LT(c.roundtrip_error, 1e-8);
    EXPECT_GT(c.krylov_ratio, 1e-10);
    // autocorrelation by direct powers
    Vector v = phi;
    for (long n = 0; n <= 20; ++n) {
        EXPECT_LT(std::abs(c.autocorrelation[n] - phi.dot(v)), 1e-12);
        v = u * v;
    }
}

TEST(Cyclic, FiniteSpectrumTerminates)
{
    // phi supported on 3 eigenvectors: the measure has 3 atoms
    std::mt19937_64 rng(13);
    const Matrix q = oracle::random_unitary(10, rng);
    Vector d(10);
    for (int k = 0; k < 10; ++k)
        d[k] = std::polar(1.0, 0.6 * k);
    const Matrix u = q * d.asDiagonal() * q.adjoint();
    const Vector phi = (q.col(0) + q.col(4) + q.col(7)) / std::sqrt(3.0);
    EXPECT_THROW(cyclic_to_cmv(u, phi, 8), NumericalError);
}

TEST(Cyclic, RejectsUnnormalized)
{
    std::mt19937_64 rng(15);
    const Matrix u = oracle::random_unitary(6, rng);
    EXPECT_THROW(cyclic_to_cmv(u, 2.0 * oracle::random_vector(6, rng), 4), ValidationError);
}

TEST(Cyclic, TwoSidedDuplicateDoublesSpectrum)
{
    std::mt19937_64 rng(17);
    const Matrix up = oracle::random_unitary(6, rng);
    const Matrix two = cmv_two_sided_duplicate(up);
    ASSERT_EQ(two.rows(), 12);
    for (int j = 0; j < 6; ++j)
        for (int k = 0; k < 6; ++k) {
            EXPECT_EQ(two(6 + j, 6 + k), up(j, k));
            EXPECT_EQ(two(6 - (j + 1), 6 - (k + 1)), up(j, k));
        }
}
