#include <gtest/gtest.h>

#include <algorithm>

#include "oracles.hpp"
#include "unet/dynamics.hpp"
#include "unet/linalg.hpp"
#include "unet/models.hpp"

using namespace unet;
using oracle::pi;

namespace {

const cplx I1(0.0, 1.0);

NetworkOperator walk(const std::string& coin, int L)
{
    return build_qw(CoinField::homogeneous(LatticeShape::make(1, L, 2), named_coin(coin, 1)));
}

} // namespace

TEST(Diagonalize, ReconstructsOperator)
{
    std::mt19937_64 rng(4);
    const auto sh = LatticeShape::make(1, 24, 2);
    std::vector<UnitaryMatrix> coins;
    for (long s = 0; s < sh.sites(); ++s)
        coins.push_back(UnitaryMatrix::certify(oracle::random_unitary(2, rng)));
    const NetworkOperator u = build_qw(CoinField(sh, coins));
    const Diagonalization dg = diagonalize(u);
    EXPECT_LT(dg.residual, 1e-12);
    const Matrix rebuilt = dg.vectors * dg.phases.unaryExpr([](double p) { return std::polar(1.0, p); }).asDiagonal() *
                           dg.vectors.adjoint();
    EXPECT_LT((rebuilt - u.dense()).norm(), 1e-11);
    for (long i = 1; i < dg.phases.size(); ++i)
        EXPECT_LE(dg.phases[i - 1], dg.phases[i]);
}

TEST(Diagonalize, HomogeneousMatchesSymbolGrid)
{
    const int L = 96;
    std::mt19937_64 rng(6);
    const Matrix c = oracle::random_unitary(2, rng);
    const cplx det = c.determinant();
    const double eta = -0.5 * std::arg(det);
    const cplx a = c(0, 0) * std::exp(I1 * eta), b = c(1, 0) * std::exp(I1 * eta);
    const auto sh = LatticeShape::make(1, L, 2);
    const Diagonalization dg = diagonalize(build_qw(CoinField::homogeneous(sh, UnitaryMatrix::certify(c))));
    std::vector<double> got(dg.phases.data(), dg.phases.data() + dg.phases.size());
    EXPECT_LT(max_phase_deviation(got, oracle::qw1d_grid_phases(a, b, eta, L)), 1e-10);
}

TEST(Diagonalize, RefusesHugeOperators)
{
    const auto sh = LatticeShape::make(1, 8200, 2);
    EXPECT_THROW(diagonalize(NetworkOperator::identity(sh)), ValidationError);
}

TEST(Evolve, FreeShiftMovesOneSitePerStep)
{
    const int L = 64, T = 20;
    const NetworkOperator u = walk("identity", L);
    const Trajectory tr = evolve(u, StateVector::basis(u.shape(), 0, 0), T);
    ASSERT_EQ(tr.second_moment.size(), static_cast<std::size_t>(T + 1));
    for (int t = 0; t <= T; ++t) {
        EXPECT_NEAR(tr.second_moment[t], double(t) * t, 1e-12);
        EXPECT_NEAR(tr.mean[t][0], t, 1e-12);
        EXPECT_NEAR(tr.marginals[t][t], 1.0, 1e-12);
        EXPECT_NEAR(tr.norm[t], 1.0, 1e-12);
    }
}

TEST(Evolve, HadamardMomentsMatchDensePowers)
{
    const int L = 64, T = 25;
    const NetworkOperator u = walk("hadamard", L);
    const StateVector psi = StateVector::basis(u.shape(), 0, 0);
    const Trajectory tr = evolve(u, psi, T);
    const Matrix d = u.dense();
    Vector v = psi.amplitudes();
    for (int t = 0; t <= T; ++t) {
        double x2 = 0.0;
        for (int tau = 0; tau < 2; ++tau)
            for (int s = 0; s < L; ++s) {
                const double x = s <= L / 2 ? s : s - L;
                x2 += std::norm(v[tau * L + s]) * x * x;
            }
        EXPECT_NEAR(tr.second_moment[t], x2, 1e-10) << t;
        v = d * v;
    }
    for (double n : tr.norm)
        EXPECT_LT(std::abs(n - 1.0), 1e-10);
    EXPECT_THROW(evolve(u, psi, L / 2), ValidationError);
}

TEST(Evolve, BallisticExponent)
{
    const NetworkOperator u = walk("hadamard", 512);
    const Trajectory tr = evolve(u, StateVector::basis(u.shape(), 0, 0), 200);
    EXPECT_NEAR(spreading_exponent(tr), 2.0, 0.05);
    const NetworkOperator id = NetworkOperator::identity(u.shape());
    EXPECT_THROW(spreading_exponent(evolve(id, StateVector::basis(u.shape(), 0, 0), 100)), NumericalError);
}

TEST(Spectral, FreeShiftIsUniform)
{
    const NetworkOperator u = walk("identity", 256);
    const SpectralDensity rho = spectral_measure_estimate(u, StateVector::basis(u.shape(), 0, 0), 50, 256);
    for (double v : rho.density)
        EXPECT_NEAR(v, 1.0 / (2 * pi), 1e-12);
    EXPECT_NEAR(rho.mass, 1.0, 1e-12);
    EXPECT_NEAR(mass_inside(rho, ArcSet::interval(0.0, pi)), 0.5, 0.01);
}

TEST(Spectral, PointMassGivesFejerKernel)
{
    // U = e^{i a} 1: c_n = e^{i n a}
    const double alpha = 1.0;
    const auto sh = LatticeShape::make(1, 128, 2);
    const NetworkOperator u = NetworkOperator::identity(sh).scaled(std::polar(1.0, alpha));
    const int N = 20;
    const SpectralDensity rho = spectral_measure_estimate(u, StateVector::basis(sh, 1, 3), N, 512);
    for (std::size_t i = 0; i < rho.theta.size(); ++i) {
        const double x = rho.theta[i] - alpha;
        double k = 0.0;
        for (int n = -N; n <= N; ++n)
            k += (1.0 - std::abs(n) / (N + 1.0)) * std::cos(n * x);
        EXPECT_NEAR(rho.density[i], k / (2 * pi), 1e-10);
        EXPECT_GE(rho.density[i], -1e-12);
    }
    for (int n = 0; n <= N; ++n)
        EXPECT_LT(std::abs(rho.autocorrelation[n] - std::polar(1.0, n * alpha)), 1e-12);
    EXPECT_THROW(spectral_measure_estimate(u, StateVector::basis(sh, 1, 3), N, 30), ValidationError);
    // autocorrelation would wrap around the torus
    const NetworkOperator h = walk("hadamard", 128);
    EXPECT_THROW(spectral_measure_estimate(h, StateVector::basis(sh, 1, 3), 64, 1024), ValidationError);
    EXPECT_NO_THROW(spectral_measure_estimate(h, StateVector::basis(sh, 1, 3), 63, 1024));
}

TEST(Spectral, HadamardLeakageShrinksWithOrder)
{
    const NetworkOperator u = walk("hadamard", 1024);
    const StateVector psi = StateVector::basis(u.shape(), 0, 0);
    const ArcSet bands({{pi / 4, pi / 2}, {5 * pi / 4, pi / 2}});
    double prev = 1.0;
    for (int n : {64, 128, 256}) {
        const SpectralDensity rho = spectral_measure_estimate(u, psi, n, 4096);
        EXPECT_NEAR(rho.mass, 1.0, 1e-6);
        for (double v : rho.density)
            EXPECT_GE(v, -1e-12);
        const double leak = 1.0 - mass_inside(rho, bands);
        EXPECT_LT(leak, prev);
        prev = leak;
    }
    EXPECT_LT(prev, 0.05);
}

TEST(EigenStats, SyntheticArcs)
{
    Eigen::VectorXd ph(7);
    ph << 0.1, 0.2, 0.4, 1.0, 1.05, 3.0, 6.2;
    const EigenStatistics st = arc_eigen_statistics(ph, {{0.0, 0.5}, {0.3, 1.0}, {6.0, 0.5}});
    ASSERT_EQ(st.arcs.size(), 3u);
    EXPECT_EQ(st.arcs[0].count, 3);
    EXPECT_NEAR(st.arcs[0].min_gap, 0.1, 1e-12);
    EXPECT_NEAR(st.arcs[0].max_gap, 0.2, 1e-12);
    EXPECT_NEAR(st.arcs[0].mean_gap, 0.15, 1e-12);
    EXPECT_EQ(st.arcs[1].count, 2); // 0.4 went to the first arc
    EXPECT_EQ(st.arcs[2].count, 1); // 6.2, arc wraps past 0 but 0.1 was taken
    EXPECT_EQ(st.unassigned, 1);
    EXPECT_EQ(st.total, 7);
}

TEST(EigenStats, PartitionCountsEveryPhase)
{
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> cut(0.0, 2 * pi);
    const auto sh = LatticeShape::make(1, 40, 2);
    std::vector<UnitaryMatrix> coins;
    for (long s = 0; s < sh.sites(); ++s)
        coins.push_back(UnitaryMatrix::certify(oracle::random_unitary(2, rng)));
    const NetworkOperator u = build_qw(CoinField(sh, coins));
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> cuts = {cut(rng), cut(rng), cut(rng), cut(rng)};
        std::sort(cuts.begin(), cuts.end());
        std::vector<Arc> arcs;
        for (std::size_t i = 0; i < cuts.size(); ++i) {
            const double next = i + 1 < cuts.size() ? cuts[i + 1] : cuts[0] + 2 * pi;
            arcs.push_back({cuts[i], next - cuts[i]});
        }
        const EigenStatistics st = arc_eigen_statistics(u, arcs);
        long sum = 0;
        for (const auto& a : st.arcs)
            sum += a.count;
        EXPECT_EQ(st.unassigned, 0);
        EXPECT_EQ(sum, sh.dimension());
    }
}

TEST(EigenStats, HadamardSpectrumSitsInBands)
{
    const EigenStatistics st = arc_eigen_statistics(walk("hadamard", 64), {{pi / 4, pi / 2}, {5 * pi / 4, pi / 2}});
    EXPECT_EQ(st.total, 128);
    EXPECT_EQ(st.unassigned, 0);
    EXPECT_EQ(st.arcs[0].count, 64);
}
