#include <gtest/gtest.h>

#include <chrono>

#include "oracles.hpp"
#include "unet/linalg.hpp"
#include "unet/models.hpp"
#include "unet/mourre.hpp"

using namespace unet;
using oracle::pi;

namespace {

const cplx I1(0.0, 1.0);
const double a_h = 1.0 / std::sqrt(2.0);

ArcSet hadamard_window() { return ArcSet::interval(pi / 2 - 0.3, pi / 2 + 0.3); }

double hadamard_grad2(double x)
{
    const double c = a_h * std::cos(x);
    return a_h * a_h * std::sin(x) * std::sin(x) / (1.0 - c * c);
}

NetworkOperator hadamard(int L)
{
    return build_qw(CoinField::homogeneous(LatticeShape::make(1, L, 2), named_coin("hadamard", 1)));
}

// lattice matrix of a 1-d multiplier g(x) * 1_coin, by direct Fourier sum
Matrix scalar_multiplier(int L, int dp, const std::function<double(double)>& g)
{
    std::vector<cplx> kernel(L, 0.0);
    for (int n = 0; n < L; ++n)
        for (int m = 0; m < L; ++m) {
            const double x = 2 * pi * m / L;
            kernel[n] += std::exp(-I1 * (x * n)) * g(x) / double(L);
        }
    Matrix out = Matrix::Zero(dp * L, dp * L);
    for (int t = 0; t < dp; ++t)
        for (int a = 0; a < L; ++a)
            for (int b = 0; b < L; ++b)
                out(t * L + a, t * L + b) = kernel[((a - b) % L + L) % L];
    return out;
}

} // namespace

TEST(Perturbation, FieldDeviationMatchesProfile)
{
    const auto sh = LatticeShape::make(1, 64, 2);
    PerturbationProfile prof;
    prof.kind = PerturbationProfile::Kind::PowerLaw;
    prof.c = 0.8;
    prof.eps = 0.5;
    const UnitaryMatrix c_inf = named_coin("hadamard", 1);
    const CoinField f = perturbed_field(sh, c_inf, prof);
    const auto dev = perturbation_deviation(f, c_inf);
    for (long s = 0; s < sh.sites(); ++s) {
        const double r = std::abs(sh.min_image(sh.site_coords(s)[0]));
        EXPECT_NEAR(dev[s], 0.8 * std::pow(1.0 + r, -1.5), 1e-12) << s;
    }
    prof.c = 2.5;
    EXPECT_THROW(perturbed_field(sh, c_inf, prof), ValidationError);
}

TEST(Perturbation, CompactProfileIsLocal)
{
    const auto sh = LatticeShape::make(1, 32, 2);
    PerturbationProfile prof;
    prof.c = 0.3;
    prof.radius = 2;
    const auto dev = perturbation_deviation(perturbed_field(sh, named_coin("hadamard", 1), prof), named_coin("hadamard", 1));
    int nonzero = 0;
    for (double v : dev)
        nonzero += v > 1e-14;
    EXPECT_EQ(nonzero, 5);
}

TEST(Regularity, CompactIsRegular)
{
    const auto sh = LatticeShape::make(1, 1024, 2);
    std::vector<double> dev(sh.sites(), 0.0);
    for (long s = 0; s < sh.sites(); ++s)
        if (std::abs(sh.min_image(sh.site_coords(s)[0])) <= 3)
            dev[s] = 0.5;
    const RegularityEstimate e = regularity_integral(sh, dev, 1.0, 2.0, 100.0);
    EXPECT_EQ(e.verdict, "regular");
    EXPECT_GT(e.integral, 0.0);
    EXPECT_LT(e.integral, 0.5 * 3.0);
}

TEST(Regularity, PowerLawExponentAndIntegral)
{
    const auto sh = LatticeShape::make(1, 1024, 2);
    std::vector<double> dev(sh.sites());
    for (long s = 0; s < sh.sites(); ++s)
        dev[s] = std::pow(1.0 + std::abs(sh.min_image(sh.site_coords(s)[0])), -2.0);
    const RegularityEstimate e = regularity_integral(sh, dev, 1.0, 2.0, 100.0);
    EXPECT_EQ(e.verdict, "regular");
    EXPECT_NEAR(e.exponent, -2.0, 0.25);
    // on the lattice the sup over r <= |j| <= 2r sits at |j| = ceil(r):
    // int_1^100 (1 + ceil r)^-2 dr = sum_{k=2}^{100} (1 + k)^-2
    double expect = 0.0;
    for (int k = 2; k <= 100; ++k)
        expect += 1.0 / ((1.0 + k) * (1.0 + k));
    EXPECT_NEAR(e.integral, expect, 0.05 * expect) << e.integral;
    EXPECT_EQ(e.r.size(), e.integrand.size());
}

TEST(Regularity, SlowDecayAndShortTorusInconclusive)
{
    const auto sh = LatticeShape::make(1, 1024, 2);
    std::vector<double> dev(sh.sites());
    for (long s = 0; s < sh.sites(); ++s)
        dev[s] = std::pow(1.0 + std::abs(sh.min_image(sh.site_coords(s)[0])), -0.5);
    const RegularityEstimate slow = regularity_integral(sh, dev, 1.0, 2.0, 100.0);
    EXPECT_EQ(slow.verdict, "inconclusive");
    EXPECT_NEAR(slow.exponent, -0.5, 0.15);
    const RegularityEstimate far = regularity_integral(sh, dev, 1.0, 2.0, 400.0);
    EXPECT_EQ(far.verdict, "inconclusive");
    EXPECT_FALSE(far.explanation.empty());
}

TEST(Regularity, VerdictMonotoneInDecay)
{
    const auto sh = LatticeShape::make(1, 1024, 2);
    bool seen_regular = false;
    for (double eps : {-0.8, -0.5, 0.0, 0.2, 0.5, 1.0, 2.0}) {
        PerturbationProfile prof;
        prof.kind = PerturbationProfile::Kind::PowerLaw;
        prof.c = 0.5;
        prof.eps = eps;
        const UnitaryMatrix c_inf = named_coin("hadamard", 1);
        const auto dev = perturbation_deviation(perturbed_field(sh, c_inf, prof), c_inf);
        const bool regular = regularity_integral(sh, dev, 1.0, 2.0, 100.0).verdict == "regular";
        EXPECT_FALSE(seen_regular && !regular) << "eps " << eps;
        seen_regular = seen_regular || regular;
    }
    EXPECT_TRUE(seen_regular);
}

TEST(Conjugate, PositionOperatorMinimalImage)
{
    const auto sh = LatticeShape::make(1, 8, 2);
    const Eigen::VectorXd j = position_operator(sh, 0);
    ASSERT_EQ(j.size(), 16);
    const double expect[8] = {0, 1, 2, 3, 4, -3, -2, -1};
    for (int t = 0; t < 2; ++t)
        for (int s = 0; s < 8; ++s)
            EXPECT_EQ(j[t * 8 + s], expect[s]);
}

TEST(Conjugate, MultiplierOfSymbolIsTheOperator)
{
    const int L = 32;
    const auto sh = LatticeShape::make(1, L, 2);
    const Symbol sym = symbol_qw(named_coin("hadamard", 1), 1);
    std::vector<Matrix> samples;
    for (int m = 0; m < L; ++m)
        samples.push_back(sym({2 * pi * m / L}));
    EXPECT_LT((fourier_multiplier(sh, samples) - hadamard(L).dense()).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Conjugate, RefusesBadWindowsAndCoarseGrids)
{
    const Symbol sym = symbol_qw(named_coin("hadamard", 1), 1);
    try {
        build_conjugate(sym, ArcSet::interval(0.6, 1.0), LatticeShape::make(1, 64, 2));
        FAIL();
    } catch (const NumericalError& e) {
        EXPECT_NE(std::string(e.what()).find("M-good"), std::string::npos) << e.what();
    }
    EXPECT_THROW(build_conjugate(sym, hadamard_window(), LatticeShape::make(1, 8, 2)), ConfigurationError);
}

TEST(Conjugate, FreeShiftGivesUnitCommutator)
{
    // symbol diag(e^{ix}, e^{-ix}): |grad theta| = 1 on both bands
    const int L = 64;
    const ArcSet delta = ArcSet::interval(pi / 4 + 0.01, 3 * pi / 4 - 0.01); // edges off the grid
    const ConjugateOperator a =
        build_conjugate(symbol_qw(named_coin("identity", 1), 1), delta, LatticeShape::make(1, L, 2));
    EXPECT_NEAR(a.certificate.c_delta, 1.0, 1e-8);
    const NetworkOperator u = build_qw(CoinField::homogeneous(a.shape, named_coin("identity", 1)));
    const MourreResult r = mourre_check(u, a, delta);
    EXPECT_TRUE(r.pass);
    EXPECT_NEAR(r.lambda_min, 1.0, 1e-8);
}

TEST(Conjugate, HomogeneousCommutatorIsGradientMultiplier)
{
    const int L = 128;
    const ConjugateOperator a =
        build_conjugate(symbol_qw(named_coin("hadamard", 1), 1), hadamard_window(), LatticeShape::make(1, L, 2));
    EXPECT_LT(a.symmetry_defect, 1e-10);
    EXPECT_LT((a.a - a.a.adjoint()).norm(), 1e-14);
    for (int t : a.transition_cells)
        EXPECT_GE(t, 2);
    const NetworkOperator u = hadamard(L);
    const Matrix b = mourre_commutator(u, a);
    // both bands share |grad theta|^2, so the multiplier is scalar in the coin
    const Matrix expect = scalar_multiplier(L, 2, [&](double x) {
        const long p = std::lround(x / (2 * pi / L)) % L;
        double eta2 = 0.0;
        for (const auto& c : a.cutoff)
            eta2 += c[p] * c[p];
        return eta2 * hadamard_grad2(x);
    });
    EXPECT_LT((b - expect).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Mourre, HadamardWindowPositive)
{
    const int L = 128;
    const ConjugateOperator a =
        build_conjugate(symbol_qw(named_coin("hadamard", 1), 1), hadamard_window(), LatticeShape::make(1, L, 2));
    const MourreResult r = mourre_check(hadamard(L), a, hadamard_window());
    const double s = std::sin(0.3);
    EXPECT_NEAR(r.c_delta, (0.5 - s * s) / (1.0 - s * s), 1e-2);
    EXPECT_TRUE(r.pass);
    EXPECT_GE(r.lambda_min, r.c_delta - r.margin);
    EXPECT_GT(r.window_dim, 0);
    EXPECT_GE(r.margin, r.tail);
    // eigenphases in the window: window_dim counts them
    long inside = 0;
    const auto ph = unitary_phases(hadamard(L).dense());
    for (long i = 0; i < ph.size(); ++i)
        inside += hadamard_window().contains(ph[i]);
    EXPECT_EQ(r.window_dim, inside);
}

TEST(Mourre, CompactPerturbationKeepsPositivity)
{
    const int L = 256;
    const auto sh = LatticeShape::make(1, L, 2);
    const UnitaryMatrix c_inf = named_coin("hadamard", 1);
    const ConjugateOperator a = build_conjugate(symbol_qw(c_inf, 1), hadamard_window(), sh);
    PerturbationProfile prof;
    prof.c = 0.1;
    prof.radius = 3;
    const MourreResult r = mourre_check(build_qw(perturbed_field(sh, c_inf, prof)), a, hadamard_window());
    EXPECT_TRUE(r.pass);
    EXPECT_GE(r.lambda_min, r.c_delta - 0.1);
}

TEST(Mourre, CommutatorTailDecays)
{
    // locality of U*AU - A: the tail must fall by an order of magnitude from
    // distance 32 to 64 (absolute value recorded, not asserted below 1e-6)
    const int L = 256;
    const ConjugateOperator a =
        build_conjugate(symbol_qw(named_coin("hadamard", 1), 1), hadamard_window(), LatticeShape::make(1, L, 2));
    const Matrix b = mourre_commutator(hadamard(L), a);
    const double t32 = offdiagonal_tail(b, a.shape, 32), t64 = offdiagonal_tail(b, a.shape, 64);
    RecordProperty("tail32", std::to_string(t32));
    EXPECT_LT(t64, 0.1 * t32);
    EXPECT_LT(t32, 1e-2);
}

TEST(Stability, SingleSiteDefectInsideWindowIsStable)
{
    const UnitaryMatrix c_inf = named_coin("hadamard", 1);
    auto build = [&](int L) {
        PerturbationProfile prof;
        prof.c = 1.0;
        return build_qw(perturbed_field(LatticeShape::make(1, L, 2), c_inf, prof));
    };
    const ArcSet delta = ArcSet::interval(pi / 2 - 0.3, pi / 2 + 0.3);
    const ArcSet inner = ArcSet::interval(pi / 2 - 0.2, pi / 2 + 0.2);
    const StabilityReport rep = eigenvalue_stability(build, symbol_qw(c_inf, 1), delta, inner, {64, 128, 256});
    ASSERT_EQ(rep.counts.size(), 3u);
    EXPECT_TRUE(rep.stable);
    EXPECT_EQ(rep.counts.front(), rep.counts.back());
    EXPECT_THROW(eigenvalue_stability(build, symbol_qw(c_inf, 1), inner, delta, {64}), NumericalError);
    EXPECT_THROW(
        eigenvalue_stability(build, symbol_qw(c_inf, 1), ArcSet::interval(0.5, 1.2), ArcSet::interval(0.7, 0.9), {64}),
        NumericalError);
}
