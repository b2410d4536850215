#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "unet/lattice.hpp"
#include "unet/models.hpp"

using namespace unet;

namespace {

CoinField random_field(const LatticeShape& shape, std::mt19937_64& rng)
{
    std::vector<UnitaryMatrix> blocks;
    for (long s = 0; s < shape.sites(); ++s)
        blocks.push_back(UnitaryMatrix::certify(oracle::random_unitary(shape.coin_dim, rng)));
    return CoinField(shape, std::move(blocks));
}

} // namespace

TEST(LatticeShape, RejectsOddOrSmallSides)
{
    EXPECT_THROW(LatticeShape::make(1, 5, 2), ConfigurationError);
    EXPECT_THROW(LatticeShape::make(1, 2, 2), ConfigurationError);
    EXPECT_THROW(LatticeShape::make(0, 4, 2), ConfigurationError);
    EXPECT_EQ(LatticeShape::make(2, 6, 4).dimension(), 4 * 36);
}

TEST(LatticeShape, SiteIndexRoundTripAndMinImage)
{
    const auto sh = LatticeShape::make(2, 6, 4);
    for (long s = 0; s < sh.sites(); ++s)
        EXPECT_EQ(sh.site_index(sh.site_coords(s)), s);
    std::vector<int> c{1, 2};
    EXPECT_EQ(sh.site_index(c), 1 * 6 + 2);
    EXPECT_EQ(sh.min_image(3), 3);
    EXPECT_EQ(sh.min_image(4), -2);
    EXPECT_EQ(sh.min_image(-3), 3);
    std::vector<int> a{0, 0}, b{5, 3};
    EXPECT_EQ(sh.torus_distance(sh.site_index(a), sh.site_index(b)), 1 + 3);
}

TEST(CoinIndex, SlotOrderFollowsLabels)
{
    EXPECT_EQ(CoinIndex(1).slot(), 0);
    EXPECT_EQ(CoinIndex(-1).slot(), 1);
    EXPECT_EQ(CoinIndex(2).slot(), 2);
    EXPECT_EQ(CoinIndex(-2).slot(), 3);
    EXPECT_EQ(CoinIndex::from_slot(3).tau(), -2);
    EXPECT_THROW(CoinIndex(0), ConfigurationError);
}

TEST(UnitaryMatrix, CertifyRejectsNonUnitary)
{
    Matrix m = Matrix::Identity(2, 2);
    m(0, 0) = 1.001;
    EXPECT_THROW(UnitaryMatrix::certify(m), ValidationError);
    // small drift from parameters is projected back
    Matrix p = Matrix::Identity(2, 2);
    p(0, 1) = 1e-11;
    const auto u = UnitaryMatrix::from_parameters(p);
    EXPECT_TRUE(u.reorthonormalized());
    EXPECT_LT(unitarity_defect(u.matrix()), 1e-12);
}

TEST(Shift, WrapsPeriodically1d)
{
    const auto sh = LatticeShape::make(1, 4, 2);
    const NetworkOperator s = build_shift(sh);
    const Matrix m = s.dense();
    EXPECT_EQ(m(sh.index(0, 3), sh.index(0, 2)), cplx(1.0));
    EXPECT_EQ(m(sh.index(1, 3), sh.index(1, 0)), cplx(1.0));
    EXPECT_LT(s.unitarity_defect(), 1e-15);
    EXPECT_EQ(s.bandwidth(), 1);
}

TEST(Shift, MatchesBruteForce2d)
{
    const auto sh = LatticeShape::make(2, 6, 4);
    EXPECT_EQ((build_shift(sh).dense() - oracle::shift_matrix(2, 6)).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_THROW(build_shift(LatticeShape::make(2, 6, 2)), ConfigurationError);
}

TEST(CoinOperator, BlockPlacementAndUnitarity)
{
    const auto sh = LatticeShape::make(1, 8, 2);
    const auto h = named_coin("hadamard", 1);
    const Matrix c = build_coin_operator(CoinField::homogeneous(sh, h)).dense();
    for (long s = 0; s < sh.sites(); ++s)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                EXPECT_EQ(c(sh.index(a, s), sh.index(b, s)), h.matrix()(a, b));
    EXPECT_EQ(build_coin_operator(CoinField::homogeneous(sh, UnitaryMatrix::certify(Matrix::Identity(2, 2)))).bandwidth(),
              0);

    std::mt19937_64 rng(3);
    const NetworkOperator r = build_coin_operator(random_field(sh, rng));
    const Matrix rd = r.dense();
    EXPECT_LT((rd.adjoint() * rd - Matrix::Identity(16, 16)).norm(), 1e-12);
}

TEST(CoinField, MissingSiteIsConfigurationError)
{
    const auto sh = LatticeShape::make(1, 4, 2);
    std::map<std::vector<int>, UnitaryMatrix> blocks;
    for (int j = 0; j < 3; ++j)
        blocks.emplace(std::vector<int>{j}, UnitaryMatrix::certify(Matrix::Identity(2, 2)));
    EXPECT_THROW(CoinField::from_sites(sh, blocks), ConfigurationError);
}

TEST(Compose, DenseOracle)
{
    const auto sh = LatticeShape::make(1, 8, 2);
    std::mt19937_64 rng(5);
    const NetworkOperator s = build_shift(sh);
    const NetworkOperator c = build_coin_operator(random_field(sh, rng));
    const NetworkOperator u = compose(s, c);
    EXPECT_LT((u.dense() - s.dense() * c.dense()).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LE(u.bandwidth(), s.bandwidth() + c.bandwidth());
    EXPECT_EQ((compose(s, NetworkOperator::identity(sh)).dense() - s.dense()).norm(), 0.0);
    EXPECT_LT((compose(s, s.adjoint()).dense() - Matrix::Identity(16, 16)).norm(), 1e-15);
    EXPECT_THROW(compose(s, build_shift(LatticeShape::make(1, 10, 2))), ConfigurationError);
}

TEST(Apply, DenseOracleAndNormPreservation)
{
    const auto sh = LatticeShape::make(1, 16, 2);
    std::mt19937_64 rng(7);
    const NetworkOperator u = build_qw(random_field(sh, rng));
    const Matrix ud = u.dense();
    for (int i = 0; i < 100; ++i) {
        const Vector v = oracle::random_vector(sh.dimension(), rng);
        const StateVector w = apply(u, StateVector(sh, v));
        EXPECT_NEAR(w.norm(), 1.0, 1e-12);
        if (i < 5) {
            EXPECT_LT((w.amplitudes() - ud * v).cwiseAbs().maxCoeff(), 1e-13);
        }
    }
    const StateVector e = apply(build_shift(sh), StateVector::basis(sh, 0, 15));
    EXPECT_EQ(e.amplitude(0, 0), cplx(1.0));
}

TEST(Locality, PowersRespectTheLightCone)
{
    const auto sh = LatticeShape::make(1, 32, 2);
    const NetworkOperator u = build_qw(CoinField::homogeneous(sh, named_coin("hadamard", 1)));
    EXPECT_EQ(check_locality(u, 1), 1);
    EXPECT_EQ(check_locality(u, 5), 5);
    EXPECT_EQ(check_locality(NetworkOperator::identity(sh), 7), 0);
    EXPECT_THROW(check_locality(u, 16), ConfigurationError);

    // dense power oracle for the cone
    Matrix p = Matrix::Identity(64, 64);
    const Matrix ud = u.dense();
    for (int n = 1; n < 16; ++n) {
        p = ud * p;
        for (long r = 0; r < 64; ++r)
            for (long c = 0; c < 64; ++c)
                if (sh.torus_distance(r % 32, c % 32) > n)
                    ASSERT_LT(std::abs(p(r, c)), 1e-14);
    }
}

TEST(Lattice2d, QwUnitaryAndDenseSparseAgree)
{
    const auto sh = LatticeShape::make(2, 8, 4);
    std::mt19937_64 rng(9);
    const CoinField f = random_field(sh, rng);
    const NetworkOperator u = build_qw(f);
    EXPECT_LT(u.unitarity_defect(), 1e-12);
    EXPECT_LT((u.dense() - oracle::shift_matrix(2, 8) * build_coin_operator(f).dense()).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(NetworkOperator, CsvHasHeaderAndOneLinePerEntry)
{
    const auto sh = LatticeShape::make(1, 4, 2);
    std::ostringstream os;
    build_shift(sh).write_csv(os);
    std::istringstream is(os.str());
    std::string line;
    int lines = 0;
    std::getline(is, line);
    EXPECT_EQ(line[0], '#');
    std::getline(is, line);
    EXPECT_EQ(line, "row,col,re,im");
    while (std::getline(is, line))
        ++lines;
    EXPECT_EQ(lines, 8);
}
