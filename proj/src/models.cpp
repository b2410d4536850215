#include "unet/models.hpp"

#include <cmath>
#include <string>

#include "unet/linalg.hpp"

namespace unet {

namespace {

using Triplet = Eigen::Triplet<cplx, long>;

const cplx I1(0.0, 1.0);

SparseMatrix from_triplets(long n, const std::vector<Triplet>& trips)
{
    SparseMatrix m(n, n);
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

} // namespace

// ---------------------------------------------------------------- quantum walks

UnitaryMatrix qw_coin(cplx alpha, cplx beta, double eta, const std::string& field)
{
    const double s = std::norm(alpha) + std::norm(beta);
    if (std::abs(s - 1.0) > kParameterTol)
        throw ValidationError(field, "|alpha|^2 + |beta|^2 = " + std::to_string(s) + ", expected 1");
    Matrix c(2, 2);
    c << alpha, -std::conj(beta), beta, std::conj(alpha);
    c *= std::exp(-I1 * eta);
    return UnitaryMatrix::from_parameters(std::move(c));
}

QwCoinParams QwCoinParams::homogeneous(long L, cplx alpha, cplx beta, double eta)
{
    return QwCoinParams{std::vector<cplx>(L, alpha), std::vector<cplx>(L, beta), std::vector<double>(L, eta)};
}

void QwCoinParams::validate() const
{
    if (beta.size() != alpha.size() || eta.size() != alpha.size())
        throw ValidationError("coin", "alpha, beta and eta must have equal length");
    for (long k = 0; k < size(); ++k)
        qw_coin(alpha[k], beta[k], eta[k], "coin[" + std::to_string(k) + "]");
}

CoinField coin_field_1d(const QwCoinParams& params)
{
    params.validate();
    const LatticeShape shape = LatticeShape::make(1, static_cast<int>(params.size()), 2);
    std::vector<UnitaryMatrix> blocks;
    blocks.reserve(params.size());
    for (long k = 0; k < params.size(); ++k)
        blocks.push_back(qw_coin(params.alpha[k], params.beta[k], params.eta[k], "coin[" + std::to_string(k) + "]"));
    return CoinField(shape, std::move(blocks));
}

UnitaryMatrix named_coin(const std::string& name, int d)
{
    if (name == "identity")
        return UnitaryMatrix::certify(Matrix::Identity(2 * d, 2 * d));
    if (d != 1)
        throw ConfigurationError("named coin '" + name + "' is only defined for d = 1");
    const double h = 1.0 / std::sqrt(2.0);
    Matrix c(2, 2);
    if (name == "hadamard")
        c << h, -h, h, h;
    else if (name == "hadamard-standard")
        c << h, h, h, -h;
    else if (name == "antidiagonal")
        c << 0.0, -1.0, 1.0, 0.0;
    else
        throw ConfigurationError("unknown named coin '" + name + "'");
    return UnitaryMatrix::certify(std::move(c));
}

NetworkOperator build_qw(const CoinField& field)
{
    return compose(build_shift(field.shape()), build_coin_operator(field));
}

// ---------------------------------------------------------------- BB / CMV

BbParams BbParams::identity(long L)
{
    return BbParams{std::vector<double>(L, 1.0), std::vector<double>(L, 0.0), std::vector<double>(L, 0.0),
                    std::vector<double>(L, 0.0), std::vector<double>(L, 0.0)};
}

void BbParams::validate() const
{
    const auto n = r.size();
    if (t.size() != n || theta.size() != n || nu.size() != n || gamma.size() != n)
        throw ValidationError("scattering", "r, t, theta, nu and gamma must have equal length");
    for (std::size_t k = 0; k < n; ++k) {
        const std::string field = "scattering[" + std::to_string(k) + "]";
        if (r[k] < -kParameterTol || r[k] > 1 + kParameterTol || t[k] < -kParameterTol || t[k] > 1 + kParameterTol)
            throw ValidationError(field, "r and t must lie in [0, 1]");
        const double s = r[k] * r[k] + t[k] * t[k];
        if (std::abs(s - 1.0) > kParameterTol)
            throw ValidationError(field, "r^2 + t^2 = " + std::to_string(s) + ", expected 1");
    }
}

Matrix scattering_matrix(const BbParams& p, long k)
{
    Matrix s(2, 2);
    s << p.r[k] * std::exp(-I1 * p.nu[k]), I1 * p.t[k] * std::exp(I1 * p.gamma[k]),
        I1 * p.t[k] * std::exp(-I1 * p.gamma[k]), p.r[k] * std::exp(I1 * p.nu[k]);
    return s * std::exp(-I1 * p.theta[k]);
}

NetworkOperator pair_operator(long L, const std::vector<Matrix>& blocks, int parity)
{
    const LatticeShape shape = LatticeShape::make(1, static_cast<int>(L), 1);
    if (static_cast<long>(blocks.size()) != L)
        throw ConfigurationError("pair_operator: need one block per site");
    std::vector<Triplet> trips;
    trips.reserve(2 * L);
    for (long k = parity; k < L; k += 2) {
        const long idx[2] = {k, (k + 1) % L};
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                trips.emplace_back(idx[a], idx[b], blocks[k](a, b));
    }
    return NetworkOperator(shape, from_triplets(L, trips));
}

namespace {

std::vector<Matrix> all_scattering(const BbParams& p)
{
    p.validate();
    if (p.size() % 2 != 0)
        throw ConfigurationError("BB truncation needs an even number of sites, got " + std::to_string(p.size()));
    std::vector<Matrix> blocks;
    blocks.reserve(p.size());
    for (long k = 0; k < p.size(); ++k)
        blocks.push_back(scattering_matrix(p, k));
    return blocks;
}

} // namespace

NetworkOperator build_bb_even(const BbParams& p)
{
    return pair_operator(p.size(), all_scattering(p), 0);
}

NetworkOperator build_bb_odd(const BbParams& p)
{
    return pair_operator(p.size(), all_scattering(p), 1);
}

NetworkOperator build_bb(const BbParams& p)
{
    const auto blocks = all_scattering(p);
    return compose(pair_operator(p.size(), blocks, 1), pair_operator(p.size(), blocks, 0));
}

void VerblunskiSeq::validate() const
{
    for (long k = 0; k < size(); ++k) {
        const double m = std::abs(a[k]);
        if (m > 1.0 + kParameterTol)
            throw ValidationError("verblunski[" + std::to_string(k) + "]",
                                  "|a_k| = " + std::to_string(m) + " exceeds 1");
    }
}

Matrix cmv_block(cplx a)
{
    const double rho = std::sqrt(std::max(0.0, 1.0 - std::norm(a)));
    Matrix s(2, 2);
    s << -a, rho, rho, std::conj(a);
    return s;
}

BbParams cmv_to_bb(const VerblunskiSeq& seq)
{
    seq.validate();
    const long n = seq.size();
    BbParams p{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n, kPi / 2),
               std::vector<double>(n), std::vector<double>(n, 0.0)};
    for (long k = 0; k < n; ++k) {
        const double m = std::min(1.0, std::abs(seq.a[k]));
        p.r[k] = m;
        p.t[k] = std::sqrt(std::max(0.0, 1.0 - m * m));
        p.nu[k] = kPi / 2 - (m > 0.0 ? std::arg(seq.a[k]) : 0.0);
    }
    return p;
}

NetworkOperator build_cmv(const VerblunskiSeq& seq)
{
    seq.validate();
    if (seq.size() % 2 != 0)
        throw ConfigurationError("CMV truncation needs an even number of sites, got " + std::to_string(seq.size()));
    std::vector<Matrix> blocks;
    blocks.reserve(seq.size());
    for (const cplx& a : seq.a)
        blocks.push_back(cmv_block(a));
    return compose(pair_operator(seq.size(), blocks, 1), pair_operator(seq.size(), blocks, 0));
}

Matrix build_cmv_one_sided(const VerblunskiSeq& seq)
{
    seq.validate();
    const long n = seq.size();
    auto layer = [&](int parity) {
        Matrix m = Matrix::Identity(n, n);
        for (long k = parity; k < n; k += 2) {
            if (k + 1 < n) {
                m.block(k, k, 2, 2) = cmv_block(seq.a[k]);
            } else if (std::abs(std::abs(seq.a[k]) - 1.0) <= kParameterTol) {
                m(k, k) = -seq.a[k] / std::abs(seq.a[k]);
            }
        }
        return m;
    };
    return layer(1) * layer(0);
}

VerblunskiSeq verblunski_from_measure(const std::vector<cplx>& moments, long n_max, double rank_tol)
{
    if (n_max < 1)
        throw ConfigurationError("verblunski_from_measure: n_max must be >= 1");
    if (static_cast<long>(moments.size()) < n_max + 1)
        throw ConfigurationError("verblunski_from_measure: need " + std::to_string(n_max + 1) + " moments, got " +
                                 std::to_string(moments.size()));
    if (std::abs(moments[0] - 1.0) > kParameterTol)
        throw ValidationError("moments[0]", "c_0 must equal 1 for a probability measure");

    // m_k = int z^k dmu
    std::vector<cplx> m(n_max + 1);
    for (long k = 0; k <= n_max; ++k)
        m[k] = std::conj(moments[k]);

    VerblunskiSeq out;
    std::vector<cplx> phi{1.0}; // monic Phi_n, coefficients of z^0..z^n
    double norm2 = 1.0;
    for (long n = 0; n < n_max; ++n) {
        // conj(alpha_n) = <1, z Phi_n> / ||Phi_n||^2 with <1, g> = int g dmu
        cplx s = 0.0;
        for (long k = 0; k <= n; ++k)
            s += phi[k] * m[k + 1];
        const cplx alpha_bar = s / norm2;
        cplx a = -alpha_bar;
        const double next = norm2 * (1.0 - std::norm(alpha_bar));
        if (next < -std::sqrt(rank_tol) * norm2 || std::abs(a) > 1.0 + 1e-6)
            throw ValidationError("moments", "moment sequence is not positive semidefinite (step " +
                                                 std::to_string(n) + ")");
        const bool terminal = next < rank_tol;
        if (terminal)
            a /= std::abs(a);
        out.a.push_back(a);
        if (terminal) {
            out.truncated = n + 1 < n_max;
            return out;
        }
        // Phi_{n+1} = z Phi_n - conj(alpha_n) Phi_n^*,  Phi_n^*(z) = z^n conj(Phi_n(1/conj z))
        std::vector<cplx> nxt(n + 2, 0.0);
        for (long k = 0; k <= n; ++k) {
            nxt[k + 1] += phi[k];
            nxt[n - k] -= alpha_bar * std::conj(phi[k]);
        }
        phi = std::move(nxt);
        norm2 = next;
    }
    return out;
}

// ---------------------------------------------------------------- Chalker-Coddington

CcParams CcParams::uniform(double phi, int L)
{
    return CcParams{phi, L, std::vector<cplx>(static_cast<std::size_t>(L) * L, 1.0)};
}

void CcParams::validate() const
{
    if (L < 4 || L % 2 != 0)
        throw ConfigurationError("Chalker-Coddington truncation needs an even L >= 4, got " + std::to_string(L));
    if (phi < -kParameterTol || phi > kPi / 2 + kParameterTol)
        throw ValidationError("phi", "phi = " + std::to_string(phi) + " outside [0, pi/2]");
    if (static_cast<long>(d_field.size()) != static_cast<long>(L) * L)
        throw ValidationError("d_field", "expected " + std::to_string(L * L) + " entries");
    for (std::size_t s = 0; s < d_field.size(); ++s)
        if (std::abs(std::abs(d_field[s]) - 1.0) > kParameterTol)
            throw ValidationError("d_field[" + std::to_string(s) + "]", "entry is not unimodular");
}

namespace {

/// 4-cycle permutation over plaquettes anchored at even sites 2j, visiting
/// anchor + offsets[0] -> offsets[1] -> offsets[2] -> offsets[3] -> offsets[0].
NetworkOperator plaquette_permutation(int L, const int (&offsets)[4][2])
{
    if (L < 4 || L % 2 != 0)
        throw ConfigurationError("Chalker-Coddington truncation needs an even L >= 4, got " + std::to_string(L));
    const LatticeShape shape = LatticeShape::make(2, L, 1);
    std::vector<Triplet> trips;
    trips.reserve(shape.sites());
    for (int j1 = 0; j1 < L / 2; ++j1)
        for (int j2 = 0; j2 < L / 2; ++j2) {
            long idx[4];
            for (int v = 0; v < 4; ++v) {
                const int c[2] = {2 * j1 + offsets[v][0], 2 * j2 + offsets[v][1]};
                idx[v] = shape.site_index(c);
            }
            for (int v = 0; v < 4; ++v)
                trips.emplace_back(idx[(v + 1) % 4], idx[v], 1.0);
        }
    return NetworkOperator(shape, from_triplets(shape.dimension(), trips));
}

} // namespace

NetworkOperator cc_rotation_ccw(int L)
{
    static const int off[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    return plaquette_permutation(L, off);
}

NetworkOperator cc_rotation_cw(int L)
{
    static const int off[4][2] = {{0, 0}, {0, -1}, {-1, -1}, {-1, 0}};
    return plaquette_permutation(L, off);
}

NetworkOperator build_cc_original(const CcParams& p)
{
    p.validate();
    const NetworkOperator t =
        add(cc_rotation_ccw(p.L).scaled(std::cos(p.phi)), cc_rotation_cw(p.L).scaled(I1 * std::sin(p.phi)));
    const LatticeShape& shape = t.shape();
    std::vector<Triplet> trips;
    for (long s = 0; s < shape.sites(); ++s)
        trips.emplace_back(s, s, p.d_field[s]);
    return compose(NetworkOperator(shape, from_triplets(shape.dimension(), trips)), t);
}

Matrix cc_coin_rotation()
{
    // slots: 0 = +1, 1 = -1, 2 = +2, 3 = -2
    Matrix r = Matrix::Zero(4, 4);
    r(2, 0) = 1.0; // +1 -> +2
    r(3, 1) = 1.0; // -1 -> -2
    r(1, 2) = 1.0; // +2 -> -1
    r(0, 3) = 1.0; // -2 -> +1
    return r;
}

CoinField cc_qw_d_field(const CcParams& p)
{
    p.validate();
    const LatticeShape orig = LatticeShape::make(2, p.L, 1);
    const LatticeShape qw = LatticeShape::make(2, p.L / 2, 4);
    // offset of the original site carried by each coin slot
    static const int off[4][2] = {{1, 0}, {0, 1}, {1, 1}, {0, 0}};
    std::vector<UnitaryMatrix> blocks;
    blocks.reserve(qw.sites());
    for (long s = 0; s < qw.sites(); ++s) {
        const auto j = qw.site_coords(s);
        Matrix dj = Matrix::Zero(4, 4);
        for (int slot = 0; slot < 4; ++slot) {
            const int c[2] = {2 * j[0] + off[slot][0], 2 * j[1] + off[slot][1]};
            dj(slot, slot) = p.d_field[orig.site_index(c)];
        }
        blocks.push_back(UnitaryMatrix::from_parameters(std::move(dj)));
    }
    return CoinField(qw, std::move(blocks));
}

NetworkOperator build_cc_qw(const CcParams& p)
{
    const CoinField dfield = cc_qw_d_field(p);
    const LatticeShape& shape = dfield.shape();
    const Matrix r = cc_coin_rotation();
    const NetworkOperator rot =
        build_coin_operator(CoinField::homogeneous(shape, UnitaryMatrix::certify(r)));
    const NetworkOperator rot_inv =
        build_coin_operator(CoinField::homogeneous(shape, UnitaryMatrix::certify(r.adjoint())));
    const NetworkOperator t = add(rot.scaled(std::cos(p.phi)),
                                  compose(rot_inv, build_shift(shape)).scaled(I1 * std::sin(p.phi)));
    return compose(build_coin_operator(dfield), t);
}

} // namespace unet
