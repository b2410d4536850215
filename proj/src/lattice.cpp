#include "unet/lattice.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <string>

namespace unet {

LatticeShape LatticeShape::make(int d, int L, int coin_dim)
{
    if (d < 1)
        throw ConfigurationError("lattice dimension must be positive, got " + std::to_string(d));
    if (L < 4 || L % 2 != 0)
        throw ConfigurationError("truncation L must be even and >= 4, got " + std::to_string(L));
    if (coin_dim < 1)
        throw ConfigurationError("coin dimension must be positive, got " + std::to_string(coin_dim));
    return LatticeShape{d, L, coin_dim};
}

long LatticeShape::sites() const
{
    long n = 1;
    for (int k = 0; k < d; ++k)
        n *= L;
    return n;
}

long LatticeShape::site_index(std::span<const int> coords) const
{
    if (static_cast<int>(coords.size()) != d)
        throw ConfigurationError("site has " + std::to_string(coords.size()) + " coordinates, lattice has d = " +
                                 std::to_string(d));
    long s = 0;
    for (int c : coords) {
        int r = c % L;
        if (r < 0)
            r += L;
        s = s * L + r;
    }
    return s;
}

std::vector<int> LatticeShape::site_coords(long site) const
{
    std::vector<int> c(d);
    for (int k = d - 1; k >= 0; --k) {
        c[k] = static_cast<int>(site % L);
        site /= L;
    }
    return c;
}

int LatticeShape::min_image(int delta) const
{
    int r = delta % L;
    if (r < 0)
        r += L;
    return r > L / 2 ? r - L : r;
}

int LatticeShape::torus_distance(long site_a, long site_b) const
{
    int dist = 0;
    for (int k = 0; k < d; ++k) {
        const int a = static_cast<int>(site_a % L);
        const int b = static_cast<int>(site_b % L);
        dist += std::abs(min_image(a - b));
        site_a /= L;
        site_b /= L;
    }
    return dist;
}

CoinIndex::CoinIndex(int tau) : tau_(tau)
{
    if (tau == 0)
        throw ConfigurationError("coin label 0 is not in N_d");
}

CoinIndex CoinIndex::from_slot(int slot)
{
    if (slot < 0)
        throw ConfigurationError("negative coin slot");
    const int axis = slot / 2 + 1;
    return CoinIndex(slot % 2 == 0 ? axis : -axis);
}

double unitarity_defect(const Matrix& m)
{
    return (m.adjoint() * m - Matrix::Identity(m.cols(), m.cols())).norm();
}

UnitaryMatrix UnitaryMatrix::certify(Matrix m, double tol)
{
    if (m.rows() != m.cols() || m.rows() == 0)
        throw ValidationError("", "unitary matrix must be square and non-empty");
    const double drift = unitarity_defect(m);
    if (!(drift <= tol))
        throw ValidationError("", "matrix is not unitary: ||M*M - 1||_F = " + std::to_string(drift));
    return UnitaryMatrix(std::move(m), tol, drift, false);
}

UnitaryMatrix UnitaryMatrix::from_parameters(Matrix m)
{
    if (m.rows() != m.cols() || m.rows() == 0)
        throw ValidationError("", "unitary matrix must be square and non-empty");
    const double drift = unitarity_defect(m);
    if (drift <= kUnitaryTol)
        return UnitaryMatrix(std::move(m), kUnitaryTol, drift, false);
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Matrix polar = svd.matrixU() * svd.matrixV().adjoint();
    return UnitaryMatrix(std::move(polar), kUnitaryTol, drift, true);
}

CoinField::CoinField(LatticeShape shape, std::vector<UnitaryMatrix> blocks)
    : shape_(shape), blocks_(std::move(blocks))
{
    if (static_cast<long>(blocks_.size()) != shape_.sites())
        throw ConfigurationError("coin field has " + std::to_string(blocks_.size()) + " blocks for " +
                                 std::to_string(shape_.sites()) + " sites");
    for (long s = 0; s < shape_.sites(); ++s)
        if (blocks_[s].dim() != shape_.coin_dim)
            throw ConfigurationError("coin block at site " + std::to_string(s) + " has dimension " +
                                     std::to_string(blocks_[s].dim()) + ", expected " +
                                     std::to_string(shape_.coin_dim));
}

CoinField CoinField::homogeneous(const LatticeShape& shape, const UnitaryMatrix& coin)
{
    return CoinField(shape, std::vector<UnitaryMatrix>(shape.sites(), coin));
}

CoinField CoinField::from_sites(const LatticeShape& shape, const std::map<std::vector<int>, UnitaryMatrix>& blocks)
{
    std::vector<const UnitaryMatrix*> slots(shape.sites(), nullptr);
    for (const auto& [coords, block] : blocks)
        slots[shape.site_index(coords)] = &block;
    std::vector<UnitaryMatrix> out;
    out.reserve(slots.size());
    for (long s = 0; s < shape.sites(); ++s) {
        if (!slots[s]) {
            std::string where;
            for (int c : shape.site_coords(s))
                where += (where.empty() ? "" : ",") + std::to_string(c);
            throw ConfigurationError("coin field is missing site (" + where + ")");
        }
        out.push_back(*slots[s]);
    }
    return CoinField(shape, std::move(out));
}

void CoinField::set(long site, UnitaryMatrix block)
{
    if (block.dim() != shape_.coin_dim)
        throw ConfigurationError("coin block dimension mismatch at site " + std::to_string(site));
    blocks_.at(site) = std::move(block);
}

StateVector::StateVector(LatticeShape shape, Vector amplitudes) : shape_(shape), amps_(std::move(amplitudes))
{
    if (amps_.size() != shape_.dimension())
        throw ConfigurationError("state vector length " + std::to_string(amps_.size()) +
                                 " does not match lattice dimension " + std::to_string(shape_.dimension()));
}

StateVector StateVector::basis(const LatticeShape& shape, int coin_slot, long site)
{
    Vector v = Vector::Zero(shape.dimension());
    v[shape.index(coin_slot, site)] = 1.0;
    return StateVector(shape, std::move(v));
}

namespace {

int compute_bandwidth(const LatticeShape& shape, const SparseMatrix& m)
{
    const long n_sites = shape.sites();
    int bw = 0;
    for (long r = 0; r < m.outerSize(); ++r)
        for (SparseMatrix::InnerIterator it(m, r); it; ++it)
            bw = std::max(bw, shape.torus_distance(r % n_sites, it.col() % n_sites));
    return bw;
}

} // namespace

NetworkOperator::NetworkOperator(LatticeShape shape, SparseMatrix matrix) : shape_(shape), m_(std::move(matrix))
{
    if (m_.rows() != shape_.dimension() || m_.cols() != shape_.dimension())
        throw ConfigurationError("operator size " + std::to_string(m_.rows()) + "x" + std::to_string(m_.cols()) +
                                 " does not match lattice dimension " + std::to_string(shape_.dimension()));
    m_.prune(cplx(0.0));
    m_.makeCompressed();
    bandwidth_ = compute_bandwidth(shape_, m_);
}

NetworkOperator NetworkOperator::identity(const LatticeShape& shape)
{
    SparseMatrix id(shape.dimension(), shape.dimension());
    id.setIdentity();
    return NetworkOperator(shape, std::move(id));
}

NetworkOperator NetworkOperator::from_dense(const LatticeShape& shape, const Matrix& dense, double drop)
{
    std::vector<Eigen::Triplet<cplx, long>> trips;
    for (long r = 0; r < dense.rows(); ++r)
        for (long c = 0; c < dense.cols(); ++c)
            if (std::abs(dense(r, c)) > drop)
                trips.emplace_back(r, c, dense(r, c));
    SparseMatrix m(dense.rows(), dense.cols());
    m.setFromTriplets(trips.begin(), trips.end());
    return NetworkOperator(shape, std::move(m));
}

Matrix NetworkOperator::dense() const
{
    return Matrix(m_);
}

NetworkOperator NetworkOperator::adjoint() const
{
    return NetworkOperator(shape_, SparseMatrix(m_.adjoint()));
}

NetworkOperator NetworkOperator::scaled(cplx factor) const
{
    return NetworkOperator(shape_, SparseMatrix(m_ * factor));
}

double NetworkOperator::unitarity_defect() const
{
    SparseMatrix id(m_.rows(), m_.cols());
    id.setIdentity();
    const SparseMatrix ad = m_.adjoint();
    const SparseMatrix prod = ad * m_;
    const SparseMatrix r = prod - id;
    return r.norm();
}

void NetworkOperator::write_csv(std::ostream& out) const
{
    out << "# unet-operator d=" << shape_.d << " L=" << shape_.L << " coin_dim=" << shape_.coin_dim
        << " dimension=" << shape_.dimension() << " bandwidth=" << bandwidth_
        << " layout=coin-major-site-lexicographic\n";
    out << "row,col,re,im\n";
    char buf[96];
    for (long r = 0; r < m_.outerSize(); ++r)
        for (SparseMatrix::InnerIterator it(m_, r); it; ++it) {
            std::snprintf(buf, sizeof buf, "%ld,%ld,%.17g,%.17g\n", r, static_cast<long>(it.col()),
                          it.value().real(), it.value().imag());
            out << buf;
        }
}

NetworkOperator build_shift(const LatticeShape& shape)
{
    if (shape.coin_dim != 2 * shape.d)
        throw ConfigurationError("symmetric shift needs coin_dim = 2d, got coin_dim = " +
                                 std::to_string(shape.coin_dim) + " for d = " + std::to_string(shape.d));
    std::vector<Eigen::Triplet<cplx, long>> trips;
    trips.reserve(shape.dimension());
    for (int slot = 0; slot < shape.coin_dim; ++slot) {
        const CoinIndex tau = CoinIndex::from_slot(slot);
        for (long s = 0; s < shape.sites(); ++s) {
            auto c = shape.site_coords(s);
            c[tau.axis()] += tau.sign();
            trips.emplace_back(shape.index(slot, shape.site_index(c)), shape.index(slot, s), 1.0);
        }
    }
    SparseMatrix m(shape.dimension(), shape.dimension());
    m.setFromTriplets(trips.begin(), trips.end());
    return NetworkOperator(shape, std::move(m));
}

NetworkOperator build_coin_operator(const CoinField& field)
{
    const LatticeShape& shape = field.shape();
    std::vector<Eigen::Triplet<cplx, long>> trips;
    trips.reserve(shape.sites() * shape.coin_dim * shape.coin_dim);
    for (long s = 0; s < shape.sites(); ++s) {
        const Matrix& c = field.at(s).matrix();
        for (int a = 0; a < shape.coin_dim; ++a)
            for (int b = 0; b < shape.coin_dim; ++b)
                if (c(a, b) != cplx(0.0))
                    trips.emplace_back(shape.index(a, s), shape.index(b, s), c(a, b));
    }
    SparseMatrix m(shape.dimension(), shape.dimension());
    m.setFromTriplets(trips.begin(), trips.end());
    return NetworkOperator(shape, std::move(m));
}

NetworkOperator compose(const NetworkOperator& a, const NetworkOperator& b)
{
    if (!(a.shape() == b.shape()))
        throw ConfigurationError("compose: operator shapes differ");
    return NetworkOperator(a.shape(), SparseMatrix(a.matrix() * b.matrix()));
}

NetworkOperator add(const NetworkOperator& a, const NetworkOperator& b)
{
    if (!(a.shape() == b.shape()))
        throw ConfigurationError("add: operator shapes differ");
    return NetworkOperator(a.shape(), SparseMatrix(a.matrix() + b.matrix()));
}

StateVector apply(const NetworkOperator& op, const StateVector& v)
{
    if (!(op.shape() == v.shape()))
        throw ConfigurationError("apply: operator and state shapes differ");
    return StateVector(v.shape(), op.matrix() * v.amplitudes());
}

int check_locality(const NetworkOperator& op, int n)
{
    if (n < 1)
        throw ConfigurationError("check_locality: power must be >= 1");
    if (2 * n >= op.shape().L)
        throw ConfigurationError("check_locality: power " + std::to_string(n) +
                                 " >= L/2 makes torus distances ambiguous");
    // Structural power: propagate the sparsity pattern with unit weights so
    // cancellations cannot hide couplings.
    SparseMatrix pattern = op.matrix();
    for (long k = 0; k < pattern.nonZeros(); ++k)
        pattern.valuePtr()[k] = 1.0;
    SparseMatrix power = pattern;
    for (int k = 1; k < n; ++k)
        power = SparseMatrix(power * pattern);
    return NetworkOperator(op.shape(), std::move(power)).bandwidth();
}

} // namespace unet
