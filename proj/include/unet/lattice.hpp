#pragma once

#include <complex>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "unet/errors.hpp"

namespace unet {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::RowMajor, long>;

inline constexpr double kUnitaryTol = 1e-12;
inline constexpr double kParameterTol = 1e-10;

/// Periodic truncation (Z/LZ)^d with a coin space of dimension coin_dim.
///
/// Linear index layout is coin-major, site lexicographic:
///   index = coin_slot * L^d + site,  site = sum_k j_k L^(d-1-k)
/// so j_1 is the most significant coordinate.
struct LatticeShape {
    int d = 1;
    int L = 4;
    int coin_dim = 2;

    /// Validates L >= 4, L even, d >= 1, coin_dim >= 1.
    static LatticeShape make(int d, int L, int coin_dim);

    long sites() const;
    long dimension() const { return coin_dim * sites(); }
    long index(int coin_slot, long site) const { return coin_slot * sites() + site; }

    /// Coordinates are reduced mod L.
    long site_index(std::span<const int> coords) const;
    std::vector<int> site_coords(long site) const;

    /// Representative of a coordinate difference in (-L/2, L/2].
    int min_image(int delta) const;
    /// Graph (L1) distance on the torus.
    int torus_distance(long site_a, long site_b) const;

    bool operator==(const LatticeShape&) const = default;
};

/// Coin label tau in N_d = {1, -1, ..., d, -d}. Slot order follows N_d:
/// slot 0 = +1, slot 1 = -1, slot 2 = +2, ...
class CoinIndex {
public:
    explicit CoinIndex(int tau);
    static CoinIndex from_slot(int slot);

    int tau() const { return tau_; }
    int axis() const { return (tau_ > 0 ? tau_ : -tau_) - 1; }
    int sign() const { return tau_ > 0 ? 1 : -1; }
    int slot() const { return 2 * axis() + (tau_ > 0 ? 0 : 1); }

private:
    int tau_;
};

/// ||M^* M - 1||_F
double unitarity_defect(const Matrix& m);

/// A square matrix certified unitary within `tol()`.
class UnitaryMatrix {
public:
    /// Throws ValidationError if the defect exceeds tol.
    static UnitaryMatrix certify(Matrix m, double tol = kUnitaryTol);
    /// For matrices assembled from parameters: if the drift exceeds the
    /// certification tolerance the matrix is replaced by its polar factor
    /// and `reorthonormalized()` is set.
    static UnitaryMatrix from_parameters(Matrix m);

    const Matrix& matrix() const { return m_; }
    int dim() const { return static_cast<int>(m_.rows()); }
    double tol() const { return tol_; }
    double drift() const { return drift_; }
    bool reorthonormalized() const { return reorthonormalized_; }

private:
    UnitaryMatrix(Matrix m, double tol, double drift, bool reorth)
        : m_(std::move(m)), tol_(tol), drift_(drift), reorthonormalized_(reorth) {}

    Matrix m_;
    double tol_;
    double drift_;
    bool reorthonormalized_;
};

/// Site-indexed family of unitary blocks C(j), one per site of the truncation.
class CoinField {
public:
    CoinField(LatticeShape shape, std::vector<UnitaryMatrix> blocks);
    static CoinField homogeneous(const LatticeShape& shape, const UnitaryMatrix& coin);
    /// Throws ConfigurationError naming the first site without a block.
    static CoinField from_sites(const LatticeShape& shape,
                                const std::map<std::vector<int>, UnitaryMatrix>& blocks);

    const LatticeShape& shape() const { return shape_; }
    const UnitaryMatrix& at(long site) const { return blocks_.at(site); }
    void set(long site, UnitaryMatrix block);

private:
    LatticeShape shape_;
    std::vector<UnitaryMatrix> blocks_;
};

/// Amplitudes on C^{coin_dim} (x) l^2((Z/LZ)^d).
class StateVector {
public:
    StateVector(LatticeShape shape, Vector amplitudes);
    static StateVector basis(const LatticeShape& shape, int coin_slot, long site);

    const LatticeShape& shape() const { return shape_; }
    const Vector& amplitudes() const { return amps_; }
    double norm() const { return amps_.norm(); }
    cplx amplitude(int coin_slot, long site) const { return amps_[shape_.index(coin_slot, site)]; }

private:
    LatticeShape shape_;
    Vector amps_;
};

/// Immutable sparse operator on a truncated lattice space. The bandwidth is
/// the largest torus distance between sites coupled by a stored entry.
class NetworkOperator {
public:
    NetworkOperator(LatticeShape shape, SparseMatrix matrix);
    static NetworkOperator identity(const LatticeShape& shape);
    static NetworkOperator from_dense(const LatticeShape& shape, const Matrix& dense, double drop = 0.0);

    const LatticeShape& shape() const { return shape_; }
    const SparseMatrix& matrix() const { return m_; }
    int bandwidth() const { return bandwidth_; }
    long nonzeros() const { return m_.nonZeros(); }

    Matrix dense() const;
    NetworkOperator adjoint() const;
    NetworkOperator scaled(cplx factor) const;
    /// ||U^* U - 1||_F
    double unitarity_defect() const;

    /// Coordinate list: a '#' metadata line, a header, then one
    /// `row,col,re,im` line per stored entry in row-major order.
    void write_csv(std::ostream& out) const;

private:
    LatticeShape shape_;
    SparseMatrix m_;
    int bandwidth_ = 0;
};

NetworkOperator build_shift(const LatticeShape& shape);
NetworkOperator build_coin_operator(const CoinField& field);
/// a * b
NetworkOperator compose(const NetworkOperator& a, const NetworkOperator& b);
NetworkOperator add(const NetworkOperator& a, const NetworkOperator& b);
StateVector apply(const NetworkOperator& op, const StateVector& v);

/// Largest torus distance between sites coupled by op^n. Requires
/// 1 <= n < L/2.
int check_locality(const NetworkOperator& op, int n);

} // namespace unet
