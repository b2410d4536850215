#pragma once

#include <functional>
#include <string>
#include <vector>

#include "unet/arcs.hpp"
#include "unet/lattice.hpp"

namespace unet {

/// Map T^d -> U(d') given by an exact formula.
class Symbol {
public:
    using Sampler = std::function<Matrix(const std::vector<double>&)>;

    Symbol(int d, int dprime, Sampler sampler, std::string name);

    int d() const { return d_; }
    int dprime() const { return dprime_; }
    const std::string& name() const { return name_; }
    Matrix operator()(const std::vector<double>& x) const;

private:
    int d_;
    int dprime_;
    Sampler sampler_;
    std::string name_;
};

/// diag(e^{i x_1}, e^{-i x_1}, ..., e^{i x_d}, e^{-i x_d}) C_inf.
Symbol symbol_qw(const UnitaryMatrix& c_inf, int d);
/// The 4x4 Chalker-Coddington symbol in its printed basis order
/// (+1, +2, -1, -2).
Symbol symbol_cc(double phi);
/// The same symbol in the walk's slot order (+1, -1, +2, -2).
Symbol symbol_cc_walk(double phi);
/// Permutation P with P * (walk-order vector) = printed-order vector.
Matrix cc_printed_order();
/// Symbol of a translation-invariant operator,
/// M(x)_{t't} = sum_n <t', n| U |t, 0> e^{i n.x}.
Symbol symbol_of_operator(const NetworkOperator& u);

struct BandOptions {
    double gap_tol = 1e-6;
    double grad_tol = 1e-4;
};

struct Crossing {
    long point;
    int band_a;
    int band_b;
    double phase;
};

struct Critical {
    long point;
    int band;
    double phase;
};

/// Eigen-data of a symbol on the regular grid x = 2pi m / N, m in (Z/NZ)^d,
/// points enumerated lexicographically (m_1 most significant).
struct BandStructure {
    int d = 1;
    int dprime = 1;
    int N = 0;
    /// phases[p * dprime + k], continuity-tracked labels k.
    std::vector<double> phases;
    /// grad[(p * dprime + k) * d + axis]
    std::vector<double> grad;
    /// Orthonormal eigenvectors, column k matching phases[p * dprime + k].
    std::vector<Matrix> vectors;
    std::vector<Crossing> crossings;
    std::vector<Critical> criticals;
    /// Clustered phases of crossings and critical points.
    std::vector<double> tau_m;
    ArcSet bands;
    /// Largest |grad theta| over the grid.
    double max_grad = 0.0;

    double step() const;
    long points() const;
    std::vector<int> coords(long p) const;
    long point_index(const std::vector<int>& m) const;
    std::vector<double> x(long p) const;
    double phase(long p, int k) const { return phases[p * dprime + k]; }
    double grad_norm2(long p, int k) const;
};

BandStructure band_structure(const Symbol& sym, int N, const BandOptions& opts = {});

/// Union of arcs through all sampled phases: neighbours closer than
/// 2 h max|grad| are joined and every arc is padded by h max|grad| / 2.
ArcSet essential_spectrum(const BandStructure& bs);

/// Axis-aligned box of grid cells [lo_a, lo_a + len_a] per axis (indices mod N).
struct GridBox {
    std::vector<int> lo;
    std::vector<int> len;
    /// Cells of the certified preimage component inside the box.
    std::vector<int> core_lo;
    std::vector<int> core_len;
};

struct MGoodCertificate {
    bool pass = false;
    double c_delta = 0.0;
    std::vector<GridBox> boxes;
    /// Failure reason, empty on pass.
    std::string reason;
    /// tau_M points (phases) responsible for a failure.
    std::vector<double> offending;
};

/// Checks the M-good conditions for the open set `delta` on the grid of `bs`.
MGoodCertificate is_m_good(const ArcSet& delta, const BandStructure& bs);

struct ClosedForm {
    ArcSet bands;
    std::vector<double> tau_m;
};

/// Bands and tau_M of the homogeneous 1-d walk with coin parameters
/// (alpha, eta).
ClosedForm qw1d_closed_form(cplx alpha, double eta);
/// |grad lambda|^2 of that walk at momentum x.
double qw1d_grad_squared(cplx alpha, double x);
/// Chalker-Coddington bands: four arcs of half-width min(phi, pi/2 - phi)
/// centred at 0, pi/2, pi, 3pi/2, with their edges and centres as tau_M.
ClosedForm cc_closed_form(double phi);
/// Angle doubling of qw1d_closed_form.
ClosedForm bb_closed_form_via_square(cplx alpha, double eta);

/// Sorted phases, merging points closer than tol on the circle.
std::vector<double> cluster_phases(std::vector<double> phases, double tol);

} // namespace unet
