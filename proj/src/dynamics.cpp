#include "unet/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "unet/linalg.hpp"

namespace unet {

Diagonalization diagonalize(const NetworkOperator& u)
{
    const long n = u.shape().dimension();
    if (n > kDenseDiagonalizeLimit)
        throw ValidationError("dimension", "dimension " + std::to_string(n) + " exceeds the dense limit " +
                                               std::to_string(kDenseDiagonalizeLimit) +
                                               "; use the symbol grid (bands) for homogeneous models");
    const Matrix dense = u.dense();
    UnitaryEigen eig = unitary_eigen(dense);
    Diagonalization out;
    out.residual = (dense - eig.vectors * eig.eigenvalues.asDiagonal() * eig.vectors.adjoint()).norm();
    if (out.residual > 1e-10)
        throw NumericalError("diagonalization residual " + std::to_string(out.residual) + " exceeds 1e-10");
    out.phases = std::move(eig.phases);
    out.vectors = std::move(eig.vectors);
    return out;
}

namespace {

void record(Trajectory& tr, const Vector& psi, const std::vector<std::vector<int>>& pos)
{
    const LatticeShape& sh = tr.shape;
    const long S = sh.sites();
    std::vector<double> marg(S, 0.0);
    for (int t = 0; t < sh.coin_dim; ++t)
        for (long s = 0; s < S; ++s)
            marg[s] += std::norm(psi[sh.index(t, s)]);
    std::vector<double> mean(sh.d, 0.0);
    double x2 = 0.0, nrm = 0.0;
    for (long s = 0; s < S; ++s) {
        nrm += marg[s];
        for (int a = 0; a < sh.d; ++a) {
            mean[a] += marg[s] * pos[s][a];
            x2 += marg[s] * pos[s][a] * pos[s][a];
        }
    }
    tr.marginals.push_back(std::move(marg));
    tr.mean.push_back(std::move(mean));
    tr.second_moment.push_back(x2);
    tr.norm.push_back(std::sqrt(nrm));
}

} // namespace

Trajectory evolve(const NetworkOperator& u, const StateVector& psi0, int steps)
{
    const LatticeShape& sh = u.shape();
    if (!(psi0.shape() == sh))
        throw ValidationError("psi0", "state and operator live on different truncations");
    if (steps < 0)
        throw ValidationError("T", "negative number of steps");
    if (static_cast<long>(steps) * u.bandwidth() > sh.L / 2 - 2)
        throw ValidationError("T", "T = " + std::to_string(steps) + " with bandwidth " +
                                       std::to_string(u.bandwidth()) + " wraps around the torus of side " +
                                       std::to_string(sh.L) + " (need T * bandwidth <= L/2 - 2)");
    Trajectory tr;
    tr.shape = sh;
    tr.steps = steps;
    const Vector& a0 = psi0.amplitudes();
    std::vector<double> m0(sh.sites(), 0.0);
    for (int t = 0; t < sh.coin_dim; ++t)
        for (long s = 0; s < sh.sites(); ++s)
            m0[s] += std::norm(a0[sh.index(t, s)]);
    tr.center = std::max_element(m0.begin(), m0.end()) - m0.begin();

    const auto c = sh.site_coords(tr.center);
    std::vector<std::vector<int>> pos(sh.sites());
    for (long s = 0; s < sh.sites(); ++s) {
        pos[s] = sh.site_coords(s);
        for (int a = 0; a < sh.d; ++a)
            pos[s][a] = sh.min_image(pos[s][a] - c[a]);
    }

    Vector psi = a0;
    record(tr, psi, pos);
    for (int t = 1; t <= steps; ++t) {
        psi = u.matrix() * psi;
        record(tr, psi, pos);
    }
    return tr;
}

double spreading_exponent(const Trajectory& traj, int burn_in)
{
    std::vector<double> lx, ly;
    bool any = false;
    for (int t = std::max(1, burn_in); t <= traj.steps; ++t) {
        const double x2 = traj.second_moment[t];
        any = any || x2 > 0.0;
        if (x2 > 0.0) {
            lx.push_back(std::log(static_cast<double>(t)));
            ly.push_back(std::log(x2));
        }
    }
    if (!any)
        throw NumericalError("degenerate trajectory: <X^2> vanishes at every step");
    if (lx.size() < 50)
        throw NumericalError("spreading fit needs 50 steps with <X^2> > 0 after burn-in, got " +
                             std::to_string(lx.size()));
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    return sxy / sxx;
}

SpectralDensity spectral_measure_estimate(const NetworkOperator& u, const StateVector& psi, int n_max, int points)
{
    const LatticeShape& sh = u.shape();
    if (!(psi.shape() == sh))
        throw ValidationError("psi", "state and operator live on different truncations");
    if (n_max < 0 || points < 2 * n_max + 2)
        throw ValidationError("points", "need points >= 2 n_max + 2");
    if (static_cast<long>(n_max) * u.bandwidth() >= sh.L / 2)
        throw ValidationError("n_max", "n_max = " + std::to_string(n_max) + " with bandwidth " +
                                           std::to_string(u.bandwidth()) + " wraps around the torus of side " +
                                           std::to_string(sh.L));
    const double nrm = psi.norm();
    if (!(nrm > 0.0))
        throw ValidationError("psi", "zero vector");
    const Vector v = psi.amplitudes() / nrm;

    SpectralDensity out;
    Vector w = v;
    out.autocorrelation.push_back(v.squaredNorm());
    for (int n = 1; n <= n_max; ++n) {
        w = u.matrix() * w;
        out.autocorrelation.push_back(v.dot(w));
    }
    out.theta.resize(points);
    out.density.resize(points);
    for (int p = 0; p < points; ++p) {
        const double th = kTwoPi * p / points;
        double s = std::real(out.autocorrelation[0]);
        for (int n = 1; n <= n_max; ++n) {
            const double wgt = 1.0 - static_cast<double>(n) / (n_max + 1);
            s += 2.0 * wgt * std::real(out.autocorrelation[n] * std::polar(1.0, -n * th));
        }
        out.theta[p] = th;
        out.density[p] = s / kTwoPi;
    }
    out.mass = std::accumulate(out.density.begin(), out.density.end(), 0.0) * kTwoPi / points;
    return out;
}

double mass_inside(const SpectralDensity& rho, const ArcSet& set)
{
    const double h = kTwoPi / static_cast<double>(rho.theta.size());
    double m = 0.0;
    for (std::size_t p = 0; p < rho.theta.size(); ++p)
        if (set.contains(rho.theta[p]))
            m += rho.density[p] * h;
    return m;
}

EigenStatistics arc_eigen_statistics(const Eigen::VectorXd& phases, const std::vector<Arc>& arcs)
{
    const double slack = 1e-9;
    EigenStatistics out;
    out.total = phases.size();
    std::vector<std::vector<double>> members(arcs.size());
    for (long i = 0; i < phases.size(); ++i) {
        bool placed = false;
        for (std::size_t a = 0; a < arcs.size() && !placed; ++a) {
            const double off = wrap_phase(phases[i] - arcs[a].lo);
            if (off <= arcs[a].len + slack || off >= kTwoPi - slack) {
                // unwrapped offset along the arc
                members[a].push_back(off >= kTwoPi - slack ? off - kTwoPi : off);
                placed = true;
            }
        }
        if (!placed)
            ++out.unassigned;
    }
    for (std::size_t a = 0; a < arcs.size(); ++a) {
        ArcStatistics st;
        st.arc = arcs[a];
        auto& m = members[a];
        st.count = static_cast<long>(m.size());
        std::sort(m.begin(), m.end());
        if (m.size() >= 2) {
            st.min_gap = std::numeric_limits<double>::infinity();
            for (std::size_t i = 1; i < m.size(); ++i) {
                const double g = m[i] - m[i - 1];
                st.min_gap = std::min(st.min_gap, g);
                st.max_gap = std::max(st.max_gap, g);
            }
            st.mean_gap = (m.back() - m.front()) / static_cast<double>(m.size() - 1);
        }
        out.arcs.push_back(st);
    }
    return out;
}

EigenStatistics arc_eigen_statistics(const NetworkOperator& u, const std::vector<Arc>& arcs)
{
    return arc_eigen_statistics(diagonalize(u).phases, arcs);
}

} // namespace unet
