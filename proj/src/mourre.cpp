#include "unet/mourre.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "unet/linalg.hpp"

namespace unet {

namespace {

double site_radius(const LatticeShape& shape, long site)
{
    double r2 = 0.0;
    for (int c : shape.site_coords(site)) {
        const double m = shape.min_image(c);
        r2 += m * m;
    }
    return std::sqrt(r2);
}

// rotation exp(-i theta sigma_y) in coin slots 0, 1
Matrix slot_rotation(int coin_dim, double theta)
{
    Matrix r = Matrix::Identity(coin_dim, coin_dim);
    r(0, 0) = std::cos(theta);
    r(0, 1) = -std::sin(theta);
    r(1, 0) = std::sin(theta);
    r(1, 1) = std::cos(theta);
    return r;
}

} // namespace

// ---------------------------------------------------------------- perturbations

double PerturbationProfile::bound(double r) const
{
    switch (kind) {
    case Kind::Compact:
        return r <= radius ? c : 0.0;
    case Kind::PowerLaw:
        return c * std::pow(1.0 + r, -1.0 - eps);
    case Kind::Custom:
        if (!custom)
            throw ConfigurationError("custom perturbation profile without a function");
        return custom(r);
    }
    return 0.0;
}

CoinField perturbed_field(const LatticeShape& shape, const UnitaryMatrix& c_inf, const PerturbationProfile& profile)
{
    if (c_inf.dim() != shape.coin_dim)
        throw ValidationError("coin", "coin dimension does not match the lattice");
    if (shape.coin_dim < 2)
        throw ValidationError("coin", "perturbations need coin dimension >= 2");
    if (profile.c < 0.0)
        throw ValidationError("perturbation.c", "negative amplitude");
    std::vector<UnitaryMatrix> blocks;
    blocks.reserve(shape.sites());
    for (long s = 0; s < shape.sites(); ++s) {
        const double b = profile.bound(site_radius(shape, s));
        if (!(b >= 0.0) || b > 2.0)
            throw ValidationError("perturbation", "deviation bound outside [0, 2] at site " + std::to_string(s));
        const double theta = 2.0 * std::asin(0.5 * b);
        blocks.push_back(UnitaryMatrix::from_parameters(c_inf.matrix() * slot_rotation(shape.coin_dim, theta)));
    }
    return CoinField(shape, std::move(blocks));
}

std::vector<double> perturbation_deviation(const CoinField& field, const UnitaryMatrix& c_inf)
{
    const LatticeShape& shape = field.shape();
    const int n = shape.coin_dim;
    std::vector<double> dev(shape.sites());
    for (long s = 0; s < shape.sites(); ++s) {
        const Matrix f = c_inf.matrix().adjoint() * field.at(s).matrix() - Matrix::Identity(n, n);
        dev[s] = spectral_norm(f);
    }
    return dev;
}

RegularityEstimate regularity_integral(const LatticeShape& shape, const std::vector<double>& deviation, double a,
                                       double b, double r_max)
{
    if (!(a > 0.0) || !(b > a))
        throw ValidationError("a,b", "need 0 < a < b");
    if (!(r_max > 1.0))
        throw ValidationError("r_max", "need r_max > 1");
    if (static_cast<long>(deviation.size()) != shape.sites())
        throw ValidationError("deviation", "one value per site required");

    RegularityEstimate out;
    // per-site radii, sorted, for annulus maxima
    std::vector<std::pair<double, double>> rv(shape.sites());
    for (long s = 0; s < shape.sites(); ++s)
        rv[s] = {site_radius(shape, s), deviation[s]};
    std::sort(rv.begin(), rv.end());

    const int per_octave = 8;
    const int n = std::max(2, static_cast<int>(std::ceil(per_octave * std::log2(r_max))) + 1);
    for (int i = 0; i < n; ++i) {
        const double r = std::pow(r_max, static_cast<double>(i) / (n - 1));
        auto lo = std::lower_bound(rv.begin(), rv.end(), std::make_pair(a * r, -1.0));
        double sup = 0.0;
        for (auto it = lo; it != rv.end() && it->first <= b * r; ++it)
            sup = std::max(sup, it->second);
        out.r.push_back(r);
        out.integrand.push_back(sup);
    }
    for (int i = 1; i < n; ++i)
        out.integral += 0.5 * (out.integrand[i] + out.integrand[i - 1]) * (out.r[i] - out.r[i - 1]);

    // tail exponent on the upper half of the log range
    std::vector<double> lx, ly;
    for (int i = (n - 1) / 2; i < n; ++i)
        if (out.integrand[i] > 0.0) {
            lx.push_back(std::log(out.r[i]));
            ly.push_back(std::log(out.integrand[i]));
        }
    const bool vanishes = out.integrand.back() == 0.0;
    if (vanishes || lx.size() < 2) {
        out.exponent = std::numeric_limits<double>::quiet_NaN();
    } else {
        const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
        const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sxy += (lx[i] - mx) * (ly[i] - my);
            sxx += (lx[i] - mx) * (lx[i] - mx);
        }
        out.exponent = sxy / sxx;
    }

    const double reach = 0.5 * shape.L;
    if (b * r_max > reach) {
        out.verdict = "inconclusive";
        out.explanation = "field known only up to radius " + std::to_string(reach) + " < b r_max = " +
                          std::to_string(b * r_max);
    } else if (vanishes) {
        out.verdict = "regular";
        out.explanation = "integrand vanishes at the end of the range";
    } else if (out.exponent < -1.1) {
        out.verdict = "regular";
        out.explanation = "tail exponent " + std::to_string(out.exponent) + " is integrable";
    } else {
        out.verdict = "inconclusive";
        out.explanation = "tail exponent " + std::to_string(out.exponent) + " is not below -1.1";
    }
    return out;
}

// ---------------------------------------------------------------- conjugate operator

namespace {

// smooth step, 0 for t <= 0, 1 for t >= 1
double smooth_step(double t)
{
    if (t <= 0.0)
        return 0.0;
    if (t >= 1.0)
        return 1.0;
    const double a = std::exp(-1.0 / t);
    const double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

// cutoff value along one axis of a box at grid coordinate m
double box_profile(const GridBox& box, int axis, int m, int N)
{
    const int len = box.len[axis];
    if (len >= N - 1)
        return 1.0;
    const int u = ((m - box.lo[axis]) % N + N) % N;
    if (u > len)
        return 0.0;
    const int cs = ((box.core_lo[axis] - box.lo[axis]) % N + N) % N;
    const int ce = cs + box.core_len[axis];
    if (u >= cs && u <= ce)
        return 1.0;
    // transition over the cs cells outside the core, endpoints excluded
    if (u < cs)
        return smooth_step(static_cast<double>(u) / cs);
    return smooth_step(static_cast<double>(len - u) / (len - ce));
}

Eigen::VectorXd fn_diag(const LatticeShape& shape, const std::vector<double>& site_values)
{
    Eigen::VectorXd v(shape.dimension());
    for (int t = 0; t < shape.coin_dim; ++t)
        for (long s = 0; s < shape.sites(); ++s)
            v[shape.index(t, s)] = site_values[s];
    return v;
}

Matrix band_projector(const BandStructure& bs, long p, int k)
{
    const auto v = bs.vectors[p].col(k);
    return v * v.adjoint();
}

// multipliers eta_j pi_k and eta_j f_{k,axis} pi_k
Matrix term_g(const ConjugateOperator& a, int j, int k)
{
    const long np = a.bands.points();
    std::vector<Matrix> vals(np);
    for (long p = 0; p < np; ++p)
        vals[p] = a.cutoff[j][p] * band_projector(a.bands, p, k);
    return fourier_multiplier(a.shape, vals);
}

Matrix term_h(const ConjugateOperator& a, int j, int k, int axis)
{
    const long np = a.bands.points();
    const int d = a.shape.d;
    const int dp = a.shape.coin_dim;
    std::vector<Matrix> vals(np);
    for (long p = 0; p < np; ++p)
        vals[p] = (a.cutoff[j][p] * a.f[(p * dp + k) * d + axis]) * band_projector(a.bands, p, k);
    return fourier_multiplier(a.shape, vals);
}

bool negligible(const Matrix& m, double scale) { return m.norm() <= 1e-14 * std::max(1.0, scale); }

} // namespace

Eigen::VectorXd position_operator(const LatticeShape& shape, int axis)
{
    if (axis < 0 || axis >= shape.d)
        throw ValidationError("axis", "axis out of range");
    std::vector<double> pos(shape.sites());
    for (long s = 0; s < shape.sites(); ++s)
        pos[s] = shape.min_image(shape.site_coords(s)[axis]);
    return fn_diag(shape, pos);
}

Matrix fourier_multiplier(const LatticeShape& shape, const std::vector<Matrix>& values)
{
    const long S = shape.sites();
    const int dp = shape.coin_dim;
    const int L = shape.L;
    if (static_cast<long>(values.size()) != S)
        throw ValidationError("values", "one block per grid point required");

    std::vector<cplx> root(L);
    for (int q = 0; q < L; ++q)
        root[q] = std::polar(1.0, -kTwoPi * q / L);
    std::vector<std::vector<int>> coords(S);
    for (long s = 0; s < S; ++s)
        coords[s] = shape.site_coords(s);

    // kernel g(n) = L^{-d} sum_m e^{-i x_m . n} G(x_m)
    std::vector<Matrix> g(S, Matrix::Zero(dp, dp));
    parallel_for(S, [&](long n) {
        Matrix acc = Matrix::Zero(dp, dp);
        for (long m = 0; m < S; ++m) {
            long q = 0;
            for (int ax = 0; ax < shape.d; ++ax)
                q += static_cast<long>(coords[m][ax]) * coords[n][ax];
            acc += root[q % L] * values[m];
        }
        g[n] = acc / static_cast<double>(S);
    });

    Matrix out(shape.dimension(), shape.dimension());
    std::vector<int> diff(shape.d);
    for (long a = 0; a < S; ++a)
        for (long b = 0; b < S; ++b) {
            for (int ax = 0; ax < shape.d; ++ax)
                diff[ax] = coords[a][ax] - coords[b][ax];
            const Matrix& k = g[shape.site_index(diff)];
            for (int t1 = 0; t1 < dp; ++t1)
                for (int t2 = 0; t2 < dp; ++t2)
                    out(shape.index(t1, a), shape.index(t2, b)) = k(t1, t2);
        }
    return out;
}

ConjugateOperator build_conjugate(const Symbol& sym, const ArcSet& delta, const LatticeShape& shape)
{
    if (sym.d() != shape.d || sym.dprime() != shape.coin_dim)
        throw ValidationError("shape", "lattice does not match the symbol dimensions");
    if (shape.d > 2)
        throw ValidationError("shape.d", "dense assembly supports d <= 2");
    if (shape.dimension() > 4096)
        throw ValidationError("shape", "dimension " + std::to_string(shape.dimension()) +
                                           " exceeds the dense assembly limit 4096");
    ConjugateOperator out;
    out.shape = shape;
    out.delta = delta;
    out.bands = band_structure(sym, shape.L);
    out.certificate = is_m_good(delta, out.bands);
    const MGoodCertificate& cert = out.certificate;
    if (!cert.pass) {
        std::string msg = "delta is not M-good: " + cert.reason;
        for (double t : cert.offending)
            msg += " " + std::to_string(t);
        throw NumericalError(msg);
    }

    const int N = shape.L;
    const int d = shape.d;
    const int dp = shape.coin_dim;
    const long np = out.bands.points();
    for (const GridBox& box : cert.boxes) {
        int cells = std::numeric_limits<int>::max();
        for (int ax = 0; ax < d; ++ax)
            if (box.len[ax] < N - 1)
                cells = std::min(cells, ((box.core_lo[ax] - box.lo[ax]) % N + N) % N);
        if (cells == std::numeric_limits<int>::max())
            cells = N;
        if (cells < 2) {
            // clearance scales with N; need 2 transition cells beyond the 2-cell margin
            long n_min = static_cast<long>(std::ceil(4.0 * N / (cells + 2)));
            n_min += n_min % 2;
            throw NumericalError("grid too coarse for the cutoffs: " + std::to_string(cells) +
                                 " transition cells at N = " + std::to_string(N) + "; need N >= " +
                                 std::to_string(n_min));
        }
        out.transition_cells.push_back(cells);
    }

    out.cutoff.assign(cert.boxes.size(), std::vector<double>(np, 0.0));
    for (std::size_t j = 0; j < cert.boxes.size(); ++j)
        for (long p = 0; p < np; ++p) {
            const auto m = out.bands.coords(p);
            double v = 1.0;
            for (int ax = 0; ax < d && v > 0.0; ++ax)
                v *= box_profile(cert.boxes[j], ax, m[ax], N);
            out.cutoff[j][p] = v;
        }

    // f_k = grad theta_k = Im(conj(lambda) v^* dM v)
    const double step = 1e-5;
    out.f.assign(np * dp * d, 0.0);
    parallel_for(np, [&](long p) {
        const auto x = out.bands.x(p);
        const Matrix& v = out.bands.vectors[p];
        for (int ax = 0; ax < d; ++ax) {
            auto xp = x, xm = x;
            xp[ax] += step;
            xm[ax] -= step;
            const Matrix dm = (sym(xp) - sym(xm)) / (2 * step);
            for (int k = 0; k < dp; ++k) {
                const cplx lam = std::polar(1.0, out.bands.phase(p, k));
                const cplx dl = v.col(k).dot(dm * v.col(k));
                out.f[(p * dp + k) * d + ax] = std::imag(std::conj(lam) * dl);
            }
        }
    });

    // c_delta from the same gradients as the operator
    double c = std::numeric_limits<double>::infinity();
    for (long p = 0; p < np; ++p)
        for (int k = 0; k < dp; ++k)
            if (delta.contains(out.bands.phase(p, k))) {
                double g2 = 0.0;
                for (int ax = 0; ax < d; ++ax)
                    g2 += std::pow(out.f[(p * dp + k) * d + ax], 2);
                c = std::min(c, g2);
            }
    out.certificate.c_delta = c;

    const long n = shape.dimension();
    Matrix raw = Matrix::Zero(n, n);
    for (int ax = 0; ax < d; ++ax) {
        const Eigen::VectorXd J = position_operator(shape, ax);
        for (std::size_t j = 0; j < cert.boxes.size(); ++j)
            for (int k = 0; k < dp; ++k) {
                const Matrix G = term_g(out, static_cast<int>(j), k);
                const Matrix H = term_h(out, static_cast<int>(j), k, ax);
                raw.noalias() += H * (J.asDiagonal() * G);
                raw.noalias() += G * (J.asDiagonal() * H);
            }
    }
    raw *= 0.5;
    out.symmetry_defect = (raw - raw.adjoint()).norm();
    out.a = 0.5 * (raw + raw.adjoint());
    return out;
}

Matrix mourre_commutator(const NetworkOperator& u, const ConjugateOperator& a)
{
    const LatticeShape& shape = a.shape;
    if (!(u.shape() == shape))
        throw ValidationError("U", "operator and conjugate operator live on different truncations");
    const SparseMatrix& U = u.matrix();
    const long n = shape.dimension();
    const int d = shape.d;
    const int dp = shape.coin_dim;
    std::vector<std::vector<int>> coords(shape.sites());
    for (long s = 0; s < shape.sites(); ++s)
        coords[s] = shape.site_coords(s);

    Matrix comm = Matrix::Zero(n, n); // [A, U]
    for (int ax = 0; ax < d; ++ax) {
        const Eigen::VectorXd J = position_operator(shape, ax);
        // [J, U] with the displacement taken in minimal image
        SparseMatrix K = U;
        for (long r = 0; r < K.outerSize(); ++r)
            for (SparseMatrix::InnerIterator it(K, r); it; ++it) {
                const long sr = it.row() % shape.sites();
                const long sc = it.col() % shape.sites();
                it.valueRef() *= static_cast<double>(shape.min_image(coords[sr][ax] - coords[sc][ax]));
            }
        for (std::size_t j = 0; j < a.cutoff.size(); ++j)
            for (int k = 0; k < dp; ++k) {
                const Matrix G = term_g(a, static_cast<int>(j), k);
                const Matrix H = term_h(a, static_cast<int>(j), k, ax);
                // [HJG, U] + [GJH, U]
                comm.noalias() += H * Matrix(K * G);
                comm.noalias() += G * Matrix(K * H);
                const Matrix gu = G * U - U * G;
                const Matrix hu = H * U - U * H;
                if (!negligible(gu, G.norm())) {
                    comm.noalias() += H * (J.asDiagonal() * gu);
                    comm.noalias() += gu * (J.asDiagonal() * H);
                }
                if (!negligible(hu, H.norm())) {
                    comm.noalias() += hu * (J.asDiagonal() * G);
                    comm.noalias() += G * (J.asDiagonal() * hu);
                }
            }
    }
    comm *= 0.5;
    Matrix b = U.adjoint() * comm;
    return 0.5 * (b + b.adjoint());
}

double offdiagonal_tail(const Matrix& m, const LatticeShape& shape, int distance)
{
    if (m.rows() != shape.dimension() || m.cols() != shape.dimension())
        throw ValidationError("matrix", "size does not match the lattice");
    const long S = shape.sites();
    std::vector<char> far(S * S);
    for (long a = 0; a < S; ++a)
        for (long b = 0; b < S; ++b)
            far[a * S + b] = shape.torus_distance(a, b) > distance;
    double sum = 0.0;
    for (long c = 0; c < m.cols(); ++c)
        for (long r = 0; r < m.rows(); ++r)
            if (far[(r % S) * S + (c % S)])
                sum += std::norm(m(r, c));
    return std::sqrt(sum);
}

MourreResult mourre_check(const NetworkOperator& u, const ConjugateOperator& a, const ArcSet& delta)
{
    const LatticeShape& shape = a.shape;
    const Matrix B = mourre_commutator(u, a);
    const UnitaryEigen eig = unitary_eigen(u.dense());
    std::vector<long> idx;
    for (long i = 0; i < eig.phases.size(); ++i)
        if (delta.contains(eig.phases[i]))
            idx.push_back(i);
    if (idx.empty())
        throw NumericalError("no spectrum in delta at this truncation");
    Matrix Q(shape.dimension(), static_cast<long>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c)
        Q.col(static_cast<long>(c)) = eig.vectors.col(idx[c]);

    MourreResult out;
    out.window_dim = static_cast<long>(idx.size());
    out.c_delta = a.certificate.c_delta;
    out.spectrum = hermitian_eigenvalues(Q.adjoint() * B * Q);
    out.lambda_min = out.spectrum[0];

    // (1 - T) E_Delta with T = sum_j eta_j^2
    const long np = a.bands.points();
    const int dp = shape.coin_dim;
    std::vector<Matrix> one_minus_t(np);
    for (long p = 0; p < np; ++p) {
        double t = 0.0;
        for (const auto& eta : a.cutoff)
            t += eta[p] * eta[p];
        one_minus_t[p] = (1.0 - t) * Matrix::Identity(dp, dp);
    }
    const Matrix rq = fourier_multiplier(shape, one_minus_t) * Q;
    const Eigen::VectorXd bspec = hermitian_eigenvalues(B);
    const double b_norm = std::max(std::abs(bspec[0]), std::abs(bspec[bspec.size() - 1]));
    out.tail = 2.0 * spectral_norm(rq) * b_norm;

    // variation of |grad theta|^2 between neighbouring preimage points
    const int d = shape.d;
    auto g2 = [&](long p, int k) {
        double s = 0.0;
        for (int ax = 0; ax < d; ++ax)
            s += std::pow(a.f[(p * dp + k) * d + ax], 2);
        return s;
    };
    for (long p = 0; p < np; ++p)
        for (int k = 0; k < dp; ++k) {
            if (!delta.contains(a.bands.phase(p, k)))
                continue;
            const auto m = a.bands.coords(p);
            for (int ax = 0; ax < d; ++ax) {
                auto mq = m;
                mq[ax] += 1;
                const long q = a.bands.point_index(mq);
                if (delta.contains(a.bands.phase(q, k)))
                    out.resolution = std::max(out.resolution, std::abs(g2(p, k) - g2(q, k)));
            }
        }
    out.margin = out.tail + 10.0 * out.resolution;
    out.pass = out.lambda_min >= out.c_delta - out.margin;
    return out;
}

// ---------------------------------------------------------------- eigenvalue stability

StabilityReport eigenvalue_stability(const std::function<NetworkOperator(int)>& build, const Symbol& sym,
                                     const ArcSet& delta, const ArcSet& delta_prime, const std::vector<int>& Ls)
{
    if (Ls.empty())
        throw ValidationError("L", "empty list of sizes");
    const int n_cert = *std::max_element(Ls.begin(), Ls.end());
    const BandStructure ref = band_structure(sym, n_cert);
    const MGoodCertificate cert = is_m_good(delta, ref);
    if (!cert.pass)
        throw NumericalError("delta is not M-good: " + cert.reason);
    if (!delta.covers(delta_prime))
        throw NumericalError("delta_prime is not contained in delta");
    for (double t : ref.tau_m)
        if (delta_prime.distance(t) <= 2 * ref.step())
            throw NumericalError("delta_prime comes within 2 grid steps of tau_M at " + std::to_string(t));

    StabilityReport out;
    out.L = Ls;
    out.counts.assign(Ls.size(), 0);
    out.isolated.assign(Ls.size(), {});
    parallel_for(static_cast<long>(Ls.size()), [&](long i) {
        const int L = Ls[i];
        const Eigen::VectorXd phases = unitary_phases(build(L).dense());
        std::vector<double> grid = band_structure(sym, L).phases;
        std::sort(grid.begin(), grid.end());
        const long ng = static_cast<long>(grid.size());
        auto grid_at = [&](long q) { // periodic extension
            const long w = ((q % ng) + ng) % ng;
            return grid[w] + kTwoPi * static_cast<double>((q - w) / ng);
        };
        for (long e = 0; e < phases.size(); ++e) {
            const double ph = phases[e];
            if (!delta_prime.contains(ph))
                continue;
            const long pos = std::lower_bound(grid.begin(), grid.end(), ph) - grid.begin();
            const double dist = std::min(ph - grid_at(pos - 1), grid_at(pos) - ph);
            // mean gap among the 10 nearest grid phases
            long lo = pos - 1, hi = pos;
            while (hi - lo - 1 < 10) {
                if (ph - grid_at(lo) <= grid_at(hi) - ph)
                    --lo;
                else
                    ++hi;
            }
            const double spacing = (grid_at(hi - 1) - grid_at(lo + 1)) / 9.0;
            if (dist > 3.0 * spacing)
                out.isolated[i].push_back(ph);
        }
        out.counts[i] = static_cast<long>(out.isolated[i].size());
    });
    out.stable = std::all_of(out.counts.begin(), out.counts.end(), [&](long c) { return c == out.counts[0]; });
    return out;
}

} // namespace unet
