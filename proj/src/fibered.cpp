#include "unet/fibered.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "unet/linalg.hpp"

namespace unet {

namespace {

const cplx I1(0.0, 1.0);

/// Signed phase difference a - b in (-pi, pi].
double phase_diff(double a, double b)
{
    double d = wrap_phase(a - b);
    return d > kPi ? d - kTwoPi : d;
}

} // namespace

// ---------------------------------------------------------------- symbols

Symbol::Symbol(int d, int dprime, Sampler sampler, std::string name)
    : d_(d), dprime_(dprime), sampler_(std::move(sampler)), name_(std::move(name))
{
    if (d < 1 || dprime < 1)
        throw ConfigurationError("symbol dimensions must be positive");
}

Matrix Symbol::operator()(const std::vector<double>& x) const
{
    if (static_cast<int>(x.size()) != d_)
        throw ConfigurationError("symbol evaluated at a point of the wrong dimension");
    return sampler_(x);
}

Symbol symbol_qw(const UnitaryMatrix& c_inf, int d)
{
    if (c_inf.dim() != 2 * d)
        throw ConfigurationError("walk symbol needs a " + std::to_string(2 * d) + "x" + std::to_string(2 * d) +
                                 " coin, got dimension " + std::to_string(c_inf.dim()));
    const Matrix c = c_inf.matrix();
    return Symbol(
        d, 2 * d,
        [c, d](const std::vector<double>& x) {
            Vector diag(2 * d);
            for (int k = 0; k < d; ++k) {
                diag[2 * k] = std::exp(I1 * x[k]);
                diag[2 * k + 1] = std::exp(-I1 * x[k]);
            }
            return Matrix(diag.asDiagonal() * c);
        },
        "qw");
}

Symbol symbol_cc(double phi)
{
    if (phi < -kParameterTol || phi > kPi / 2 + kParameterTol)
        throw ValidationError("phi", "phi outside [0, pi/2]");
    const double c = std::cos(phi);
    const cplx s = I1 * std::sin(phi);
    return Symbol(
        2, 4,
        [c, s](const std::vector<double>& x) {
            Matrix m = Matrix::Zero(4, 4);
            m(0, 1) = s * std::exp(I1 * x[1]);
            m(0, 3) = c;
            m(1, 0) = c;
            m(1, 2) = s * std::exp(-I1 * x[0]);
            m(2, 1) = c;
            m(2, 3) = s * std::exp(-I1 * x[1]);
            m(3, 0) = s * std::exp(I1 * x[0]);
            m(3, 2) = c;
            return m;
        },
        "cc");
}

Matrix cc_printed_order()
{
    Matrix p = Matrix::Zero(4, 4);
    p(0, 0) = 1.0; // +1
    p(1, 2) = 1.0; // +2
    p(2, 1) = 1.0; // -1
    p(3, 3) = 1.0; // -2
    return p;
}

Symbol symbol_cc_walk(double phi)
{
    const Symbol printed = symbol_cc(phi);
    const Matrix p = cc_printed_order();
    return Symbol(
        2, 4, [printed, p](const std::vector<double>& x) { return Matrix(p.transpose() * printed(x) * p); },
        "cc-walk");
}

Symbol symbol_of_operator(const NetworkOperator& u)
{
    const LatticeShape shape = u.shape();
    if (2 * u.bandwidth() >= shape.L)
        throw ConfigurationError("symbol_of_operator: bandwidth too large for the truncation");
    struct Term {
        int row;
        int col;
        std::vector<int> n;
        cplx value;
    };
    std::vector<Term> terms;
    const SparseMatrix& m = u.matrix();
    for (long r = 0; r < m.outerSize(); ++r)
        for (SparseMatrix::InnerIterator it(m, r); it; ++it) {
            const long c = it.col();
            if (c % shape.sites() != 0)
                continue; // only columns at site 0
            auto n = shape.site_coords(r % shape.sites());
            for (int& v : n)
                v = shape.min_image(v);
            terms.push_back(Term{static_cast<int>(r / shape.sites()), static_cast<int>(c / shape.sites()), n,
                                 it.value()});
        }
    const int dp = shape.coin_dim;
    return Symbol(
        shape.d, dp,
        [terms, dp](const std::vector<double>& x) {
            Matrix out = Matrix::Zero(dp, dp);
            for (const Term& t : terms) {
                double ph = 0.0;
                for (std::size_t a = 0; a < x.size(); ++a)
                    ph += t.n[a] * x[a];
                out(t.row, t.col) += t.value * std::exp(I1 * ph);
            }
            return out;
        },
        "operator");
}

// ---------------------------------------------------------------- band structure

double BandStructure::step() const
{
    return kTwoPi / N;
}

long BandStructure::points() const
{
    long p = 1;
    for (int a = 0; a < d; ++a)
        p *= N;
    return p;
}

std::vector<int> BandStructure::coords(long p) const
{
    std::vector<int> m(d);
    for (int a = d - 1; a >= 0; --a) {
        m[a] = static_cast<int>(p % N);
        p /= N;
    }
    return m;
}

long BandStructure::point_index(const std::vector<int>& m) const
{
    long p = 0;
    for (int a = 0; a < d; ++a)
        p = p * N + (((m[a] % N) + N) % N);
    return p;
}

std::vector<double> BandStructure::x(long p) const
{
    const auto m = coords(p);
    std::vector<double> out(d);
    for (int a = 0; a < d; ++a)
        out[a] = step() * m[a];
    return out;
}

double BandStructure::grad_norm2(long p, int k) const
{
    double s = 0.0;
    for (int a = 0; a < d; ++a) {
        const double g = grad[(p * dprime + k) * d + a];
        s += g * g;
    }
    return s;
}

std::vector<double> cluster_phases(std::vector<double> phases, double tol)
{
    if (phases.empty())
        return phases;
    for (double& p : phases)
        p = wrap_phase(p);
    std::sort(phases.begin(), phases.end());
    // start the sweep after the widest gap so no cluster straddles the cut
    std::size_t start = 0;
    double widest = kTwoPi - (phases.back() - phases.front());
    for (std::size_t k = 1; k < phases.size(); ++k)
        if (phases[k] - phases[k - 1] > widest) {
            widest = phases[k] - phases[k - 1];
            start = k;
        }
    std::vector<double> rot;
    for (std::size_t k = 0; k < phases.size(); ++k)
        rot.push_back(phases[(start + k) % phases.size()]);
    std::vector<double> out;
    double sum = 0.0;
    double ref = rot[0];
    double prev = rot[0];
    int count = 0;
    for (double p : rot) {
        if (count > 0 && circle_distance(p, prev) > tol) {
            out.push_back(wrap_phase(ref + sum / count));
            sum = 0.0;
            count = 0;
            ref = p;
        }
        sum += phase_diff(p, ref);
        ++count;
        prev = p;
    }
    out.push_back(wrap_phase(ref + sum / count));
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

std::vector<std::vector<int>> all_permutations(int n)
{
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    std::vector<std::vector<int>> out;
    do
        out.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    return out;
}

/// Overlap |<a_k, b_l>|^2 table.
Eigen::MatrixXd overlaps(const Matrix& a, const Matrix& b)
{
    return (a.adjoint() * b).cwiseAbs2();
}

/// Neighbour of p along an axis (dir = +-1).
long neighbour(const BandStructure& bs, long p, int axis, int dir)
{
    auto m = bs.coords(p);
    m[axis] += dir;
    return bs.point_index(m);
}

/// Index into the neighbour's bands that best matches band k of p.
int match(const Matrix& vp, int k, const Matrix& vq)
{
    int best = 0;
    double bestv = -1.0;
    for (int l = 0; l < vq.cols(); ++l) {
        const double v = std::norm(vp.col(k).dot(vq.col(l)));
        if (v > bestv) {
            bestv = v;
            best = l;
        }
    }
    return best;
}

} // namespace

BandStructure band_structure(const Symbol& sym, int N, const BandOptions& opts)
{
    if (N < 16)
        throw ConfigurationError("band_structure: grid must have N >= 16 points per axis, got " + std::to_string(N));
    BandStructure bs;
    bs.d = sym.d();
    bs.dprime = sym.dprime();
    bs.N = N;
    const long np = bs.points();
    const int dp = bs.dprime;
    const int d = bs.d;
    const double h = bs.step();

    bs.phases.assign(np * dp, 0.0);
    bs.vectors.assign(np, Matrix());
    parallel_for(np, [&](long p) {
        const Matrix m = sym(bs.x(p));
        const double defect = unitarity_defect(m);
        if (defect > 1e-10)
            throw NumericalError("symbol sample is not unitary (defect " + std::to_string(defect) + ")");
        const UnitaryEigen e = unitary_eigen(m);
        for (int k = 0; k < dp; ++k)
            bs.phases[p * dp + k] = e.phases[k];
        bs.vectors[p] = e.vectors;
    });

    // Label tracking along a spanning tree of the grid: the predecessor of a
    // point decrements its last non-zero coordinate.
    std::vector<std::vector<int>> perms;
    if (dp <= 4)
        perms = all_permutations(dp);
    std::vector<long> tie_points;
    for (long p = 1; p < np; ++p) {
        auto m = bs.coords(p);
        int axis = d - 1;
        while (m[axis] == 0)
            --axis;
        m[axis] -= 1;
        const long q = bs.point_index(m);
        const Eigen::MatrixXd ov = overlaps(bs.vectors[q], bs.vectors[p]);
        std::vector<int> sigma(dp);
        if (!perms.empty()) {
            double best = -1.0, second = -1.0;
            for (const auto& s : perms) {
                double score = 0.0;
                for (int k = 0; k < dp; ++k)
                    score += ov(k, s[k]);
                if (score > best) {
                    second = best;
                    best = score;
                    sigma = s;
                } else if (score > second) {
                    second = score;
                }
            }
            if (best - second < 1e-6)
                tie_points.push_back(p);
        } else {
            std::vector<bool> used(dp, false);
            for (int k = 0; k < dp; ++k) {
                int bl = -1;
                for (int l = 0; l < dp; ++l)
                    if (!used[l] && (bl < 0 || ov(k, l) > ov(k, bl)))
                        bl = l;
                used[bl] = true;
                sigma[k] = bl;
            }
        }
        Matrix v(dp, dp);
        std::vector<double> ph(dp);
        for (int k = 0; k < dp; ++k) {
            v.col(k) = bs.vectors[p].col(sigma[k]);
            ph[k] = bs.phases[p * dp + sigma[k]];
        }
        bs.vectors[p] = std::move(v);
        for (int k = 0; k < dp; ++k)
            bs.phases[p * dp + k] = ph[k];
    }

    // Neighbour matching and centred-difference gradients.
    // nb[((p * dp + k) * d + axis) * 2 + (dir > 0)] = matched band at the neighbour
    std::vector<int> nb(np * dp * d * 2);
    bs.grad.assign(np * dp * d, 0.0);
    parallel_for(np, [&](long p) {
        for (int a = 0; a < d; ++a) {
            const long qm = neighbour(bs, p, a, -1);
            const long qp = neighbour(bs, p, a, +1);
            for (int k = 0; k < dp; ++k) {
                const int lm = match(bs.vectors[p], k, bs.vectors[qm]);
                const int lp = match(bs.vectors[p], k, bs.vectors[qp]);
                nb[((p * dp + k) * d + a) * 2 + 0] = lm;
                nb[((p * dp + k) * d + a) * 2 + 1] = lp;
                bs.grad[(p * dp + k) * d + a] = phase_diff(bs.phase(qp, lp), bs.phase(qm, lm)) / (2 * h);
            }
        }
    });
    for (long p = 0; p < np; ++p)
        for (int k = 0; k < dp; ++k)
            bs.max_grad = std::max(bs.max_grad, std::sqrt(bs.grad_norm2(p, k)));

    auto nb_point = [&](long p, int a, int dir) { return neighbour(bs, p, a, dir); };
    auto nb_band = [&](long p, int k, int a, int dir) { return nb[((p * dp + k) * d + a) * 2 + (dir > 0 ? 1 : 0)]; };

    // Crossings: tiny gap, or a local gap minimum no larger than the gap's
    // variation to the neighbours.
    std::vector<char> tie(np, 0);
    for (long p : tie_points)
        tie[p] = 1;
    for (long p = 0; p < np; ++p) {
        for (int k = 0; k < dp; ++k)
            for (int l = k + 1; l < dp; ++l) {
                const double gap = circle_distance(bs.phase(p, k), bs.phase(p, l));
                bool crossing = gap < opts.gap_tol;
                if (!crossing) {
                    bool local_min = true;
                    double variation = 0.0;
                    for (int a = 0; a < d && local_min; ++a)
                        for (int dir : {-1, 1}) {
                            const long q = nb_point(p, a, dir);
                            const int kq = nb_band(p, k, a, dir);
                            const int lq = nb_band(p, l, a, dir);
                            const double gq = kq == lq ? 0.0 : circle_distance(bs.phase(q, kq), bs.phase(q, lq));
                            if (gq < gap)
                                local_min = false;
                            variation = std::max(variation, std::abs(gq - gap));
                        }
                    crossing = local_min && gap <= variation;
                }
                if (crossing) {
                    const double mid = bs.phase(p, k) + 0.5 * phase_diff(bs.phase(p, l), bs.phase(p, k));
                    bs.crossings.push_back(Crossing{p, k, l, wrap_phase(mid)});
                }
            }
        if (tie[p]) {
            // ambiguous relabelling: report the closest pair
            int bk = 0, bl = 1;
            double bg = std::numeric_limits<double>::infinity();
            for (int k = 0; k < dp; ++k)
                for (int l = k + 1; l < dp; ++l) {
                    const double g = circle_distance(bs.phase(p, k), bs.phase(p, l));
                    if (g < bg) {
                        bg = g;
                        bk = k;
                        bl = l;
                    }
                }
            if (dp > 1 && bg < opts.gap_tol) {
                const bool listed = std::any_of(bs.crossings.begin(), bs.crossings.end(), [&](const Crossing& c) {
                    return c.point == p && c.band_a == bk && c.band_b == bl;
                });
                if (!listed) {
                    const double mid = bs.phase(p, bk) + 0.5 * phase_diff(bs.phase(p, bl), bs.phase(p, bk));
                    bs.crossings.push_back(Crossing{p, bk, bl, wrap_phase(mid)});
                }
            }
        }
    }

    // Critical points: small gradient, or a local minimum of |grad| no larger
    // than the gradient's variation to the neighbours.
    for (long p = 0; p < np; ++p)
        for (int k = 0; k < dp; ++k) {
            const double g = std::sqrt(bs.grad_norm2(p, k));
            bool critical = g < opts.grad_tol;
            if (!critical) {
                bool local_min = true;
                double variation = 0.0;
                for (int a = 0; a < d && local_min; ++a)
                    for (int dir : {-1, 1}) {
                        const long q = nb_point(p, a, dir);
                        const int kq = nb_band(p, k, a, dir);
                        double diff2 = 0.0;
                        for (int b = 0; b < d; ++b) {
                            const double delta = bs.grad[(q * dp + kq) * d + b] - bs.grad[(p * dp + k) * d + b];
                            diff2 += delta * delta;
                        }
                        if (std::sqrt(bs.grad_norm2(q, kq)) < g)
                            local_min = false;
                        variation = std::max(variation, std::sqrt(diff2));
                    }
                critical = local_min && g <= variation;
            }
            if (critical)
                bs.criticals.push_back(Critical{p, k, bs.phase(p, k)});
        }

    std::vector<double> tau;
    for (const Crossing& c : bs.crossings)
        tau.push_back(c.phase);
    for (const Critical& c : bs.criticals)
        tau.push_back(c.phase);
    bs.tau_m = cluster_phases(std::move(tau), 2 * h);
    bs.bands = essential_spectrum(bs);
    return bs;
}

ArcSet essential_spectrum(const BandStructure& bs)
{
    std::vector<double> all(bs.phases.begin(), bs.phases.end());
    for (double& p : all)
        p = wrap_phase(p);
    std::sort(all.begin(), all.end());
    if (all.empty())
        return ArcSet();
    const double res = bs.step() * bs.max_grad;
    const double join = 2 * res + 1e-9;
    std::vector<Arc> arcs;
    double lo = all.front();
    double prev = all.front();
    for (std::size_t k = 1; k < all.size(); ++k) {
        if (all[k] - prev > join) {
            arcs.push_back(Arc{lo, prev - lo});
            lo = all[k];
        }
        prev = all[k];
    }
    arcs.push_back(Arc{lo, prev - lo});
    // the last and first arcs may join across 0
    if (arcs.size() > 1 && all.front() + kTwoPi - all.back() <= join) {
        arcs.front() = Arc{arcs.back().lo, arcs.back().len + (all.front() + kTwoPi - all.back()) + arcs.front().len};
        arcs.pop_back();
    } else if (arcs.size() == 1 && all.front() + kTwoPi - all.back() <= join) {
        return ArcSet::full();
    }
    return ArcSet(std::move(arcs)).padded(0.5 * res);
}

// ---------------------------------------------------------------- M-good certification

namespace {

/// Circular distance (in cells) from coordinate c to the interval [lo, lo+len] mod N.
int axis_distance(int c, int lo, int len, int N)
{
    if (len >= N - 1)
        return 0;
    const int off = ((c - lo) % N + N) % N;
    if (off <= len)
        return 0;
    return std::min(off - len, N - off);
}

int box_point_distance(const GridBox& b, const std::vector<int>& m, int N)
{
    int d = 0;
    for (std::size_t a = 0; a < m.size(); ++a)
        d = std::max(d, axis_distance(m[a], b.lo[a], b.len[a], N));
    return d;
}

int box_box_distance(const GridBox& x, const GridBox& y, int N)
{
    int d = 0;
    for (std::size_t a = 0; a < x.lo.size(); ++a) {
        if (x.len[a] >= N - 1 || y.len[a] >= N - 1)
            continue;
        // gap between two circular intervals
        const int end_x = x.lo[a] + x.len[a];
        const int end_y = y.lo[a] + y.len[a];
        const int g1 = ((y.lo[a] - end_x) % N + N) % N;
        const int g2 = ((x.lo[a] - end_y) % N + N) % N;
        const bool overlap = axis_distance(y.lo[a], x.lo[a], x.len[a], N) == 0 ||
                             axis_distance(x.lo[a], y.lo[a], y.len[a], N) == 0;
        d = std::max(d, overlap ? 0 : std::min(g1, g2));
    }
    return d;
}

/// Smallest circular interval covering the given coordinates.
void covering_interval(std::vector<int> c, int N, int& lo, int& len)
{
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    if (static_cast<int>(c.size()) == N) {
        lo = 0;
        len = N - 1;
        return;
    }
    int best_gap = c.front() + N - c.back();
    std::size_t start = 0;
    for (std::size_t k = 1; k < c.size(); ++k)
        if (c[k] - c[k - 1] > best_gap) {
            best_gap = c[k] - c[k - 1];
            start = k;
        }
    lo = c[start];
    len = N - best_gap;
}

} // namespace

MGoodCertificate is_m_good(const ArcSet& delta, const BandStructure& bs)
{
    MGoodCertificate cert;
    if (delta.empty()) {
        cert.reason = "empty set";
        return cert;
    }
    const long np = bs.points();
    const int d = bs.d;
    const int N = bs.N;
    const double resolution = bs.step() * bs.max_grad;
    for (double t : bs.tau_m)
        if (delta.distance(t) <= resolution)
            cert.offending.push_back(t);
    if (!cert.offending.empty()) {
        cert.reason = "intersects tau_M within grid resolution";
        return cert;
    }
    if (!bs.bands.covers(delta)) {
        cert.reason = "outside essential spectrum";
        return cert;
    }

    std::vector<char> pre(np, 0);
    double c = std::numeric_limits<double>::infinity();
    for (long p = 0; p < np; ++p)
        for (int k = 0; k < bs.dprime; ++k)
            if (delta.contains(bs.phase(p, k))) {
                pre[p] = 1;
                c = std::min(c, bs.grad_norm2(p, k));
            }
    if (std::none_of(pre.begin(), pre.end(), [](char v) { return v != 0; })) {
        cert.reason = "outside essential spectrum";
        return cert;
    }

    // bad grid points: crossings and critical points
    std::vector<std::pair<long, double>> bad;
    for (const Crossing& x : bs.crossings)
        bad.emplace_back(x.point, x.phase);
    for (const Critical& x : bs.criticals)
        bad.emplace_back(x.point, x.phase);

    for (const auto& [b, phase] : bad) {
        const auto mb = bs.coords(b);
        // all grid points within Chebyshev distance 1 of b
        const long cube = static_cast<long>(std::pow(3, d));
        for (long t = 0; t < cube; ++t) {
            auto m = mb;
            long r = t;
            for (int a = 0; a < d; ++a) {
                m[a] += static_cast<int>(r % 3) - 1;
                r /= 3;
            }
            if (pre[bs.point_index(m)]) {
                cert.offending.push_back(phase);
                break;
            }
        }
    }
    if (!cert.offending.empty()) {
        cert.offending = cluster_phases(cert.offending, 2 * bs.step());
        cert.reason = "preimage within 2 grid cells of a crossing or critical point";
        return cert;
    }
    if (!(c > 0.0)) {
        cert.reason = "vanishing gradient on the preimage";
        return cert;
    }

    // connected components of the preimage (Chebyshev neighbourhood)
    std::vector<int> comp(np, -1);
    int ncomp = 0;
    const long cube = static_cast<long>(std::pow(3, d));
    for (long s = 0; s < np; ++s) {
        if (!pre[s] || comp[s] >= 0)
            continue;
        std::vector<long> stack{s};
        comp[s] = ncomp;
        std::vector<std::vector<int>> coords_by_axis(d);
        while (!stack.empty()) {
            const long p = stack.back();
            stack.pop_back();
            const auto mp = bs.coords(p);
            for (int a = 0; a < d; ++a)
                coords_by_axis[a].push_back(mp[a]);
            for (long t = 0; t < cube; ++t) {
                auto m = mp;
                long r = t;
                for (int a = 0; a < d; ++a) {
                    m[a] += static_cast<int>(r % 3) - 1;
                    r /= 3;
                }
                const long q = bs.point_index(m);
                if (pre[q] && comp[q] < 0) {
                    comp[q] = ncomp;
                    stack.push_back(q);
                }
            }
        }
        GridBox box;
        box.lo.resize(d);
        box.len.resize(d);
        for (int a = 0; a < d; ++a)
            covering_interval(coords_by_axis[a], N, box.lo[a], box.len[a]);
        box.core_lo = box.lo;
        box.core_len = box.len;
        cert.boxes.push_back(box);
        ++ncomp;
    }

    // inflate each box by min(pi/2, clearance to crossings - 2 cells), keeping
    // boxes apart. Critical points only matter on the preimage itself.
    const int cap = static_cast<int>(std::floor(0.5 * kPi / bs.step()));
    std::vector<int> infl(cert.boxes.size(), cap);
    for (std::size_t i = 0; i < cert.boxes.size(); ++i) {
        for (const Crossing& x : bs.crossings)
            infl[i] = std::min(infl[i], box_point_distance(cert.boxes[i], bs.coords(x.point), N) - 2);
        for (std::size_t j = 0; j < cert.boxes.size(); ++j)
            if (j != i)
                infl[i] = std::min(infl[i], (box_box_distance(cert.boxes[i], cert.boxes[j], N) - 1) / 2);
        infl[i] = std::max(0, infl[i]);
    }
    for (std::size_t i = 0; i < cert.boxes.size(); ++i) {
        GridBox& b = cert.boxes[i];
        for (int a = 0; a < d; ++a) {
            if (b.len[a] >= N - 1)
                continue;
            if (b.len[a] + 2 * infl[i] >= N - 1) {
                b.lo[a] = 0;
                b.len[a] = N - 1;
            } else {
                b.lo[a] = ((b.lo[a] - infl[i]) % N + N) % N;
                b.len[a] += 2 * infl[i];
            }
        }
    }

    cert.c_delta = c;
    cert.pass = true;
    return cert;
}

// ---------------------------------------------------------------- closed forms

ClosedForm qw1d_closed_form(cplx alpha, double eta)
{
    const double a = std::abs(alpha);
    if (a > 1.0 + kParameterTol)
        throw ValidationError("alpha", "|alpha| > 1");
    const double psi0 = std::acos(std::min(1.0, a));
    ClosedForm out;
    if (a >= 1.0 - 1e-15) {
        out.bands = ArcSet::full();
    } else {
        out.bands = ArcSet({Arc{psi0 - eta, kPi - 2 * psi0}, Arc{kPi + psi0 - eta, kPi - 2 * psi0}});
    }
    out.tau_m = cluster_phases({psi0 - eta, kPi - psi0 - eta, kPi + psi0 - eta, kTwoPi - psi0 - eta}, 1e-12);
    return out;
}

double qw1d_grad_squared(cplx alpha, double x)
{
    const double a2 = std::norm(alpha);
    const double phi = x + (std::abs(alpha) > 0.0 ? std::arg(alpha) : 0.0);
    const double s = std::sin(phi);
    const double c = std::cos(phi);
    return a2 * s * s / (1.0 - a2 * c * c);
}

ClosedForm cc_closed_form(double phi)
{
    if (phi < -kParameterTol || phi > kPi / 2 + kParameterTol)
        throw ValidationError("phi", "phi outside [0, pi/2]");
    const double w = std::max(0.0, std::min(phi, kPi / 2 - phi));
    ClosedForm out;
    std::vector<Arc> arcs;
    std::vector<double> tau;
    for (int q = 0; q < 4; ++q) {
        const double c = q * kPi / 2;
        arcs.push_back(Arc{c - w, 2 * w});
        tau.insert(tau.end(), {c - w, c, c + w});
    }
    out.bands = ArcSet(std::move(arcs));
    out.tau_m = cluster_phases(std::move(tau), 1e-12);
    return out;
}

ClosedForm bb_closed_form_via_square(cplx alpha, double eta)
{
    ClosedForm q = qw1d_closed_form(alpha, eta);
    ClosedForm out;
    out.bands = q.bands.doubled();
    for (double t : q.tau_m)
        out.tau_m.push_back(2 * t);
    out.tau_m = cluster_phases(std::move(out.tau_m), 1e-12);
    return out;
}

} // namespace unet
