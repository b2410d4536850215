#include "unet/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <lapacke.h>

namespace unet {

double wrap_phase(double theta)
{
    double r = std::fmod(theta, kTwoPi);
    if (r < 0)
        r += kTwoPi;
    if (r >= kTwoPi)
        r = 0.0;
    return r;
}

double circle_distance(double a, double b)
{
    const double d = wrap_phase(a - b);
    return std::min(d, kTwoPi - d);
}

namespace {

lapack_complex_double* lp(cplx* p)
{
    return reinterpret_cast<lapack_complex_double*>(p);
}

void sort_by_phase(UnitaryEigen& out)
{
    const long n = out.eigenvalues.size();
    std::vector<long> order(n);
    std::iota(order.begin(), order.end(), 0L);
    Eigen::VectorXd ph(n);
    for (long k = 0; k < n; ++k)
        ph[k] = phase_of(out.eigenvalues[k]);
    std::stable_sort(order.begin(), order.end(), [&](long a, long b) { return ph[a] < ph[b]; });
    UnitaryEigen sorted;
    sorted.phases.resize(n);
    sorted.eigenvalues.resize(n);
    sorted.vectors.resize(out.vectors.rows(), n);
    for (long k = 0; k < n; ++k) {
        sorted.phases[k] = ph[order[k]];
        sorted.eigenvalues[k] = out.eigenvalues[order[k]];
        if (out.vectors.size() > 0)
            sorted.vectors.col(k) = out.vectors.col(order[k]);
    }
    sorted.schur_offdiag = out.schur_offdiag;
    out = std::move(sorted);
}

UnitaryEigen schur(const Matrix& u, bool want_vectors)
{
    if (u.rows() != u.cols())
        throw ConfigurationError("unitary_eigen: matrix is not square");
    const lapack_int n = static_cast<lapack_int>(u.rows());
    UnitaryEigen out;
    if (n == 0)
        return out;
    Matrix t = u;
    Vector w(n);
    Matrix z(want_vectors ? n : 1, want_vectors ? n : 1);
    lapack_int sdim = 0;
    const lapack_int info = LAPACKE_zgees(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'N', nullptr, n, lp(t.data()),
                                          n, &sdim, lp(w.data()), lp(z.data()), want_vectors ? n : 1);
    if (info != 0)
        throw NumericalError("zgees failed with info = " + std::to_string(info));
    out.eigenvalues = w;
    if (want_vectors)
        out.vectors = std::move(z);
    double off = 0.0;
    for (lapack_int c = 1; c < n; ++c)
        off += t.col(c).head(c).squaredNorm();
    out.schur_offdiag = std::sqrt(off);
    sort_by_phase(out);
    return out;
}

} // namespace

UnitaryEigen unitary_eigen(const Matrix& u)
{
    return schur(u, true);
}

Eigen::VectorXd unitary_phases(const Matrix& u)
{
    return schur(u, false).phases;
}

HermitianEigen hermitian_eigen(const Matrix& h)
{
    if (h.rows() != h.cols())
        throw ConfigurationError("hermitian_eigen: matrix is not square");
    const lapack_int n = static_cast<lapack_int>(h.rows());
    HermitianEigen out;
    out.vectors = h;
    out.values.resize(n);
    if (n == 0)
        return out;
    const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'U', n, lp(out.vectors.data()), n, out.values.data());
    if (info != 0)
        throw NumericalError("zheevd failed with info = " + std::to_string(info));
    return out;
}

Eigen::VectorXd hermitian_eigenvalues(const Matrix& h)
{
    const lapack_int n = static_cast<lapack_int>(h.rows());
    Matrix a = h;
    Eigen::VectorXd w(n);
    if (n == 0)
        return w;
    const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'U', n, lp(a.data()), n, w.data());
    if (info != 0)
        throw NumericalError("zheevd failed with info = " + std::to_string(info));
    return w;
}

double spectral_norm(const Matrix& a)
{
    if (a.size() == 0)
        return 0.0;
    const Matrix g = a.cols() <= a.rows() ? Matrix(a.adjoint() * a) : Matrix(a * a.adjoint());
    const Eigen::VectorXd w = hermitian_eigenvalues(g);
    return std::sqrt(std::max(0.0, w.maxCoeff()));
}

double max_phase_deviation(std::vector<double> a, std::vector<double> b)
{
    if (a.size() != b.size())
        throw ConfigurationError("max_phase_deviation: multisets differ in size (" + std::to_string(a.size()) +
                                 " vs " + std::to_string(b.size()) + ")");
    if (a.empty())
        return 0.0;
    for (double& x : a)
        x = wrap_phase(x);
    std::sort(a.begin(), a.end());
    // Cut the circle in the middle of the widest gap of `a`.
    double best_gap = kTwoPi - (a.back() - a.front());
    double cut = a.back() + 0.5 * best_gap;
    for (std::size_t k = 1; k < a.size(); ++k) {
        const double gap = a[k] - a[k - 1];
        if (gap > best_gap) {
            best_gap = gap;
            cut = a[k - 1] + 0.5 * gap;
        }
    }
    auto recut = [cut](std::vector<double>& v) {
        for (double& x : v)
            x = wrap_phase(x - cut);
        std::sort(v.begin(), v.end());
    };
    recut(a);
    recut(b);
    double dev = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        dev = std::max(dev, circle_distance(a[k], b[k]));
    return dev;
}

} // namespace unet

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace unet {

namespace {
std::atomic<int> g_threads{0};
}

void set_worker_threads(int n)
{
    g_threads = std::max(0, n);
}

int worker_threads()
{
    const int n = g_threads.load();
    if (n > 0)
        return n;
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(long n, const std::function<void(long)>& fn)
{
    const int nt = static_cast<int>(std::min<long>(worker_threads(), n));
    if (nt <= 1) {
        for (long i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<long> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (long i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                next = n;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t)
        pool.emplace_back(worker);
    for (auto& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

} // namespace unet
