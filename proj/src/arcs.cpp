#include "unet/arcs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "unet/linalg.hpp"

namespace unet {

ArcSet::ArcSet(std::vector<Arc> arcs)
{
    std::vector<Arc> in;
    for (Arc a : arcs) {
        if (!(a.len >= 0.0))
            throw ConfigurationError("arc with negative length");
        if (a.len >= kTwoPi) {
            arcs_ = {Arc{0.0, kTwoPi}};
            return;
        }
        a.lo = wrap_phase(a.lo);
        in.push_back(a);
    }
    if (in.empty())
        return;
    std::sort(in.begin(), in.end(), [](const Arc& x, const Arc& y) { return x.lo < y.lo; });
    std::vector<Arc> merged{in.front()};
    for (std::size_t k = 1; k < in.size(); ++k) {
        Arc& last = merged.back();
        if (in[k].lo <= last.hi())
            last.len = std::max(last.len, in[k].hi() - last.lo);
        else
            merged.push_back(in[k]);
    }
    // arcs running past 2pi may swallow arcs at the start of the circle
    while (merged.size() > 1 && merged.back().hi() >= kTwoPi + merged.front().lo) {
        Arc& last = merged.back();
        last.len = std::max(last.len, merged.front().hi() + kTwoPi - last.lo);
        merged.erase(merged.begin());
    }
    if (merged.size() == 1 && merged.front().len >= kTwoPi)
        merged = {Arc{0.0, kTwoPi}};
    std::sort(merged.begin(), merged.end(), [](const Arc& x, const Arc& y) { return x.lo < y.lo; });
    arcs_ = std::move(merged);
}

ArcSet ArcSet::full()
{
    return ArcSet({Arc{0.0, kTwoPi}});
}

ArcSet ArcSet::interval(double lo, double hi)
{
    if (hi - lo >= kTwoPi)
        return full();
    return ArcSet({Arc{lo, wrap_phase(hi - lo)}});
}

ArcSet ArcSet::points(const std::vector<double>& phases)
{
    std::vector<Arc> a;
    a.reserve(phases.size());
    for (double p : phases)
        a.push_back(Arc{p, 0.0});
    return ArcSet(std::move(a));
}

bool ArcSet::is_full() const
{
    return arcs_.size() == 1 && arcs_.front().len >= kTwoPi;
}

double ArcSet::measure() const
{
    double m = 0.0;
    for (const Arc& a : arcs_)
        m += a.len;
    return m;
}

bool ArcSet::contains(double theta, double slack) const
{
    return distance(theta) <= slack;
}

double ArcSet::distance(double theta) const
{
    if (arcs_.empty())
        return std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    for (const Arc& a : arcs_) {
        if (wrap_phase(theta - a.lo) <= a.len)
            return 0.0;
        best = std::min({best, circle_distance(theta, a.lo), circle_distance(theta, a.hi())});
    }
    return best;
}

bool ArcSet::covers(const ArcSet& other, double slack) const
{
    if (other.empty())
        return true;
    if (empty())
        return false;
    // `other` is covered iff no gap of this set meets it beyond slack.
    for (const Arc& g : gaps()) {
        // gaps are open: shrink by a rounding allowance
        const double lo = g.lo + slack + 1e-12;
        const double len = g.len - 2 * (slack + 1e-12);
        if (len < 0)
            continue;
        for (const Arc& o : other.arcs())
            if (wrap_phase(o.lo - lo) <= len || wrap_phase(lo - o.lo) <= o.len)
                return false;
    }
    return true;
}

ArcSet ArcSet::padded(double eps) const
{
    std::vector<Arc> a;
    for (const Arc& x : arcs_)
        a.push_back(Arc{x.lo - eps, x.len + 2 * eps});
    return ArcSet(std::move(a));
}

ArcSet ArcSet::doubled() const
{
    std::vector<Arc> a;
    for (const Arc& x : arcs_)
        a.push_back(Arc{2 * x.lo, std::min(kTwoPi, 2 * x.len)});
    return ArcSet(std::move(a));
}

std::vector<Arc> ArcSet::gaps() const
{
    if (arcs_.empty())
        return {Arc{0.0, kTwoPi}};
    if (is_full())
        return {};
    std::vector<Arc> g;
    for (std::size_t k = 0; k < arcs_.size(); ++k) {
        const Arc& cur = arcs_[k];
        const Arc& nxt = arcs_[(k + 1) % arcs_.size()];
        const double len = wrap_phase(nxt.lo - cur.hi());
        if (len > 0.0 || arcs_.size() == 1)
            g.push_back(Arc{wrap_phase(cur.hi()), arcs_.size() == 1 && len == 0.0 ? kTwoPi - cur.len : len});
    }
    return g;
}

namespace {

double directed(const ArcSet& a, const ArcSet& b)
{
    double d = 0.0;
    for (const Arc& x : a.arcs()) {
        d = std::max({d, b.distance(x.lo), b.distance(x.hi())});
        for (const Arc& g : b.gaps()) {
            const double m = g.mid();
            if (wrap_phase(m - x.lo) <= x.len)
                d = std::max(d, b.distance(m));
        }
    }
    return d;
}

} // namespace

double hausdorff_distance(const ArcSet& a, const ArcSet& b)
{
    if (a.empty() && b.empty())
        return 0.0;
    if (a.empty() || b.empty())
        return std::numeric_limits<double>::infinity();
    return std::max(directed(a, b), directed(b, a));
}

} // namespace unet
