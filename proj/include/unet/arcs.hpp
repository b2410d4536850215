#pragma once

#include <vector>

namespace unet {

/// Closed arc of the circle R/2piZ running counter-clockwise from `lo`
/// over angular length `len` (0 <= len <= 2pi; len = 0 is a point).
struct Arc {
    double lo = 0.0;
    double len = 0.0;

    double hi() const { return lo + len; }
    double mid() const { return lo + 0.5 * len; }
};

/// Finite union of closed arcs, canonicalized: disjoint, sorted by start in
/// [0, 2pi), arcs touching or overlapping merged across the 0 / 2pi cut.
class ArcSet {
public:
    ArcSet() = default;
    explicit ArcSet(std::vector<Arc> arcs);

    static ArcSet full();
    /// Counter-clockwise from lo to hi. hi - lo >= 2pi gives the full circle;
    /// hi < lo is read modulo 2pi.
    static ArcSet interval(double lo, double hi);
    static ArcSet points(const std::vector<double>& phases);

    const std::vector<Arc>& arcs() const { return arcs_; }
    bool empty() const { return arcs_.empty(); }
    bool is_full() const;
    double measure() const;

    bool contains(double theta, double slack = 0.0) const;
    /// Circle distance from theta to the set (0 inside).
    double distance(double theta) const;
    /// Every point of `other` lies in this set up to slack.
    bool covers(const ArcSet& other, double slack = 0.0) const;

    ArcSet padded(double eps) const;
    /// Image under theta -> 2 theta.
    ArcSet doubled() const;

    /// Complementary open arcs, returned as closed arcs.
    std::vector<Arc> gaps() const;

private:
    std::vector<Arc> arcs_;
};

/// Hausdorff distance on the circle; infinity if exactly one set is empty.
double hausdorff_distance(const ArcSet& a, const ArcSet& b);

} // namespace unet
