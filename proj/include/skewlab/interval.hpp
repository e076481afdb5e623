#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace skewlab {

/// Closed subinterval of the fiber I = [0,1].
struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    Interval() = default;
    Interval(double l, double h) : lo(l), hi(h) {
        if (!(lo <= hi))
            throw std::invalid_argument("Interval: lo must not exceed hi");
    }

    static Interval unit() { return {0.0, 1.0}; }

    double length() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    bool degenerate() const { return lo == hi; }

    bool contains(double x) const { return lo <= x && x <= hi; }
    bool contains(const Interval& j) const { return lo <= j.lo && j.hi <= hi; }

    // Signed distance of j from the boundary of *this; positive iff
    // j lies strictly inside.
    double interior_margin(const Interval& j) const {
        return std::min(j.lo - lo, hi - j.hi);
    }

    std::optional<Interval> intersect(const Interval& j) const {
        const double l = std::max(lo, j.lo);
        const double h = std::min(hi, j.hi);
        if (l > h) return std::nullopt;
        return Interval{l, h};
    }

    // Image under the reflection R(x) = 1 - x.
    Interval reflected() const { return {1.0 - hi, 1.0 - lo}; }

    double clamp(double x) const { return std::min(hi, std::max(lo, x)); }
};

inline bool operator==(const Interval& a, const Interval& b) {
    return a.lo == b.lo && a.hi == b.hi;
}

} // namespace skewlab
