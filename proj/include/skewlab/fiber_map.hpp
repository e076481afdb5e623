#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "skewlab/interval.hpp"

namespace skewlab {

/// A C^1 injective self-map of I = [0,1] with evaluable derivative and a
/// guarded inverse.
///
/// Two core families are supported:
///   - affine: x -> a*x + b with a != 0 and image inside [0,1];
///   - anchored: a C^1 monotone piecewise-cubic Hermite interpolant through
///     prescribed anchors (x_k, y_k) with prescribed slope magnitudes; the
///     interpolant passes through the anchors and matches the anchor slopes
///     exactly, and construction rejects slope data that would break strict
///     monotonicity.
/// Either core may be wrapped in reflections R(x) = 1 - x applied before
/// and/or after the core, which is what the orientation-doubling extension
/// needs. Orientation is derived at construction and cached.
class FiberMap {
public:
    enum class Family { affine, anchored };

    static FiberMap affine(double slope, double intercept) {
        FiberMap f;
        f.family_ = Family::affine;
        f.a_ = slope;
        f.b_ = intercept;
        if (slope == 0.0) throw std::invalid_argument("affine map: zero slope is not injective");
        const double e0 = intercept, e1 = slope + intercept;
        if (e0 < 0.0 || e0 > 1.0 || e1 < 0.0 || e1 > 1.0)
            throw std::invalid_argument("affine map: image leaves [0,1]");
        f.finish();
        return f;
    }

    /// Anchored family. xs must start at 0, end at 1 and be strictly
    /// increasing; ys strictly monotone within [0,1]; slope_mags positive
    /// magnitudes of the derivative at the anchors.
    static FiberMap anchored(std::vector<double> xs, std::vector<double> ys,
                             std::vector<double> slope_mags) {
        FiberMap f;
        f.family_ = Family::anchored;
        const std::size_t k = xs.size();
        if (k < 2 || ys.size() != k || slope_mags.size() != k)
            throw std::invalid_argument("anchored map: need matching anchor arrays of length >= 2");
        if (xs.front() != 0.0 || xs.back() != 1.0)
            throw std::invalid_argument("anchored map: anchor abscissae must span [0,1]");
        for (std::size_t i = 0; i + 1 < k; ++i)
            if (!(xs[i] < xs[i + 1]))
                throw std::invalid_argument("anchored map: abscissae must be strictly increasing");
        const bool increasing = ys.back() > ys.front();
        for (std::size_t i = 0; i + 1 < k; ++i)
            if (increasing ? !(ys[i] < ys[i + 1]) : !(ys[i] > ys[i + 1]))
                throw std::invalid_argument("anchored map: anchor values must be strictly monotone");
        for (double y : ys)
            if (y < 0.0 || y > 1.0)
                throw std::invalid_argument("anchored map: anchor values leave [0,1]");
        for (double m : slope_mags)
            if (!(m > 0.0))
                throw std::invalid_argument("anchored map: slope magnitudes must be positive");

        f.ax_ = std::move(xs);
        f.ay_ = std::move(ys);
        f.am_.resize(k);
        for (std::size_t i = 0; i < k; ++i)
            f.am_[i] = increasing ? slope_mags[i] : -slope_mags[i];

        // Strict monotonicity of each Hermite segment. With alpha = m_i/Delta
        // and beta = m_{i+1}/Delta the scaled derivative is the quadratic
        //   psi(t) = (3a+3b-6) t^2 + (6-4a-2b) t + a,
        // and the segment is strictly monotone iff min psi > 0 on [0,1].
        for (std::size_t i = 0; i + 1 < k; ++i) {
            const double h = f.ax_[i + 1] - f.ax_[i];
            const double delta = (f.ay_[i + 1] - f.ay_[i]) / h;
            const double alpha = f.am_[i] / delta;
            const double beta = f.am_[i + 1] / delta;
            const double a2 = 3.0 * alpha + 3.0 * beta - 6.0;
            const double a1 = 6.0 - 4.0 * alpha - 2.0 * beta;
            double minpsi = std::min(alpha, beta); // psi(0), psi(1)
            if (a2 > 0.0) {
                const double tstar = -a1 / (2.0 * a2);
                if (tstar > 0.0 && tstar < 1.0)
                    minpsi = std::min(minpsi, (a2 * tstar + a1) * tstar + alpha);
            }
            if (!(minpsi > 0.0))
                throw std::invalid_argument(
                    "anchored map: prescribed slopes leave the strictly monotone Hermite "
                    "region on segment " + std::to_string(i));
        }
        f.finish();
        return f;
    }

    /// R o inner.
    static FiberMap reflected(FiberMap inner) {
        inner.post_ = !inner.post_;
        inner.finish();
        return inner;
    }

    /// inner o R.
    static FiberMap pre_reflected(FiberMap inner) {
        inner.pre_ = !inner.pre_;
        inner.finish();
        return inner;
    }

    bool preserves_orientation() const { return preserving_; }

    double operator()(double x) const { return eval(x); }

    double eval(double x) const {
        x = check_domain(x);
        if (pre_) x = 1.0 - x;
        double y = core_eval(x);
        if (post_) y = 1.0 - y;
        return y;
    }

    /// Extended-precision evaluation. Deeply contracted fiber intervals have
    /// lengths far below the double ulp of their endpoints; pushing them in
    /// long double keeps those lengths resolvable.
    long double eval_ld(long double x) const {
        if (x < 0.0L) x = 0.0L;
        if (x > 1.0L) x = 1.0L;
        if (pre_) x = 1.0L - x;
        long double y;
        if (family_ == Family::affine) {
            y = static_cast<long double>(a_) * x + static_cast<long double>(b_);
        } else {
            const std::size_t i = segment_of(static_cast<double>(x));
            const long double h = static_cast<long double>(ax_[i + 1]) - ax_[i];
            long double t = (x - static_cast<long double>(ax_[i])) / h;
            if (t < 0.0L) t = 0.0L;
            if (t > 1.0L) t = 1.0L;
            const long double omt = 1.0L - t;
            y = static_cast<long double>(ay_[i]) * (1.0L + 2.0L * t) * omt * omt +
                h * static_cast<long double>(am_[i]) * t * omt * omt +
                static_cast<long double>(ay_[i + 1]) * t * t * (3.0L - 2.0L * t) +
                h * static_cast<long double>(am_[i + 1]) * t * t * (t - 1.0L);
        }
        if (post_) y = 1.0L - y;
        return y;
    }

    double deriv(double x) const {
        x = check_domain(x);
        if (pre_) x = 1.0 - x;
        double d = core_deriv(x);
        if (pre_) d = -d;
        if (post_) d = -d;
        return d;
    }

    /// Exact image of an interval: by monotonicity the endpoint images
    /// bracket it.
    Interval image(const Interval& j = Interval::unit()) const {
        const double u = eval(j.lo), v = eval(j.hi);
        return {std::min(u, v), std::max(u, v)};
    }

    /// Inverse where defined. nullopt signals y outside the image of I.
    std::optional<double> inverse(double y) const {
        if (post_) y = 1.0 - y;
        auto x = core_inverse(y);
        if (!x) return std::nullopt;
        return pre_ ? 1.0 - *x : *x;
    }

    Family family() const { return family_; }

    std::string describe() const {
        std::ostringstream os;
        if (post_) os << "R o ";
        if (family_ == Family::affine) {
            os << "affine(a=" << a_ << ", b=" << b_ << ")";
        } else {
            os << "anchored(";
            for (std::size_t i = 0; i < ax_.size(); ++i)
                os << (i ? " " : "") << "(" << ax_[i] << "," << ay_[i] << ";" << am_[i] << ")";
            os << ")";
        }
        if (pre_) os << " o R";
        return os.str();
    }

private:
    FiberMap() = default;

    static double check_domain(double x) {
        if (x < -1e-12 || x > 1.0 + 1e-12)
            throw std::domain_error("fiber map: argument " + std::to_string(x) + " outside [0,1]");
        return std::min(1.0, std::max(0.0, x));
    }

    void finish() {
        bool core_up = family_ == Family::affine ? (a_ > 0.0) : (am_.front() > 0.0);
        preserving_ = core_up == (pre_ == post_);
    }

    double core_eval(double x) const {
        if (family_ == Family::affine) return a_ * x + b_;
        const std::size_t i = segment_of(x);
        const double h = ax_[i + 1] - ax_[i];
        const double t = (x - ax_[i]) / h;
        const double omt = 1.0 - t;
        // Hermite basis in factored form so t = 0 and t = 1 reproduce the
        // anchor values bit-exactly.
        const double h00 = (1.0 + 2.0 * t) * omt * omt;
        const double h10 = t * omt * omt;
        const double h01 = t * t * (3.0 - 2.0 * t);
        const double h11 = t * t * (t - 1.0);
        return ay_[i] * h00 + h * am_[i] * h10 + ay_[i + 1] * h01 + h * am_[i + 1] * h11;
    }

    double core_deriv(double x) const {
        if (family_ == Family::affine) return a_;
        const std::size_t i = segment_of(x);
        const double h = ax_[i + 1] - ax_[i];
        const double t = (x - ax_[i]) / h;
        const double delta = (ay_[i + 1] - ay_[i]) / h;
        // Vanishes term-by-term at t = 0 and t = 1, so anchor slopes are
        // reproduced exactly.
        return delta * 6.0 * t * (1.0 - t) + am_[i] * (1.0 - t) * (1.0 - 3.0 * t) +
               am_[i + 1] * t * (3.0 * t - 2.0);
    }

    std::optional<double> core_inverse(double y) const {
        if (family_ == Family::affine) {
            const double lo = std::min(b_, a_ + b_), hi = std::max(b_, a_ + b_);
            if (y < lo || y > hi) return std::nullopt;
            return std::min(1.0, std::max(0.0, (y - b_) / a_));
        }
        const bool up = am_.front() > 0.0;
        const double ylo = up ? ay_.front() : ay_.back();
        const double yhi = up ? ay_.back() : ay_.front();
        if (y < ylo || y > yhi) return std::nullopt;

        // Locate the segment whose value range brackets y, then refine by
        // safeguarded bisection to bracket width <= 1e-14 with Newton polish.
        std::size_t i = 0;
        for (; i + 2 < ax_.size(); ++i) {
            const double s0 = ay_[i], s1 = ay_[i + 1];
            if (y >= std::min(s0, s1) && y <= std::max(s0, s1)) break;
        }
        double lo = ax_[i], hi = ax_[i + 1];
        double flo = core_eval(lo) - y;
        if (flo == 0.0) return lo;
        if (core_eval(hi) == y) return hi;
        const bool lo_below = flo < 0.0;
        while (hi - lo > 1e-14) {
            const double mid = 0.5 * (lo + hi);
            const double fm = core_eval(mid) - y;
            if (fm == 0.0) return mid;
            if ((fm < 0.0) == lo_below) lo = mid; else hi = mid;
        }
        double x = 0.5 * (lo + hi);
        for (int it = 0; it < 4; ++it) {
            const double d = core_deriv(x);
            if (d == 0.0) break;
            const double step = (core_eval(x) - y) / d;
            const double nx = x - step;
            if (nx < lo - 1e-13 || nx > hi + 1e-13) break;
            x = std::min(1.0, std::max(0.0, nx));
        }
        return x;
    }

    std::size_t segment_of(double x) const {
        // upper_bound on anchor abscissae; x == 1 falls into the last segment.
        std::size_t i = static_cast<std::size_t>(
            std::upper_bound(ax_.begin(), ax_.end(), x) - ax_.begin());
        if (i == 0) return 0;
        if (i >= ax_.size()) return ax_.size() - 2;
        return i - 1;
    }

    Family family_ = Family::affine;
    double a_ = 1.0, b_ = 0.0;
    std::vector<double> ax_, ay_, am_; // anchors: abscissae, values, signed slopes
    bool pre_ = false, post_ = false;
    bool preserving_ = true;
};

struct ComposeResult {
    double value = 0.0;
    double log_abs_deriv_sum = 0.0;
    std::vector<double> trajectory; // x_0, ..., x_n (n = word length)
};

/// f_{w_1...w_n}(x) with the leftmost symbol applied first, together with the
/// chain-rule sum of log |f'| along the trajectory.
inline ComposeResult compose_eval(const std::vector<FiberMap>& maps, std::span<const int> word,
                                  double x) {
    ComposeResult r;
    r.trajectory.reserve(word.size() + 1);
    r.trajectory.push_back(x);
    for (int s : word) {
        if (s < 1 || s > static_cast<int>(maps.size()))
            throw std::invalid_argument("compose_eval: symbol " + std::to_string(s) +
                                        " outside alphabet");
        const FiberMap& f = maps[static_cast<std::size_t>(s - 1)];
        r.log_abs_deriv_sum += std::log(std::abs(f.deriv(x)));
        x = f.eval(x);
        r.trajectory.push_back(x);
    }
    r.value = x;
    return r;
}

/// Grid max/min ratio of |f'| over J: a lower approximation of the true
/// sup-ratio sup |f'(x)| / |f'(y)|.
inline double distortion(const FiberMap& f, const Interval& j, int grid_n = 4097) {
    if (grid_n < 2) throw std::invalid_argument("distortion: grid_n must be >= 2");
    if (j.degenerate()) return 1.0;
    double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
    for (int k = 0; k < grid_n; ++k) {
        const double x = j.lo + (j.hi - j.lo) * (static_cast<double>(k) / (grid_n - 1));
        const double d = std::abs(f.deriv(x));
        dmin = std::min(dmin, d);
        dmax = std::max(dmax, d);
    }
    return dmax / dmin;
}

} // namespace skewlab
