#pragma once

// Parameterized utility, fear and regret function families.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <utility>

#include "regret/error.hpp"

namespace regret {

namespace detail {

// Shortest %g spelling that reads back to the same double.
inline std::string fmt_param(double x) {
    char buf[32];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

inline void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw Error(ErrorKind::NonFiniteInput, std::string(what) + " is not finite");
}

// x^k for a positive integer k, computed on |x| so odd powers are exactly
// skew-symmetric.
inline double odd_power(double x, int k) {
    const double ax = std::abs(x);
    double r = ax;
    for (int i = 1; i < k; ++i) r *= ax;
    return x < 0.0 ? -r : r;
}

}  // namespace detail

/// Choiceless utility u: strictly increasing and continuous.
class UtilityFn {
public:
    enum class Family { identity, affine, power };

    static UtilityFn identity() { return UtilityFn(Family::identity, 1.0, 0.0); }

    static UtilityFn affine(double a, double c) {
        if (!(a > 0.0) || !std::isfinite(a) || !std::isfinite(c)) {
            throw Error(ErrorKind::DomainViolation, "affine utility needs a > 0 and finite c");
        }
        return UtilityFn(Family::affine, a, c);
    }

    // sign(x) * |x|^a, extended to losses symmetrically.
    static UtilityFn power(double a) {
        if (!(a > 0.0) || !std::isfinite(a)) {
            throw Error(ErrorKind::DomainViolation, "power utility needs a > 0");
        }
        return UtilityFn(Family::power, a, 0.0);
    }

    Family family() const noexcept { return family_; }

    double operator()(double x) const {
        detail::require_finite(x, "utility argument");
        switch (family_) {
            case Family::identity: return x;
            case Family::affine: return a_ * x + c_;
            case Family::power: {
                const double r = std::pow(std::abs(x), a_);
                return x < 0.0 ? -r : r;
            }
        }
        return x;
    }

    double inverse(double y) const {
        detail::require_finite(y, "utility value");
        switch (family_) {
            case Family::identity: return y;
            case Family::affine: return (y - c_) / a_;
            case Family::power: {
                const double r = std::pow(std::abs(y), 1.0 / a_);
                return y < 0.0 ? -r : r;
            }
        }
        return y;
    }

    bool maps_zero_to_zero() const noexcept { return family_ != Family::affine || c_ == 0.0; }

    std::string name() const {
        switch (family_) {
            case Family::identity: return "u:identity";
            case Family::affine: return "u:affine:" + detail::fmt_param(a_) + ":" + detail::fmt_param(c_);
            case Family::power: return "u:power:" + detail::fmt_param(a_);
        }
        return "u:?";
    }

private:
    UtilityFn(Family f, double a, double c) : family_(f), a_(a), c_(c) {}

    Family family_;
    double a_;
    double c_;
};

/// Fear function v on [0,1]: v(0)=1, v(1)=0, strictly decreasing.
class FearFn {
public:
    enum class Family { poly, sinpoly };

    // v(x) = 1 - x^a
    static FearFn poly(double a) { return FearFn(Family::poly, check_exponent(a)); }
    // v(x) = sin[(pi/2)(1 - x^a)]
    static FearFn sinpoly(double a) { return FearFn(Family::sinpoly, check_exponent(a)); }
    static FearFn linear() { return poly(1.0); }

    Family family() const noexcept { return family_; }
    double exponent() const noexcept { return a_; }

    double operator()(double p_u) const {
        if (!(p_u >= 0.0 && p_u <= 1.0)) {
            throw Error(ErrorKind::DomainViolation, "fear function argument outside [0,1]", p_u);
        }
        // Endpoints are pinned so v(0) and v(1) are exact for every family.
        if (p_u == 0.0) return 1.0;
        if (p_u == 1.0) return 0.0;
        const double t = 1.0 - std::pow(p_u, a_);
        switch (family_) {
            case Family::poly: return t;
            case Family::sinpoly: return std::sin(std::numbers::pi / 2.0 * t);
        }
        return t;
    }

    std::string name() const {
        const char* tag = family_ == Family::poly ? "v:poly:" : "v:sin:";
        return tag + detail::fmt_param(a_);
    }

private:
    FearFn(Family f, double a) : family_(f), a_(a) {}

    static double check_exponent(double a) {
        if (!(a > 0.0) || !std::isfinite(a)) {
            throw Error(ErrorKind::DomainViolation, "fear exponent must be > 0");
        }
        return a;
    }

    Family family_;
    double a_;
};

/// Rejoice/regret function R with R(0)=0.
class RegretR {
public:
    enum class Family { zero, power_odd };

    static RegretR zero() { return RegretR(Family::zero, 1, 0.0); }

    // R(x) = beta * x^k, k odd.
    static RegretR power_odd(int k, double beta) {
        if (k < 1 || k % 2 == 0) throw Error(ErrorKind::DomainViolation, "R exponent must be odd and >= 1");
        if (!(beta >= 0.0) || !std::isfinite(beta)) {
            throw Error(ErrorKind::DomainViolation, "R scale must be >= 0");
        }
        return RegretR(Family::power_odd, k, beta);
    }

    Family family() const noexcept { return family_; }
    int exponent() const noexcept { return k_; }
    double scale() const noexcept { return beta_; }

    double operator()(double x) const {
        detail::require_finite(x, "R argument");
        if (family_ == Family::zero) return 0.0;
        return beta_ * detail::odd_power(x, k_);
    }

    std::string name() const {
        if (family_ == Family::zero) return "r:power:1:0";
        return "r:power:" + std::to_string(k_) + ":" + detail::fmt_param(beta_);
    }

private:
    RegretR(Family f, int k, double beta) : family_(f), k_(k), beta_(beta) {}

    Family family_;
    int k_;
    double beta_;
};

/// Regret function Q: strictly increasing and skew-symmetric.
class RegretQ {
public:
    enum class Family { power_odd, linear, from_r, custom };

    // Q(x) = x^k, k odd.
    static RegretQ power_odd(int k) {
        if (k < 1 || k % 2 == 0) throw Error(ErrorKind::DomainViolation, "Q exponent must be odd and >= 1");
        RegretQ q(Family::power_odd);
        q.k_ = k;
        return q;
    }

    static RegretQ linear() { return RegretQ(Family::linear); }

    // Q(x) = x + R(x) - R(-x)
    static RegretQ from_r(RegretR r) {
        RegretQ q(Family::from_r);
        q.r_ = std::make_shared<const RegretR>(std::move(r));
        return q;
    }

    // Arbitrary callable. None of the Q invariants are enforced; this exists so
    // audits can be fed deliberately broken regret functions.
    static RegretQ custom(std::string name, std::function<double(double)> fn) {
        RegretQ q(Family::custom);
        q.custom_name_ = std::move(name);
        q.fn_ = std::make_shared<const std::function<double(double)>>(std::move(fn));
        return q;
    }

    Family family() const noexcept { return family_; }

    double operator()(double xi) const {
        detail::require_finite(xi, "Q argument");
        switch (family_) {
            case Family::power_odd: return detail::odd_power(xi, k_);
            case Family::linear: return xi;
            case Family::from_r: return xi + (*r_)(xi) - (*r_)(-xi);
            case Family::custom: return (*fn_)(xi);
        }
        return xi;
    }

    std::string name() const {
        switch (family_) {
            case Family::power_odd: return "q:power:" + std::to_string(k_);
            case Family::linear: return "q:linear";
            case Family::from_r: return r_->name();
            case Family::custom: return custom_name_;
        }
        return "q:?";
    }

private:
    explicit RegretQ(Family f) : family_(f) {}

    Family family_;
    int k_ = 1;
    std::shared_ptr<const RegretR> r_;
    std::string custom_name_;
    std::shared_ptr<const std::function<double(double)>> fn_;
};

// Sampled structural checks. Grids are uniform with `points` nodes over [lo, hi].

template <class Fn>
bool strictly_increasing_on_grid(const Fn& fn, double lo, double hi, int points = 512) {
    double prev = fn(lo);
    for (int i = 1; i < points; ++i) {
        const double x = lo + (hi - lo) * i / (points - 1);
        const double y = fn(x);
        if (!(y > prev)) return false;
        prev = y;
    }
    return true;
}

inline bool fear_strictly_decreasing(const FearFn& v, int points = 512) {
    return strictly_increasing_on_grid([&](double x) { return -v(x); }, 0.0, 1.0, points);
}

/// Second-difference convexity check of Q on (0, hi]. Linear Q passes.
inline bool convex_on_positive(const RegretQ& q, double hi = 2.0, int points = 512) {
    const double h = hi / points;
    for (int i = 1; i < points - 1; ++i) {
        const double x = h * i;
        const double d2 = q(x + h) - 2.0 * q(x) + q(x - h);
        const double scale = std::abs(q(x + h)) + 2.0 * std::abs(q(x)) + std::abs(q(x - h));
        if (d2 < -1e-12 * scale) return false;
    }
    return true;
}

}  // namespace regret
