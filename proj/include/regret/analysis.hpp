#pragma once

// Two-outcome closed forms, break-even search, numeric checks of the ratio,
// reversal and reflection effects, and the medical-case sweeps.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "regret/engine.hpp"
#include "regret/error.hpp"
#include "regret/prospect.hpp"
#include "regret/random.hpp"

namespace regret {

enum class SetupVariant { f_has_unknown, g_has_unknown, both_zero };

/// f = (f1, lambda*p; X, 1 - lambda*p) against g = (g1, p; Y, 1 - p), where X
/// and Y are unknown or zero depending on the variant. The unknown mass of f
/// co-varies with p as 1 - lambda*p.
struct TwoOutcomeSetup {
    double f1 = 0.0;
    double g1 = 0.0;
    double lambda = 0.5;
    double p = 1.0;
    AgentProfile profile;
    SetupVariant variant = SetupVariant::f_has_unknown;
    // When false the fear factor is pinned to one (v(0)): the modified rule
    // collapses onto the classical one. Used as a negative control.
    bool fear_enabled = true;
};

inline void check_setup(const TwoOutcomeSetup& s, double p) {
    if (!std::isfinite(s.f1) || !std::isfinite(s.g1)) {
        throw Error(ErrorKind::DomainViolation, "setup outcomes must be finite");
    }
    if (!(s.lambda > 0.0 && s.lambda < 1.0)) {
        throw Error(ErrorKind::DomainViolation, "lambda must lie in (0,1)", s.lambda);
    }
    if (!(p > 0.0 && p <= 1.0)) throw Error(ErrorKind::DomainViolation, "p must lie in (0,1]", p);
}

/// The explicit prospect pair a setup describes at probability p.
inline std::pair<Prospect, Prospect> setup_prospects(const TwoOutcomeSetup& s, double p) {
    check_setup(s, p);
    const double pf = s.lambda * p;
    const Outcome rest_f =
        s.variant == SetupVariant::f_has_unknown ? Outcome::unknown() : Outcome::known(0.0);
    const Outcome rest_g =
        s.variant == SetupVariant::g_has_unknown ? Outcome::unknown() : Outcome::known(0.0);
    Prospect f{{{Outcome::known(s.f1), pf}, {rest_f, 1.0 - pf}}, Interpretation::money};
    Prospect g{{{Outcome::known(s.g1), p}, {rest_g, 1.0 - p}}, Interpretation::money};
    return {std::move(f), std::move(g)};
}

namespace detail {

// p{ lambda Q(a) - Q(b) + lambda p [Q(a - b) - Q(a) + Q(b)] } with a the
// (possibly fear-scaled) utility of f1 and b = u(g1).
inline double two_outcome_form(const RegretQ& q, double lambda, double p, double a, double b) {
    const double qa = q(a);
    const double qb = q(b);
    return p * (lambda * qa - qb + lambda * p * (q(a - b) - qa + qb));
}

inline void require_zero_anchor(const TwoOutcomeSetup& s) {
    if (!s.profile.u.maps_zero_to_zero()) {
        throw Error(ErrorKind::DomainViolation, "closed forms assume u(0) = 0");
    }
}

inline double fear_factor(const TwoOutcomeSetup& s, double p) {
    if (!s.fear_enabled) return 1.0;
    double pfu = 1.0 - s.lambda * p;
    if (pfu < 0.0) pfu = 0.0;
    return s.profile.v(pfu);
}

}  // namespace detail

/// Closed-form Psi for f = (f1, lambda p; unknown, 1 - lambda p), g = (g1, p; 0, 1 - p).
inline double psi_closed_modified(const TwoOutcomeSetup& s, double p) {
    check_setup(s, p);
    if (s.variant != SetupVariant::f_has_unknown) {
        throw Error(ErrorKind::DomainViolation, "modified closed form needs the f_has_unknown variant");
    }
    detail::require_zero_anchor(s);
    const double a = detail::fear_factor(s, p) * s.profile.u(s.f1);
    return detail::two_outcome_form(s.profile.q, s.lambda, p, a, s.profile.u(s.g1));
}

inline double psi_closed_modified(const TwoOutcomeSetup& s) { return psi_closed_modified(s, s.p); }

/// Classical closed form Phi: both residual outcomes are zero.
inline double psi_closed_classical(const TwoOutcomeSetup& s, double p) {
    check_setup(s, p);
    detail::require_zero_anchor(s);
    return detail::two_outcome_form(s.profile.q, s.lambda, p, s.profile.u(s.f1), s.profile.u(s.g1));
}

inline double psi_closed_classical(const TwoOutcomeSetup& s) { return psi_closed_classical(s, s.p); }

/// Psi(p) for the setup: closed forms where they exist, the generic engine
/// for the g_has_unknown variant. Classical mode always evaluates Phi.
inline double psi_setup(const TwoOutcomeSetup& s, double p, Mode mode) {
    if (mode == Mode::classical) return psi_closed_classical(s, p);
    switch (s.variant) {
        case SetupVariant::f_has_unknown: return psi_closed_modified(s, p);
        case SetupVariant::both_zero: return psi_closed_classical(s, p);
        case SetupVariant::g_has_unknown: {
            const auto [f, g] = setup_prospects(s, p);
            return psi_modified(s.profile, f, g);
        }
    }
    return 0.0;
}

struct BreakEven {
    double p_bar;
    double residual;
    double lo;
    double hi;
    // Sign changes seen on the scan grid; more than one means p_bar is the
    // smallest of several roots.
    int sign_changes;
};

inline constexpr int kBreakEvenGrid = 1024;
inline constexpr double kBreakEvenResidual = 1e-10;
inline constexpr int kBreakEvenMaxIter = 200;

namespace detail {
inline int sign_of(double x) { return (x > 0.0) - (x < 0.0); }
}  // namespace detail

/// Scans p over (0,1] on a 1024-point grid for a sign change of Psi(p), then
/// bisects the first bracket. Throws NoRoot when Psi keeps one sign.
inline BreakEven find_break_even(const TwoOutcomeSetup& s, Mode mode = Mode::modified) {
    std::vector<double> ps(kBreakEvenGrid), vals(kBreakEvenGrid);
    for (int k = 0; k < kBreakEvenGrid; ++k) {
        ps[k] = static_cast<double>(k + 1) / kBreakEvenGrid;
        vals[k] = psi_setup(s, ps[k], mode);
    }

    int changes = 0;
    int last_sign = 0;
    std::optional<std::size_t> first;  // index of the right end of the first bracket
    for (std::size_t k = 0; k < vals.size(); ++k) {
        const int sg = detail::sign_of(vals[k]);
        if (sg == 0) {
            if (!first) first = k;
            continue;
        }
        if (last_sign != 0 && sg != last_sign) {
            ++changes;
            if (!first) first = k;
        }
        last_sign = sg;
    }
    if (!first) throw Error(ErrorKind::NoRoot, "Psi(p) keeps one sign on (0,1]");

    const std::size_t k = *first;
    if (vals[k] == 0.0) {
        const double lo = k > 0 ? ps[k - 1] : ps[k];
        return {ps[k], 0.0, lo, ps[k], std::max(changes, 1)};
    }
    double lo = ps[k - 1], hi = ps[k];
    double flo = vals[k - 1], fhi = vals[k];
    const double blo = lo, bhi = hi;
    for (int it = 0; it < kBreakEvenMaxIter; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = psi_setup(s, mid, mode);
        if (std::abs(fm) <= kBreakEvenResidual) return {mid, fm, blo, bhi, changes};
        if (detail::sign_of(fm) == detail::sign_of(flo)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    const bool take_lo = std::abs(flo) <= std::abs(fhi);
    const double best = take_lo ? flo : fhi;
    if (std::abs(best) > kBreakEvenResidual) {
        throw Error(ErrorKind::NoRoot, "bisection stalled above the 1e-10 residual; rescale utilities",
                    best);
    }
    return {take_lo ? lo : hi, best, blo, bhi, changes};
}

enum class Prop1Case { case_I, case_II, neither };

constexpr const char* to_string(Prop1Case c) {
    switch (c) {
        case Prop1Case::case_I: return "case_I";
        case Prop1Case::case_II: return "case_II";
        case Prop1Case::neither: return "neither";
    }
    return "?";
}

/// Side conditions of the ratio effect at probability p (p_fu = 1 - lambda p):
/// case I  f1 > g1 > 0 and 0 < v u(f1) < u(g1);
/// case II f1 < g1 < 0 and u(g1) < v u(f1) < 0.
inline Prop1Case check_prop1_conditions(const TwoOutcomeSetup& s, double p) {
    check_setup(s, p);
    const double uf = s.profile.u(s.f1);
    const double ug = s.profile.u(s.g1);
    const double a = detail::fear_factor(s, p) * uf;
    if (s.f1 > s.g1 && s.g1 > 0.0 && 0.0 < a && a < ug) return Prop1Case::case_I;
    if (s.f1 < s.g1 && s.g1 < 0.0 && ug < a && a < 0.0) return Prop1Case::case_II;
    return Prop1Case::neither;
}

inline Prop1Case check_prop1_conditions(const TwoOutcomeSetup& s) { return check_prop1_conditions(s, s.p); }

struct Prop1Violation {
    double p;
    double psi;
    Relation expected;
    Relation actual;
};

struct Prop1Report {
    BreakEven break_even;
    int checked = 0;
    int skipped = 0;
    std::vector<Prop1Violation> violations;
};

inline constexpr int kProp1Samples = 64;

/// Samples p on both sides of the break-even point and checks the predicted
/// strict preferences wherever the side conditions hold.
inline Prop1Report verify_prop1(const TwoOutcomeSetup& s) {
    Prop1Report report{};
    try {
        report.break_even = find_break_even(s, Mode::modified);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NoRoot) throw;
        throw Error(ErrorKind::HypothesisUnmet, std::string("no break-even probability: ") + e.what());
    }
    const double pb = report.break_even.p_bar;
    const int half = kProp1Samples / 2;
    for (int i = 0; i < kProp1Samples; ++i) {
        const bool above = i >= half;
        const double t = (static_cast<double>(i % half) + 0.5) / half;
        const double p = above ? pb + (1.0 - pb) * t : pb * t;
        if (p == pb) continue;
        const Prop1Case c = check_prop1_conditions(s, p);
        if (c == Prop1Case::neither) {
            ++report.skipped;
            continue;
        }
        ++report.checked;
        Relation expected = above ? Relation::f_strict : Relation::g_strict;
        if (c == Prop1Case::case_II) expected = reversed(expected);
        const double psi = psi_setup(s, p, Mode::modified);
        const Relation actual = classify(psi, s.profile.tie_eps);
        if (actual != expected) report.violations.push_back({p, psi, expected, actual});
    }
    if (report.checked == 0) {
        throw Error(ErrorKind::HypothesisUnmet, "side conditions fail at every sampled p");
    }
    return report;
}

struct Prop2Report {
    Relation baseline;  // classical relation at the starting p
    int k;              // first halving step with a reversal
    double p_k;
    double psi;
    double phi;
    bool conditions_hold;  // side conditions re-checked at p_k
};

inline constexpr int kProp2MaxHalvings = 40;

/// Halves p until the unknown-aware verdict is strictly opposite to the
/// classical one. Signs are compared raw so the scan does not depend on the
/// magnitude of the utilities.
inline Prop2Report verify_prop2(const TwoOutcomeSetup& s) {
    check_setup(s, s.p);
    Relation baseline;
    Prop1Case expected_case;
    if (s.f1 > s.g1 && s.g1 > 0.0) {
        baseline = Relation::f_strict;
        expected_case = Prop1Case::case_I;
    } else if (s.f1 < s.g1 && s.g1 < 0.0) {
        baseline = Relation::g_strict;
        expected_case = Prop1Case::case_II;
    } else {
        throw Error(ErrorKind::HypothesisUnmet, "needs f1 > g1 > 0 or f1 < g1 < 0");
    }
    const int base_sign = baseline == Relation::f_strict ? 1 : -1;
    if (detail::sign_of(psi_closed_classical(s, s.p)) != base_sign) {
        throw Error(ErrorKind::HypothesisUnmet, "classical baseline relation does not hold at the given p");
    }
    TwoOutcomeSetup modified = s;
    modified.variant = SetupVariant::f_has_unknown;
    for (int k = 0; k <= kProp2MaxHalvings; ++k) {
        const double pk = std::ldexp(s.p, -k);
        const double phi = psi_closed_classical(s, pk);
        const double psi = psi_closed_modified(modified, pk);
        if (detail::sign_of(phi) == base_sign && detail::sign_of(psi) == -base_sign) {
            return {baseline, k, pk, psi, phi, check_prop1_conditions(modified, pk) == expected_case};
        }
    }
    throw Error(ErrorKind::NoReversalFound, "no reversal down to p * 2^-40");
}

struct ReflectionReport {
    PreferenceVerdict original;
    PreferenceVerdict mirrored;
    bool holds;
};

/// Verdicts for f = (f1, pf; unknown, 1 - pf) vs g = (g1, pg; 0, 1 - pg) and for
/// the pair with outcomes negated. Requires the bilinear adjusted utility
/// (1 - p_u) x: identity u and linear fear.
inline ReflectionReport verify_reflection(double f1, double g1, double pf, double pg, const AgentProfile& profile) {
    if (profile.u.family() != UtilityFn::Family::identity || profile.v.family() != FearFn::Family::poly ||
        profile.v.exponent() != 1.0) {
        throw Error(ErrorKind::DomainViolation, "reflection check needs u:identity and v:poly:1");
    }
    auto build = [&](double sign) {
        Prospect f{{{Outcome::known(sign * f1), pf}, {Outcome::unknown(), 1.0 - pf}}, Interpretation::utility};
        Prospect g{{{Outcome::known(sign * g1), pg}, {Outcome::known(0.0), 1.0 - pg}}, Interpretation::utility};
        return std::pair{std::move(f), std::move(g)};
    };
    const auto [f, g] = build(1.0);
    const auto [fm, gm] = build(-1.0);
    ReflectionReport r{compare(profile, f, g), compare(profile, fm, gm), false};
    r.holds = r.mirrored.relation == reversed(r.original.relation);
    return r;
}

struct ReflectionSample {
    int instances = 0;
    int violations = 0;
    std::uint64_t first_violation = 0;  // sample index, valid when violations > 0
};

/// verify_reflection on random instances: f1, g1 in [-1, 1], pf, pg in (0, 1].
inline ReflectionSample sample_reflection(const AgentProfile& profile, int samples, std::uint64_t seed) {
    ReflectionSample out;
    for (int i = 0; i < samples; ++i) {
        SampleRng rng(seed, 6, static_cast<std::uint64_t>(i));
        const double f1 = rng.uniform(-1.0, 1.0);
        const double g1 = rng.uniform(-1.0, 1.0);
        const double pf = 1.0 - rng.uniform();
        const double pg = 1.0 - rng.uniform();
        ++out.instances;
        if (!verify_reflection(f1, g1, pf, pg, profile).holds) {
            if (out.violations++ == 0) out.first_violation = static_cast<std::uint64_t>(i);
        }
    }
    return out;
}

// Medical example: surgery f = (0.5, 0.6; 0.27, 0.4) and radiotherapy
// g = (0.7, 0.3; 0.28, 0.7) in utility units. An unknown branch of mass p_u
// takes p_u / 2 from each known branch. p_u = 1 is the fully unknown prospect.

inline Prospect revised_medical_prospect(double hi_utility, double hi_prob, double lo_utility, double lo_prob,
                                         double p_u) {
    if (!(p_u >= 0.0 && p_u <= 1.0)) throw Error(ErrorKind::DomainViolation, "p_u outside [0,1]", p_u);
    if (p_u == 1.0) return Prospect{{{Outcome::unknown(), 1.0}}, Interpretation::utility};
    const double ph = hi_prob - 0.5 * p_u;
    const double pl = lo_prob - 0.5 * p_u;
    if (ph < 0.0 || pl < 0.0) {
        throw Error(ErrorKind::DomainViolation, "revision drives a probability negative", p_u);
    }
    Prospect p{{{Outcome::known(hi_utility), ph}, {Outcome::known(lo_utility), pl}}, Interpretation::utility};
    if (p_u > 0.0) p.branches.push_back({Outcome::unknown(), p_u});
    return p;
}

inline Prospect surgery(double p_u = 0.0) { return revised_medical_prospect(0.5, 0.6, 0.27, 0.4, p_u); }
inline Prospect radiotherapy(double p_u = 0.0) { return revised_medical_prospect(0.7, 0.3, 0.28, 0.7, p_u); }

enum class SweepCase { I, II };

struct SweepTable {
    std::vector<double> p_u;
    std::vector<std::string> fear_names;
    std::vector<std::vector<double>> psi;  // psi[fear][grid index]
};

inline constexpr double kDefaultSweepMax = 0.5;

/// Psi against p_u for each fear function. Case I puts the unknown on surgery,
/// case II on radiotherapy. Grid nodes are pu_max * k / (grid - 1).
inline SweepTable sweep_pu(const AgentProfile& profile, SweepCase which, const std::vector<FearFn>& fears,
                           int grid, double pu_max = kDefaultSweepMax) {
    if (fears.empty()) throw Error(ErrorKind::Usage, "at least one fear function is required");
    if (grid < 2) throw Error(ErrorKind::Usage, "grid size must be at least 2");
    if (!(pu_max > 0.0 && pu_max <= 1.0)) throw Error(ErrorKind::DomainViolation, "p_u range outside (0,1]", pu_max);
    SweepTable t;
    t.p_u.reserve(grid);
    for (int k = 0; k < grid; ++k) t.p_u.push_back(pu_max * k / (grid - 1));
    for (const FearFn& v : fears) {
        AgentProfile prof = profile;
        prof.v = v;
        t.fear_names.push_back(v.name());
        std::vector<double> col;
        col.reserve(grid);
        for (double pu : t.p_u) {
            col.push_back(which == SweepCase::I ? psi_modified(prof, surgery(pu), radiotherapy())
                                                : psi_modified(prof, surgery(), radiotherapy(pu)));
        }
        t.psi.push_back(std::move(col));
    }
    return t;
}

struct ContourTable {
    std::vector<double> p_fu;
    std::vector<double> p_gu;
    std::vector<std::string> fear_names;
    // psi[fear][i * p_gu.size() + j] for p_fu[i], p_gu[j]
    std::vector<std::vector<double>> psi;
};

/// Psi over a p_fu x p_gu grid with unknowns on both treatments, row-major
/// in p_fu.
inline ContourTable sweep_contour(const AgentProfile& profile, const std::vector<FearFn>& fears,
                                  std::vector<double> p_fu, std::vector<double> p_gu) {
    if (fears.empty()) throw Error(ErrorKind::Usage, "at least one fear function is required");
    if (p_fu.empty() || p_gu.empty()) throw Error(ErrorKind::Usage, "contour axes must be non-empty");
    ContourTable t{std::move(p_fu), std::move(p_gu), {}, {}};
    for (const FearFn& v : fears) {
        AgentProfile prof = profile;
        prof.v = v;
        t.fear_names.push_back(v.name());
        std::vector<double> col;
        col.reserve(t.p_fu.size() * t.p_gu.size());
        for (double a : t.p_fu) {
            const Prospect f = surgery(a);
            for (double b : t.p_gu) col.push_back(psi_modified(prof, f, radiotherapy(b)));
        }
        t.psi.push_back(std::move(col));
    }
    return t;
}

/// Uniform axis of `points` nodes over [0, max].
inline std::vector<double> uniform_axis(int points, double max) {
    if (points < 2) throw Error(ErrorKind::Usage, "grid size must be at least 2");
    std::vector<double> axis;
    axis.reserve(points);
    for (int k = 0; k < points; ++k) axis.push_back(max * k / (points - 1));
    return axis;
}

}  // namespace regret
