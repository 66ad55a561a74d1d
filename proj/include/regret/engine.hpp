#pragma once

// Fear-adjusted utilities and the regret functional Psi for a pair of
// prospects, in both the classical and the unknown-aware form.

#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "regret/error.hpp"
#include "regret/functions.hpp"
#include "regret/prospect.hpp"
#include "regret/summation.hpp"

namespace regret {

inline constexpr double kDefaultTieEps = 1e-12;

struct AgentProfile {
    UtilityFn u = UtilityFn::identity();
    FearFn v = FearFn::linear();
    RegretQ q = RegretQ::power_odd(3);
    double tie_eps = kDefaultTieEps;
    // Optional per-branch fear functions: branch i of a prospect uses
    // fear_overrides[i] when present, the common v otherwise.
    std::vector<FearFn> fear_overrides;

    const FearFn& fear_for(std::size_t branch) const {
        return branch < fear_overrides.size() ? fear_overrides[branch] : v;
    }

    std::string describe() const { return u.name() + " " + v.name() + " " + q.name(); }
};

enum class Relation { f_strict, g_strict, indifferent };

constexpr std::string_view symbol(Relation r) {
    switch (r) {
        case Relation::f_strict: return "f>g";
        case Relation::g_strict: return "f<g";
        case Relation::indifferent: return "f~g";
    }
    return "?";
}

constexpr Relation reversed(Relation r) {
    switch (r) {
        case Relation::f_strict: return Relation::g_strict;
        case Relation::g_strict: return Relation::f_strict;
        case Relation::indifferent: return Relation::indifferent;
    }
    return r;
}

struct PreferenceVerdict {
    double psi;
    Relation relation;
};

inline Relation classify(double psi, double tie_eps) {
    if (psi > tie_eps) return Relation::f_strict;
    if (psi < -tie_eps) return Relation::g_strict;
    return Relation::indifferent;
}

enum class Mode { classical, modified };

/// Adjusted utility of one outcome: 0 for unknown, v(p_u) * u(x) otherwise.
inline double adjusted_utility(const AgentProfile& profile, const Outcome& outcome, double p_u_of_owner,
                               Interpretation interpretation, std::size_t branch = 0) {
    if (!(p_u_of_owner >= 0.0 && p_u_of_owner <= 1.0)) {
        throw Error(ErrorKind::DomainViolation, "unknown mass outside [0,1]", p_u_of_owner);
    }
    if (outcome.is_unknown()) return 0.0;
    const double base = interpretation == Interpretation::money ? profile.u(outcome.value()) : outcome.value();
    return profile.fear_for(branch)(p_u_of_owner) * base;
}

/// One state of an aligned comparison: probability and the two adjusted utilities.
struct AdjustedRow {
    double prob;
    double utility_f;
    double utility_g;
};

/// Psi = sum_i p_i Q(utility_f_i - utility_g_i), accumulated in row order.
inline double psi_of_rows(const RegretQ& q, std::span<const AdjustedRow> rows) {
    CompensatedSum acc;
    for (const AdjustedRow& r : rows) acc.add(r.prob * q(r.utility_f - r.utility_g));
    return acc.value();
}

inline std::vector<AdjustedRow> adjusted_rows(const AgentProfile& profile, const Prospect& f, const Prospect& g) {
    const DecisionMatrix m = joint_matrix(f, g);
    const double pfu = unknown_mass(f);
    const double pgu = unknown_mass(g);
    std::vector<AdjustedRow> rows;
    rows.reserve(m.rows.size());
    for (const MatrixRow& r : m.rows) {
        rows.push_back({r.prob,
                        adjusted_utility(profile, r.outcome_f, pfu, f.interpretation, r.branch_f),
                        adjusted_utility(profile, r.outcome_g, pgu, g.interpretation, r.branch_g)});
    }
    return rows;
}

inline double psi_modified(const AgentProfile& profile, const Prospect& f, const Prospect& g) {
    const auto rows = adjusted_rows(profile, f, g);
    return psi_of_rows(profile.q, rows);
}

/// Classical regret functional. With no unknown branches the fear factor is
/// v(0) = 1, so this shares the modified code path.
inline double psi_classical(const AgentProfile& profile, const Prospect& f, const Prospect& g) {
    if (has_unknown(f) || has_unknown(g)) {
        throw Error(ErrorKind::UnknownOutcomePresent, "classical mode requires fully known prospects");
    }
    return psi_modified(profile, f, g);
}

inline PreferenceVerdict compare(const AgentProfile& profile, const Prospect& f, const Prospect& g,
                                 Mode mode = Mode::modified) {
    if (!(profile.tie_eps > 0.0)) throw Error(ErrorKind::DomainViolation, "tie_eps must be positive");
    const double psi = mode == Mode::classical ? psi_classical(profile, f, g) : psi_modified(profile, f, g);
    return {psi, classify(psi, profile.tie_eps)};
}

}  // namespace regret
