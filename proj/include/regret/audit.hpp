#pragma once

// Sampled checks of the behavioral-foundation properties: completeness,
// weak/strong monotonicity, d-transitivity, trade-off consistency and a
// heuristic continuity probe. Every sample draws from its own seeded stream so
// a finding can be replayed from (seed, index) alone.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "regret/engine.hpp"
#include "regret/error.hpp"
#include "regret/prospect.hpp"
#include "regret/random.hpp"

namespace regret {

struct AuditConfig {
    int samples = 10000;
    double lo = -1.0;
    double hi = 1.0;
    int max_branches = 4;
    std::uint64_t seed = 42;
    AgentProfile profile;
};

struct Finding {
    std::string audit;
    std::uint64_t seed;
    std::uint64_t index;
    std::string detail;
};

struct AuditReport {
    std::string name;
    bool heuristic = false;
    int evaluated = 0;
    int skipped = 0;
    int indifferent = 0;
    std::vector<Finding> findings;
};

inline constexpr double kTradeoffTolerance = 1e-9;
inline constexpr double kContinuityStep = 1e-9;
inline constexpr double kContinuityBand = 1e-6;

namespace detail {

inline std::string fmt17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void check_config(const AuditConfig& cfg) {
    if (cfg.samples < 1) throw Error(ErrorKind::Usage, "audit sample count must be >= 1");
    if (!(cfg.lo < cfg.hi)) throw Error(ErrorKind::Usage, "audit outcome range needs lo < hi");
    if (cfg.max_branches < 2) throw Error(ErrorKind::Usage, "audit needs max_branches >= 2");
}

// Stream identifiers keep the audits' random draws independent of each other.
enum : std::uint32_t {
    kStreamCompleteness = 1,
    kStreamMonotonicity = 2,
    kStreamTransitivity = 3,
    kStreamTradeoff = 4,
    kStreamContinuity = 5,
};

inline std::vector<double> random_probs(SampleRng& rng, int n, double null_chance) {
    std::vector<double> w(n);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        w[i] = (i > 0 && rng.chance(null_chance)) ? 0.0 : rng.uniform(0.05, 1.0);
        total += w[i];
    }
    CompensatedSum acc;
    for (int i = 0; i + 1 < n; ++i) {
        w[i] /= total;
        acc.add(w[i]);
    }
    const double last = 1.0 - acc.value();
    w[n - 1] = (w[n - 1] == 0.0 || last < 0.0) ? 0.0 : last;
    if (w[n - 1] == 0.0 && last > 0.0) w[0] += last;
    return w;
}

inline Outcome random_outcome(SampleRng& rng, const AuditConfig& cfg, double unknown_chance) {
    if (rng.chance(unknown_chance)) return Outcome::unknown();
    return Outcome::known(rng.uniform(cfg.lo, cfg.hi));
}

inline Prospect random_prospect(SampleRng& rng, const AuditConfig& cfg) {
    const int n = rng.integer(1, cfg.max_branches);
    const auto probs = random_probs(rng, n, 0.0);
    Prospect p;
    for (int i = 0; i < n; ++i) p.branches.push_back({random_outcome(rng, cfg, 0.2), probs[i]});
    return p;
}

}  // namespace detail

/// Prospects laid out on one shared state partition. Column c holds the
/// outcome of prospect c in each state; a zero-probability state is null.
struct StateTable {
    std::vector<double> probs;
    std::vector<std::vector<Outcome>> columns;

    double unknown_mass(std::size_t c) const {
        CompensatedSum m;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            if (columns[c][i].is_unknown()) m.add(probs[i]);
        }
        const double v = m.value();
        return v > 1.0 ? 1.0 : v;
    }

    std::vector<double> adjusted(const AgentProfile& profile, std::size_t c) const {
        const double pu = unknown_mass(c);
        std::vector<double> out(probs.size());
        for (std::size_t i = 0; i < probs.size(); ++i) {
            out[i] = adjusted_utility(profile, columns[c][i], pu, Interpretation::money, i);
        }
        return out;
    }
};

inline double psi_aligned(const RegretQ& q, const std::vector<double>& probs, const std::vector<double>& uf,
                          const std::vector<double>& ug) {
    std::vector<AdjustedRow> rows(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) rows[i] = {probs[i], uf[i], ug[i]};
    return psi_of_rows(q, rows);
}

/// A pair on a shared partition with per-state dominance flags.
struct DominancePair {
    StateTable table;  // column 0 dominates column 1
    std::vector<bool> weak;
    std::vector<bool> strict;
    std::vector<bool> non_null;

    bool premise_weak() const {
        for (bool w : weak) {
            if (!w) return false;
        }
        return true;
    }
    bool premise_strict() const {
        if (!premise_weak()) return false;
        for (std::size_t i = 0; i < strict.size(); ++i) {
            if (strict[i] && non_null[i]) return true;
        }
        return false;
    }
};

namespace detail {

// Builds a column whose adjusted utilities sit on one side of `base`
// (above when direction = +1, below when -1). Returns nullopt when the
// construction leaves finite outcomes.
inline std::optional<std::vector<Outcome>> dominating_column(SampleRng& rng, const AgentProfile& profile,
                                                             const std::vector<double>& probs,
                                                             const std::vector<double>& base, int direction,
                                                             bool strict_on_null_only, double span) {
    const std::size_t n = probs.size();
    std::vector<Outcome> col(n, Outcome::known(0.0));
    // Unknown (utility zero) is admissible only where zero is on the right side.
    std::vector<bool> unknown(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        if (direction * base[i] <= 0.0 && rng.chance(0.3)) unknown[i] = true;
    }
    CompensatedSum mass;
    for (std::size_t i = 0; i < n; ++i) {
        if (unknown[i]) mass.add(probs[i]);
    }
    const double pu = std::min(1.0, mass.value());

    std::vector<bool> strict(n, false);
    bool any_strict = false;
    for (std::size_t i = 0; i < n; ++i) {
        if (unknown[i]) continue;
        const bool null_state = probs[i] == 0.0;
        if (strict_on_null_only ? null_state : (!null_state && rng.chance(0.5))) {
            strict[i] = true;
            any_strict = true;
        }
    }
    if (!strict_on_null_only && !any_strict) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!unknown[i] && probs[i] > 0.0) {
                strict[i] = true;
                break;
            }
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (unknown[i]) {
            col[i] = Outcome::unknown();
            continue;
        }
        const double v = profile.fear_for(i)(pu);
        if (v == 0.0) return std::nullopt;
        const double delta = strict[i] ? rng.uniform(0.05, 0.5) * span : 0.0;
        const double target = base[i] + direction * delta;
        double x = profile.u.inverse(target / v);
        // Rounding in u^-1 can land one ulp on the wrong side.
        for (int step = 0; step < 64; ++step) {
            if (!std::isfinite(x)) return std::nullopt;
            const double adj = v * profile.u(x);
            if (direction * (adj - base[i]) >= 0.0) break;
            x = std::nextafter(x, direction > 0 ? std::numeric_limits<double>::infinity()
                                                : -std::numeric_limits<double>::infinity());
        }
        if (!std::isfinite(x)) return std::nullopt;
        col[i] = Outcome::known(x);
    }
    return col;
}

inline double utility_span(const AuditConfig& cfg) {
    return std::abs(cfg.profile.u(cfg.hi) - cfg.profile.u(cfg.lo));
}

inline StateTable random_table(SampleRng& rng, const AuditConfig& cfg, int columns, int min_states) {
    const int n = rng.integer(min_states, cfg.max_branches);
    StateTable t;
    t.probs = random_probs(rng, n, 0.15);
    t.columns.resize(columns);
    for (auto& col : t.columns) {
        for (int i = 0; i < n; ++i) col.push_back(random_outcome(rng, cfg, 0.2));
    }
    return t;
}

}  // namespace detail

/// Builds f dominating g (column 0 over column 1) on a random partition.
/// With strict_on_null_only the strict improvements are confined to null
/// states, so only the weak conclusion applies. Returns nullopt when the
/// draw does not have the requested shape.
inline std::optional<DominancePair> make_dominance_pair(SampleRng& rng, const AuditConfig& cfg,
                                                        bool strict_on_null_only) {
    StateTable t = detail::random_table(rng, cfg, 1, 1);
    const auto ug = t.adjusted(cfg.profile, 0);
    auto f = detail::dominating_column(rng, cfg.profile, t.probs, ug, +1, strict_on_null_only,
                                       detail::utility_span(cfg));
    if (!f) return std::nullopt;
    DominancePair d;
    d.table.probs = t.probs;
    d.table.columns = {std::move(*f), std::move(t.columns[0])};
    const auto uf = d.table.adjusted(cfg.profile, 0);
    for (std::size_t i = 0; i < uf.size(); ++i) {
        d.weak.push_back(uf[i] >= ug[i]);
        d.strict.push_back(uf[i] > ug[i]);
        d.non_null.push_back(d.table.probs[i] > 0.0);
    }
    // Rounding in u^-1 or an unknown below a negative base can turn an
    // intended tie into a strict improvement; reject such draws.
    if (strict_on_null_only ? d.premise_strict() : !d.premise_strict()) return std::nullopt;
    return d;
}

/// A'1: every sampled pair gets a verdict in at least one direction.
inline AuditReport audit_completeness(const AuditConfig& cfg) {
    detail::check_config(cfg);
    AuditReport r{"completeness", false, 0, 0, 0, {}};
    const double eps = cfg.profile.tie_eps;
    for (int i = 0; i < cfg.samples; ++i) {
        SampleRng rng(cfg.seed, detail::kStreamCompleteness, i);
        const Prospect f = detail::random_prospect(rng, cfg);
        const Prospect g = detail::random_prospect(rng, cfg);
        double fg, gf;
        try {
            fg = psi_modified(cfg.profile, f, g);
            gf = psi_modified(cfg.profile, g, f);
        } catch (const Error&) {
            ++r.skipped;
            continue;
        }
        ++r.evaluated;
        if (!std::isfinite(fg) || !std::isfinite(gf)) {
            r.findings.push_back({r.name, cfg.seed, static_cast<std::uint64_t>(i), "non-finite Psi"});
            continue;
        }
        const Relation a = classify(fg, eps);
        const Relation b = classify(gf, eps);
        if (a == Relation::indifferent && b == Relation::indifferent) ++r.indifferent;
        if (a == Relation::g_strict && b == Relation::g_strict) {
            r.findings.push_back({r.name, cfg.seed, static_cast<std::uint64_t>(i),
                                  "neither f>=g nor g>=f: Psi(f,g)=" + detail::fmt17(fg) +
                                      " Psi(g,f)=" + detail::fmt17(gf)});
        } else if (a == Relation::f_strict && b == Relation::f_strict) {
            r.findings.push_back({r.name, cfg.seed, static_cast<std::uint64_t>(i),
                                  "f>g and g>f at once: Psi(f,g)=" + detail::fmt17(fg) +
                                      " Psi(g,f)=" + detail::fmt17(gf)});
        }
    }
    return r;
}

/// A'3/A'4: state-wise dominance in adjusted utility gives a weak preference,
/// strictly when a non-null state improves. Equal pairs must be indifferent.
inline AuditReport audit_monotonicity(const AuditConfig& cfg) {
    detail::check_config(cfg);
    AuditReport r{"monotonicity", false, 0, 0, 0, {}};
    for (int i = 0; i < cfg.samples; ++i) {
        SampleRng rng(cfg.seed, detail::kStreamMonotonicity, i);
        const bool null_only = rng.chance(0.1);
        const auto pair = make_dominance_pair(rng, cfg, null_only);
        if (!pair || !pair->premise_weak()) {
            ++r.skipped;
            continue;
        }
        ++r.evaluated;
        const auto uf = pair->table.adjusted(cfg.profile, 0);
        const auto ug = pair->table.adjusted(cfg.profile, 1);
        const double psi = psi_aligned(cfg.profile.q, pair->table.probs, uf, ug);
        const double same = psi_aligned(cfg.profile.q, pair->table.probs, ug, ug);
        const auto idx = static_cast<std::uint64_t>(i);
        if (!(psi >= 0.0)) {
            r.findings.push_back({r.name, cfg.seed, idx, "weak dominance but Psi=" + detail::fmt17(psi)});
        } else if (pair->premise_strict() && !(psi > 0.0)) {
            r.findings.push_back({r.name, cfg.seed, idx, "strict dominance but Psi=" + detail::fmt17(psi)});
        }
        if (std::abs(same) > cfg.profile.tie_eps) {
            r.findings.push_back({r.name, cfg.seed, idx, "equal pair but Psi=" + detail::fmt17(same)});
        }
    }
    return r;
}

/// D-transitivity: f >=_SD g and g >= h imply f > h, and f >= g with
/// g >=_SD h implies f > h. Requires a convex Q.
inline AuditReport audit_d_transitivity(const AuditConfig& cfg) {
    detail::check_config(cfg);
    if (!convex_on_positive(cfg.profile.q)) {
        throw Error(ErrorKind::ConvexityRequired, "d-transitivity audit needs Q convex on positive arguments");
    }
    AuditReport r{"d-transitivity", false, 0, 0, 0, {}};
    const double span = detail::utility_span(cfg);
    const RegretQ& q = cfg.profile.q;
    for (int i = 0; i < cfg.samples; ++i) {
        SampleRng rng(cfg.seed, detail::kStreamTransitivity, i);
        const bool mirrored = (i % 2) == 1;
        StateTable t = detail::random_table(rng, cfg, 2, 1);
        auto a = t.adjusted(cfg.profile, 0);
        auto b = t.adjusted(cfg.profile, 1);
        // Order the two random columns so the weak-preference premise holds.
        if (psi_aligned(q, t.probs, a, b) < 0.0) {
            std::swap(t.columns[0], t.columns[1]);
            std::swap(a, b);
        }
        // Unmirrored: (g, h) = (a, b), f dominates g. Mirrored: (f, g) = (a, b), g dominates h.
        const auto& anchor = mirrored ? b : a;
        auto built = detail::dominating_column(rng, cfg.profile, t.probs, anchor, mirrored ? -1 : +1, false, span);
        if (!built) {
            ++r.skipped;
            continue;
        }
        StateTable ext{t.probs, {std::move(*built)}};
        const auto c = ext.adjusted(cfg.profile, 0);
        bool strict_nonnull = false;
        bool weak = true;
        for (std::size_t k = 0; k < c.size(); ++k) {
            const double gap = mirrored ? anchor[k] - c[k] : c[k] - anchor[k];
            if (gap < 0.0) weak = false;
            if (gap > 0.0 && t.probs[k] > 0.0) strict_nonnull = true;
        }
        if (!weak || !strict_nonnull) {
            ++r.skipped;
            continue;
        }
        ++r.evaluated;
        const double psi = mirrored ? psi_aligned(q, t.probs, a, c) : psi_aligned(q, t.probs, c, b);
        if (!(psi > 0.0)) {
            r.findings.push_back({r.name, cfg.seed, static_cast<std::uint64_t>(i),
                                  std::string(mirrored ? "f>=g, g>=SD h" : "f>=SD g, g>=h") +
                                      " but Psi(f,h)=" + detail::fmt17(psi)});
        }
    }
    return r;
}

namespace detail {

inline int signum(double x) { return (x > 0.0) - (x < 0.0); }

// Root of the strictly monotone fn on [lo, hi] by bisection; nullopt when
// the endpoints do not bracket a sign change.
template <class Fn>
std::optional<double> bisect_root(const Fn& fn, double lo, double hi) {
    double flo = fn(lo), fhi = fn(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (signum(flo) == signum(fhi)) return std::nullopt;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = fn(mid);
        if (fm == 0.0) return mid;
        if (signum(fm) == signum(flo)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    return std::abs(flo) <= std::abs(fhi) ? lo : hi;
}

// Like bisect_root, but widens [lo, hi] symmetrically until it brackets a
// sign change.
template <class Fn>
std::optional<double> bisect_root_widening(const Fn& fn, double lo, double hi) {
    for (int grow = 0; grow < 40; ++grow) {
        if (signum(fn(lo)) != signum(fn(hi))) return bisect_root(fn, lo, hi);
        const double w = hi - lo;
        lo -= w;
        hi += w;
    }
    return std::nullopt;
}

}  // namespace detail

/// Trade-off consistency on adjusted utilities: substitutions alpha..delta
/// are adjusted-utility values placed in state i. Premises are made to hold
/// by root-solving, then gamma_i x ~ delta_i y is checked.
inline AuditReport audit_tradeoff_consistency(const AuditConfig& cfg) {
    detail::check_config(cfg);
    AuditReport r{"tradeoff-consistency", false, 0, 0, 0, {}};
    const RegretQ& q = cfg.profile.q;
    const double ulo = std::min(cfg.profile.u(cfg.lo), 0.0);
    const double uhi = std::max(cfg.profile.u(cfg.hi), 0.0);
    for (int s = 0; s < cfg.samples; ++s) {
        SampleRng rng(cfg.seed, detail::kStreamTradeoff, s);
        const StateTable t = detail::random_table(rng, cfg, 4, 2);
        const std::size_t n = t.probs.size();
        std::vector<std::size_t> live;
        for (std::size_t k = 0; k < n; ++k) {
            if (t.probs[k] > 0.0) live.push_back(k);
        }
        if (live.size() < 2) {
            ++r.skipped;
            continue;
        }
        const std::size_t i = live[rng.integer(0, static_cast<int>(live.size()) - 1)];
        std::size_t j = live[rng.integer(0, static_cast<int>(live.size()) - 1)];
        if (j == i) j = live[0] == i ? live[1] : live[0];

        auto uf = t.adjusted(cfg.profile, 0);
        auto ug = t.adjusted(cfg.profile, 1);
        auto ux = t.adjusted(cfg.profile, 2);
        auto uy = t.adjusted(cfg.profile, 3);

        auto psi_with = [&](std::vector<double> a, std::vector<double> b, double ai, double bi) {
            a[i] = ai;
            b[i] = bi;
            return psi_aligned(q, t.probs, a, b);
        };

        const double alpha = rng.uniform(ulo, uhi);
        const double gamma = rng.uniform(ulo, uhi);
        const auto beta =
            detail::bisect_root_widening([&](double b) { return psi_with(uf, ug, alpha, b); }, ulo, uhi);
        const auto delta =
            detail::bisect_root_widening([&](double d) { return psi_with(uf, ug, gamma, d); }, ulo, uhi);
        if (!beta || !delta) {
            ++r.skipped;
            continue;
        }
        // Tune y in state j so that alpha_i x ~ beta_i y.
        const auto yj = detail::bisect_root_widening(
            [&](double y) {
                auto yy = uy;
                yy[j] = y;
                return psi_with(ux, yy, alpha, *beta);
            },
            ulo, uhi);
        if (!yj) {
            ++r.skipped;
            continue;
        }
        uy[j] = *yj;
        ++r.evaluated;

        const auto idx = static_cast<std::uint64_t>(s);
        const double premise = psi_with(ux, uy, alpha, *beta);
        const double conclusion = psi_with(ux, uy, gamma, *delta);
        const double gap = (alpha - *beta) - (gamma - *delta);
        if (std::abs(conclusion) > kTradeoffTolerance) {
            r.findings.push_back({r.name, cfg.seed, idx,
                                  "premises hold (residual " + detail::fmt17(premise) +
                                      ") but Psi(gamma_i x, delta_i y)=" + detail::fmt17(conclusion)});
        }
        if (std::abs(gap) > kTradeoffTolerance) {
            r.findings.push_back({r.name, cfg.seed, idx,
                                  "utility differences disagree: (alpha-beta)-(gamma-delta)=" + detail::fmt17(gap)});
        }
    }
    return r;
}

/// A'5, heuristic only: nudging f's known outcomes by 1e-9 must not jump
/// between the two strict classes while both values stay outside the 1e-6
/// band. Results are warnings, not counterexamples.
inline AuditReport audit_continuity(const AuditConfig& cfg) {
    detail::check_config(cfg);
    AuditReport r{"continuity", true, 0, 0, 0, {}};
    for (int i = 0; i < cfg.samples; ++i) {
        SampleRng rng(cfg.seed, detail::kStreamContinuity, i);
        const Prospect f = detail::random_prospect(rng, cfg);
        const Prospect g = detail::random_prospect(rng, cfg);
        Prospect nudged = f;
        for (Branch& b : nudged.branches) {
            if (b.outcome.is_known()) {
                b.outcome = Outcome::known(b.outcome.value() + kContinuityStep * rng.uniform(-1.0, 1.0));
            }
        }
        const double a = psi_modified(cfg.profile, f, g);
        const double b = psi_modified(cfg.profile, nudged, g);
        ++r.evaluated;
        const Relation ra = classify(a, cfg.profile.tie_eps);
        const Relation rb = classify(b, cfg.profile.tie_eps);
        if (ra != Relation::indifferent && rb == reversed(ra) && std::abs(a) > kContinuityBand &&
            std::abs(b) > kContinuityBand) {
            r.findings.push_back({r.name, cfg.seed, static_cast<std::uint64_t>(i),
                                  "verdict jumped: Psi=" + detail::fmt17(a) + " -> " + detail::fmt17(b)});
        }
    }
    return r;
}

/// Runs every audit. d-transitivity is reported as skipped entirely (with a
/// note in its name) when Q is not convex.
inline std::vector<AuditReport> run_all_audits(const AuditConfig& cfg) {
    std::vector<AuditReport> out;
    out.push_back(audit_completeness(cfg));
    out.push_back(audit_monotonicity(cfg));
    try {
        out.push_back(audit_d_transitivity(cfg));
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::ConvexityRequired) throw;
        out.push_back(AuditReport{"d-transitivity (skipped: Q not convex)", false, 0, cfg.samples, 0, {}});
    }
    out.push_back(audit_tradeoff_consistency(cfg));
    out.push_back(audit_continuity(cfg));
    return out;
}

inline std::size_t counterexamples(const std::vector<AuditReport>& reports) {
    std::size_t n = 0;
    for (const auto& r : reports) {
        if (!r.heuristic) n += r.findings.size();
    }
    return n;
}

inline void write_audit_text(std::ostream& os, const std::vector<AuditReport>& reports, const AuditConfig& cfg) {
    os << "audit seed=" << cfg.seed << " samples=" << cfg.samples << " range=[" << detail::fmt17(cfg.lo) << ","
       << detail::fmt17(cfg.hi) << "] max_branches=" << cfg.max_branches << " profile=" << cfg.profile.describe()
       << "\n";
    for (const auto& r : reports) {
        os << r.name << (r.heuristic ? " (heuristic)" : "") << ": evaluated=" << r.evaluated
           << " skipped=" << r.skipped;
        if (r.name == "completeness") os << " indifferent=" << r.indifferent;
        os << (r.heuristic ? " warnings=" : " counterexamples=") << r.findings.size() << "\n";
    }
    for (const auto& r : reports) {
        for (const auto& f : r.findings) {
            os << (r.heuristic ? "warning " : "finding ") << f.audit << " seed=" << f.seed << " index=" << f.index
               << ": " << f.detail << "\n";
        }
    }
    const auto n = counterexamples(reports);
    os << "result: " << (n == 0 ? "PASS" : "FAIL") << " (" << n << " counterexamples)\n";
}

inline void write_audit_csv(std::ostream& os, const std::vector<AuditReport>& reports) {
    os << "audit,kind,seed,index,detail\n";
    for (const auto& r : reports) {
        for (const auto& f : r.findings) {
            os << f.audit << "," << (r.heuristic ? "warning" : "counterexample") << "," << f.seed << "," << f.index
               << ",\"" << f.detail << "\"\n";
        }
    }
}

}  // namespace regret
