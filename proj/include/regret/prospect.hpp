#pragma once

// Prospects whose branches may carry an unknown outcome, and the joint
// decision matrix of two independent prospects.

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "regret/error.hpp"
#include "regret/summation.hpp"

namespace regret {

inline constexpr double kProbabilityTolerance = 1e-9;

class Outcome {
public:
    static Outcome known(double value) { return Outcome(value); }
    static Outcome unknown() { return Outcome(); }

    bool is_unknown() const noexcept { return !value_.has_value(); }
    bool is_known() const noexcept { return value_.has_value(); }

    // Precondition: is_known().
    double value() const { return *value_; }

    friend bool operator==(const Outcome&, const Outcome&) = default;

private:
    Outcome() = default;
    explicit Outcome(double v) : value_(v) {}

    std::optional<double> value_;
};

// Whether known outcome values are money (passed through u) or already utilities.
enum class Interpretation { money, utility };

struct Branch {
    Outcome outcome;
    double prob;

    friend bool operator==(const Branch&, const Branch&) = default;
};

struct Prospect {
    std::vector<Branch> branches;
    Interpretation interpretation = Interpretation::money;

    friend bool operator==(const Prospect&, const Prospect&) = default;
};

/// Checks the prospect invariants. Returns the first violation found, or
/// nullopt when the prospect is valid.
inline std::optional<Error> validate(const Prospect& p) {
    if (p.branches.empty()) {
        return Error(ErrorKind::EmptyProspect, "prospect has no branches");
    }
    CompensatedSum total;
    for (const Branch& b : p.branches) {
        if (b.outcome.is_known() && !std::isfinite(b.outcome.value())) {
            return Error(ErrorKind::NonFiniteOutcome, "outcome is not finite");
        }
        if (!std::isfinite(b.prob)) {
            return Error(ErrorKind::NegativeProbability, "probability is not finite", b.prob);
        }
        if (b.prob < 0.0) {
            return Error(ErrorKind::NegativeProbability,
                         "negative probability " + std::to_string(b.prob), b.prob);
        }
        if (b.prob > 1.0) {
            return Error(ErrorKind::ProbabilitySumMismatch,
                         "branch probability " + std::to_string(b.prob) + " exceeds 1", b.prob);
        }
        total.add(b.prob);
    }
    const double sum = total.value();
    if (std::abs(sum - 1.0) > kProbabilityTolerance) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", sum);
        return Error(ErrorKind::ProbabilitySumMismatch,
                     std::string("probabilities sum to ") + buf, sum);
    }
    return std::nullopt;
}

inline void require_valid(const Prospect& p) {
    if (auto err = validate(p)) throw *err;
}

/// Rescales branch probabilities so they sum to exactly one. Only ever invoked
/// on explicit request; validation never normalizes.
inline Prospect normalized(Prospect p) {
    if (p.branches.empty()) throw Error(ErrorKind::EmptyProspect, "prospect has no branches");
    CompensatedSum total;
    for (const Branch& b : p.branches) {
        if (!(b.prob >= 0.0) || !std::isfinite(b.prob)) {
            throw Error(ErrorKind::NegativeProbability, "cannot normalize a negative probability", b.prob);
        }
        total.add(b.prob);
    }
    const double sum = total.value();
    if (!(sum > 0.0)) {
        throw Error(ErrorKind::ProbabilitySumMismatch, "probabilities sum to zero", sum);
    }
    for (Branch& b : p.branches) b.prob /= sum;
    return p;
}

/// Total probability on unknown branches.
inline double unknown_mass(const Prospect& p) {
    require_valid(p);
    CompensatedSum mass;
    for (const Branch& b : p.branches) {
        if (b.outcome.is_unknown()) mass.add(b.prob);
    }
    // Guard against a compensated sum landing a hair above one.
    const double m = mass.value();
    return m > 1.0 ? 1.0 : m;
}

inline bool has_unknown(const Prospect& p) {
    for (const Branch& b : p.branches) {
        if (b.outcome.is_unknown()) return true;
    }
    return false;
}

struct MatrixRow {
    double prob;
    Outcome outcome_f;
    Outcome outcome_g;
    // Branch positions in the source prospects.
    std::size_t branch_f = 0;
    std::size_t branch_g = 0;
};

struct DecisionMatrix {
    std::vector<MatrixRow> rows;
};

/// Joint state table of two independent prospects, f-branch-major. Rows with
/// zero probability are dropped.
inline DecisionMatrix joint_matrix(const Prospect& f, const Prospect& g) {
    require_valid(f);
    require_valid(g);
    DecisionMatrix m;
    m.rows.reserve(f.branches.size() * g.branches.size());
    for (std::size_t i = 0; i < f.branches.size(); ++i) {
        for (std::size_t j = 0; j < g.branches.size(); ++j) {
            const double prob = f.branches[i].prob * g.branches[j].prob;
            if (prob == 0.0) continue;
            m.rows.push_back({prob, f.branches[i].outcome, g.branches[j].outcome, i, j});
        }
    }
    return m;
}

}  // namespace regret
