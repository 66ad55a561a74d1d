#include <catch_amalgamated.hpp>

#include <cmath>

#include "oracle.hpp"
#include "regret/analysis.hpp"

using namespace regret;
using Catch::Matchers::WithinAbs;

namespace {

TwoOutcomeSetup scaled(double f1, double g1, double lambda, FearFn v) {
    TwoOutcomeSetup s;
    s.f1 = f1;
    s.g1 = g1;
    s.lambda = lambda;
    s.profile.u = UtilityFn::affine(0.001, 0.0);
    s.profile.v = v;
    return s;
}

int sign_changes(const std::vector<double>& xs) {
    int n = 0;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if ((xs[i - 1] < 0) != (xs[i] < 0)) ++n;
    }
    return n;
}

}  // namespace

TEST_CASE("closed forms match the generic engine") {
    oracle::Gen gen(41);
    const FearFn fears[] = {FearFn::poly(1), FearFn::poly(2), FearFn::poly(0.5), FearFn::sinpoly(1)};
    for (int i = 0; i < 1000; ++i) {
        TwoOutcomeSetup s;
        s.f1 = gen.uniform(-1, 1);
        s.g1 = gen.uniform(-1, 1);
        s.lambda = gen.uniform(0.01, 0.99);
        s.profile.v = fears[i % 4];
        if (i % 3 == 0) s.profile.q = RegretQ::from_r(RegretR::power_odd(3, 0.5));
        const double p = gen.uniform(0.001, 1.0);
        const auto [f, g] = setup_prospects(s, p);
        CHECK_THAT(psi_closed_modified(s, p), WithinAbs(psi_modified(s.profile, f, g), 1e-12));

        TwoOutcomeSetup zero = s;
        zero.variant = SetupVariant::both_zero;
        const auto [f0, g0] = setup_prospects(zero, p);
        CHECK_THAT(psi_closed_classical(zero, p), WithinAbs(psi_classical(zero.profile, f0, g0), 1e-12));
    }
}

TEST_CASE("modified closed form tends to -p Q(u(g1)) for small p") {
    TwoOutcomeSetup s;
    s.f1 = 0.9;
    s.g1 = 0.5;
    s.lambda = 0.5;
    for (double p : {1e-3, 1e-5, 1e-7}) {
        const double psi = psi_closed_modified(s, p);
        CHECK(psi < 0.0);
        CHECK_THAT(psi / p, WithinAbs(-s.profile.q(0.5), 1e-2));
    }
}

TEST_CASE("closed forms need u(0) = 0 and a valid setup") {
    TwoOutcomeSetup s;
    s.f1 = 1;
    s.g1 = 0.5;
    s.profile.u = UtilityFn::affine(1, 1);
    CHECK_THROWS_AS(psi_closed_modified(s), Error);
    s.profile.u = UtilityFn::identity();
    s.lambda = 1.0;
    CHECK_THROWS_AS(psi_closed_modified(s), Error);
    s.lambda = 0.5;
    CHECK_THROWS_AS(psi_closed_modified(s, 0.0), Error);
}

TEST_CASE("break-even of the classical form") {
    TwoOutcomeSetup s = scaled(4000, 3000, 0.8, FearFn::poly(0.5));
    const BreakEven b = find_break_even(s, Mode::classical);
    // Phi/p = 0.8*64 - 27 + 0.8 p (1 - 64 + 27) vanishes at p = 24.2 / 28.8.
    CHECK_THAT(b.p_bar, WithinAbs(24.2 / 28.8, 1e-9));
    CHECK(std::abs(b.residual) <= kBreakEvenResidual);
    CHECK(std::abs(psi_closed_classical(s, b.p_bar)) <= kBreakEvenResidual);
    CHECK(b.sign_changes == 1);
    CHECK((psi_closed_classical(s, b.lo) > 0) != (psi_closed_classical(s, b.hi) > 0));
}

TEST_CASE("the same setup has no modified-mode root") {
    // Fear drags v(1 - 0.8 p) u(4000) below u(3000) everywhere, so Psi < 0 on (0, 1].
    TwoOutcomeSetup s = scaled(4000, 3000, 0.8, FearFn::poly(0.5));
    CHECK_THROWS_AS(find_break_even(s, Mode::modified), Error);
    try {
        find_break_even(s, Mode::modified);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NoRoot);
    }
}

TEST_CASE("positive Psi everywhere gives NoRoot") {
    TwoOutcomeSetup s;
    s.f1 = -0.1;
    s.g1 = -0.5;
    s.variant = SetupVariant::both_zero;
    CHECK_THROWS_AS(find_break_even(s), Error);
}

TEST_CASE("break-even postconditions on random setups") {
    oracle::Gen gen(42);
    int found = 0;
    for (int i = 0; i < 300; ++i) {
        TwoOutcomeSetup s;
        s.f1 = gen.uniform(-1, 1);
        s.g1 = gen.uniform(-1, 1);
        s.lambda = gen.uniform(0.05, 0.95);
        s.profile.v = FearFn::poly(gen.uniform(0.5, 6));
        const Mode mode = i % 2 ? Mode::modified : Mode::classical;
        try {
            const BreakEven b = find_break_even(s, mode);
            ++found;
            CHECK(std::abs(psi_setup(s, b.p_bar, mode)) <= kBreakEvenResidual);
            CHECK(b.p_bar > 0.0);
            CHECK(b.p_bar <= 1.0);
            CHECK(b.lo <= b.p_bar);
            CHECK(b.p_bar <= b.hi);
            CHECK(b.sign_changes >= 1);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::NoRoot);
        }
    }
    CHECK(found > 20);
}

TEST_CASE("ratio-effect side conditions") {
    TwoOutcomeSetup s;
    s.f1 = 4000;
    s.g1 = 3000;
    s.lambda = 0.8;
    s.p = 1.0;  // p_fu = 0.2
    CHECK(check_prop1_conditions(s) == Prop1Case::neither);
    s.profile.v = FearFn::poly(0.5);
    CHECK(check_prop1_conditions(s) == Prop1Case::case_I);
    s.f1 = -4000;
    s.g1 = -3000;
    CHECK(check_prop1_conditions(s) == Prop1Case::case_II);
}

TEST_CASE("ratio effect holds around the break-even point") {
    TwoOutcomeSetup s = scaled(4000, 3000, 0.8, FearFn::poly(4));
    const Prop1Report r = verify_prop1(s);
    CHECK_THAT(r.break_even.p_bar, WithinAbs(0.4766, 1e-3));
    CHECK(r.break_even.sign_changes == 2);
    CHECK(r.checked > 0);
    CHECK(r.checked + r.skipped == kProp1Samples);
    CHECK(r.violations.empty());

    TwoOutcomeSetup m = scaled(-4000, -3000, 0.8, FearFn::poly(4));
    const Prop1Report rm = verify_prop1(m);
    CHECK(rm.checked == r.checked);
    CHECK(rm.violations.empty());
}

TEST_CASE("ratio effect without a root is an unmet hypothesis") {
    TwoOutcomeSetup s = scaled(4000, 3000, 0.8, FearFn::poly(0.5));
    try {
        verify_prop1(s);
        FAIL("expected HypothesisUnmet");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::HypothesisUnmet);
    }
}

TEST_CASE("proof inequality of the ratio effect") {
    oracle::Gen gen(43);
    const RegretQ q = RegretQ::power_odd(3);
    int checked = 0;
    for (int i = 0; i < 5000; ++i) {
        TwoOutcomeSetup s;
        s.g1 = gen.uniform(0.01, 1);
        s.f1 = s.g1 + gen.uniform(0.001, 2);
        s.lambda = gen.uniform(0.05, 0.95);
        s.profile.v = FearFn::poly(gen.uniform(0.2, 4));
        const double p = gen.uniform(0.001, 1);
        if (check_prop1_conditions(s, p) != Prop1Case::case_I) continue;
        ++checked;
        const double a = s.profile.v(1 - s.lambda * p) * s.f1;
        CHECK(q(a - s.g1) > q(a) - q(s.g1));
    }
    CHECK(checked > 500);
}

TEST_CASE("modified minus classical has the sign the reversal needs") {
    oracle::Gen gen(44);
    for (int i = 0; i < 5000; ++i) {
        TwoOutcomeSetup s;
        const double lo = gen.uniform(0.01, 1);
        const double hi = lo + gen.uniform(0.001, 1);
        const bool second = i % 2;
        s.f1 = second ? -hi : hi;
        s.g1 = second ? -lo : lo;
        s.lambda = gen.uniform(0.05, 0.95);
        s.profile.v = FearFn::sinpoly(gen.uniform(0.2, 4));
        const double p = gen.uniform(0.001, 1);
        const double diff = psi_closed_modified(s, p) - psi_closed_classical(s, p);
        CHECK((second ? -diff : diff) < 0.0);
    }
}

TEST_CASE("reversal at small p") {
    TwoOutcomeSetup s;
    s.f1 = 2500;
    s.g1 = 2400;
    s.lambda = 33.0 / 34.0;
    s.p = 0.34;
    const Prop2Report r = verify_prop2(s);
    CHECK(r.baseline == Relation::f_strict);
    CHECK(r.p_k <= 0.34);
    CHECK(r.phi > 0);
    CHECK(r.psi < 0);
    CHECK(r.conditions_hold);

    TwoOutcomeSetup m = s;
    m.f1 = -2500;
    m.g1 = -2400;
    const Prop2Report rm = verify_prop2(m);
    CHECK(rm.baseline == Relation::g_strict);
    CHECK(rm.psi > 0);

    TwoOutcomeSetup off = s;
    off.fear_enabled = false;
    try {
        verify_prop2(off);
        FAIL("expected NoReversalFound");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NoReversalFound);
    }
}

TEST_CASE("reversal search checks its baseline") {
    TwoOutcomeSetup s;
    s.f1 = 1;
    s.g1 = -1;
    CHECK_THROWS_AS(verify_prop2(s), Error);
    s.f1 = 0.5;
    s.g1 = 0.4;
    s.lambda = 0.1;  // classical verdict already prefers g
    s.p = 1.0;
    try {
        verify_prop2(s);
        FAIL("expected HypothesisUnmet");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::HypothesisUnmet);
    }
}

TEST_CASE("reflection examples") {
    AgentProfile bilinear;
    const ReflectionReport r = verify_reflection(4000, 3000, 0.8, 1.0, bilinear);
    CHECK(r.original.relation == Relation::g_strict);
    CHECK(r.mirrored.relation == Relation::f_strict);
    CHECK(r.holds);

    const ReflectionReport same = verify_reflection(0.3, 0.3, 1.0, 1.0, bilinear);
    CHECK(same.original.relation == Relation::indifferent);
    CHECK(same.mirrored.relation == Relation::indifferent);
    CHECK(same.holds);

    AgentProfile curved;
    curved.v = FearFn::poly(2);
    CHECK_THROWS_AS(verify_reflection(1, 1, 0.5, 0.5, curved), Error);
}

TEST_CASE("reflection on random instances") {
    const ReflectionSample s = sample_reflection(AgentProfile{}, 1000, 7);
    CHECK(s.instances == 1000);
    CHECK(s.violations == 0);
}

TEST_CASE("medical sweeps") {
    const std::vector<FearFn> fears{FearFn::poly(1), FearFn::poly(2), FearFn::poly(0.5), FearFn::sinpoly(1)};
    const AgentProfile p;
    const SweepTable one = sweep_pu(p, SweepCase::I, fears, 101);
    const SweepTable two = sweep_pu(p, SweepCase::II, fears, 101);
    REQUIRE(one.p_u.size() == 101);
    CHECK(one.p_u[20] == 0.1);
    CHECK_THAT(one.psi[0][20], WithinAbs(-0.0225, 1e-4));
    CHECK_THAT(two.psi[0][20], WithinAbs(0.0092, 1e-4));
    // p_u = 0 is the classical pair for every fear function.
    for (std::size_t k = 0; k < fears.size(); ++k) {
        CHECK_THAT(one.psi[k][0], WithinAbs(-0.0065, 5e-5));
        CHECK_THAT(two.psi[k][0], WithinAbs(-0.0065, 5e-5));
    }
    for (std::size_t k = 0; k < fears.size(); ++k) {
        for (std::size_t i = 1; i < 101; ++i) {
            CHECK(one.psi[k][i] < one.psi[k][i - 1]);
            CHECK(two.psi[k][i] > two.psi[k][i - 1]);
        }
        CHECK(sign_changes(two.psi[k]) == 1);
    }
}

TEST_CASE("sweeps over the whole admissible range") {
    const std::vector<FearFn> fears{FearFn::poly(1), FearFn::poly(2), FearFn::poly(0.5), FearFn::sinpoly(1)};
    const SweepTable one = sweep_pu(AgentProfile{}, SweepCase::I, fears, 161, 0.8);
    const SweepTable two = sweep_pu(AgentProfile{}, SweepCase::II, fears, 121, 0.6);
    for (std::size_t k = 0; k < fears.size(); ++k) {
        for (std::size_t i = 1; i < one.p_u.size(); ++i) CHECK(one.psi[k][i] < one.psi[k][i - 1]);
        for (std::size_t i = 1; i < two.p_u.size(); ++i) CHECK(two.psi[k][i] > two.psi[k][i - 1]);
        CHECK(sign_changes(two.psi[k]) == 1);
    }
    CHECK_THROWS_AS(sweep_pu(AgentProfile{}, SweepCase::II, fears, 11, 0.7), Error);
}

TEST_CASE("sweeps reject bad arguments and are reproducible") {
    CHECK_THROWS_AS(sweep_pu(AgentProfile{}, SweepCase::I, {}, 11), Error);
    CHECK_THROWS_AS(sweep_pu(AgentProfile{}, SweepCase::I, {FearFn::poly(1)}, 1), Error);
    const auto a = sweep_pu(AgentProfile{}, SweepCase::II, {FearFn::sinpoly(2)}, 57);
    const auto b = sweep_pu(AgentProfile{}, SweepCase::II, {FearFn::sinpoly(2)}, 57);
    CHECK(a.psi == b.psi);
}

TEST_CASE("contour corners") {
    const AgentProfile p;
    const ContourTable t = sweep_contour(p, {FearFn::poly(1)}, {0.0, 0.1, 1.0}, {0.0, 0.1, 1.0});
    CHECK_THAT(t.psi[0][0], WithinAbs(-0.0065, 5e-5));
    CHECK_THAT(t.psi[0][1 * 3 + 1], WithinAbs(-0.0049, 1e-4));
    CHECK(t.psi[0][2 * 3 + 2] == 0.0);
    CHECK(t.psi[0][0 * 3 + 1] == psi_modified(p, surgery(), radiotherapy(0.1)));

    const ContourTable u = sweep_contour(p, {FearFn::poly(1)}, uniform_axis(2, 0.8), uniform_axis(2, 0.6));
    CHECK_THAT(u.psi[0][0], WithinAbs(-0.0065, 5e-5));
    CHECK_THROWS_AS(sweep_contour(p, {}, {0.0}, {0.0}), Error);
}
