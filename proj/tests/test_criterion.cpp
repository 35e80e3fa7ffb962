#include <catch2/catch_amalgamated.hpp>

#include "padicdyn/criterion.hpp"
#include "test_support.hpp"

using namespace padicdyn;

namespace {

// map with exact provenance, so the pipeline may escalate precision
rational_map exact_map(const level_ptr& L, std::initializer_list<long> fs,
                       std::initializer_list<long> gs) {
    auto R = make_exact_ring(L->cfg.p, 1, 1);
    std::vector<mpq_class> fc, gc;
    for (long c : fs) fc.emplace_back(c);
    for (long c : gs) gc.emplace_back(c);
    exact_source s = make_exact_source(R, ep_from_mpq_list(R, fc), ep_from_mpq_list(R, gc));
    return realize_map(s, L);
}

using outcome = criterion_verdict::outcome_t;

} // namespace

TEST_CASE("p*z^2 is potentially good at 2, 3, 5") {
    for (long p : {2L, 3L, 5L}) {
        auto L = make_level({p, 48}, 1, 1);
        auto phi = exact_map(L, {0, 0, p}, {1});
        auto v = check_potential_good_reduction(phi);
        INFO("p=" << p << " diagnostic=" << v.diagnostic);
        REQUIRE(v.outcome == outcome::potentially_good);
        REQUIRE(v.cert.has_value());
        REQUIRE(v.cert->reduction.good);
        REQUIRE(v.cert->reduction.reduced_degree == 2);
        REQUIRE(verify_certificate(phi, v));
        // the map as written has bad reduction; only the conjugate is good
        REQUIRE_FALSE(good_reduction(phi).good);
        if (p == 2) {
            // multiplier 2 at the fixed point 1/2 is attracting, so no
            // indifferent point exists
            REQUIRE(v.decided_case == case_kind::all_attracting);
        } else {
            REQUIRE(v.decided_case == case_kind::indifferent);
        }
        REQUIRE(v.trace.fixed_pts.size() == 3);
        REQUIRE(v.trace.triple.size() == 3);
    }
}

TEST_CASE("p*z^2 at 3 walks the preimage chain into the unramified quadratic") {
    auto L = make_level({3, 48}, 1, 1);
    auto phi = exact_map(L, {0, 0, 3}, {1});
    auto v = check_potential_good_reduction(phi);
    REQUIRE(v.outcome == outcome::potentially_good);
    REQUIRE(v.trace.level.unramified_degree == 2);
    REQUIRE(v.trace.level.ramification_index == 1);
    REQUIRE(v.trace.extension_steps == 1);
}

TEST_CASE("z^2 is potentially good and already good") {
    for (long p : {2L, 3L, 5L}) {
        auto L = make_level({p, 48}, 1, 1);
        auto phi = exact_map(L, {0, 0, 1}, {1});
        auto v = check_potential_good_reduction(phi);
        INFO("p=" << p << " diagnostic=" << v.diagnostic);
        REQUIRE(v.outcome == outcome::potentially_good);
        REQUIRE(verify_certificate(phi, v));
        REQUIRE(good_reduction(phi).good);
        if (p != 2) REQUIRE(v.decided_case == case_kind::indifferent);
    }
}

TEST_CASE("(z^2 - z)/p is refuted by a repelling fixed point") {
    for (long p : {2L, 3L, 5L}) {
        auto L = make_level({p, 48}, 1, 1);
        auto phi = exact_map(L, {0, -1, 1}, {p});
        auto v = check_potential_good_reduction(phi);
        REQUIRE(v.outcome == outcome::not_potentially_good);
        REQUIRE(v.repelling.has_value());
        val_info vi = fe_val_info(v.repelling->lambda);
        REQUIRE(vi.determined);
        REQUIRE(vi.sv == -1);
        REQUIRE(verify_certificate(phi, v));
    }
}

TEST_CASE("p*z^3 needs the tame quadratic ramified extension") {
    for (long p : {3L, 5L, 7L}) {
        auto L = make_level({p, 48}, 1, 1);
        auto phi = exact_map(L, {0, 0, 0, p}, {1});
        auto v = check_potential_good_reduction(phi);
        INFO("p=" << p << " diagnostic=" << v.diagnostic);
        REQUIRE(v.outcome == outcome::potentially_good);
        REQUIRE(v.trace.level.ramification_index == 2);
        REQUIRE(v.trace.extension_steps >= 1);
        REQUIRE(verify_certificate(phi, v));
        if (p == 3) {
            // multiplier 3 at the ramified fixed points is attracting at 3
            REQUIRE(v.decided_case == case_kind::all_attracting);
        } else {
            REQUIRE(v.decided_case == case_kind::indifferent);
        }
    }
}

TEST_CASE("a double fixed point has multiplier 1 and takes the indifferent path") {
    auto L = make_level({5, 48}, 1, 1);
    auto phi = exact_map(L, {0, 1, 1}, {1}); // z + z^2 fixes 0 doubly
    auto v = check_potential_good_reduction(phi);
    REQUIRE(v.outcome == outcome::potentially_good);
    REQUIRE(v.decided_case == case_kind::indifferent);
    bool found_double = false;
    for (const auto& r : v.trace.fixed_pts)
        if (r.multiplicity == 2) {
            found_double = true;
            REQUIRE(r.cls == fp_class::indifferent);
        }
    REQUIRE(found_double);
    REQUIRE(verify_certificate(phi, v));
}

TEST_CASE("wildly ramified needs are reported, not guessed") {
    auto L = make_level({2, 48}, 1, 1);
    auto phi = exact_map(L, {0, 0, 0, 2}, {1}); // fixed points at valuation -1/2, wild at p=2
    auto v = check_potential_good_reduction(phi);
    REQUIRE(v.outcome == outcome::undetermined);
    REQUIRE(v.blocked_extension.has_value());
    REQUIRE(v.blocked_extension->ramification_index == 2);
    REQUIRE_FALSE(v.diagnostic.empty());
    REQUIRE_FALSE(verify_certificate(phi, v));
}

TEST_CASE("extension bounds turn a decidable case into undetermined") {
    auto L = make_level({5, 48}, 1, 1);
    auto phi = exact_map(L, {0, 0, 0, 5}, {1});
    criterion_bounds tight;
    tight.max_ramified = 1;
    auto v = check_potential_good_reduction(phi, tight);
    REQUIRE(v.outcome == outcome::undetermined);
    REQUIRE(v.blocked_extension.has_value());

    criterion_bounds few;
    few.max_extension_steps = 1;
    auto w = check_potential_good_reduction(phi, few);
    REQUIRE(w.outcome == outcome::undetermined);
}

TEST_CASE("tampered certificates fail verification") {
    auto L = make_level({3, 48}, 1, 1);
    auto phi = exact_map(L, {0, 0, 3}, {1});
    auto v = check_potential_good_reduction(phi);
    REQUIRE(verify_certificate(phi, v));

    auto forged = v;
    forged.cert->h = mobius_identity(forged.cert->psi.L);
    REQUIRE_FALSE(verify_certificate(phi, forged));

    auto wrong_map = v;
    wrong_map.cert->psi = detail::map_at_level(phi, wrong_map.cert->psi.L);
    REQUIRE_FALSE(verify_certificate(phi, wrong_map));

    auto flipped = v;
    flipped.outcome = outcome::not_potentially_good;
    flipped.repelling.reset();
    REQUIRE_FALSE(verify_certificate(phi, flipped));
}

TEST_CASE("verdicts do not depend on branch choices") {
    auto L5 = make_level({5, 48}, 1, 1);
    REQUIRE(choice_independence_probe(exact_map(L5, {0, 0, 1}, {1}), 12));
    REQUIRE(choice_independence_probe(exact_map(L5, {0, 0, 5}, {1}), 12));
    auto L3 = make_level({3, 48}, 1, 1);
    REQUIRE(choice_independence_probe(exact_map(L3, {0, 0, 3}, {1}), 12));
    auto L2 = make_level({2, 48}, 1, 1);
    REQUIRE(choice_independence_probe(exact_map(L2, {0, 0, 2}, {1}), 12));
    REQUIRE(choice_independence_probe(exact_map(L5, {0, -1, 1}, {5}), 6));
}

TEST_CASE("the verdict is a conjugacy invariant") {
    auto L = make_level({3, 48}, 1, 1);
    auto good = exact_map(L, {0, 0, 3}, {1});
    auto bad = exact_map(L, {0, -1, 1}, {3});
    mobius h = make_mobius(fe_from_int(L, 3), fe_one(L), fe_one(L), fe_from_int(L, 2));
    REQUIRE(check_potential_good_reduction(map_conjugate(good, h)).outcome ==
            outcome::potentially_good);
    REQUIRE(check_potential_good_reduction(map_conjugate(bad, h)).outcome ==
            outcome::not_potentially_good);
}
