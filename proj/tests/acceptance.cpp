#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <iostream>
#include <map>

#include "padicdyn/testkit.hpp"
#include "test_support.hpp"

using namespace padicdyn;

namespace {

using clk = std::chrono::steady_clock;

double seconds_since(clk::time_point t0) {
    return std::chrono::duration<double>(clk::now() - t0).count();
}

rational_map exact_realized(const level_ptr& L, const std::vector<long>& fs,
                            const std::vector<long>& gs) {
    auto R = make_exact_ring(L->cfg.p, L->u, L->e);
    std::vector<mpq_class> fq(fs.begin(), fs.end()), gq(gs.begin(), gs.end());
    return realize_map(make_exact_source(R, ep_from_mpq_list(R, fq), ep_from_mpq_list(R, gq)), L);
}

using outcome = criterion_verdict::outcome_t;

} // namespace

TEST_CASE("criterion 1: p*z^2 becomes good after conjugation at p = 2, 3, 5") {
    for (long p : {2L, 3L, 5L}) {
        auto t0 = clk::now();
        level_ptr L = make_level({p, 64});
        rational_map phi = exact_realized(L, {0, 0, p}, {1});
        criterion_verdict v = check_potential_good_reduction(phi);
        REQUIRE(v.outcome == outcome::potentially_good);
        REQUIRE(v.cert.has_value());
        REQUIRE(v.cert->reduction.good);
        REQUIRE(verify_certificate(phi, v));
        CHECK(seconds_since(t0) < 1.0);
    }
}

TEST_CASE("criterion 2: p*z^3 resolves through a ramified extension at p = 3, 5, 7") {
    for (long p : {3L, 5L, 7L}) {
        auto t0 = clk::now();
        level_ptr L = make_level({p, 64});
        rational_map phi = exact_realized(L, {0, 0, 0, p}, {1});
        criterion_verdict v = check_potential_good_reduction(phi);
        REQUIRE(v.outcome == outcome::potentially_good);
        REQUIRE(v.trace.level.ramification_index == 2);
        REQUIRE(verify_certificate(phi, v));
        CHECK(seconds_since(t0) < 5.0);
    }
}

TEST_CASE("criterion 3: (z^2 - z)/p is refuted by a repelling fixed point") {
    for (long p : {2L, 3L, 5L}) {
        auto t0 = clk::now();
        level_ptr L = make_level({p, 64});
        rational_map phi = exact_realized(L, {0, -1, 1}, {p});
        criterion_verdict v = check_potential_good_reduction(phi);
        REQUIRE(v.outcome == outcome::not_potentially_good);
        REQUIRE(v.repelling.has_value());
        val_info vi = fe_val_info(v.repelling->lambda);
        REQUIRE(vi.determined);
        REQUIRE(vi.sv == -v.repelling->lambda.L->e);
        REQUIRE(verify_certificate(phi, v));
        CHECK(seconds_since(t0) < 1.0);
    }
}

TEST_CASE("criterion 4: conjugated good maps round-trip to verified certificates") {
    auto t0 = clk::now();
    generator_config cfg;
    cfg.degree_min = 2;
    cfg.degree_max = 4;
    cfg.primes = {2, 3, 5};
    cfg.precision = 64;
    cfg.conjugator_valuation_max = 2;
    cfg.extension_entries = true;
    cfg.seed = 20260813;
    std::vector<harness_cell> cells = run_harness(cfg, 100);
    REQUIRE(cells.size() == 9);
    for (const auto& c : cells) {
        CAPTURE(c.prime, c.degree, c.good, c.blocked, c.failed);
        REQUIRE(c.trials == 100);
        REQUIRE(c.failed == 0); // every in-support trial is PotentiallyGood and verified
        REQUIRE(c.good >= 1);
    }
    CHECK(seconds_since(t0) <= 600.0);
}

TEST_CASE("criterion 5: fixed points of generated good maps obey the structure lemmas") {
    test_rng rng(101);
    long resolved = 0, attempts = 0;
    while (resolved < 200 && attempts < 420) {
        long p = std::vector<long>{2, 3, 5}[static_cast<std::size_t>(attempts % 3)];
        long d = 2 + (attempts / 3) % 3;
        ++attempts;
        exact_ring_ptr R = make_exact_ring(p);
        level_ptr L = make_level({p, 64});
        rational_map phi = realize_map(random_good_reduction_map(rng, R, d), L);
        structure_report rep = fixed_point_structure(phi);
        if (!rep.resolved) continue; // needed an extension outside the supported range
        ++resolved;
        REQUIRE(rep.no_repelling);
        REQUIRE(rep.attracting_isolated);
        REQUIRE(rep.indifferent_separates);
    }
    REQUIRE(resolved >= 200);
}

TEST_CASE("criterion 6: multiplier absolute value equals that of the derivative at a fixed origin") {
    test_rng rng(103);
    long checked = 0;
    while (checked < 100) {
        long p = std::vector<long>{2, 3, 5}[static_cast<std::size_t>(checked % 3)];
        long d = 2 + checked % 3;
        exact_ring_ptr R = make_exact_ring(p);
        level_ptr L = make_level({p, 48});
        exact_source s = random_good_reduction_map(rng, R, d, true);
        rational_map phi = realize_map(s, L);
        REQUIRE(good_reduction(phi).good);
        field_element lam = multiplier(phi, pt_from_affine(fe_zero(L)));
        val_info vl = fe_val_info(lam);
        val_info vf = fe_val_info(phi.f.c[1]); // f'(0) for a vanishing constant term
        val_info vg = fe_val_info(phi.g.c[0]);
        REQUIRE(vg.determined);
        REQUIRE(vg.sv == 0); // |g(0)| = 1
        REQUIRE(vl.determined == vf.determined);
        if (vl.determined) REQUIRE(vl.sv == vf.sv);
        ++checked;
    }
}

TEST_CASE("criterion 7: definitional reduction test agrees with the unit-resultant test") {
    test_rng rng(107);
    long evaluated = 0, attempts = 0;
    while (evaluated < 500 && attempts < 700) {
        long p = std::vector<long>{2, 3, 5}[static_cast<std::size_t>(attempts % 3)];
        ++attempts;
        level_ptr L = make_level({p, 32});
        long d = rng.range(2, 4);
        std::vector<field_element> fc, gc;
        bool gz = true;
        for (long k = 0; k <= d; ++k) {
            long a = rng.range(-12, 12);
            long b = rng.range(-12, 12);
            fc.push_back(fe_from_int(L, a));
            gc.push_back(fe_from_int(L, b));
            gz = gz && b == 0;
        }
        if (gz) continue;
        try {
            rational_map phi = make_rational_map(L, p_make(L, fc), p_make(L, gc));
            bool definitional = good_reduction(phi).good;
            bool by_resultant = resultant_criterion(phi).good;
            REQUIRE(definitional == by_resultant);
            ++evaluated;
        } catch (const error&) {
            continue; // not a usable degree-d pair (zero numerator and the like)
        }
    }
    REQUIRE(evaluated >= 500);
}

TEST_CASE("criterion 8: good maps commute with reduction on sampled points") {
    test_rng rng(109);
    for (int i = 0; i < 100; ++i) {
        long p = std::vector<long>{2, 3, 5}[static_cast<std::size_t>(i % 3)];
        long d = 2 + i % 3;
        exact_ring_ptr R = make_exact_ring(p);
        bool wide = i % 4 == 0; // realize some maps in an extension
        level_ptr L = wide ? make_level({p, 32}, 2, 1) : make_level({p, 32});
        rational_map phi = realize_map(random_good_reduction_map(rng, R, d), L);
        reduction_report rep = good_reduction(phi);
        REQUIRE(rep.good);
        for (int t = 0; t < 50; ++t) {
            projective_point x;
            if (t % 10 == 9) {
                x = pt_infinity(L);
            } else {
                field_element a = fe_from_int(L, rng.range(-625, 625));
                if (wide && t % 2 == 0)
                    a = fe_add(a, fe_mul(fe_zeta(L), fe_from_int(L, rng.range(-625, 625))));
                x = pt_from_affine(a);
            }
            REQUIRE(check_respects_reduction(phi, rep, x));
        }
    }
}

TEST_CASE("criterion 9: the verdict does not depend on the choice of points") {
    test_rng rng(113);
    long case1 = 0, attempts = 0;
    while (case1 < 50 && attempts < 300) {
        long p = std::vector<long>{2, 3, 5}[static_cast<std::size_t>(attempts % 3)];
        long d = 2 + (attempts / 3) % 3;
        ++attempts;
        exact_ring_ptr R = make_exact_ring(p);
        level_ptr L = make_level({p, 48});
        rational_map phi = realize_map(random_good_reduction_map(rng, R, d), L);
        criterion_verdict v = check_potential_good_reduction(phi);
        if (v.outcome == outcome::undetermined || v.decided_case != case_kind::indifferent)
            continue;
        long completed = 0;
        REQUIRE(choice_independence_probe(phi, d == 2 ? 36 : 12, {}, &completed));
        if (completed < 4) continue; // too many paths left the supported tower range
        ++case1;
    }
    REQUIRE(case1 >= 50);
}

TEST_CASE("criterion 10: valuation, polygon, and lifting kernels hold on random data") {
    test_rng rng(127);

    SECTION("ultrametric and multiplicative valuation on element pairs") {
        std::vector<level_ptr> levels = {make_level({2, 24}), make_level({3, 24}, 2, 2),
                                         make_level({5, 24}, 1, 2)};
        long done = 0;
        testsup::rng R(131);
        while (done < 10000) {
            const level_ptr& L = levels[static_cast<std::size_t>(done % levels.size())];
            field_element x = testsup::random_nonzero(L, R, -6, 6);
            field_element y = testsup::random_nonzero(L, R, -6, 6);
            val_info vx = fe_val_info(x), vy = fe_val_info(y);
            if (!vx.determined || !vy.determined) continue;
            val_info vp = fe_val_info(fe_mul(x, y));
            REQUIRE(vp.determined);
            REQUIRE(vp.sv == vx.sv + vy.sv);
            field_element s = fe_add(x, y);
            val_info vs = fe_val_info(s);
            long lo = std::min(vx.sv, vy.sv);
            if (vs.determined)
                REQUIRE(vs.sv >= lo);
            else
                REQUIRE(vs.sv > lo); // cancelled sum is at least past the minimum
            if (vx.sv != vy.sv) {
                REQUIRE(vs.determined);
                REQUIRE(vs.sv == lo);
            }
            ++done;
        }
    }

    SECTION("newton polygon slopes list the root valuations") {
        std::vector<level_ptr> levels = {make_level({5, 32}), make_level({3, 32}, 1, 2)};
        for (int t = 0; t < 1000; ++t) {
            const level_ptr& L = levels[static_cast<std::size_t>(t % levels.size())];
            long deg = rng.range(2, 5);
            std::map<long, long> expect;
            poly f = p_make(L, {fe_one(L)});
            for (long i = 0; i < deg; ++i) {
                long k = rng.range(-3, 3);
                long u = rng.range(1, 4);
                if (u % L->cfg.p.get_si() == 0) ++u;
                field_element r = fe_mul_pi_pow(fe_from_int(L, u), k);
                ++expect[k];
                f = p_mul(f, p_make(L, {fe_neg(r), fe_one(L)}));
            }
            newton_polygon_t np = newton_polygon(f);
            REQUIRE(np.vanishing_order == 0);
            std::map<long, long> got;
            for (const auto& seg : np.segments) {
                mpq_class sv = -seg.slope * L->e;
                REQUIRE(sv.get_den() == 1);
                got[sv.get_num().get_si()] += seg.i1 - seg.i0;
            }
            REQUIRE(got == expect);
        }
    }

    SECTION("hensel lifts push the residual below the working precision") {
        for (int t = 0; t < 300; ++t) {
            long p = std::vector<long>{3, 5, 7}[static_cast<std::size_t>(t % 3)];
            level_ptr L = make_level({p, 40});
            long deg = rng.range(2, 3);
            std::vector<long> roots;
            for (long i = 0; i < deg; ++i) roots.push_back(i + 1 + p * rng.range(0, 9));
            poly f = p_make(L, {fe_one(L)});
            for (long r : roots)
                f = p_mul(f, p_make(L, {fe_from_int(L, -r), fe_one(L)}));
            field_element lifted = hensel_lift(f, fe_from_int(L, roots[0] % p));
            field_element residual = p_eval(f, lifted);
            REQUIRE(fe_is_zero_at_precision(residual));
            REQUIRE(fe_val_info(residual).sv >= eq_horizon_sv(*L));
        }
    }
}

namespace {

class criterion_printer : public Catch::EventListenerBase {
public:
    using EventListenerBase::EventListenerBase;
    void testCaseEnded(const Catch::TestCaseStats& stats) override {
        std::cout << (stats.totals.assertions.allPassed() ? "[PASS] " : "[FAIL] ")
                  << stats.testInfo->name << "\n";
    }
};

} // namespace

CATCH_REGISTER_LISTENER(criterion_printer)
