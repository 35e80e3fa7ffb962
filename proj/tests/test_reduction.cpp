#include <catch2/catch_amalgamated.hpp>

#include "padicdyn/reduction.hpp"
#include "test_support.hpp"

using namespace padicdyn;
using testsup::rng;

namespace {

poly ints(const level_ptr& L, std::initializer_list<long> cs) {
    std::vector<mpq_class> v;
    for (long c : cs) v.emplace_back(c);
    return p_from_coeff_list(L, v);
}

rational_map map_ints(const level_ptr& L, std::initializer_list<long> fs,
                      std::initializer_list<long> gs) {
    return make_rational_map(L, ints(L, fs), ints(L, gs));
}

} // namespace

TEST_CASE("z^2 has good reduction with the expected residue pair") {
    for (long p : {2L, 3L, 5L}) {
        auto L = make_level({p, 48}, 1, 1);
        auto phi = map_ints(L, {0, 0, 1}, {1});
        auto rep = good_reduction(phi);
        REQUIRE(rep.good);
        REQUIRE(rep.reason == reduction_report::reason_t::none);
        REQUIRE(rep.reduced_degree == 2);
        REQUIRE(rp_degree(rep.reduced.f) == 2);
        REQUIRE(re_is_zero(rep.reduced.f[0]));
        REQUIRE(re_is_zero(rep.reduced.f[1]));
        REQUIRE(re_eq(rep.reduced.f[2], re_one(L->k)));
        REQUIRE(rp_degree(rep.reduced.g) == 0);
        REQUIRE(re_eq(rep.reduced.g[0], re_one(L->k)));
    }
}

TEST_CASE("p*z^2 collapses to a constant residue map") {
    for (long p : {2L, 5L}) {
        auto L = make_level({p, 48}, 1, 1);
        auto phi = map_ints(L, {0, 0, p}, {1});
        auto rep = good_reduction(phi);
        REQUIRE_FALSE(rep.good);
        REQUIRE(rep.reason == reduction_report::reason_t::leading_collapse);
        REQUIRE(rep.reduced_degree == 0);
        REQUIRE(rp_is_zero(rep.reduced.f));
    }
}

TEST_CASE("unit constant denominator times p gives a zero denominator residue") {
    auto L = make_level({5, 48}, 1, 1);
    auto phi = map_ints(L, {0, -1, 1}, {5});
    auto rep = good_reduction(phi);
    REQUIRE_FALSE(rep.good);
    REQUIRE(rep.reason == reduction_report::reason_t::zero_denominator);
    REQUIRE(rep.reduced_degree == 0);
    REQUIRE(rp_is_zero(rep.reduced.g));
}

TEST_CASE("residue pair sharing a factor is reported with the cancelled pair") {
    auto L = make_level({7, 48}, 1, 1);
    // (z-8)(z+1) over (z+6)(z-2): coprime over the field, both divisible by
    // z-1 in the residue field
    auto phi = map_ints(L, {-8, -7, 1}, {-12, 4, 1});
    auto rep = good_reduction(phi);
    REQUIRE_FALSE(rep.good);
    REQUIRE(rep.reason == reduction_report::reason_t::common_factor);
    REQUIRE(rep.reduced_degree == 1);
    // f/(z-1) = z+1, g/(z-1) = z-2
    REQUIRE(rp_degree(rep.reduced.f) == 1);
    REQUIRE(re_eq(rep.reduced.f[0], re_one(L->k)));
    REQUIRE(re_eq(rep.reduced.f[1], re_one(L->k)));
    REQUIRE(rp_degree(rep.reduced.g) == 1);
    REQUIRE(re_eq(rep.reduced.g[0], re_from_int(L->k, -2)));
    REQUIRE(re_eq(rep.reduced.g[1], re_one(L->k)));
}

TEST_CASE("partial collapse of the top coefficient drops the degree") {
    auto L = make_level({3, 48}, 1, 1);
    auto phi = map_ints(L, {0, 1, 3}, {1});
    auto rep = good_reduction(phi);
    REQUIRE_FALSE(rep.good);
    REQUIRE(rep.reason == reduction_report::reason_t::leading_collapse);
    REQUIRE(rep.reduced_degree == 1);
    REQUIRE(rp_degree(rep.reduced.f) == 1);
}

TEST_CASE("2w - w^2 has good reduction at 2") {
    auto L = make_level({2, 48}, 1, 1);
    auto phi = map_ints(L, {0, 2, -1}, {1});
    auto rep = good_reduction(phi);
    REQUIRE(rep.good);
    REQUIRE(rep.reduced_degree == 2);
    REQUIRE(rp_degree(rep.reduced.f) == 2);
    REQUIRE(re_is_zero(rep.reduced.f[1]));
    REQUIRE(re_eq(rep.reduced.f[2], re_one(L->k)));
}

TEST_CASE("resultant valuation on frozen examples") {
    auto L = make_level({5, 48}, 1, 1);

    auto rc = resultant_criterion(map_ints(L, {0, 0, 1}, {1}));
    REQUIRE(rc.good);
    REQUIRE(fe_val_info(rc.res).sv == 0);

    rc = resultant_criterion(map_ints(L, {0, -1, 1}, {5}));
    REQUIRE_FALSE(rc.good);
    REQUIRE(fe_val_info(rc.res).determined);
    REQUIRE(fe_val_info(rc.res).sv == 2);

    rc = resultant_criterion(map_ints(L, {0, 0, 5}, {1}));
    REQUIRE_FALSE(rc.good);
    REQUIRE(fe_val_info(rc.res).sv == 2);
}

TEST_CASE("definitional verdict agrees with the resultant criterion") {
    rng R(0xCAFE0001u);
    long done = 0;
    for (long trial = 0; trial < 800 && done < 500; ++trial) {
        long p = std::vector<long>{2, 3, 5, 7, 13}[static_cast<std::size_t>(R.range(0, 4))];
        auto L = make_level({p, 48}, 1, 1);
        long d = R.range(1, 3);
        std::vector<mpq_class> fc, gc;
        for (long i = 0; i <= d; ++i) fc.emplace_back(R.range(-p * p, p * p));
        long dg = R.range(0, d);
        for (long i = 0; i <= dg; ++i) gc.emplace_back(R.range(-p * p, p * p));
        rational_map phi;
        try {
            phi = make_rational_map(L, p_from_coeff_list(L, fc), p_from_coeff_list(L, gc));
        } catch (const error&) {
            continue;
        }
        if (phi.d != d) continue;
        auto rep = good_reduction(phi);
        auto rc = resultant_criterion(phi);
        INFO("p=" << p << " trial=" << trial);
        REQUIRE(rep.good == rc.good);
        ++done;
    }
    REQUIRE(done >= 500);
}

TEST_CASE("reduction commutes with application for good reduction maps") {
    rng R(0xCAFE0002u);
    auto L = make_level({5, 48}, 1, 1);
    auto check_all = [&](const rational_map& phi, const reduction_report& rep) {
        REQUIRE(check_respects_reduction(phi, rep, pt_infinity(L)));
        REQUIRE(check_respects_reduction(phi, rep, pt_from_affine(fe_zero(L))));
        for (int i = 0; i < 10; ++i) {
            field_element x = fe_from_int(L, R.range(-30, 30));
            REQUIRE(check_respects_reduction(phi, rep, pt_from_affine(x)));
        }
    };

    auto phi = map_ints(L, {0, 0, 1}, {1});
    check_all(phi, good_reduction(phi));

    phi = map_ints(L, {1, 0, 1}, {0, 1});
    check_all(phi, good_reduction(phi));

    long done = 0;
    for (long trial = 0; trial < 300 && done < 40; ++trial) {
        std::vector<mpq_class> fc, gc;
        long d = R.range(1, 3);
        for (long i = 0; i <= d; ++i) fc.emplace_back(R.range(-12, 12));
        for (long i = 0; i <= R.range(0, d); ++i) gc.emplace_back(R.range(-12, 12));
        rational_map psi;
        try {
            psi = make_rational_map(L, p_from_coeff_list(L, fc), p_from_coeff_list(L, gc));
        } catch (const error&) {
            continue;
        }
        auto rep = good_reduction(psi);
        if (!rep.good) continue;
        check_all(psi, rep);
        ++done;
    }
    REQUIRE(done >= 40);
}

TEST_CASE("good reduction is preserved by integral unimodular conjugation") {
    rng R(0xCAFE0003u);
    auto L = make_level({5, 48}, 1, 1);
    long done = 0;
    for (long trial = 0; trial < 400 && done < 30; ++trial) {
        std::vector<mpq_class> fc, gc;
        long d = R.range(1, 2);
        for (long i = 0; i <= d; ++i) fc.emplace_back(R.range(-12, 12));
        for (long i = 0; i <= R.range(0, d); ++i) gc.emplace_back(R.range(-12, 12));
        rational_map phi;
        try {
            phi = make_rational_map(L, p_from_coeff_list(L, fc), p_from_coeff_list(L, gc));
        } catch (const error&) {
            continue;
        }
        if (phi.d != d) continue;
        mobius h;
        bool ok = false;
        for (int k = 0; k < 50 && !ok; ++k) {
            auto e = [&] { return fe_from_int(L, R.range(-10, 10)); };
            try {
                h = make_mobius(e(), e(), e(), e());
                ok = is_integral_unimodular(h);
            } catch (const error&) {
            }
        }
        if (!ok) continue;
        auto psi = map_conjugate(phi, h);
        REQUIRE(good_reduction(phi).good == good_reduction(psi).good);
        ++done;
    }
    REQUIRE(done >= 30);
}
