#include <catch2/catch_amalgamated.hpp>

#include <gmpxx.h>

#include <algorithm>
#include <vector>

#include "padicdyn/poly.hpp"
#include "test_support.hpp"

using namespace padicdyn;

namespace {

poly ints(const level_ptr& L, std::initializer_list<long> cs) {
    std::vector<mpq_class> v;
    for (long x : cs) v.emplace_back(x);
    return p_from_coeff_list(L, v);
}

} // namespace

TEST_CASE("polynomial construction certifies the leading coefficient") {
    auto L = make_level({5, 48}, 1, 1);
    poly f = ints(L, {1, 0, 1});
    REQUIRE(p_degree(f) == 2);

    // exact cancellation in the lead: high bound, so the degree honestly drops
    poly a = ints(L, {0, 1, 1});
    poly b = ints(L, {3, 0, 1});
    poly d = p_sub(a, b);
    REQUIRE(p_degree(d) == 1);

    // a damaged lead (tiny bound) cannot be classified
    std::vector<field_element> cs{fe_one(L), fe_flagged_zero(L, 3)};
    REQUIRE_THROWS_AS(p_make(L, cs), insufficient_precision);
    REQUIRE_THROWS_AS(p_make_strict(L, cs), insufficient_precision);
}

TEST_CASE("division with remainder is exact and certified") {
    auto L = make_level({7, 48}, 1, 1);
    poly f = ints(L, {1, 0, 0, 0, 1}); // z^4 + 1
    poly g = ints(L, {1, 0, 1});       // z^2 + 1
    auto [q, r] = p_divmod(f, g);
    REQUIRE(p_degree(q) == 2);
    REQUIRE(p_degree(r) == 0);
    REQUIRE(p_eq_at_precision(q, ints(L, {-1, 0, 1})));
    REQUIRE(p_eq_at_precision(r, ints(L, {2})));

    auto [q2, r2] = p_divmod(g, g);
    REQUIRE(p_is_zero(r2));
    REQUIRE(p_eq_at_precision(q2, ints(L, {1})));
}

TEST_CASE("division identity holds on random exact polynomials") {
    auto L = make_level({3, 48}, 1, 1);
    testsup::rng rng(2026);
    for (int trial = 0; trial < 60; ++trial) {
        std::vector<mpq_class> fc, gc;
        long df = rng.range(0, 5), dg = rng.range(0, 3);
        for (long i = 0; i <= df; ++i) fc.emplace_back(rng.range(-20, 20));
        for (long i = 0; i < dg; ++i) gc.emplace_back(rng.range(-20, 20));
        gc.emplace_back(rng.range(1, 20)); // nonzero lead
        poly f = p_from_coeff_list(L, fc);
        poly g = p_from_coeff_list(L, gc);
        if (p_is_zero(g)) continue;
        auto [q, r] = p_divmod(f, g);
        REQUIRE(p_degree(r) < p_degree(g));
        REQUIRE(p_eq_at_precision(p_add(p_mul(q, g), r), f));
    }
}

TEST_CASE("monic gcd finds certified common factors") {
    auto L = make_level({5, 48}, 1, 1);
    poly g1 = p_gcd(ints(L, {-1, 0, 1}), ints(L, {-1, 1}));
    REQUIRE(p_eq_at_precision(g1, ints(L, {-1, 1})));

    poly f = p_mul(ints(L, {1, 0, 1}), ints(L, {2, 1}));
    poly g2 = p_gcd(f, ints(L, {2, 1}));
    REQUIRE(p_eq_at_precision(g2, ints(L, {2, 1})));

    poly g3 = p_gcd(ints(L, {-5, 0, 1}), ints(L, {0, 1}));
    REQUIRE(p_degree(g3) == 0);
    REQUIRE(p_eq_at_precision(g3, ints(L, {1})));
}

TEST_CASE("resultant of linear factors freezes the sign convention") {
    auto L = make_level({7, 48}, 1, 1);
    // res(z - a, z - b) = a - b
    field_element r = p_resultant(ints(L, {-3, 1}), ints(L, {-5, 1}));
    REQUIRE(fe_eq_at_precision(r, fe_from_int(L, -2)));

    // res(z^2 - p, z) = -p
    field_element r2 = p_resultant(ints(L, {-7, 0, 1}), ints(L, {0, 1}));
    REQUIRE(fe_eq_at_precision(r2, fe_from_int(L, -7)));
}

TEST_CASE("resultant agrees with the root-difference product") {
    auto L = make_level({5, 48}, 1, 1);
    testsup::rng rng(99);
    for (int trial = 0; trial < 40; ++trial) {
        long a = rng.range(-9, 9), b = rng.range(-9, 9);
        long c = rng.range(-9, 9), d = rng.range(-9, 9);
        poly f = p_mul(ints(L, {-a, 1}), ints(L, {-b, 1}));
        poly g = p_mul(ints(L, {-c, 1}), ints(L, {-d, 1}));
        field_element want = fe_from_int(L, (a - c) * (a - d) * (b - c) * (b - d));
        REQUIRE(fe_eq_at_precision(p_resultant(f, g), want));
    }
}

TEST_CASE("resultant is multiplicative and swaps with a sign") {
    auto L = make_level({3, 48}, 1, 1);
    testsup::rng rng(7);
    for (int trial = 0; trial < 25; ++trial) {
        auto rand_poly = [&](long deg) {
            std::vector<mpq_class> cs;
            for (long i = 0; i < deg; ++i) cs.emplace_back(rng.range(-8, 8));
            cs.emplace_back(rng.range(1, 8));
            return p_from_coeff_list(L, cs);
        };
        poly f = rand_poly(rng.range(1, 2));
        poly g = rand_poly(rng.range(1, 2));
        poly h = rand_poly(rng.range(1, 2));
        field_element lhs = p_resultant(p_mul(f, g), h);
        field_element rhs = fe_mul(p_resultant(f, h), p_resultant(g, h));
        REQUIRE(fe_eq_at_precision(lhs, rhs));

        field_element fw = p_resultant(f, g);
        field_element bw = p_resultant(g, f);
        long sgn = (p_degree(f) * p_degree(g)) % 2 == 0 ? 1 : -1;
        REQUIRE(fe_eq_at_precision(fw, sgn < 0 ? fe_neg(bw) : bw));
    }
}

TEST_CASE("padded resultant accepts genuinely degenerate leads") {
    auto L = make_level({5, 48}, 1, 1);
    // z^2 and the constant p, both treated as degree-2 forms: det is p^2
    std::vector<field_element> fc{fe_zero(L), fe_zero(L), fe_one(L)};
    std::vector<field_element> gc{fe_from_int(L, 5), fe_zero(L), fe_zero(L)};
    field_element r = resultant_from_arrays(L, fc, gc);
    REQUIRE(fe_eq_at_precision(r, fe_from_int(L, 25)));
}

TEST_CASE("newton polygon of a split quadratic over a ramified level") {
    auto L = make_level({5, 48}, 1, 2);
    field_element pi = fe_pi(L);
    poly f = p_mul(p_make(L, {fe_neg(pi), fe_one(L)}), p_make(L, {pi, fe_one(L)}));
    // the product oracle: z^2 - 5 exactly
    REQUIRE(p_eq_at_precision(f, ints(L, {-5, 0, 1})));
    newton_polygon_t np = newton_polygon(f);
    REQUIRE(np.vanishing_order == 0);
    REQUIRE(np.segments.size() == 1);
    REQUIRE(np.segments[0].length == 2);
    REQUIRE(np.segments[0].slope == mpq_class(-1, 2));
}

TEST_CASE("newton polygon reads vanishing order and mixed slopes") {
    auto L7 = make_level({7, 48}, 1, 1);
    poly f = ints(L7, {0, -8, 1}); // z^2 - (1+7)z
    newton_polygon_t np = newton_polygon(f);
    REQUIRE(np.vanishing_order == 1);
    REQUIRE(np.segments.size() == 1);
    REQUIRE(np.segments[0].slope == 0);
    REQUIRE(np.segments[0].length == 1);

    auto L5 = make_level({5, 48}, 1, 1);
    poly g = ints(L5, {1, 1, 5}); // 5z^2 + z + 1: root valuations 0 and -1
    newton_polygon_t np2 = newton_polygon(g);
    REQUIRE(np2.vanishing_order == 0);
    REQUIRE(np2.segments.size() == 2);
    REQUIRE(np2.segments[0].slope == 0);
    REQUIRE(np2.segments[0].length == 1);
    REQUIRE(np2.segments[1].slope == 1);
    REQUIRE(np2.segments[1].length == 1);
}

TEST_CASE("newton polygon slopes recover planted root valuations") {
    auto L = make_level({3, 64}, 1, 1);
    testsup::rng rng(4242);
    for (int trial = 0; trial < 50; ++trial) {
        long n = rng.range(2, 5);
        std::vector<long> vals;
        poly f = ints(L, {1});
        for (long i = 0; i < n; ++i) {
            long k = rng.range(-3, 3);
            long unit = rng.range(1, 2) == 1 ? 1 : 2;
            // root unit * 3^k has valuation k
            mpq_class r(unit);
            if (k >= 0)
                for (long t = 0; t < k; ++t) r *= 3;
            else
                for (long t = 0; t < -k; ++t) r /= 3;
            vals.push_back(k);
            f = p_mul(f, p_make(L, {fe_neg(fe_from_mpq(L, r)), fe_one(L)}));
        }
        newton_polygon_t np = newton_polygon(f);
        std::vector<long> got;
        for (const auto& seg : np.segments) {
            REQUIRE(seg.slope.get_den() == 1);
            for (long t = 0; t < seg.length; ++t) got.push_back(-seg.slope.get_num().get_si());
        }
        std::sort(vals.begin(), vals.end());
        std::sort(got.begin(), got.end());
        REQUIRE(got == vals);
    }
}

TEST_CASE("normalize_pair rescales the joint minimum to valuation zero") {
    auto L = make_level({5, 48}, 1, 1);
    normalized_pair np = normalize_pair(ints(L, {0, 0, 5}), ints(L, {25}));
    REQUIRE(np.scale_sv == -1);
    REQUIRE(p_eq_at_precision(np.f, ints(L, {0, 0, 1})));
    REQUIRE(p_eq_at_precision(np.g, ints(L, {5})));

    normalized_pair id = normalize_pair(ints(L, {0, 0, 5}), ints(L, {1}));
    REQUIRE(id.scale_sv == 0);

    REQUIRE_THROWS_AS(normalize_pair(ints(L, {0, -1, 1}), ints(L, {0, 1})), not_coprime);
}

TEST_CASE("evaluation and derivative behave on a ramified level") {
    auto L = make_level({5, 32}, 2, 2);
    poly f = ints(L, {1, -3, 0, 2}); // 2z^3 - 3z + 1
    field_element x = fe_add(fe_pi(L), fe_zeta(L));
    field_element fx = p_eval(f, x);
    field_element xx = fe_mul(x, x);
    field_element want = fe_add(
        fe_sub(fe_mul(fe_from_int(L, 2), fe_mul(xx, x)), fe_mul(fe_from_int(L, 3), x)),
        fe_one(L));
    REQUIRE(fe_eq_at_precision(fx, want));

    poly df = p_derivative(f); // 6z^2 - 3
    REQUIRE(p_eq_at_precision(df, ints(L, {-3, 0, 6})));
}
