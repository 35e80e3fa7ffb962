#pragma once

#include <string>
#include <utility>
#include <vector>

#include "padicdyn/errors.hpp"
#include "padicdyn/poly.hpp"
#include "padicdyn/residue.hpp"
#include "padicdyn/tower.hpp"

namespace padicdyn {

namespace detail {

// Joint normalization exponent: the minimum scaled valuation across the
// given elements, provided no zero-at-precision bound could undercut it.
inline long joint_min_sv(const std::vector<const field_element*>& cs, const char* what) {
    bool have = false;
    long m = 0;
    for (const auto* x : cs) {
        val_info vi = fe_val_info(*x);
        if (vi.determined && (!have || vi.sv < m)) m = vi.sv, have = true;
    }
    if (!have) throw insufficient_precision(std::string(what) + " is zero at precision");
    for (const auto* x : cs) {
        val_info vi = fe_val_info(*x);
        if (!vi.determined && vi.sv < m)
            throw insufficient_precision(std::string(what) + " has an undetermined minimum valuation",
                                         2 * cs.front()->L->n());
    }
    return m;
}

} // namespace detail

// (X : Y) scaled so the coordinate minimum sits at valuation zero.
struct projective_point {
    field_element X, Y;
};

inline projective_point make_point(field_element X, field_element Y) {
    long m = detail::joint_min_sv({&X, &Y}, "projective point");
    return {fe_mul_pi_pow(X, -m), fe_mul_pi_pow(Y, -m)};
}

inline projective_point pt_from_affine(const field_element& x) {
    return make_point(x, fe_one(x.L));
}

inline projective_point pt_infinity(const level_ptr& L) { return {fe_one(L), fe_zero(L)}; }

// Equality through the cross product; a flagged value certifies equality
// only when its bound clears the horizon.
inline bool pt_eq(const projective_point& a, const projective_point& b) {
    field_element cross = fe_sub(fe_mul(a.X, b.Y), fe_mul(b.X, a.Y));
    val_info vi = fe_val_info(cross);
    if (vi.determined) return false;
    if (vi.sv >= eq_horizon_sv(*a.X.L)) return true;
    throw insufficient_precision("points cannot be told apart at this precision",
                                 2 * a.X.L->n());
}

inline bool pt_is_infinity(const projective_point& a) {
    return pt_eq(a, pt_infinity(a.X.L));
}

inline field_element pt_affine(const projective_point& a) { return fe_div(a.X, a.Y); }

// z -> (a z + b) / (c z + d) as a normalized matrix with a certified
// invertibility decision.
struct mobius {
    field_element a, b, c, d;
};

inline field_element mobius_det(const mobius& h) {
    return fe_sub(fe_mul(h.a, h.d), fe_mul(h.b, h.c));
}

inline mobius make_mobius(field_element a, field_element b, field_element c, field_element d) {
    long m = detail::joint_min_sv({&a, &b, &c, &d}, "moebius matrix");
    mobius h{fe_mul_pi_pow(a, -m), fe_mul_pi_pow(b, -m), fe_mul_pi_pow(c, -m),
             fe_mul_pi_pow(d, -m)};
    val_info vi = fe_val_info(mobius_det(h));
    if (!vi.determined) {
        if (vi.sv >= eq_horizon_sv(*a.L)) throw error("moebius matrix is singular");
        throw insufficient_precision("moebius determinant is not certified", 2 * a.L->n());
    }
    return h;
}

inline mobius mobius_identity(const level_ptr& L) {
    return {fe_one(L), fe_zero(L), fe_zero(L), fe_one(L)};
}

inline projective_point mobius_apply(const mobius& h, const projective_point& x) {
    return make_point(fe_add(fe_mul(h.a, x.X), fe_mul(h.b, x.Y)),
                      fe_add(fe_mul(h.c, x.X), fe_mul(h.d, x.Y)));
}

inline field_element mobius_apply_affine(const mobius& h, const field_element& x) {
    return pt_affine(mobius_apply(h, pt_from_affine(x)));
}

inline mobius mobius_compose(const mobius& g, const mobius& h) {
    return make_mobius(fe_add(fe_mul(g.a, h.a), fe_mul(g.b, h.c)),
                       fe_add(fe_mul(g.a, h.b), fe_mul(g.b, h.d)),
                       fe_add(fe_mul(g.c, h.a), fe_mul(g.d, h.c)),
                       fe_add(fe_mul(g.c, h.b), fe_mul(g.d, h.d)));
}

inline mobius mobius_invert(const mobius& h) {
    return make_mobius(h.d, fe_neg(h.b), fe_neg(h.c), h.a);
}

// The unique map sending the pairwise-distinct triple (x0, x1, xinf) to
// (0, 1, infinity): rows are cross(x1, xinf) * (y0, -x0) and
// cross(x1, x0) * (yinf, -xinf).
inline mobius mobius_from_triple(const projective_point& a, const projective_point& b,
                                 const projective_point& c) {
    if (pt_eq(a, b) || pt_eq(b, c) || pt_eq(a, c)) throw degenerate_triple();
    auto cross = [](const projective_point& s, const projective_point& t) {
        return fe_sub(fe_mul(s.X, t.Y), fe_mul(t.X, s.Y));
    };
    field_element alpha = cross(b, c);
    field_element beta = cross(b, a);
    return make_mobius(fe_mul(alpha, a.Y), fe_neg(fe_mul(alpha, a.X)), fe_mul(beta, c.Y),
                       fe_neg(fe_mul(beta, c.X)));
}

// After normalization every entry is integral, so the automorphism respects
// the integral structure exactly when the determinant is a unit.
inline bool is_integral_unimodular(const mobius& h) {
    val_info vi = fe_val_info(mobius_det(h));
    if (!vi.determined)
        throw insufficient_precision("moebius determinant valuation undetermined", 2 * h.a.L->n());
    return vi.sv == 0;
}

struct residue_point {
    residue_element X, Y;
};

struct residue_mobius {
    residue_element a, b, c, d;
};

inline residue_point reduce_point(const projective_point& x) {
    return {fe_reduce(x.X), fe_reduce(x.Y)};
}

inline residue_mobius reduce_mobius(const mobius& h) {
    if (!is_integral_unimodular(h)) throw error("moebius matrix does not reduce invertibly");
    return {fe_reduce(h.a), fe_reduce(h.b), fe_reduce(h.c), fe_reduce(h.d)};
}

inline residue_point residue_apply(const residue_field& F, const residue_mobius& h,
                                   const residue_point& x) {
    return {re_add(F, re_mul(F, h.a, x.X), re_mul(F, h.b, x.Y)),
            re_add(F, re_mul(F, h.c, x.X), re_mul(F, h.d, x.Y))};
}

inline bool residue_pt_eq(const residue_field& F, const residue_point& a,
                          const residue_point& b) {
    return re_is_zero(re_sub(F, re_mul(F, a.X, b.Y), re_mul(F, b.X, a.Y)));
}

} // namespace padicdyn
