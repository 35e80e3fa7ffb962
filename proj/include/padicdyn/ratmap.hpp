#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "padicdyn/errors.hpp"
#include "padicdyn/exact.hpp"
#include "padicdyn/poly.hpp"
#include "padicdyn/projective.hpp"
#include "padicdyn/roots.hpp"

namespace padicdyn {

// z -> f(z)/g(z) of degree d = max(deg f, deg g) >= 1 with f, g coprime and
// jointly scaled to coefficient minimum zero.  When the map descends from an
// exact source, the source rides along so a failed precision budget can be
// retried with more digits.
struct rational_map {
    level_ptr L;
    long d = 0;
    poly f, g;
    std::optional<exact_source> source;
};

inline rational_map make_rational_map(const level_ptr& L, const poly& f, const poly& g,
                                      std::optional<exact_source> source = std::nullopt) {
    normalized_pair np = normalize_pair(f, g);
    long d = std::max(p_degree(np.f), p_degree(np.g));
    if (d < 1) throw error("map must be nonconstant");
    return {L, d, std::move(np.f), std::move(np.g), std::move(source)};
}

inline rational_map realize_map(const exact_source& s, const level_ptr& L) {
    auto [f, g] = realize_pair(s, L);
    return make_rational_map(L, f, g, s);
}

namespace detail {

inline std::vector<field_element> homogeneous_coeffs(const poly& f, long d,
                                                     const level_ptr& L) {
    std::vector<field_element> F(static_cast<std::size_t>(d) + 1, fe_zero(L));
    for (long i = 0; i <= p_degree(f); ++i) F[static_cast<std::size_t>(i)] = f.c[static_cast<std::size_t>(i)];
    return F;
}

// substitute X -> r X + s Y, Y -> t X + w Y into a homogeneous coefficient
// array (index = X-power)
inline std::vector<field_element> fe_subst_linear(const level_ptr& L,
                                                  const std::vector<field_element>& A,
                                                  const field_element& r, const field_element& s,
                                                  const field_element& t, const field_element& w) {
    long m = static_cast<long>(A.size()) - 1;
    std::vector<std::vector<field_element>> pw1, pw2;
    pw1.push_back({fe_one(L)});
    pw2.push_back({fe_one(L)});
    for (long k = 1; k <= m; ++k) {
        auto step = [&](const std::vector<field_element>& prev, const field_element& hi,
                        const field_element& lo) {
            std::vector<field_element> nxt(prev.size() + 1, fe_zero(L));
            for (std::size_t i = 0; i < prev.size(); ++i) {
                nxt[i + 1] = fe_add(nxt[i + 1], fe_mul(prev[i], hi));
                nxt[i] = fe_add(nxt[i], fe_mul(prev[i], lo));
            }
            return nxt;
        };
        pw1.push_back(step(pw1.back(), r, s));
        pw2.push_back(step(pw2.back(), t, w));
    }
    std::vector<field_element> out(A.size(), fe_zero(L));
    for (long k = 0; k <= m; ++k) {
        const auto& P = pw1[static_cast<std::size_t>(k)];
        const auto& Q = pw2[static_cast<std::size_t>(m - k)];
        for (std::size_t i = 0; i < P.size(); ++i)
            for (std::size_t j = 0; j < Q.size(); ++j)
                out[i + j] = fe_add(out[i + j],
                                    fe_mul(A[static_cast<std::size_t>(k)], fe_mul(P[i], Q[j])));
    }
    return out;
}

} // namespace detail

inline projective_point map_apply(const rational_map& phi, const projective_point& x) {
    auto F = detail::homogeneous_coeffs(phi.f, phi.d, phi.L);
    auto G = detail::homogeneous_coeffs(phi.g, phi.d, phi.L);
    std::vector<field_element> xp{fe_one(phi.L)}, yp{fe_one(phi.L)};
    for (long k = 1; k <= phi.d; ++k) {
        xp.push_back(fe_mul(xp.back(), x.X));
        yp.push_back(fe_mul(yp.back(), x.Y));
    }
    field_element num = fe_zero(phi.L), den = fe_zero(phi.L);
    for (long k = 0; k <= phi.d; ++k) {
        field_element mono = fe_mul(xp[static_cast<std::size_t>(k)], yp[static_cast<std::size_t>(phi.d - k)]);
        num = fe_add(num, fe_mul(F[static_cast<std::size_t>(k)], mono));
        den = fe_add(den, fe_mul(G[static_cast<std::size_t>(k)], mono));
    }
    return make_point(num, den);
}

inline field_element map_eval_affine(const rational_map& phi, const field_element& x) {
    return fe_div(p_eval(phi.f, x), p_eval(phi.g, x));
}

// --------------------------------------------------------------------------
// Fixed points and multipliers.
// --------------------------------------------------------------------------

// f(z) - z g(z); the point at infinity is fixed exactly when this degree
// falls short of d + 1, with the shortfall as multiplicity.
inline poly fixed_point_polynomial(const rational_map& phi) {
    return p_sub(phi.f, p_mul_x_pow(phi.g, 1));
}

enum class fp_class { attracting, indifferent, repelling };

// |multiplier| against 1, certified: a zero-at-precision multiplier is
// attracting when its bound is positive.
inline fp_class classify_multiplier(const field_element& lambda) {
    val_info vi = fe_val_info(lambda);
    if (!vi.determined) {
        if (vi.sv > 0) return fp_class::attracting;
        throw insufficient_precision("multiplier size is undetermined", 2 * lambda.L->n());
    }
    if (vi.sv > 0) return fp_class::attracting;
    if (vi.sv == 0) return fp_class::indifferent;
    return fp_class::repelling;
}

inline field_element multiplier(const rational_map& phi, const projective_point& x) {
    if (!pt_eq(map_apply(phi, x), x)) throw not_fixed();
    const level_ptr& L = phi.L;
    if (pt_is_infinity(x)) {
        // conjugate by z -> 1/z: the reversed pair swaps roles
        auto F = detail::homogeneous_coeffs(phi.f, phi.d, L);
        auto G = detail::homogeneous_coeffs(phi.g, phi.d, L);
        field_element rf0 = F[static_cast<std::size_t>(phi.d)];
        field_element rf1 = phi.d >= 1 ? F[static_cast<std::size_t>(phi.d - 1)] : fe_zero(L);
        field_element rg0 = G[static_cast<std::size_t>(phi.d)];
        field_element rg1 = phi.d >= 1 ? G[static_cast<std::size_t>(phi.d - 1)] : fe_zero(L);
        return fe_div(fe_sub(fe_mul(rg1, rf0), fe_mul(rg0, rf1)), fe_mul(rf0, rf0));
    }
    field_element a = pt_affine(x);
    field_element gx = p_eval(phi.g, a);
    field_element num = fe_sub(fe_mul(p_eval(p_derivative(phi.f), a), gx),
                               fe_mul(p_eval(phi.f, a), p_eval(p_derivative(phi.g), a)));
    return fe_div(num, fe_mul(gx, gx));
}

struct fixed_point_record {
    projective_point x;
    field_element lambda;
    fp_class cls;
    long multiplicity = 1;
};

struct fixed_point_list {
    std::vector<fixed_point_record> points;
    bool complete = false;
};

inline fixed_point_list fixed_points(const rational_map& phi) {
    poly Phi = fixed_point_polynomial(phi);
    if (p_is_zero(Phi)) throw error("identity map has every point fixed");
    fixed_point_list out;
    root_list rl = roots_in_level(Phi);
    for (const auto& en : rl.roots) {
        projective_point x = pt_from_affine(en.x);
        field_element lam = multiplier(phi, x);
        out.points.push_back({x, lam, classify_multiplier(lam), en.multiplicity});
    }
    long dPhi = p_degree(Phi);
    long minf = phi.d + 1 - dPhi;
    if (minf > 0) {
        projective_point inf = pt_infinity(phi.L);
        field_element lam = multiplier(phi, inf);
        out.points.push_back({inf, lam, classify_multiplier(lam), minf});
    }
    long total = 0;
    for (const auto& r : out.points) total += r.multiplicity;
    out.complete = total == phi.d + 1;
    return out;
}

// --------------------------------------------------------------------------
// Preimages of a point.
// --------------------------------------------------------------------------

struct preimage_list {
    std::vector<std::pair<projective_point, long>> points;
    bool complete = false;
};

inline poly preimage_polynomial(const rational_map& phi, const projective_point& a) {
    return p_sub(p_scale(phi.f, a.Y), p_scale(phi.g, a.X));
}

inline preimage_list preimages(const rational_map& phi, const projective_point& a) {
    poly P = preimage_polynomial(phi, a);
    if (p_is_zero(P)) throw error("preimage polynomial vanished; the map is degenerate");
    preimage_list out;
    root_list rl = roots_in_level(P);
    for (const auto& en : rl.roots)
        out.points.emplace_back(pt_from_affine(en.x), en.multiplicity);
    long minf = phi.d - p_degree(P);
    if (minf > 0) out.points.emplace_back(pt_infinity(phi.L), minf);
    long total = 0;
    for (const auto& [x, m] : out.points) total += m;
    out.complete = total == phi.d;
    return out;
}

// --------------------------------------------------------------------------
// Conjugation and composition.
// --------------------------------------------------------------------------

inline rational_map map_conjugate(const rational_map& phi, const mobius& h) {
    const level_ptr& L = phi.L;
    auto F = detail::homogeneous_coeffs(phi.f, phi.d, L);
    auto G = detail::homogeneous_coeffs(phi.g, phi.d, L);
    auto U = detail::fe_subst_linear(L, F, h.d, fe_neg(h.b), fe_neg(h.c), h.a);
    auto V = detail::fe_subst_linear(L, G, h.d, fe_neg(h.b), fe_neg(h.c), h.a);
    std::vector<field_element> num, den;
    for (std::size_t k = 0; k < U.size(); ++k) {
        num.push_back(fe_add(fe_mul(h.a, U[k]), fe_mul(h.b, V[k])));
        den.push_back(fe_add(fe_mul(h.c, U[k]), fe_mul(h.d, V[k])));
    }
    poly nf = p_make(L, std::move(num));
    poly ng = p_make(L, std::move(den));
    if (p_is_zero(nf) || p_is_zero(ng))
        throw insufficient_precision("conjugation lost degree to precision", 2 * L->n());
    rational_map psi = make_rational_map(L, std::move(nf), std::move(ng));
    if (psi.d != phi.d)
        throw insufficient_precision("conjugation lost degree to precision", 2 * L->n());
    return psi;
}

inline rational_map map_compose(const rational_map& phi, const rational_map& psi) {
    const level_ptr& L = phi.L;
    auto F = detail::homogeneous_coeffs(phi.f, phi.d, L);
    auto G = detail::homogeneous_coeffs(phi.g, phi.d, L);
    std::vector<poly> np, dp; // powers of psi.f and psi.g
    np.push_back(p_from_coeff_list(L, {1}));
    dp.push_back(p_from_coeff_list(L, {1}));
    for (long k = 1; k <= phi.d; ++k) {
        np.push_back(p_mul(np.back(), psi.f));
        dp.push_back(p_mul(dp.back(), psi.g));
    }
    poly num = p_zero(L), den = p_zero(L);
    for (long k = 0; k <= phi.d; ++k) {
        poly mono = p_mul(np[static_cast<std::size_t>(k)], dp[static_cast<std::size_t>(phi.d - k)]);
        num = p_add(num, p_scale(mono, F[static_cast<std::size_t>(k)]));
        den = p_add(den, p_scale(mono, G[static_cast<std::size_t>(k)]));
    }
    if (p_is_zero(num) || p_is_zero(den))
        throw insufficient_precision("composition lost degree to precision", 2 * L->n());
    rational_map comp = make_rational_map(L, num, den);
    if (comp.d != phi.d * psi.d)
        throw insufficient_precision("composition lost degree to precision", 2 * L->n());
    return comp;
}

} // namespace padicdyn
