#pragma once

#include <utility>
#include <vector>

#include "padicdyn/errors.hpp"
#include "padicdyn/projective.hpp"
#include "padicdyn/ratmap.hpp"
#include "padicdyn/residue.hpp"

namespace padicdyn {

// The residue-field side of a map: the cancelled reduced pair, applied as
// degree-d homogeneous forms.
struct residue_map {
    rpoly f, g;
    long d = 0;
};

inline residue_point residue_map_apply(const residue_field& F, const residue_map& m,
                                       const residue_point& x) {
    std::vector<residue_element> xp{re_one(F)}, yp{re_one(F)};
    for (long k = 1; k <= m.d; ++k) {
        xp.push_back(re_mul(F, xp.back(), x.X));
        yp.push_back(re_mul(F, yp.back(), x.Y));
    }
    residue_element num = re_zero(F), den = re_zero(F);
    for (long k = 0; k <= m.d; ++k) {
        residue_element mono = re_mul(F, xp[static_cast<std::size_t>(k)], yp[static_cast<std::size_t>(m.d - k)]);
        if (k <= rp_degree(m.f))
            num = re_add(F, num, re_mul(F, m.f[static_cast<std::size_t>(k)], mono));
        if (k <= rp_degree(m.g))
            den = re_add(F, den, re_mul(F, m.g[static_cast<std::size_t>(k)], mono));
    }
    return {num, den};
}

struct reduction_report {
    enum class reason_t { none, zero_denominator, common_factor, leading_collapse };
    bool good = false;
    reason_t reason = reason_t::none;
    residue_map reduced;       // residue pair after cancelling the common factor
    long reduced_degree = 0;   // degree of the reduced map; good iff equal to d
};

// Reduce the normalized pair coefficientwise and decide whether the degree
// survives: the denominator must not vanish, the residue pair must stay
// coprime, and the top coefficients must not collapse jointly.
inline reduction_report good_reduction(const rational_map& phi) {
    const residue_field& F = phi.L->k;
    rpoly fbar, gbar;
    for (long i = 0; i <= p_degree(phi.f); ++i) fbar.push_back(fe_reduce(phi.f.c[static_cast<std::size_t>(i)]));
    for (long i = 0; i <= p_degree(phi.g); ++i) gbar.push_back(fe_reduce(phi.g.c[static_cast<std::size_t>(i)]));
    fbar = rp_trim(std::move(fbar));
    gbar = rp_trim(std::move(gbar));

    reduction_report rep;
    rep.reduced = {fbar, gbar, phi.d};
    if (rp_is_zero(gbar)) {
        rep.reason = reduction_report::reason_t::zero_denominator;
        rep.reduced_degree = 0;
        return rep;
    }
    rpoly D = rp_gcd(F, fbar, gbar);
    if (rp_degree(D) >= 1) {
        rep.reason = reduction_report::reason_t::common_factor;
        rep.reduced.f = rp_is_zero(fbar) ? fbar : rp_divmod(F, fbar, D).first;
        rep.reduced.g = rp_divmod(F, gbar, D).first;
    }
    long dmax = std::max(rp_degree(rep.reduced.f), rp_degree(rep.reduced.g));
    rep.reduced_degree = dmax < 0 ? 0 : dmax;
    if (rep.reduced_degree == phi.d) {
        rep.good = true;
        rep.reason = reduction_report::reason_t::none;
    } else if (rep.reason == reduction_report::reason_t::none) {
        rep.reason = reduction_report::reason_t::leading_collapse;
    }
    return rep;
}

// The resultant of the degree-d homogeneous pair is a unit exactly for good
// reduction.  A zero-at-precision resultant with positive bound certifies a
// bad verdict; a bound at or below zero decides nothing.
struct resultant_check {
    field_element res;
    bool good = false;
};

inline resultant_check resultant_criterion(const rational_map& phi) {
    auto F = detail::homogeneous_coeffs(phi.f, phi.d, phi.L);
    auto G = detail::homogeneous_coeffs(phi.g, phi.d, phi.L);
    resultant_check out{resultant_from_arrays(phi.L, F, G), false};
    val_info vi = fe_val_info(out.res);
    if (!vi.determined) {
        if (vi.sv <= 0)
            throw insufficient_precision("resultant valuation is undetermined", 2 * phi.L->n());
        out.good = false;
        return out;
    }
    out.good = vi.sv == 0;
    return out;
}

// For a map with good reduction, reduction commutes with application.
inline bool check_respects_reduction(const rational_map& phi, const reduction_report& rep,
                                     const projective_point& x) {
    const residue_field& F = phi.L->k;
    residue_point lhs = reduce_point(map_apply(phi, x));
    residue_point rhs = residue_map_apply(F, rep.reduced, reduce_point(x));
    return residue_pt_eq(F, lhs, rhs);
}

} // namespace padicdyn
