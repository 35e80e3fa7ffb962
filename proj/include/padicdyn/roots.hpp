#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <numeric>
#include <utility>
#include <vector>

#include "padicdyn/errors.hpp"
#include "padicdyn/poly.hpp"
#include "padicdyn/residue.hpp"
#include "padicdyn/tower.hpp"

namespace padicdyn {

struct root_entry {
    field_element x;
    long multiplicity = 1;
};

struct root_list {
    std::vector<root_entry> roots;
    bool complete_in_level = false; // true when the multiplicities sum to deg f
};

// Newton iteration from a start satisfying v(f(x)) > 2 v(f'(x)); converges
// quadratically to the unique nearby root.
inline field_element hensel_lift(const poly& f, const field_element& x0) {
    poly df = p_derivative(f);
    field_element x = x0;
    field_element fx = p_eval(f, x);
    if (!fe_is_zero_at_precision(fx)) {
        val_info a = fe_val_info(fx);
        val_info b = fe_val_info(p_eval(df, x));
        if (!b.determined || a.sv <= 2 * b.sv)
            throw convergence_failure("newton step is not certified to contract");
    }
    for (int it = 0; it < 300; ++it) {
        if (fe_is_zero_at_precision(fx)) return x;
        x = fe_sub(x, fe_div(fx, p_eval(df, x)));
        fx = p_eval(f, x);
    }
    throw convergence_failure("newton iteration did not settle");
}

inline poly p_taylor_shift(const poly& f, const field_element& a) {
    std::vector<field_element> h = f.c;
    long n = p_degree(f);
    for (long j = 0; j < n; ++j)
        for (long i = n - 1; i >= j; --i)
            h[static_cast<std::size_t>(i)] =
                fe_add(h[static_cast<std::size_t>(i)], fe_mul(a, h[static_cast<std::size_t>(i + 1)]));
    return p_make(f.L, std::move(h));
}

namespace detail {

// Collects the roots of f lying in its own level.  Each Newton-polygon
// segment whose slope is realizable in the level is rescaled to a unit
// polynomial; simple residue roots lift by Newton iteration and repeated
// residue roots recurse into the cluster after a Taylor shift.  With
// only_positive set, segments with nonpositive root valuation are skipped
// (cluster recursion digs strictly downward in absolute value).  rescale and
// recenter accumulate the frame changes of the enclosing digs: a cluster
// around an exact multiple root never separates, and terminates instead when
// the polygon certifies its vanishing order against the original frame.
inline void roots_impl(const poly& f, bool only_positive, int depth, long rescale, long recenter,
                       std::vector<root_entry>& out) {
    const level_ptr& L = f.L;
    if (depth > 400)
        throw insufficient_precision("root clusters did not separate", 2 * L->n());
    newton_polygon_t np = newton_polygon(f, rescale, recenter);
    long at_center = np.vanishing_order;
    for (const auto& seg : np.segments) {
        mpq_class rv = -seg.slope;
        if (only_positive && rv <= 0) continue;
        mpq_class tq = rv * L->e;
        // An uncertified segment sits below the bound of a trusted zero: its
        // members cannot be separated from the expansion center at this
        // precision, so they join the center's multiplicity.
        if (!seg.certified) {
            at_center += seg.length;
            continue;
        }
        if (tq.get_den() != 1) continue; // these roots need more ramification
        long t = tq.get_num().get_si();
        long c = seg.sv0 + t * seg.i0;
        std::vector<field_element> gc;
        gc.reserve(f.c.size());
        for (long i = 0; i <= p_degree(f); ++i)
            gc.push_back(fe_mul_pi_pow(f.c[static_cast<std::size_t>(i)], t * i - c));
        poly g = p_make(L, std::move(gc));
        rpoly gbar;
        for (std::size_t i = 0; i < g.c.size(); ++i)
            gbar.push_back(
                fe_reduce(g.c[i], rescale + c - static_cast<long>(i) * (recenter + t)));
        gbar = rp_trim(std::move(gbar));
        for (const auto& [rbar, m] : rp_roots(L->k, gbar)) {
            if (re_is_zero(rbar)) continue; // belongs to a steeper segment
            field_element r = fe_reduce_helper_lift(L, rbar);
            if (m == 1) {
                field_element w = hensel_lift(g, r);
                out.push_back({fe_mul_pi_pow(w, t), 1});
            } else {
                std::vector<root_entry> cluster;
                roots_impl(p_taylor_shift(g, r), true, depth + 1, rescale + c, recenter + t,
                           cluster);
                for (const auto& en : cluster)
                    out.push_back({fe_mul_pi_pow(fe_add(r, en.x), t), en.multiplicity});
            }
        }
    }
    if (at_center > 0) {
        long b = np.center_bound_sv;
        long s = b >= 0 ? b / at_center : -((-b + at_center - 1) / at_center);
        out.push_back({fe_flagged_zero(L, s), at_center});
    }
}

} // namespace detail

inline root_list roots_in_level(const poly& f) {
    if (p_is_zero(f)) throw error("root search on the zero polynomial");
    root_list rl;
    detail::roots_impl(f, false, 0, 0, 0, rl.roots);
    std::sort(rl.roots.begin(), rl.roots.end(),
              [](const root_entry& a, const root_entry& b) { return fe_key_compare(a.x, b.x) < 0; });
    long total = 0;
    for (const auto& en : rl.roots) total += en.multiplicity;
    rl.complete_in_level = total == p_degree(f);
    return rl;
}

namespace detail {

// Mirrors the traversal of roots_impl, but collects the extensions the
// missing roots would need instead of the roots themselves: ramification
// from fractional slopes, residue growth from higher-degree factors of the
// residual polynomials, and recursion into repeated-root clusters (whose
// needs only become visible after the Taylor shift).
inline void suggest_impl(const poly& f, bool only_positive, int depth, long rescale, long recenter,
                         std::vector<extension_spec>& out) {
    const level_ptr& L = f.L;
    if (depth > 400)
        throw insufficient_precision("root clusters did not separate", 2 * L->n());
    newton_polygon_t np = newton_polygon(f, rescale, recenter);
    auto push = [&](long u2, long e2) {
        if (u2 == L->u && e2 == L->e) return;
        for (const auto& s : out)
            if (s.unramified_degree == u2 && s.ramification_index == e2) return;
        out.push_back({static_cast<int>(u2), static_cast<int>(e2)});
    };
    for (const auto& seg : np.segments) {
        mpq_class rv = -seg.slope;
        if (only_positive && rv <= 0) continue;
        mpq_class tq = rv * L->e;
        if (!seg.certified) continue; // merges with the center instead
        if (tq.get_den() != 1) {
            long e2 = std::lcm(static_cast<long>(L->e), rv.get_den().get_si());
            mpq_class step(seg.sv1 - seg.sv0, seg.i1 - seg.i0);
            step.canonicalize();
            long bb = step.get_den().get_si();
            long aa = step.get_num().get_si();
            rpoly R;
            for (long k = 0; k <= seg.length / bb; ++k) {
                field_element coeff = p_coeff(f, seg.i0 + k * bb);
                R.push_back(fe_reduce(fe_mul_pi_pow(coeff, -(seg.sv0 + k * aa)),
                                      rescale + seg.sv0 + k * aa - (seg.i0 + k * bb) * recenter));
            }
            R = rp_trim(std::move(R));
            for (const auto& [D, count] : rp_factor_degrees(L->k, R)) {
                (void)count;
                push(L->u * D, e2);
            }
            continue;
        }
        long t = tq.get_num().get_si();
        long c = seg.sv0 + t * seg.i0;
        std::vector<field_element> gc;
        gc.reserve(f.c.size());
        for (long i = 0; i <= p_degree(f); ++i)
            gc.push_back(fe_mul_pi_pow(f.c[static_cast<std::size_t>(i)], t * i - c));
        poly g = p_make(L, std::move(gc));
        rpoly gbar;
        for (std::size_t i = 0; i < g.c.size(); ++i)
            gbar.push_back(
                fe_reduce(g.c[i], rescale + c - static_cast<long>(i) * (recenter + t)));
        gbar = rp_trim(std::move(gbar));
        for (const auto& [D, count] : rp_factor_degrees(L->k, gbar)) {
            (void)count;
            if (D >= 2) push(L->u * D, L->e);
        }
        for (const auto& [rbar, m] : rp_roots(L->k, gbar)) {
            if (re_is_zero(rbar)) continue;
            if (m >= 2)
                suggest_impl(p_taylor_shift(g, fe_reduce_helper_lift(L, rbar)), true, depth + 1,
                             rescale + c, recenter + t, out);
        }
    }
}

} // namespace detail

// Extensions (absolute over the base field) in which the currently
// inexpressible roots of f would land.  Wild candidates are still reported;
// the caller decides supportability.
inline std::vector<extension_spec> suggest_extensions(const poly& f) {
    std::vector<extension_spec> out;
    detail::suggest_impl(f, false, 0, 0, 0, out);
    std::sort(out.begin(), out.end(), [](const extension_spec& a, const extension_spec& b) {
        if (a.total_degree() != b.total_degree()) return a.total_degree() < b.total_degree();
        return a.unramified_degree < b.unramified_degree;
    });
    return out;
}

// Basis images of `from` inside `to` (same prime; u | u', e | e').  The
// unramified generator maps to a lifted root of its own residue modulus,
// chosen canonically as the first root in index order; uniformizers relate
// exactly by pi -> pi'^{e'/e}.
inline level_embedding make_embedding(const level_ptr& from, const level_ptr& to) {
    if (from->cfg.p != to->cfg.p) throw error("embedding requires the same prime");
    if (to->u % from->u != 0 || to->e % from->e != 0)
        throw error("embedding requires compatible extension degrees");
    field_element zimg = fe_one(to);
    if (from->u > 1 && from->u == to->u) {
        zimg = fe_zeta(to);
    } else if (from->u > 1) {
        rpoly mbar;
        for (const auto& d : from->k.modulus) mbar.push_back(re_from_int(to->k, d));
        mbar = rp_trim(std::move(mbar));
        auto rts = rp_roots(to->k, mbar);
        if (rts.empty()) throw error("residue modulus has no root in the target level");
        std::vector<field_element> mc;
        for (const auto& d : from->k.modulus) mc.push_back(fe_from_int(to, d));
        zimg = hensel_lift(p_make(to, std::move(mc)), fe_reduce_helper_lift(to, rts.front().first));
    }
    level_embedding E{from, to, {}};
    E.basis_image.reserve(static_cast<std::size_t>(from->dim()));
    long estep = to->e / from->e;
    for (int j = 0; j < from->e; ++j)
        for (int i = 0; i < from->u; ++i)
            E.basis_image.push_back(fe_mul_pi_pow(fe_pow(zimg, i), estep * j));
    return E;
}

} // namespace padicdyn
