#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cassert>
#include <optional>
#include <utility>
#include <vector>

#include "padicdyn/errors.hpp"
#include "padicdyn/tower.hpp"

namespace padicdyn {

inline field_element fe_flagged_zero(const level_ptr& L, long sv_bound) {
    field_element r = fe_zero(L);
    long b = sv_bound >= 0 ? sv_bound / L->e : -((-sv_bound + L->e - 1) / L->e);
    for (auto& q : r.c) q = qp_zero_at(b);
    return r;
}

// Coefficients are stored low degree first; the zero polynomial is empty and
// a nonempty polynomial always has a leading coefficient that is not zero at
// precision.
struct poly {
    level_ptr L;
    std::vector<field_element> c;
};

inline long p_degree(const poly& f) { return static_cast<long>(f.c.size()) - 1; }
inline bool p_is_zero(const poly& f) { return f.c.empty(); }

// Trimming constructor: flagged leading coefficients with a comfortable bound
// are treated as zeros (they arise from exact cancellation); a flagged leading
// coefficient with a damaged bound cannot be classified and is an error.
inline poly p_make(const level_ptr& L, std::vector<field_element> coeffs) {
    while (!coeffs.empty()) {
        val_info vi = fe_val_info(coeffs.back());
        if (vi.determined) break;
        if (vi.sv < eq_horizon_sv(*L))
            throw insufficient_precision("leading coefficient is zero at a damaged precision",
                                         2 * L->n());
        coeffs.pop_back();
    }
    return poly{L, std::move(coeffs)};
}

// Strict constructor for declared-degree input: reject rather than trim.
inline poly p_make_strict(const level_ptr& L, std::vector<field_element> coeffs) {
    if (!coeffs.empty() && fe_is_zero_at_precision(coeffs.back())) {
        bool all_flagged = true;
        for (const auto& x : coeffs)
            if (!fe_is_zero_at_precision(x)) all_flagged = false;
        if (!all_flagged)
            throw insufficient_precision("declared degree has a zero-at-precision leading coefficient");
        coeffs.clear();
    }
    return poly{L, std::move(coeffs)};
}

inline poly p_zero(const level_ptr& L) { return poly{L, {}}; }

inline poly p_from_coeff_list(const level_ptr& L, const std::vector<mpq_class>& coeffs) {
    std::vector<field_element> v;
    v.reserve(coeffs.size());
    for (const auto& q : coeffs) v.push_back(fe_from_mpq(L, q));
    return p_make(L, std::move(v));
}

inline field_element p_coeff(const poly& f, long i) {
    if (i < 0 || i > p_degree(f)) return fe_zero(f.L);
    return f.c[static_cast<std::size_t>(i)];
}

inline poly p_add(const poly& f, const poly& g) {
    std::vector<field_element> r;
    long n = std::max(p_degree(f), p_degree(g));
    for (long i = 0; i <= n; ++i) r.push_back(fe_add(p_coeff(f, i), p_coeff(g, i)));
    return p_make(f.L, std::move(r));
}

inline poly p_neg(const poly& f) {
    poly r = f;
    for (auto& x : r.c) x = fe_neg(x);
    return r;
}

inline poly p_sub(const poly& f, const poly& g) { return p_add(f, p_neg(g)); }

inline poly p_scale(const poly& f, const field_element& s) {
    std::vector<field_element> r;
    r.reserve(f.c.size());
    for (const auto& x : f.c) r.push_back(fe_mul(x, s));
    return p_make(f.L, std::move(r));
}

// Exact rescaling by pi^k, coefficientwise.
inline poly p_scale_pi(const poly& f, long k) {
    poly r = f;
    for (auto& x : r.c) x = fe_mul_pi_pow(x, k);
    return r;
}

inline poly p_mul_x_pow(const poly& f, long k) {
    if (p_is_zero(f)) return f;
    poly r{f.L, std::vector<field_element>(static_cast<std::size_t>(k), fe_zero(f.L))};
    for (const auto& x : f.c) r.c.push_back(x);
    return r;
}

inline poly p_mul(const poly& f, const poly& g) {
    if (p_is_zero(f) || p_is_zero(g)) return p_zero(f.L);
    std::vector<field_element> r(f.c.size() + g.c.size() - 1, fe_zero(f.L));
    for (std::size_t i = 0; i < f.c.size(); ++i)
        for (std::size_t j = 0; j < g.c.size(); ++j)
            r[i + j] = fe_add(r[i + j], fe_mul(f.c[i], g.c[j]));
    return p_make(f.L, std::move(r));
}

inline field_element p_eval(const poly& f, const field_element& x) {
    field_element r = fe_zero(f.L);
    for (std::size_t i = f.c.size(); i-- > 0;) r = fe_add(fe_mul(r, x), f.c[i]);
    return r;
}

inline poly p_derivative(const poly& f) {
    if (f.c.size() <= 1) return p_zero(f.L);
    std::vector<field_element> r;
    r.reserve(f.c.size() - 1);
    for (std::size_t i = 1; i < f.c.size(); ++i)
        r.push_back(fe_scale_qp(f.c[i], qp_exact_int(f.L->qc, static_cast<long>(i), f.L->n() + 8)));
    return p_make(f.L, std::move(r));
}

// Division with remainder.  The remainder's degree is certified the same way
// p_make certifies degrees; a damaged leading bound raises.
inline std::pair<poly, poly> p_divmod(const poly& f, const poly& g) {
    assert(!p_is_zero(g));
    long df = p_degree(f), dg = p_degree(g);
    if (df < dg) return {p_zero(f.L), f};
    field_element linv = fe_inv(g.c.back());
    std::vector<field_element> rem = f.c;
    std::vector<field_element> quo(static_cast<std::size_t>(df - dg) + 1, fe_zero(f.L));
    for (long k = df; k >= dg; --k) {
        field_element cf = fe_mul(rem[static_cast<std::size_t>(k)], linv);
        quo[static_cast<std::size_t>(k - dg)] = cf;
        for (long i = 0; i <= dg; ++i) {
            auto& slot = rem[static_cast<std::size_t>(k - dg + i)];
            slot = fe_sub(slot, fe_mul(cf, g.c[static_cast<std::size_t>(i)]));
        }
    }
    rem.resize(static_cast<std::size_t>(dg));
    return {p_make(f.L, std::move(quo)), p_make(f.L, std::move(rem))};
}

inline poly p_monic(const poly& f) {
    if (p_is_zero(f)) return f;
    return p_scale(f, fe_inv(f.c.back()));
}

// Monic gcd by the Euclidean algorithm; every degree drop along the way is
// certified by p_make, so an uncertifiable drop surfaces as
// insufficient_precision instead of a wrong answer.
inline poly p_gcd(poly f, poly g) {
    while (!p_is_zero(g)) {
        poly r = p_divmod(f, g).second;
        f = std::move(g);
        g = p_monic(r);
    }
    return p_monic(f);
}

inline bool p_eq_at_precision(const poly& f, const poly& g) {
    long n = std::max(p_degree(f), p_degree(g));
    for (long i = 0; i <= n; ++i)
        if (!fe_is_zero_at_precision(fe_sub(p_coeff(f, i), p_coeff(g, i)))) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Resultant: Sylvester matrix with fraction-free (Bareiss) elimination and
// full pivoting on minimal valuation.  Works on explicit coefficient arrays
// so callers can force degrees (homogeneous resultants pad with zeros).
// ---------------------------------------------------------------------------

inline field_element resultant_from_arrays(const level_ptr& L, const std::vector<field_element>& fc,
                                           const std::vector<field_element>& gc) {
    long df = static_cast<long>(fc.size()) - 1;
    long dg = static_cast<long>(gc.size()) - 1;
    assert(df >= 0 && dg >= 0);
    long m = df + dg;
    if (m == 0) return fe_one(L);
    std::vector<std::vector<field_element>> M(static_cast<std::size_t>(m),
                                              std::vector<field_element>());
    for (long r = 0; r < dg; ++r) {
        std::vector<field_element> row(static_cast<std::size_t>(m), fe_zero(L));
        for (long j = 0; j <= df; ++j) row[static_cast<std::size_t>(r + j)] = fc[static_cast<std::size_t>(df - j)];
        M[static_cast<std::size_t>(r)] = std::move(row);
    }
    for (long r = 0; r < df; ++r) {
        std::vector<field_element> row(static_cast<std::size_t>(m), fe_zero(L));
        for (long j = 0; j <= dg; ++j) row[static_cast<std::size_t>(r + j)] = gc[static_cast<std::size_t>(dg - j)];
        M[static_cast<std::size_t>(dg + r)] = std::move(row);
    }
    int sign = 1;
    field_element prev = fe_one(L);
    for (long k = 0; k < m; ++k) {
        long pr = -1, pc = -1, best_sv = 0;
        long worst_bound = 0;
        bool have_bound = false;
        for (long i = k; i < m; ++i)
            for (long j = k; j < m; ++j) {
                val_info vi = fe_val_info(M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
                if (vi.determined) {
                    if (pr < 0 || vi.sv < best_sv) {
                        pr = i;
                        pc = j;
                        best_sv = vi.sv;
                    }
                } else if (!have_bound || vi.sv < worst_bound) {
                    worst_bound = vi.sv;
                    have_bound = true;
                }
            }
        if (pr < 0) {
            // the remaining block is flagged everywhere; bound the determinant
            long s = m - k;
            long prev_sv = fe_val_info(prev).sv;
            return fe_flagged_zero(L, s * worst_bound - (s - 1) * prev_sv);
        }
        if (pr != k) {
            std::swap(M[static_cast<std::size_t>(pr)], M[static_cast<std::size_t>(k)]);
            sign = -sign;
        }
        if (pc != k) {
            for (long i = 0; i < m; ++i)
                std::swap(M[static_cast<std::size_t>(i)][static_cast<std::size_t>(pc)],
                          M[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]);
            sign = -sign;
        }
        if (k == m - 1) break;
        const field_element pivot = M[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)];
        for (long i = k + 1; i < m; ++i)
            for (long j = k + 1; j < m; ++j) {
                auto& t = M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                field_element num =
                    fe_sub(fe_mul(t, pivot),
                           fe_mul(M[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)],
                                  M[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)]));
                t = fe_div(num, prev);
            }
        prev = pivot;
    }
    field_element det = M[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(m - 1)];
    return sign < 0 ? fe_neg(det) : det;
}

inline field_element p_resultant(const poly& f, const poly& g) {
    assert(!p_is_zero(f) && !p_is_zero(g));
    return resultant_from_arrays(f.L, f.c, g.c);
}

// ---------------------------------------------------------------------------
// Newton polygon: lower convex hull of (i, v(a_i)).  Slopes are in v(p) = 1
// units; a segment of slope s carries (length) roots of valuation -s.
// ---------------------------------------------------------------------------

struct np_segment {
    mpq_class slope;
    long length = 0;
    long i0 = 0, i1 = 0;  // coefficient indices of the segment endpoints
    long sv0 = 0, sv1 = 0; // scaled valuations at the endpoints
    // False when the segment's position depends on digits below the bound of a
    // trusted zero coefficient, so the data cannot separate its roots from the
    // expansion center.
    bool certified = true;
};

struct newton_polygon_t {
    long vanishing_order = 0;
    // Smallest certified bound among the zero-at-precision coefficients that
    // make up the vanishing order; the data only places roots within
    // p^{bound/(e*multiplicity)} of the center, so root claims at the center
    // must not pretend to more digits than this supports.
    long center_bound_sv = 0;
    std::vector<np_segment> segments;
};

// A flagged-zero low coefficient is trusted as an exact zero once its bound
// reaches the horizon.  A polynomial built by rescaled Taylor shifts carries
// its bounds in the shifted frame: coefficient j then sits rescale - j*recenter
// below the frame the horizon refers to, and the caller passes the accumulated
// amounts so the trust test is frame-independent.
inline newton_polygon_t newton_polygon(const poly& f, long rescale = 0, long recenter = 0) {
    if (p_is_zero(f)) throw insufficient_precision("newton polygon of the zero polynomial");
    const level& L = *f.L;
    long deg = p_degree(f);
    std::vector<std::optional<long>> sv(static_cast<std::size_t>(deg) + 1);
    std::vector<long> bound(static_cast<std::size_t>(deg) + 1, 0);
    for (long i = 0; i <= deg; ++i) {
        val_info vi = fe_val_info(f.c[static_cast<std::size_t>(i)]);
        if (vi.determined)
            sv[static_cast<std::size_t>(i)] = vi.sv;
        else
            bound[static_cast<std::size_t>(i)] = vi.sv;
    }
    long ord = 0;
    long center_bound = 0;
    while (ord <= deg && !sv[static_cast<std::size_t>(ord)]) {
        long b = bound[static_cast<std::size_t>(ord)];
        if (b + rescale - ord * recenter < eq_horizon_sv(L))
            throw insufficient_precision("vanishing order is not determined at this precision",
                                         2 * L.n());
        center_bound = ord == 0 ? b : std::min(center_bound, b);
        ++ord;
    }
    assert(ord <= deg); // the leading coefficient is determined by invariant
    // lower hull of determined points from ord to deg
    std::vector<std::pair<long, long>> hull; // (index, scaled valuation)
    for (long i = ord; i <= deg; ++i) {
        if (!sv[static_cast<std::size_t>(i)]) continue;
        std::pair<long, long> pt{i, *sv[static_cast<std::size_t>(i)]};
        while (hull.size() >= 2) {
            auto& a = hull[hull.size() - 2];
            auto& b = hull[hull.size() - 1];
            // keep b only if it lies strictly below segment a-pt
            if ((b.second - a.second) * (pt.first - a.first) <
                (pt.second - a.second) * (b.first - a.first))
                break;
            hull.pop_back();
        }
        hull.push_back(pt);
    }
    // flagged interior coefficients must not be able to dip below the hull
    for (long i = ord; i <= deg; ++i) {
        if (sv[static_cast<std::size_t>(i)]) continue;
        long b = bound[static_cast<std::size_t>(i)];
        for (std::size_t s = 0; s + 1 < hull.size(); ++s) {
            auto [x0, y0] = hull[s];
            auto [x1, y1] = hull[s + 1];
            if (i < x0 || i > x1) continue;
            // hull height at i: y0 + (y1-y0)(i-x0)/(x1-x0), compare exactly
            if (static_cast<long>(b - y0) * (x1 - x0) < (y1 - y0) * (i - x0))
                throw insufficient_precision(
                    "a zero-at-precision coefficient could dip below the Newton polygon",
                    2 * L.n());
        }
    }
    newton_polygon_t np;
    np.vanishing_order = ord;
    np.center_bound_sv = center_bound;
    for (std::size_t s = 0; s + 1 < hull.size(); ++s) {
        np_segment seg;
        seg.i0 = hull[s].first;
        seg.sv0 = hull[s].second;
        seg.i1 = hull[s + 1].first;
        seg.sv1 = hull[s + 1].second;
        seg.length = seg.i1 - seg.i0;
        seg.slope = mpq_class(seg.sv1 - seg.sv0, L.e * (seg.i1 - seg.i0));
        seg.slope.canonicalize();
        np.segments.push_back(std::move(seg));
    }
    // A trusted zero left of the hull still only certifies v >= bound.  A
    // descending segment whose line, extended to that index, rises above the
    // bound would be reading root structure out of digits the data does not
    // determine; it is kept but marked so the root search can merge its
    // members into the expansion center instead of separating them.
    for (auto& seg : np.segments) {
        if (seg.sv1 >= seg.sv0) continue;
        for (long j = 0; j < ord; ++j) {
            long b = bound[static_cast<std::size_t>(j)];
            if ((b - seg.sv0) * (seg.i1 - seg.i0) < (seg.sv1 - seg.sv0) * (j - seg.i0)) {
                seg.certified = false;
                break;
            }
        }
    }
    return np;
}

// ---------------------------------------------------------------------------
// Normalizing a numerator/denominator pair: one common rescaling by a power
// of the uniformizer brings the joint coefficient minimum to valuation zero.
// ---------------------------------------------------------------------------

struct normalized_pair {
    poly f, g;
    long scale_sv = 0; // both were multiplied by pi^{-scale_sv}
};

inline normalized_pair normalize_pair(const poly& f, const poly& g) {
    if (p_is_zero(g)) throw error("denominator is identically zero");
    poly gc = p_gcd(f, g);
    if (p_degree(gc) >= 1) throw not_coprime();
    bool have = false;
    long minv = 0;
    for (const poly* h : {&f, &g})
        for (const auto& x : h->c) {
            val_info vi = fe_val_info(x);
            if (vi.determined) {
                if (!have || vi.sv < minv) minv = vi.sv, have = true;
            }
        }
    if (!have) throw insufficient_precision("pair is zero at precision");
    for (const poly* h : {&f, &g})
        for (const auto& x : h->c) {
            val_info vi = fe_val_info(x);
            if (!vi.determined && vi.sv < minv)
                throw insufficient_precision("coefficient minimum is not determined", 2 * f.L->n());
        }
    normalized_pair np;
    np.f = p_scale_pi(f, -minv);
    np.g = p_scale_pi(g, -minv);
    np.scale_sv = -minv;
    return np;
}

} // namespace padicdyn
