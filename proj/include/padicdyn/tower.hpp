#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cassert>
#include <memory>
#include <string>
#include <vector>

#include "padicdyn/errors.hpp"
#include "padicdyn/qp.hpp"
#include "padicdyn/residue.hpp"

namespace padicdyn {

struct prime_config {
    mpz_class p;
    long precision_digits = 64;
    // Bound (in digits) at which a zero-at-precision flag is trusted as a
    // genuine zero.  Defaults to half the precision; when the working
    // precision is raised to refine a computation, the horizon stays pegged
    // to the originally requested value so that extra digits make decisions
    // easier to certify instead of raising the bar in step.
    long horizon_digits = 0;
};

struct extension_spec {
    int unramified_degree = 1;  // u
    int ramification_index = 1; // e, coprime to p
    long total_degree() const { return static_cast<long>(unramified_degree) * ramification_index; }
};

// One working field L = Q_p(zeta, pi): zeta a root of the lifted residue
// modulus (unramified part, degree u), pi^e = p (tame totally ramified part).
// Elements are coordinate vectors over the basis zeta^i pi^j; valuations live
// in (1/e)Z and are handled as integers scaled by e throughout.
struct level {
    prime_config cfg;
    int u = 1;
    int e = 1;
    residue_field k;                              // F_{p^u}
    qp_ctx qc;                                    // prime-power cache
    std::vector<std::vector<mpz_class>> zeta_pow; // exact expansion of zeta^t, t <= 2u-2

    level(prime_config c, int uu, int ee)
        : cfg(std::move(c)), u(uu), e(ee), qc(cfg.p, 2 * cfg.precision_digits + 128) {
        k = residue_field{cfg.p, u, find_residue_modulus(cfg.p, u)};
        // zeta^t expanded exactly over the integers via the monic lifted modulus
        zeta_pow.assign(static_cast<std::size_t>(std::max(2 * u - 1, 1)), {});
        for (int t = 0; t <= std::max(2 * u - 2, 0); ++t) {
            std::vector<mpz_class> row(static_cast<std::size_t>(u), mpz_class(0));
            if (t < u) {
                row[static_cast<std::size_t>(t)] = 1;
            } else {
                const auto& prev = zeta_pow[static_cast<std::size_t>(t - 1)];
                std::vector<mpz_class> shifted(static_cast<std::size_t>(u) + 1, mpz_class(0));
                for (int i = 0; i < u; ++i)
                    shifted[static_cast<std::size_t>(i) + 1] = prev[static_cast<std::size_t>(i)];
                mpz_class lead = shifted[static_cast<std::size_t>(u)];
                for (int i = 0; i < u; ++i)
                    row[static_cast<std::size_t>(i)] =
                        shifted[static_cast<std::size_t>(i)] - lead * k.modulus[static_cast<std::size_t>(i)];
            }
            zeta_pow[static_cast<std::size_t>(t)] = std::move(row);
        }
    }

    long n() const { return cfg.precision_digits; }
    int dim() const { return u * e; }
};

// A zero-at-precision bound at or above this horizon is accepted as a genuine
// zero in degree and equality decisions; anything flagged below it raises
// insufficient_precision so the caller can rerun with more digits.
inline long eq_horizon_sv(const level& L) { return L.cfg.horizon_digits * L.e; }

using level_ptr = std::shared_ptr<const level>;

inline level_ptr make_level(prime_config cfg, int u = 1, int e = 1) {
    if (mpz_probab_prime_p(cfg.p.get_mpz_t(), 30) == 0) throw error("modulus is not prime");
    if (cfg.precision_digits < 1) throw error("precision must be positive");
    if (u < 1 || e < 1) throw error("extension degrees must be positive");
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), mpz_class(e).get_mpz_t(), cfg.p.get_mpz_t());
    if (e > 1 && g != 1)
        throw unsupported_extension("ramification index " + std::to_string(e) +
                                    " is divisible by the residue characteristic");
    if (cfg.horizon_digits <= 0) cfg.horizon_digits = cfg.precision_digits / 2;
    return std::make_shared<const level>(std::move(cfg), u, e);
}

inline bool same_level(const level_ptr& a, const level_ptr& b) {
    if (a == b) return true;
    return a->cfg.p == b->cfg.p && a->cfg.precision_digits == b->cfg.precision_digits &&
           a->u == b->u && a->e == b->e;
}

struct field_element {
    level_ptr L;
    std::vector<qp> c; // c[i + u*j] multiplies zeta^i pi^j
};

// Valuation scaled by e (so it is an integer); determined == false means the
// element is zero at precision and sv is only a lower bound.
struct val_info {
    bool determined = false;
    long sv = 0;
};

inline val_info fe_val_info(const field_element& x) {
    const int u = x.L->u, e = x.L->e;
    long best_det = 0, best_zero = 0;
    bool have_det = false, have_zero = false;
    for (int j = 0; j < e; ++j)
        for (int i = 0; i < u; ++i) {
            const qp& q = x.c[static_cast<std::size_t>(i + u * j)];
            long sv = q.v * e + j;
            if (q.zero) {
                if (!have_zero || sv < best_zero) best_zero = sv, have_zero = true;
            } else {
                if (!have_det || sv < best_det) best_det = sv, have_det = true;
            }
        }
    if (have_det && (!have_zero || best_det < best_zero)) return {true, best_det};
    if (!have_zero) return {false, best_det};
    return {false, have_det ? std::min(best_det, best_zero) : best_zero};
}

inline bool fe_is_zero_at_precision(const field_element& x) { return !fe_val_info(x).determined; }

// Exact rational valuation in (1/e)Z.
inline mpq_class fe_valuation(const field_element& x) {
    val_info vi = fe_val_info(x);
    if (!vi.determined)
        throw insufficient_precision("valuation of an element that is zero at precision");
    mpq_class q(vi.sv, x.L->e);
    q.canonicalize();
    return q;
}

// Scaled absolute precision: the element is known modulo valuation >= aprec/e.
inline long fe_aprec_sv(const field_element& x) {
    const int u = x.L->u, e = x.L->e;
    long best = 0;
    bool have = false;
    for (int j = 0; j < e; ++j)
        for (int i = 0; i < u; ++i) {
            long sv = x.c[static_cast<std::size_t>(i + u * j)].aprec * e + j;
            if (!have || sv < best) best = sv, have = true;
        }
    return best;
}

inline field_element fe_zero(const level_ptr& L) {
    field_element r{L, std::vector<qp>(static_cast<std::size_t>(L->dim()))};
    for (auto& q : r.c) q = qp_zero_at(L->n());
    return r;
}

inline field_element fe_from_int(const level_ptr& L, const mpz_class& n) {
    field_element r = fe_zero(L);
    r.c[0] = qp_exact_int(L->qc, n, L->n());
    return r;
}

inline field_element fe_one(const level_ptr& L) { return fe_from_int(L, 1); }

inline field_element fe_from_mpq(const level_ptr& L, const mpq_class& q) {
    field_element r = fe_zero(L);
    if (q == 0) return r;
    qp num = qp_exact_int(L->qc, q.get_num(), L->n());
    qp den = qp_exact_int(L->qc, q.get_den(), L->n());
    r.c[0] = qp_div(L->qc, num, den);
    return r;
}

inline field_element fe_zeta(const level_ptr& L) {
    assert(L->u >= 2);
    field_element r = fe_zero(L);
    r.c[1] = qp_exact_int(L->qc, 1, L->n());
    return r;
}

inline field_element fe_pi(const level_ptr& L) {
    field_element r = fe_zero(L);
    if (L->e == 1) {
        r.c[0] = qp_exact_int(L->qc, L->cfg.p, L->n());
    } else {
        r.c[static_cast<std::size_t>(L->u)] = qp_exact_int(L->qc, 1, L->n());
    }
    return r;
}

inline field_element fe_add(const field_element& x, const field_element& y) {
    assert(same_level(x.L, y.L));
    field_element r{x.L, {}};
    r.c.reserve(x.c.size());
    for (std::size_t k = 0; k < x.c.size(); ++k) r.c.push_back(qp_add(x.L->qc, x.c[k], y.c[k]));
    return r;
}

inline field_element fe_neg(const field_element& x) {
    field_element r{x.L, {}};
    r.c.reserve(x.c.size());
    for (const auto& q : x.c) r.c.push_back(qp_neg(x.L->qc, q));
    return r;
}

inline field_element fe_sub(const field_element& x, const field_element& y) {
    return fe_add(x, fe_neg(y));
}

inline field_element fe_scale_qp(const field_element& x, const qp& s) {
    field_element r{x.L, {}};
    r.c.reserve(x.c.size());
    for (const auto& q : x.c) r.c.push_back(qp_mul(x.L->qc, q, s));
    return r;
}

// Exact multiplication by pi^k: a bijective remap of coordinates.
inline field_element fe_mul_pi_pow(const field_element& x, long k) {
    const int u = x.L->u, e = x.L->e;
    field_element r = x;
    for (auto& q : r.c) q = qp_zero_at(0); // overwritten below
    for (int j = 0; j < e; ++j) {
        long t = j + k;
        long jq = (t >= 0) ? t / e : -((-t + e - 1) / e);
        long jr = t - jq * e;
        for (int i = 0; i < u; ++i)
            r.c[static_cast<std::size_t>(i + u * jr)] =
                qp_shift(x.c[static_cast<std::size_t>(i + u * j)], jq);
    }
    return r;
}

inline field_element fe_mul(const field_element& x, const field_element& y) {
    assert(same_level(x.L, y.L));
    const level& L = *x.L;
    const int u = L.u, e = L.e;
    // start from exact zero; any finite claim about an exact zero is true,
    // so seed the accumulator bounds generously
    long seed = (fe_aprec_sv(x) + fe_aprec_sv(y)) / e + 4;
    field_element r{x.L, std::vector<qp>(x.c.size())};
    for (auto& q : r.c) q = qp_zero_at(seed);
    for (int j1 = 0; j1 < e; ++j1)
        for (int i1 = 0; i1 < u; ++i1) {
            const qp& a = x.c[static_cast<std::size_t>(i1 + u * j1)];
            for (int j2 = 0; j2 < e; ++j2)
                for (int i2 = 0; i2 < u; ++i2) {
                    const qp& b = y.c[static_cast<std::size_t>(i2 + u * j2)];
                    qp prod = qp_mul(L.qc, a, b);
                    int j = j1 + j2;
                    if (j >= e) {
                        prod = qp_shift(prod, 1);
                        j -= e;
                    }
                    const auto& zrow = L.zeta_pow[static_cast<std::size_t>(i1 + i2)];
                    for (int m = 0; m < u; ++m) {
                        if (zrow[static_cast<std::size_t>(m)] == 0) continue;
                        qp term = qp_scale_exact(L.qc, prod, zrow[static_cast<std::size_t>(m)]);
                        auto& slot = r.c[static_cast<std::size_t>(m + u * j)];
                        slot = qp_add(L.qc, slot, term);
                    }
                }
        }
    return r;
}

inline field_element fe_reduce_helper_lift(const level_ptr& L, const residue_element& a) {
    field_element r = fe_zero(L);
    for (int i = 0; i < L->u; ++i)
        r.c[static_cast<std::size_t>(i)] = qp_exact_int(L->qc, a.c[static_cast<std::size_t>(i)], L->n());
    return r;
}

// Image in the residue field; requires v(x) >= 0 certifiably.  Coordinates
// with j > 0 carry fractional valuation and always reduce to zero once their
// nonnegativity is certain; the digits come from the j == 0 block.  An
// element living in a rescaled frame passes trust_slack, the distance back
// to the frame the horizon refers to: a flagged coordinate whose translated
// bound clears the horizon reads as the zero digit.
inline residue_element fe_reduce(const field_element& x, long trust_slack = 0) {
    const level& L = *x.L;
    residue_element r = re_zero(L.k);
    for (int j = 0; j < L.e; ++j)
        for (int i = 0; i < L.u; ++i) {
            const qp& q = x.c[static_cast<std::size_t>(i + L.u * j)];
            long sv = q.v * L.e + j; // scaled valuation, or its lower bound
            if (q.zero) {
                if (sv + trust_slack >= eq_horizon_sv(L)) continue;
                if (j == 0 && sv <= 0)
                    throw insufficient_precision("residue digit is not determined at this precision");
                if (sv < 0)
                    throw insufficient_precision("sign of valuation is not determined at this precision");
                continue;
            }
            if (sv < 0) throw negative_valuation();
            if (sv == 0) r.c[static_cast<std::size_t>(i)] = q.unit % L.cfg.p;
        }
    return r;
}

inline field_element fe_inv(const field_element& x) {
    const level_ptr& L = x.L;
    val_info vi = fe_val_info(x);
    if (!vi.determined) throw division_by_zero_at_precision();
    field_element xu = fe_mul_pi_pow(x, -vi.sv);
    residue_element rbar = fe_reduce(xu);
    field_element y = fe_reduce_helper_lift(L, re_inv(L->k, rbar));
    field_element two = fe_from_int(L, 2);
    for (int it = 0; it < 100; ++it) {
        field_element t = fe_mul(xu, y);
        field_element err = fe_sub(t, fe_one(L));
        if (fe_is_zero_at_precision(err)) break;
        y = fe_mul(y, fe_sub(two, t));
    }
    return fe_mul_pi_pow(y, -vi.sv);
}

inline field_element fe_div(const field_element& x, const field_element& y) {
    return fe_mul(x, fe_inv(y));
}

inline bool fe_eq_at_precision(const field_element& x, const field_element& y) {
    return fe_is_zero_at_precision(fe_sub(x, y));
}

inline field_element fe_pow(const field_element& x, long n) {
    assert(n >= 0);
    field_element r = fe_one(x.L);
    field_element b = x;
    while (n > 0) {
        if (n & 1) r = fe_mul(r, b);
        b = fe_mul(b, b);
        n >>= 1;
    }
    return r;
}

// Lifts of all residue classes, in enumeration order.
inline std::vector<field_element> residue_representatives(const level_ptr& L) {
    std::vector<field_element> out;
    mpz_class q = L->k.cardinality();
    for (mpz_class idx = 0; idx < q; ++idx)
        out.push_back(fe_reduce_helper_lift(L, re_from_index(L->k, idx)));
    return out;
}

// Deterministic total order on elements (used only for tie-breaking choices,
// never for mathematics).
inline int fe_key_compare(const field_element& x, const field_element& y) {
    assert(same_level(x.L, y.L));
    for (std::size_t k = 0; k < x.c.size(); ++k) {
        const qp &a = x.c[k], &b = y.c[k];
        if (a.zero != b.zero) return a.zero ? 1 : -1;
        if (a.zero) continue;
        if (a.v != b.v) return a.v < b.v ? -1 : 1;
        int c = cmp(a.unit, b.unit);
        if (c != 0) return c;
    }
    return 0;
}

// Basis images of one level inside a larger one (same prime, same precision;
// u | u', e | e').  Built in roots.hpp since the unramified generator is
// located by Hensel lifting.
struct level_embedding {
    level_ptr from, to;
    std::vector<field_element> basis_image;
};

inline field_element embed(const level_embedding& E, const field_element& x) {
    assert(same_level(x.L, E.from));
    field_element r = fe_zero(E.to);
    for (std::size_t k = 0; k < x.c.size(); ++k) {
        field_element term = fe_scale_qp(E.basis_image[k], x.c[k]);
        r = fe_add(r, term);
    }
    return r;
}

} // namespace padicdyn
