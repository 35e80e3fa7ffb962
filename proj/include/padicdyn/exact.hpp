#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <memory>
#include <utility>
#include <vector>

#include "padicdyn/errors.hpp"
#include "padicdyn/residue.hpp"
#include "padicdyn/roots.hpp"
#include "padicdyn/tower.hpp"

namespace padicdyn {

// Exact arithmetic in Q[zeta, pi] / (m(zeta), pi^e - p) with rational
// coordinates.  The modulus is the same canonical lift the levels use, so an
// exact element realizes at any compatible level and precision; this is what
// lets a computation rerun itself with more digits.
struct exact_ring {
    mpz_class p;
    int u = 1, e = 1;
    std::vector<mpz_class> modulus;
    std::vector<std::vector<mpq_class>> zeta_pow; // zeta^t for t <= 2u-2

    exact_ring(mpz_class p_, int u_, int e_) : p(std::move(p_)), u(u_), e(e_) {
        modulus = find_residue_modulus(p, u);
        zeta_pow.resize(static_cast<std::size_t>(std::max(2 * u - 1, 1)));
        for (int t = 0; t < u; ++t) {
            zeta_pow[static_cast<std::size_t>(t)].assign(static_cast<std::size_t>(u), 0);
            zeta_pow[static_cast<std::size_t>(t)][static_cast<std::size_t>(t)] = 1;
        }
        for (int t = u; t <= 2 * u - 2; ++t) {
            // zeta^t = zeta * zeta^{t-1}, reduced by the monic modulus
            std::vector<mpq_class> prev = zeta_pow[static_cast<std::size_t>(t - 1)];
            std::vector<mpq_class> cur(static_cast<std::size_t>(u), 0);
            mpq_class top = prev[static_cast<std::size_t>(u - 1)];
            for (int i = u - 1; i > 0; --i) cur[static_cast<std::size_t>(i)] = prev[static_cast<std::size_t>(i - 1)];
            for (int i = 0; i < u; ++i)
                cur[static_cast<std::size_t>(i)] -= top * modulus[static_cast<std::size_t>(i)];
            zeta_pow[static_cast<std::size_t>(t)] = std::move(cur);
        }
    }

    int dim() const { return u * e; }
};

using exact_ring_ptr = std::shared_ptr<const exact_ring>;

inline exact_ring_ptr make_exact_ring(const mpz_class& p, int u = 1, int e = 1) {
    if (mpz_probab_prime_p(p.get_mpz_t(), 30) == 0) throw error("modulus is not prime");
    if (u < 1 || e < 1) throw error("extension degrees must be positive");
    return std::make_shared<const exact_ring>(p, u, e);
}

struct exact_element {
    exact_ring_ptr R;
    std::vector<mpq_class> c; // index k = i + u*j for zeta^i pi^j
};

inline exact_element ex_zero(const exact_ring_ptr& R) {
    return {R, std::vector<mpq_class>(static_cast<std::size_t>(R->dim()), 0)};
}

inline exact_element ex_from_mpq(const exact_ring_ptr& R, const mpq_class& q) {
    exact_element r = ex_zero(R);
    r.c[0] = q;
    return r;
}

inline exact_element ex_one(const exact_ring_ptr& R) { return ex_from_mpq(R, 1); }

inline exact_element ex_zeta(const exact_ring_ptr& R) {
    exact_element r = ex_zero(R);
    r.c[1] = 1;
    return r;
}

inline exact_element ex_pi(const exact_ring_ptr& R) {
    exact_element r = ex_zero(R);
    if (R->e == 1)
        r.c[0] = R->p;
    else
        r.c[static_cast<std::size_t>(R->u)] = 1;
    return r;
}

inline bool ex_is_zero(const exact_element& x) {
    for (const auto& q : x.c)
        if (q != 0) return false;
    return true;
}

inline bool ex_eq(const exact_element& x, const exact_element& y) { return x.c == y.c; }

inline exact_element ex_add(const exact_element& x, const exact_element& y) {
    exact_element r = x;
    for (std::size_t k = 0; k < r.c.size(); ++k) r.c[k] += y.c[k];
    return r;
}

inline exact_element ex_neg(const exact_element& x) {
    exact_element r = x;
    for (auto& q : r.c) q = -q;
    return r;
}

inline exact_element ex_sub(const exact_element& x, const exact_element& y) {
    return ex_add(x, ex_neg(y));
}

inline exact_element ex_scale(const exact_element& x, const mpq_class& s) {
    exact_element r = x;
    for (auto& q : r.c) q *= s;
    return r;
}

inline exact_element ex_mul(const exact_element& x, const exact_element& y) {
    const exact_ring& R = *x.R;
    exact_element r = ex_zero(x.R);
    for (int j1 = 0; j1 < R.e; ++j1)
        for (int i1 = 0; i1 < R.u; ++i1) {
            const mpq_class& a = x.c[static_cast<std::size_t>(i1 + R.u * j1)];
            if (a == 0) continue;
            for (int j2 = 0; j2 < R.e; ++j2)
                for (int i2 = 0; i2 < R.u; ++i2) {
                    const mpq_class& b = y.c[static_cast<std::size_t>(i2 + R.u * j2)];
                    if (b == 0) continue;
                    mpq_class q = a * b;
                    int j = j1 + j2;
                    if (j >= R.e) {
                        q *= R.p;
                        j -= R.e;
                    }
                    const auto& zrow = R.zeta_pow[static_cast<std::size_t>(i1 + i2)];
                    for (int i = 0; i < R.u; ++i) {
                        if (zrow[static_cast<std::size_t>(i)] == 0) continue;
                        r.c[static_cast<std::size_t>(i + R.u * j)] += q * zrow[static_cast<std::size_t>(i)];
                    }
                }
        }
    return r;
}

inline exact_element ex_pow(const exact_element& x, long n) {
    exact_element r = ex_one(x.R);
    for (long i = 0; i < n; ++i) r = ex_mul(r, x);
    return r;
}

// Inversion by solving the multiplication matrix; the quotient is a field
// (the modulus is irreducible over Q and pi^e - p is Eisenstein), so the
// system is nonsingular for every nonzero element.
inline exact_element ex_inv(const exact_element& x) {
    if (ex_is_zero(x)) throw error("exact division by zero");
    const exact_ring_ptr& R = x.R;
    int n = R->dim();
    std::vector<std::vector<mpq_class>> M(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        exact_element b = ex_zero(R);
        b.c[static_cast<std::size_t>(k)] = 1;
        exact_element col = ex_mul(x, b);
        for (int i = 0; i < n; ++i) M[static_cast<std::size_t>(i)].push_back(col.c[static_cast<std::size_t>(i)]);
    }
    std::vector<mpq_class> rhs(static_cast<std::size_t>(n), 0);
    rhs[0] = 1;
    for (int k = 0; k < n; ++k) {
        int piv = -1;
        for (int i = k; i < n; ++i)
            if (M[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] != 0) {
                piv = i;
                break;
            }
        if (piv < 0) throw error("exact inversion hit a singular system");
        std::swap(M[static_cast<std::size_t>(piv)], M[static_cast<std::size_t>(k)]);
        std::swap(rhs[static_cast<std::size_t>(piv)], rhs[static_cast<std::size_t>(k)]);
        mpq_class d = M[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)];
        for (int j = k; j < n; ++j) M[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] /= d;
        rhs[static_cast<std::size_t>(k)] /= d;
        for (int i = 0; i < n; ++i) {
            if (i == k) continue;
            mpq_class f = M[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
            if (f == 0) continue;
            for (int j = k; j < n; ++j)
                M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -=
                    f * M[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
            rhs[static_cast<std::size_t>(i)] -= f * rhs[static_cast<std::size_t>(k)];
        }
    }
    exact_element r = ex_zero(R);
    r.c = std::move(rhs);
    return r;
}

inline exact_element ex_div(const exact_element& x, const exact_element& y) {
    return ex_mul(x, ex_inv(y));
}

// --------------------------------------------------------------------------
// Realizing exact data at a working level.
// --------------------------------------------------------------------------

inline qp qp_exact_mpq(const qp_ctx& C, const mpq_class& q, long N) {
    if (q == 0) return qp_zero_at(N);
    return qp_div(C, qp_exact_int(C, q.get_num(), N), qp_exact_int(C, q.get_den(), N));
}

inline field_element ex_realize(const exact_element& x, const level_ptr& L) {
    if (x.R->p != L->cfg.p) throw error("realization requires the same prime");
    if (x.R->u == L->u && x.R->e == L->e) {
        field_element r = fe_zero(L);
        for (std::size_t k = 0; k < x.c.size(); ++k) r.c[k] = qp_exact_mpq(L->qc, x.c[k], L->n());
        return r;
    }
    if (L->u % x.R->u != 0 || L->e % x.R->e != 0)
        throw error("realization requires compatible extension degrees");
    level_ptr L0 = make_level({L->cfg.p, L->n(), L->cfg.horizon_digits}, x.R->u, x.R->e);
    level_embedding E = make_embedding(L0, L);
    field_element base = fe_zero(L0);
    for (std::size_t k = 0; k < x.c.size(); ++k) base.c[k] = qp_exact_mpq(L0->qc, x.c[k], L0->n());
    return embed(E, base);
}

// --------------------------------------------------------------------------
// Polynomials with exact coefficients: low degree first, empty meaning zero.
// --------------------------------------------------------------------------

using epoly = std::vector<exact_element>;

inline epoly ep_trim(epoly f) {
    while (!f.empty() && ex_is_zero(f.back())) f.pop_back();
    return f;
}

inline long ep_degree(const epoly& f) { return static_cast<long>(f.size()) - 1; }
inline bool ep_is_zero(const epoly& f) { return f.empty(); }

inline epoly ep_from_mpq_list(const exact_ring_ptr& R, const std::vector<mpq_class>& cs) {
    epoly f;
    for (const auto& q : cs) f.push_back(ex_from_mpq(R, q));
    return ep_trim(std::move(f));
}

inline exact_element ep_coeff(const exact_ring_ptr& R, const epoly& f, long i) {
    if (i < 0 || i > ep_degree(f)) return ex_zero(R);
    return f[static_cast<std::size_t>(i)];
}

inline epoly ep_add(const exact_ring_ptr& R, const epoly& f, const epoly& g) {
    epoly r;
    long n = std::max(ep_degree(f), ep_degree(g));
    for (long i = 0; i <= n; ++i) r.push_back(ex_add(ep_coeff(R, f, i), ep_coeff(R, g, i)));
    return ep_trim(std::move(r));
}

inline epoly ep_neg(epoly f) {
    for (auto& x : f) x = ex_neg(x);
    return f;
}

inline epoly ep_sub(const exact_ring_ptr& R, const epoly& f, const epoly& g) {
    return ep_add(R, f, ep_neg(g));
}

inline epoly ep_mul(const exact_ring_ptr& R, const epoly& f, const epoly& g) {
    if (ep_is_zero(f) || ep_is_zero(g)) return {};
    epoly r(f.size() + g.size() - 1, ex_zero(R));
    for (std::size_t i = 0; i < f.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j)
            r[i + j] = ex_add(r[i + j], ex_mul(f[i], g[j]));
    return ep_trim(std::move(r));
}

inline epoly ep_scale(epoly f, const exact_element& s) {
    for (auto& x : f) x = ex_mul(x, s);
    return ep_trim(std::move(f));
}

inline std::pair<epoly, epoly> ep_divmod(const exact_ring_ptr& R, const epoly& f, const epoly& g) {
    if (ep_is_zero(g)) throw error("exact division by the zero polynomial");
    long df = ep_degree(f), dg = ep_degree(g);
    if (df < dg) return {{}, f};
    exact_element linv = ex_inv(g.back());
    epoly rem = f;
    epoly quo(static_cast<std::size_t>(df - dg) + 1, ex_zero(R));
    for (long k = df; k >= dg; --k) {
        exact_element cf = ex_mul(rem[static_cast<std::size_t>(k)], linv);
        quo[static_cast<std::size_t>(k - dg)] = cf;
        for (long i = 0; i <= dg; ++i) {
            auto& slot = rem[static_cast<std::size_t>(k - dg + i)];
            slot = ex_sub(slot, ex_mul(cf, g[static_cast<std::size_t>(i)]));
        }
    }
    rem.resize(static_cast<std::size_t>(dg));
    return {ep_trim(std::move(quo)), ep_trim(std::move(rem))};
}

inline epoly ep_monic(const epoly& f) {
    if (ep_is_zero(f)) return f;
    return ep_scale(f, ex_inv(f.back()));
}

inline epoly ep_gcd(const exact_ring_ptr& R, epoly f, epoly g) {
    while (!ep_is_zero(g)) {
        epoly r = ep_divmod(R, f, g).second;
        f = std::move(g);
        g = std::move(r);
    }
    return ep_monic(f);
}

inline exact_element ep_eval(const exact_ring_ptr& R, const epoly& f, const exact_element& x) {
    exact_element r = ex_zero(R);
    for (std::size_t i = f.size(); i-- > 0;) r = ex_add(ex_mul(r, x), f[i]);
    return r;
}

inline epoly ep_derivative(const epoly& f) {
    epoly r;
    for (std::size_t i = 1; i < f.size(); ++i)
        r.push_back(ex_scale(f[i], mpq_class(static_cast<long>(i))));
    return ep_trim(std::move(r));
}

// --------------------------------------------------------------------------
// Exact source of a rational map: a cancelled numerator/denominator pair
// that can be re-realized at any compatible level and precision.
// --------------------------------------------------------------------------

struct exact_source {
    exact_ring_ptr R;
    epoly f, g; // coprime, g != 0
    long degree() const { return std::max(ep_degree(f), ep_degree(g)); }
};

inline exact_source make_exact_source(const exact_ring_ptr& R, epoly f, epoly g) {
    if (ep_is_zero(g)) throw error("denominator is identically zero");
    epoly d = ep_gcd(R, f, g);
    if (ep_degree(d) >= 1) {
        f = ep_divmod(R, f, d).first;
        g = ep_divmod(R, g, d).first;
    }
    return exact_source{R, std::move(f), std::move(g)};
}

inline std::pair<poly, poly> realize_pair(const exact_source& s, const level_ptr& L) {
    std::vector<field_element> fc, gc;
    for (const auto& x : s.f) fc.push_back(ex_realize(x, L));
    for (const auto& x : s.g) gc.push_back(ex_realize(x, L));
    return {p_make_strict(L, std::move(fc)), p_make_strict(L, std::move(gc))};
}

// --------------------------------------------------------------------------
// Exact Moebius conjugation, for building maps whose reduction behavior is
// known by construction.
// --------------------------------------------------------------------------

struct exact_mobius {
    exact_element a, b, c, d; // z -> (a z + b) / (c z + d), det != 0
};

inline exact_element ex_mobius_det(const exact_mobius& h) {
    return ex_sub(ex_mul(h.a, h.d), ex_mul(h.b, h.c));
}

namespace detail {

// substitute X -> r X + s Y, Y -> t X + w Y into a homogeneous coefficient
// array A (A[k] multiplies X^k Y^{m-k})
inline std::vector<exact_element> ex_subst_linear(const exact_ring_ptr& R,
                                                  const std::vector<exact_element>& A,
                                                  const exact_element& r, const exact_element& s,
                                                  const exact_element& t, const exact_element& w) {
    long m = static_cast<long>(A.size()) - 1;
    std::vector<std::vector<exact_element>> pw1, pw2; // (rX+sY)^k, (tX+wY)^k
    pw1.push_back({ex_one(R)});
    pw2.push_back({ex_one(R)});
    for (long k = 1; k <= m; ++k) {
        auto step = [&](const std::vector<exact_element>& prev, const exact_element& hi,
                        const exact_element& lo) {
            // multiply a homogeneous form by hi*X + lo*Y; index = X-power
            std::vector<exact_element> nxt(prev.size() + 1, ex_zero(R));
            for (std::size_t i = 0; i < prev.size(); ++i) {
                nxt[i + 1] = ex_add(nxt[i + 1], ex_mul(prev[i], hi));
                nxt[i] = ex_add(nxt[i], ex_mul(prev[i], lo));
            }
            return nxt;
        };
        pw1.push_back(step(pw1.back(), r, s));
        pw2.push_back(step(pw2.back(), t, w));
    }
    std::vector<exact_element> out(static_cast<std::size_t>(m) + 1, ex_zero(R));
    for (long k = 0; k <= m; ++k) {
        if (ex_is_zero(A[static_cast<std::size_t>(k)])) continue;
        const auto& P = pw1[static_cast<std::size_t>(k)];
        const auto& Q = pw2[static_cast<std::size_t>(m - k)];
        for (std::size_t i = 0; i < P.size(); ++i)
            for (std::size_t j = 0; j < Q.size(); ++j)
                out[i + j] = ex_add(out[i + j],
                                    ex_mul(A[static_cast<std::size_t>(k)], ex_mul(P[i], Q[j])));
    }
    return out;
}

} // namespace detail

// psi = h o phi o h^{-1} on exact numerator/denominator pairs; the conjugate
// of a degree-d map keeps degree d, so no cancellation is needed.
inline exact_source exact_conjugate(const exact_source& phi, const exact_mobius& h) {
    const exact_ring_ptr& R = phi.R;
    if (ex_is_zero(ex_mobius_det(h))) throw error("conjugating map is singular");
    long d = phi.degree();
    std::vector<exact_element> F(static_cast<std::size_t>(d) + 1, ex_zero(R));
    std::vector<exact_element> G(static_cast<std::size_t>(d) + 1, ex_zero(R));
    for (long i = 0; i <= ep_degree(phi.f); ++i) F[static_cast<std::size_t>(i)] = phi.f[static_cast<std::size_t>(i)];
    for (long i = 0; i <= ep_degree(phi.g); ++i) G[static_cast<std::size_t>(i)] = phi.g[static_cast<std::size_t>(i)];
    // h^{-1} corresponds to the adjugate matrix [d, -b; -c, a]
    std::vector<exact_element> U =
        detail::ex_subst_linear(R, F, h.d, ex_neg(h.b), ex_neg(h.c), h.a);
    std::vector<exact_element> V =
        detail::ex_subst_linear(R, G, h.d, ex_neg(h.b), ex_neg(h.c), h.a);
    epoly num, den;
    for (std::size_t k = 0; k < U.size(); ++k) {
        num.push_back(ex_add(ex_mul(h.a, U[k]), ex_mul(h.b, V[k])));
        den.push_back(ex_add(ex_mul(h.c, U[k]), ex_mul(h.d, V[k])));
    }
    return exact_source{R, ep_trim(std::move(num)), ep_trim(std::move(den))};
}

} // namespace padicdyn
