#pragma once

#include <gmpxx.h>

#include <cassert>
#include <utility>
#include <vector>

#include "padicdyn/errors.hpp"

namespace padicdyn {

// The residue field F_{p^u}, realised as F_p[t]/(modulus).  For u == 1 the
// modulus is just t and elements are plain integers mod p.
struct residue_field {
    mpz_class p;
    int u = 1;
    std::vector<mpz_class> modulus; // monic, degree u, coefficients in [0, p)

    mpz_class cardinality() const {
        mpz_class q;
        mpz_pow_ui(q.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(u));
        return q;
    }
};

struct residue_element {
    std::vector<mpz_class> c; // length u, entries in [0, p)
};

inline residue_element re_zero(const residue_field& F) {
    return {std::vector<mpz_class>(static_cast<std::size_t>(F.u), mpz_class(0))};
}

inline residue_element re_from_int(const residue_field& F, const mpz_class& n) {
    residue_element r = re_zero(F);
    r.c[0] = n % F.p;
    if (r.c[0] < 0) r.c[0] += F.p;
    return r;
}

inline residue_element re_one(const residue_field& F) { return re_from_int(F, 1); }

inline residue_element re_gen(const residue_field& F) {
    assert(F.u >= 2);
    residue_element r = re_zero(F);
    r.c[1] = 1;
    return r;
}

inline bool re_is_zero(const residue_element& a) {
    for (const auto& x : a.c)
        if (x != 0) return false;
    return true;
}

inline bool re_eq(const residue_element& a, const residue_element& b) { return a.c == b.c; }

inline residue_element re_add(const residue_field& F, const residue_element& a,
                              const residue_element& b) {
    residue_element r = a;
    for (int i = 0; i < F.u; ++i) {
        r.c[i] += b.c[i];
        if (r.c[i] >= F.p) r.c[i] -= F.p;
    }
    return r;
}

inline residue_element re_neg(const residue_field& F, const residue_element& a) {
    residue_element r = a;
    for (int i = 0; i < F.u; ++i)
        if (r.c[i] != 0) r.c[i] = F.p - r.c[i];
    return r;
}

inline residue_element re_sub(const residue_field& F, const residue_element& a,
                              const residue_element& b) {
    return re_add(F, a, re_neg(F, b));
}

inline residue_element re_mul(const residue_field& F, const residue_element& a,
                              const residue_element& b) {
    const int u = F.u;
    std::vector<mpz_class> prod(static_cast<std::size_t>(2 * u - 1), mpz_class(0));
    for (int i = 0; i < u; ++i) {
        if (a.c[i] == 0) continue;
        for (int j = 0; j < u; ++j)
            if (b.c[j] != 0) prod[i + j] += a.c[i] * b.c[j];
    }
    // reduce modulo the monic modulus, top down
    for (int k = 2 * u - 2; k >= u; --k) {
        if (prod[k] == 0) continue;
        mpz_class lead = std::move(prod[k]);
        prod[k] = 0;
        for (int i = 0; i < u; ++i)
            prod[k - u + i] -= lead * F.modulus[static_cast<std::size_t>(i)];
    }
    residue_element r = re_zero(F);
    for (int i = 0; i < u; ++i) {
        r.c[i] = prod[i] % F.p;
        if (r.c[i] < 0) r.c[i] += F.p;
    }
    return r;
}

inline residue_element re_pow(const residue_field& F, residue_element a, mpz_class e) {
    assert(e >= 0);
    residue_element r = re_one(F);
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) r = re_mul(F, r, a);
        a = re_mul(F, a, a);
        e >>= 1;
    }
    return r;
}

inline residue_element re_inv(const residue_field& F, const residue_element& a) {
    if (re_is_zero(a)) throw division_by_zero_at_precision();
    if (F.u == 1) {
        residue_element r = re_zero(F);
        int ok = mpz_invert(r.c[0].get_mpz_t(), a.c[0].get_mpz_t(), F.p.get_mpz_t());
        assert(ok != 0);
        (void)ok;
        return r;
    }
    return re_pow(F, a, F.cardinality() - 2);
}

// Enumeration of F_{p^u} by base-p digit strings, used for root scans and
// for picking representatives deterministically.
inline residue_element re_from_index(const residue_field& F, mpz_class idx) {
    residue_element r = re_zero(F);
    for (int i = 0; i < F.u; ++i) {
        r.c[i] = idx % F.p;
        idx /= F.p;
    }
    return r;
}

inline mpz_class re_index(const residue_field& F, const residue_element& a) {
    mpz_class idx = 0;
    for (int i = F.u - 1; i >= 0; --i) idx = idx * F.p + a.c[i];
    return idx;
}

// ---------------------------------------------------------------------------
// Polynomials over the residue field.  Zero polynomial == empty vector; the
// representation is always trimmed.
// ---------------------------------------------------------------------------

using rpoly = std::vector<residue_element>;

inline rpoly rp_trim(rpoly f) {
    while (!f.empty() && re_is_zero(f.back())) f.pop_back();
    return f;
}

inline long rp_degree(const rpoly& f) { return static_cast<long>(f.size()) - 1; }

inline bool rp_is_zero(const rpoly& f) { return f.empty(); }

inline bool rp_eq(const rpoly& f, const rpoly& g) {
    if (f.size() != g.size()) return false;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (!re_eq(f[i], g[i])) return false;
    return true;
}

inline rpoly rp_add(const residue_field& F, const rpoly& f, const rpoly& g) {
    rpoly r(std::max(f.size(), g.size()), re_zero(F));
    for (std::size_t i = 0; i < f.size(); ++i) r[i] = f[i];
    for (std::size_t i = 0; i < g.size(); ++i) r[i] = re_add(F, r[i], g[i]);
    return rp_trim(std::move(r));
}

inline rpoly rp_sub(const residue_field& F, const rpoly& f, const rpoly& g) {
    rpoly r(std::max(f.size(), g.size()), re_zero(F));
    for (std::size_t i = 0; i < f.size(); ++i) r[i] = f[i];
    for (std::size_t i = 0; i < g.size(); ++i) r[i] = re_sub(F, r[i], g[i]);
    return rp_trim(std::move(r));
}

inline rpoly rp_scale(const residue_field& F, const rpoly& f, const residue_element& s) {
    if (re_is_zero(s)) return {};
    rpoly r = f;
    for (auto& c : r) c = re_mul(F, c, s);
    return r;
}

inline rpoly rp_mul(const residue_field& F, const rpoly& f, const rpoly& g) {
    if (f.empty() || g.empty()) return {};
    rpoly r(f.size() + g.size() - 1, re_zero(F));
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (re_is_zero(f[i])) continue;
        for (std::size_t j = 0; j < g.size(); ++j)
            r[i + j] = re_add(F, r[i + j], re_mul(F, f[i], g[j]));
    }
    return rp_trim(std::move(r));
}

inline rpoly rp_monic(const residue_field& F, const rpoly& f) {
    if (f.empty()) return f;
    return rp_scale(F, f, re_inv(F, f.back()));
}

inline std::pair<rpoly, rpoly> rp_divmod(const residue_field& F, rpoly f, const rpoly& g) {
    assert(!g.empty());
    rpoly q;
    if (f.size() < g.size()) return {q, rp_trim(std::move(f))};
    q.assign(f.size() - g.size() + 1, re_zero(F));
    residue_element linv = re_inv(F, g.back());
    for (long k = rp_degree(f); k >= rp_degree(g); --k) {
        std::size_t uk = static_cast<std::size_t>(k);
        if (re_is_zero(f[uk])) continue;
        residue_element c = re_mul(F, f[uk], linv);
        q[uk - (g.size() - 1)] = c;
        for (std::size_t i = 0; i < g.size(); ++i) {
            std::size_t pos = uk - (g.size() - 1) + i;
            f[pos] = re_sub(F, f[pos], re_mul(F, c, g[i]));
        }
    }
    return {rp_trim(std::move(q)), rp_trim(std::move(f))};
}

inline rpoly rp_gcd(const residue_field& F, rpoly f, rpoly g) {
    f = rp_trim(std::move(f));
    g = rp_trim(std::move(g));
    while (!g.empty()) {
        rpoly r = rp_divmod(F, f, g).second;
        f = std::move(g);
        g = std::move(r);
    }
    return rp_monic(F, f);
}

inline residue_element rp_eval(const residue_field& F, const rpoly& f, const residue_element& x) {
    residue_element r = re_zero(F);
    for (std::size_t i = f.size(); i-- > 0;) r = re_add(F, re_mul(F, r, x), f[i]);
    return r;
}

inline rpoly rp_derivative(const residue_field& F, const rpoly& f) {
    if (f.size() <= 1) return {};
    rpoly r(f.size() - 1, re_zero(F));
    for (std::size_t i = 1; i < f.size(); ++i) {
        mpz_class k = static_cast<long>(i);
        r[i - 1] = re_mul(F, f[i], re_from_int(F, k));
    }
    return rp_trim(std::move(r));
}

inline rpoly rp_pow_mod(const residue_field& F, rpoly base, mpz_class e, const rpoly& mod) {
    rpoly r = {re_one(F)};
    base = rp_divmod(F, std::move(base), mod).second;
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) r = rp_divmod(F, rp_mul(F, r, base), mod).second;
        base = rp_divmod(F, rp_mul(F, base, base), mod).second;
        e >>= 1;
    }
    return r;
}

// All roots in F itself, with multiplicities, found by scanning the field.
inline std::vector<std::pair<residue_element, long>> rp_roots(const residue_field& F,
                                                              const rpoly& f) {
    std::vector<std::pair<residue_element, long>> out;
    if (rp_degree(f) < 1) return out;
    mpz_class q = F.cardinality();
    for (mpz_class idx = 0; idx < q; ++idx) {
        residue_element x = re_from_index(F, idx);
        if (!re_is_zero(rp_eval(F, f, x))) continue;
        rpoly lin = {re_neg(F, x), re_one(F)};
        rpoly rest = f;
        long mult = 0;
        for (;;) {
            auto [quo, rem] = rp_divmod(F, rest, lin);
            if (!rem.empty()) break;
            ++mult;
            rest = std::move(quo);
            if (rest.size() <= 1) break;
        }
        out.emplace_back(std::move(x), mult);
    }
    return out;
}

// Degrees of the irreducible factors (distinct-degree splitting; each degree
// reported once with the number of distinct factors of that degree).
inline std::vector<std::pair<long, long>> rp_factor_degrees(const residue_field& F, rpoly f) {
    std::vector<std::pair<long, long>> out;
    f = rp_monic(F, rp_trim(std::move(f)));
    if (rp_degree(f) < 1) return out;
    mpz_class q = F.cardinality();
    for (long k = 1; rp_degree(f) >= 1 && k <= rp_degree(f); ++k) {
        mpz_class qk;
        mpz_pow_ui(qk.get_mpz_t(), q.get_mpz_t(), static_cast<unsigned long>(k));
        rpoly x = {re_zero(F), re_one(F)};
        rpoly frob = rp_pow_mod(F, x, qk, f);
        rpoly w = rp_gcd(F, rp_sub(F, frob, x), f);
        if (rp_degree(w) < 1) continue;
        out.emplace_back(k, rp_degree(w) / k);
        // strip every power of the degree-k part
        for (;;) {
            rpoly g = rp_gcd(F, f, w);
            if (rp_degree(g) < 1) break;
            f = rp_divmod(F, f, g).first;
        }
    }
    return out;
}

inline bool rp_is_irreducible(const residue_field& F, const rpoly& f) {
    long d = rp_degree(f);
    if (d < 1) return false;
    auto degs = rp_factor_degrees(F, f);
    return degs.size() == 1 && degs[0].first == d && degs[0].second == 1;
}

// First (in base-p counting order) monic irreducible of degree u over F_p.
// Deterministic, so towers built twice agree coefficient for coefficient.
inline std::vector<mpz_class> find_residue_modulus(const mpz_class& p, int u) {
    residue_field Fp{p, 1, {mpz_class(0), mpz_class(1)}};
    if (u == 1) return {mpz_class(0), mpz_class(1)};
    mpz_class total;
    mpz_pow_ui(total.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(u));
    for (mpz_class idx = 0; idx < total; ++idx) {
        std::vector<mpz_class> coeffs(static_cast<std::size_t>(u) + 1);
        mpz_class t = idx;
        for (int i = 0; i < u; ++i) {
            coeffs[static_cast<std::size_t>(i)] = t % p;
            t /= p;
        }
        coeffs[static_cast<std::size_t>(u)] = 1;
        rpoly f;
        for (const auto& c : coeffs) f.push_back(re_from_int(Fp, c));
        f = rp_trim(std::move(f));
        if (rp_is_irreducible(Fp, f)) return coeffs;
    }
    assert(false && "no irreducible polynomial found");
    return {};
}

} // namespace padicdyn
