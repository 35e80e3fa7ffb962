#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cassert>
#include <utility>
#include <vector>

#include "padicdyn/errors.hpp"

namespace padicdyn {

// Shared per-prime data: the prime itself and a table of its powers, so the
// modulus p^k used by every arithmetic step is not recomputed each time.
struct qp_ctx {
    mpz_class p;
    std::vector<mpz_class> pw;

    qp_ctx(mpz_class prime, long max_exp) : p(std::move(prime)) {
        assert(p >= 2);
        pw.reserve(static_cast<std::size_t>(max_exp) + 1);
        mpz_class x = 1;
        for (long k = 0; k <= max_exp; ++k) {
            pw.push_back(x);
            x *= p;
        }
    }

    mpz_class pow(long k) const {
        assert(k >= 0);
        if (k < static_cast<long>(pw.size())) return pw[static_cast<std::size_t>(k)];
        mpz_class r;
        mpz_pow_ui(r.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(k));
        return r;
    }
};

// One element of Q_p known to finite absolute precision.
//
// zero == false:  value = p^v * unit,  unit in [1, p^(aprec-v)) coprime to p,
//                 known modulo p^aprec, with v < aprec.
// zero == true:   nothing is known except v(value) >= v; aprec == v.
//
// The (valuation, unit) split keeps the precision bookkeeping of products,
// quotients and inverses exact; only addition can lose relative precision,
// which is exactly when cancellation genuinely destroys information.
struct qp {
    bool zero = true;
    long v = 0;
    long aprec = 0;
    mpz_class unit;

    long rel() const { return aprec - v; }
};

inline qp qp_zero_at(long bound) {
    qp r;
    r.zero = true;
    r.v = bound;
    r.aprec = bound;
    return r;
}

inline long int_valuation(const qp_ctx& C, mpz_class n) {
    assert(n != 0);
    long v = 0;
    mpz_class q, r;
    for (;;) {
        mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t(), C.p.get_mpz_t());
        if (r != 0) return v;
        n = q;
        ++v;
    }
}

// Build from mantissa * p^shift known modulo p^aprec.
inline qp qp_from_mantissa(const qp_ctx& C, long shift, mpz_class mant, long aprec) {
    if (shift >= aprec) return qp_zero_at(aprec);
    mpz_class m = mant % C.pow(aprec - shift);
    if (m < 0) m += C.pow(aprec - shift);
    if (m == 0) return qp_zero_at(aprec);
    long t = int_valuation(C, m);
    long v = shift + t;
    if (v >= aprec) return qp_zero_at(aprec);
    qp r;
    r.zero = false;
    r.v = v;
    r.aprec = aprec;
    r.unit = (m / C.pow(t)) % C.pow(aprec - v);
    return r;
}

// Exact integer, entering with N significant digits.
inline qp qp_exact_int(const qp_ctx& C, const mpz_class& n, long N) {
    if (n == 0) return qp_zero_at(N);
    long v = int_valuation(C, n);
    return qp_from_mantissa(C, v, n / C.pow(v), v + N);
}

inline qp qp_cap(const qp_ctx& C, const qp& a, long A) {
    if (a.zero) return qp_zero_at(std::min(a.v, A));
    if (A >= a.aprec) return a;
    if (A <= a.v) return qp_zero_at(A);
    qp r = a;
    r.aprec = A;
    r.unit %= C.pow(A - a.v);
    return r;
}

inline qp qp_add(const qp_ctx& C, const qp& a, const qp& b) {
    if (a.zero && b.zero) return qp_zero_at(std::min(a.v, b.v));
    if (a.zero) return qp_cap(C, b, std::min(b.aprec, a.v));
    if (b.zero) return qp_cap(C, a, std::min(a.aprec, b.v));
    long A = std::min(a.aprec, b.aprec);
    long w = std::min(a.v, b.v);
    mpz_class m = a.unit * C.pow(a.v - w) + b.unit * C.pow(b.v - w);
    return qp_from_mantissa(C, w, std::move(m), A);
}

inline qp qp_neg(const qp_ctx& C, const qp& a) {
    if (a.zero) return a;
    qp r = a;
    r.unit = C.pow(a.rel()) - a.unit;
    return r;
}

inline qp qp_sub(const qp_ctx& C, const qp& a, const qp& b) { return qp_add(C, a, qp_neg(C, b)); }

inline qp qp_mul(const qp_ctx& C, const qp& a, const qp& b) {
    if (a.zero && b.zero) return qp_zero_at(a.v + b.v);
    if (a.zero) return qp_zero_at(a.v + b.v);
    if (b.zero) return qp_zero_at(a.v + b.v);
    long rel = std::min(a.rel(), b.rel());
    qp r;
    r.zero = false;
    r.v = a.v + b.v;
    r.aprec = r.v + rel;
    r.unit = (a.unit * b.unit) % C.pow(rel);
    return r;
}

// Multiplication by an exact nonzero integer: relative precision preserved.
inline qp qp_scale_exact(const qp_ctx& C, const qp& a, const mpz_class& s) {
    assert(s != 0);
    long t = int_valuation(C, s);
    mpz_class su = s / C.pow(t);
    if (a.zero) return qp_zero_at(a.v + t);
    qp r;
    r.zero = false;
    r.v = a.v + t;
    r.aprec = r.v + a.rel();
    r.unit = (a.unit * su) % C.pow(a.rel());
    if (r.unit < 0) r.unit += C.pow(a.rel());
    return r;
}

inline qp qp_inv(const qp_ctx& C, const qp& a) {
    if (a.zero) throw division_by_zero_at_precision();
    qp r;
    r.zero = false;
    r.v = -a.v;
    r.aprec = -a.v + a.rel();
    mpz_class mod = C.pow(a.rel());
    int ok = mpz_invert(r.unit.get_mpz_t(), a.unit.get_mpz_t(), mod.get_mpz_t());
    assert(ok != 0);
    (void)ok;
    return r;
}

inline qp qp_div(const qp_ctx& C, const qp& a, const qp& b) { return qp_mul(C, a, qp_inv(C, b)); }

// Exact multiplication by p^k (scales value and precision window together).
inline qp qp_shift(const qp& a, long k) {
    qp r = a;
    r.v += k;
    r.aprec += k;
    return r;
}

inline bool qp_is_zero_at_precision(const qp& a) { return a.zero; }

// Integer representative of p^v * unit in [0, p^aprec); needs v >= 0.
inline mpz_class qp_lift(const qp_ctx& C, const qp& a) {
    if (a.zero) return 0;
    assert(a.v >= 0);
    return (a.unit * C.pow(a.v)) % C.pow(a.aprec);
}

} // namespace padicdyn
