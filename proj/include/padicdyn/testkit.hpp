#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "padicdyn/criterion.hpp"
#include "padicdyn/exact.hpp"

namespace padicdyn {

// Deterministic source of test data: one fixed seed reproduces every map and
// conjugator in the same order.
struct test_rng {
    std::mt19937_64 g;
    explicit test_rng(std::uint64_t seed) : g(seed) {}
    long range(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(g); }
};

struct generator_config {
    long degree_min = 2;
    long degree_max = 4;
    std::vector<long> primes{2, 3, 5};
    long precision = 64;
    long conjugator_valuation_max = 2; // entry valuations drawn from [-max, max]
    bool extension_entries = true;     // pi factors in conjugators at odd primes
    std::uint64_t seed = 1;
};

namespace detail {

// Determinant of the 2d x 2d Sylvester matrix of two degree-d homogeneous
// coefficient arrays (low to high), by fraction-free elimination.  This is
// an integer computation, independent of the p-adic pipeline.
inline mpz_class int_resultant(const std::vector<mpz_class>& A, const std::vector<mpz_class>& B) {
    long d = static_cast<long>(A.size()) - 1;
    long n = 2 * d;
    std::vector<std::vector<mpz_class>> M(static_cast<std::size_t>(n),
                                          std::vector<mpz_class>(static_cast<std::size_t>(n), 0));
    for (long i = 0; i < d; ++i)
        for (long j = 0; j <= d; ++j) {
            M[static_cast<std::size_t>(i)][static_cast<std::size_t>(i + j)] =
                A[static_cast<std::size_t>(d - j)];
            M[static_cast<std::size_t>(d + i)][static_cast<std::size_t>(i + j)] =
                B[static_cast<std::size_t>(d - j)];
        }
    mpz_class prev = 1;
    int sign = 1;
    for (long k = 0; k + 1 < n; ++k) {
        auto& Mk = M[static_cast<std::size_t>(k)];
        if (Mk[static_cast<std::size_t>(k)] == 0) {
            long r = -1;
            for (long i = k + 1; i < n; ++i)
                if (M[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] != 0) {
                    r = i;
                    break;
                }
            if (r < 0) return 0;
            std::swap(M[static_cast<std::size_t>(k)], M[static_cast<std::size_t>(r)]);
            sign = -sign;
        }
        const mpz_class& piv = M[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)];
        for (long i = k + 1; i < n; ++i) {
            auto& Mi = M[static_cast<std::size_t>(i)];
            for (long j = k + 1; j < n; ++j)
                Mi[static_cast<std::size_t>(j)] =
                    (Mi[static_cast<std::size_t>(j)] * piv -
                     Mi[static_cast<std::size_t>(k)] * M[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)]) /
                    prev;
            Mi[static_cast<std::size_t>(k)] = 0;
        }
        prev = piv;
    }
    mpz_class det = M[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(n - 1)];
    return sign > 0 ? det : -det;
}

} // namespace detail

// A degree-d map with good reduction at the ring's prime, by construction:
// integer coefficients rejected until the degree-(d, d) homogeneous resultant
// is a unit.  A unit resultant forces coprime numerator and denominator,
// degree exactly d, and good reduction including the behavior at infinity.
// With fix_origin set, the constant numerator coefficient is zero, so 0 is a
// fixed point.
inline exact_source random_good_reduction_map(test_rng& rng, const exact_ring_ptr& R, long d,
                                              bool fix_origin = false) {
    for (int tries = 0; tries < 4000; ++tries) {
        std::vector<mpz_class> F(static_cast<std::size_t>(d) + 1), G(static_cast<std::size_t>(d) + 1);
        for (long k = 0; k <= d; ++k) {
            F[static_cast<std::size_t>(k)] = rng.range(-20, 20);
            G[static_cast<std::size_t>(k)] = rng.range(-20, 20);
        }
        if (fix_origin) F[0] = 0;
        mpz_class res = detail::int_resultant(F, G);
        if (res == 0 || res % R->p == 0) continue;
        std::vector<mpq_class> fq(F.begin(), F.end()), gq(G.begin(), G.end());
        return make_exact_source(R, ep_from_mpq_list(R, fq), ep_from_mpq_list(R, gq));
    }
    throw error("unit-resultant sampling did not converge");
}

// An invertible substitution z -> (az+b)/(cz+d) whose entries are w * p^v
// with v in [-vmax, vmax] and w a small integer coprime to p, occasionally
// zero, and optionally carrying a pi or zeta factor when the ring has one.
inline exact_mobius random_conjugator(test_rng& rng, const exact_ring_ptr& R, long vmax,
                                      bool extension_entries = false) {
    auto entry = [&]() -> exact_element {
        if (rng.range(0, 7) == 0) return ex_zero(R);
        long v = rng.range(-vmax, vmax);
        mpz_class w = rng.range(1, 9);
        while (mpz_divisible_p(w.get_mpz_t(), R->p.get_mpz_t())) w = rng.range(1, 9);
        if (rng.range(0, 1)) w = -w;
        mpz_class pk;
        mpz_pow_ui(pk.get_mpz_t(), R->p.get_mpz_t(),
                   static_cast<unsigned long>(v < 0 ? -v : v));
        mpq_class q(w);
        if (v >= 0)
            q *= mpq_class(pk);
        else
            q /= mpq_class(pk);
        exact_element x = ex_from_mpq(R, q);
        if (extension_entries && R->e > 1 && rng.range(0, 2) == 0) x = ex_mul(x, ex_pi(R));
        if (extension_entries && R->u > 1 && rng.range(0, 2) == 0) x = ex_mul(x, ex_zeta(R));
        return x;
    };
    for (;;) {
        exact_mobius h{entry(), entry(), entry(), entry()};
        if (!ex_is_zero(ex_mobius_det(h))) return h;
    }
}

struct round_trip_result {
    criterion_verdict verdict;
    bool verified = false; // independent certificate re-check
    bool blocked = false;  // undetermined because a needed extension is unsupported
};

// Hide a known-good map behind a conjugation, rerun the decision from
// scratch, and re-check the certificate it produces.
inline round_trip_result round_trip(const exact_source& psi0, const exact_mobius& h0,
                                    const level_ptr& L, const criterion_bounds& bounds = {}) {
    round_trip_result out;
    exact_source hidden = exact_conjugate(psi0, h0);
    rational_map phi = realize_map(hidden, L);
    out.verdict = check_potential_good_reduction(phi, bounds);
    out.blocked = out.verdict.outcome == criterion_verdict::outcome_t::undetermined &&
                  out.verdict.blocked_extension.has_value();
    out.verified = verify_certificate(phi, out.verdict);
    return out;
}

inline bool round_trip_good(const exact_source& psi0, const exact_mobius& h0, const level_ptr& L,
                            const criterion_bounds& bounds = {}) {
    round_trip_result r = round_trip(psi0, h0, L, bounds);
    return r.verdict.outcome == criterion_verdict::outcome_t::potentially_good && r.verified;
}

// Structural facts that hold for every fixed point of a map with good
// reduction: none is repelling; an attracting one shares its residue class
// with no other fixed point; an indifferent one has preimages besides
// itself, all reducing outside its residue class.
struct structure_report {
    bool resolved = false; // the tower search completed
    bool no_repelling = true;
    bool attracting_isolated = true;
    bool indifferent_separates = true;
    bool ok() const {
        return resolved && no_repelling && attracting_isolated && indifferent_separates;
    }
};

inline structure_report fixed_point_structure(const rational_map& phi,
                                              const criterion_bounds& bounds = {}) {
    structure_report rep;
    rational_map cur = phi;
    detail::escalation_state st;
    try {
        detail::with_escalation(cur, bounds, st, [&](const rational_map& m) {
            rep = structure_report{};
            fixed_point_list fl = fixed_points(m);
            if (!fl.complete)
                throw detail::needs_extension_signal{
                    suggest_extensions(fixed_point_polynomial(m))};
            for (const auto& r : fl.points) {
                if (r.cls == fp_class::repelling) rep.no_repelling = false;
                if (r.cls == fp_class::attracting) {
                    residue_point rx = reduce_point(r.x);
                    for (const auto& s : fl.points) {
                        if (&s == &r) continue;
                        if (residue_pt_eq(m.L->k, rx, reduce_point(s.x)))
                            rep.attracting_isolated = false;
                    }
                }
                if (r.cls == fp_class::indifferent) {
                    preimage_list pl = preimages(m, r.x);
                    if (!pl.complete)
                        throw detail::needs_extension_signal{
                            suggest_extensions(preimage_polynomial(m, r.x))};
                    residue_point rx = reduce_point(r.x);
                    bool any = false;
                    for (const auto& [pt, mult] : pl.points) {
                        if (pt_eq(pt, r.x)) continue;
                        any = true;
                        if (residue_pt_eq(m.L->k, rx, reduce_point(pt)))
                            rep.indifferent_separates = false;
                    }
                    if (!any)
                        throw insufficient_precision(
                            "preimages of the indifferent fixed point did not separate",
                            2 * m.L->n());
                }
            }
            return 0;
        });
        rep.resolved = true;
    } catch (const error&) {
        rep.resolved = false;
    }
    return rep;
}

struct harness_cell {
    long prime = 0;
    long degree = 0;
    long trials = 0;
    long good = 0;    // PotentiallyGood with a verified certificate
    long blocked = 0; // needed an extension outside the supported tame range
    long failed = 0;
};

// Round trips over the full (prime, degree) grid of the configuration.
// Blocked trials are possible by construction: a good map can have fixed
// points generating wildly ramified extensions (for example square roots
// of 2p at p = 2), which the tame tower cannot reach.
inline std::vector<harness_cell> run_harness(const generator_config& cfg, long trials_per_cell,
                                             const criterion_bounds& bounds = {}) {
    std::vector<harness_cell> cells;
    test_rng rng(cfg.seed);
    for (long p : cfg.primes)
        for (long d = cfg.degree_min; d <= cfg.degree_max; ++d) {
            harness_cell cell;
            cell.prime = p;
            cell.degree = d;
            bool ext = cfg.extension_entries && p % 2 == 1;
            exact_ring_ptr R = make_exact_ring(p, 1, ext ? 2 : 1);
            level_ptr L = make_level({p, cfg.precision}, 1, ext ? 2 : 1);
            for (long t = 0; t < trials_per_cell; ++t) {
                exact_source psi0 = random_good_reduction_map(rng, R, d);
                exact_mobius h0 =
                    random_conjugator(rng, R, cfg.conjugator_valuation_max, ext);
                round_trip_result r = round_trip(psi0, h0, L, bounds);
                ++cell.trials;
                if (r.verdict.outcome == criterion_verdict::outcome_t::potentially_good &&
                    r.verified)
                    ++cell.good;
                else if (r.blocked)
                    ++cell.blocked;
                else
                    ++cell.failed;
            }
            cells.push_back(cell);
        }
    return cells;
}

} // namespace padicdyn
