#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "padicdyn/errors.hpp"
#include "padicdyn/ratmap.hpp"
#include "padicdyn/reduction.hpp"

namespace padicdyn {

struct criterion_bounds {
    long max_unramified = 6;        // cap on the unramified degree u
    long max_ramified = 6;          // cap on the ramification index e
    int max_precision_escalations = 4;
    int max_extension_steps = 12;
};

// Which admissible point is taken at each branch; indices wrap modulo the
// number of candidates, so any values describe a valid path.
struct choice_path {
    unsigned long indifferent_index = 0;
    unsigned long y1_index = 0;
    unsigned long y2_index = 0;
    unsigned long triple_offset = 0; // all-attracting case: rotate the canonical triple
};

enum class case_kind { none, indifferent, all_attracting };

struct certificate {
    mobius h;
    rational_map psi; // h . phi . h^-1
    reduction_report reduction;
};

struct criterion_verdict {
    enum class outcome_t { potentially_good, not_potentially_good, undetermined };
    outcome_t outcome = outcome_t::undetermined;
    case_kind decided_case = case_kind::none;
    std::optional<certificate> cert;               // present whenever a conjugate was produced
    std::optional<fixed_point_record> repelling;   // refutation by a repelling fixed point
    std::string diagnostic;                        // why the outcome is undetermined
    long suggested_precision = 0;
    std::optional<extension_spec> blocked_extension;

    struct trace_t {
        mpz_class prime;
        long precision_used = 0;
        extension_spec level{1, 1};
        int precision_escalations = 0;
        int extension_steps = 0;
        std::vector<fixed_point_record> fixed_pts;
        std::vector<projective_point> triple;
        std::vector<std::string> steps;
    } trace;
};

namespace detail {

// Internal control flow only: the current level cannot hold all the points
// the procedure needs, and these are the candidate levels to move to.
struct needs_extension_signal {
    std::vector<extension_spec> options;
};

inline rational_map map_at_level(const rational_map& phi, const level_ptr& L2) {
    if (same_level(phi.L, L2)) return phi;
    if (phi.source) return realize_map(*phi.source, L2);
    level_embedding E = make_embedding(phi.L, L2);
    std::vector<field_element> f2, g2;
    for (const auto& c : phi.f.c) f2.push_back(embed(E, c));
    for (const auto& c : phi.g.c) g2.push_back(embed(E, c));
    return make_rational_map(L2, p_make(L2, std::move(f2)), p_make(L2, std::move(g2)));
}

inline bool maps_equal(const rational_map& a, const rational_map& b) {
    return p_eq_at_precision(p_mul(a.f, b.g), p_mul(b.f, a.g));
}

struct escalation_state {
    int precision_escalations = 0;
    int extension_steps = 0;
    std::vector<std::string> steps;
    std::optional<extension_spec> blocked;
};

// Run body against the map, moving it up the tame tower when roots are
// missing and re-realizing with more digits when a comparison cannot be
// certified.  Dead ends rethrow as unsupported_extension or
// insufficient_precision for the caller to interpret.
template <class Body>
auto with_escalation(rational_map& cur, const criterion_bounds& bounds, escalation_state& st,
                     Body&& body) -> decltype(body(cur)) {
    auto bump_precision = [&](const std::string& why, long want) {
        if (!cur.source || st.precision_escalations >= bounds.max_precision_escalations)
            throw insufficient_precision(why, want);
        ++st.precision_escalations;
        st.steps.push_back("raised the working precision to " + std::to_string(want) + " digits");
        level_ptr L2 =
            make_level({cur.L->cfg.p, want, cur.L->cfg.horizon_digits}, cur.L->u, cur.L->e);
        cur = realize_map(*cur.source, L2);
    };
    for (;;) {
        try {
            return body(cur);
        } catch (const needs_extension_signal& sig) {
            std::optional<extension_spec> pick;
            for (const auto& s : sig.options) {
                mpz_class g;
                mpz_gcd(g.get_mpz_t(), mpz_class(s.ramification_index).get_mpz_t(),
                        cur.L->cfg.p.get_mpz_t());
                bool wild = s.ramification_index > 1 && g != 1;
                bool over = s.unramified_degree > bounds.max_unramified ||
                            s.ramification_index > bounds.max_ramified;
                if (wild || over) {
                    if (!st.blocked) st.blocked = s;
                    continue;
                }
                pick = s;
                break;
            }
            if (!pick)
                throw unsupported_extension(
                    st.blocked ? "needed points live in an extension outside the supported tame range"
                               : "root search produced no usable extension candidate");
            if (++st.extension_steps > bounds.max_extension_steps)
                throw unsupported_extension("extension search did not stabilize");
            st.steps.push_back("extended the working field to u=" +
                               std::to_string(pick->unramified_degree) +
                               ", e=" + std::to_string(pick->ramification_index));
            cur = map_at_level(cur,
                               make_level({cur.L->cfg.p, cur.L->n(), cur.L->cfg.horizon_digits},
                                          pick->unramified_degree, pick->ramification_index));
        } catch (const insufficient_precision& ip) {
            bump_precision(ip.what(), std::max(ip.suggested_precision, 2 * cur.L->n()));
        } catch (const division_by_zero_at_precision&) {
            bump_precision("a division hit an operand that is zero at precision", 2 * cur.L->n());
        } catch (const degenerate_triple&) {
            bump_precision("chosen points are indistinguishable at precision", 2 * cur.L->n());
        } catch (const not_coprime&) {
            bump_precision("a factor cancellation is uncertain at precision", 2 * cur.L->n());
        }
    }
}

inline criterion_verdict run_at_level(const rational_map& phi, const choice_path& cp) {
    criterion_verdict v;
    v.trace.prime = phi.L->cfg.p;
    v.trace.precision_used = phi.L->n();
    v.trace.level = {phi.L->u, phi.L->e};

    fixed_point_list fl = fixed_points(phi);
    if (!fl.complete)
        throw needs_extension_signal{suggest_extensions(fixed_point_polynomial(phi))};
    v.trace.fixed_pts = fl.points;

    for (const auto& r : fl.points)
        if (r.cls == fp_class::repelling) {
            v.outcome = criterion_verdict::outcome_t::not_potentially_good;
            v.repelling = r;
            v.trace.steps.push_back("found a repelling fixed point");
            return v;
        }

    std::vector<std::size_t> indiff;
    for (std::size_t i = 0; i < fl.points.size(); ++i)
        if (fl.points[i].cls == fp_class::indifferent) indiff.push_back(i);

    mobius h;
    if (!indiff.empty()) {
        v.decided_case = case_kind::indifferent;
        const fixed_point_record& xr = fl.points[indiff[cp.indifferent_index % indiff.size()]];

        // any preimage outside the excluded set works, so an incomplete list
        // only matters when it leaves no candidate in the level
        preimage_list p1 = preimages(phi, xr.x);
        std::vector<projective_point> y1s;
        for (const auto& [pt, m] : p1.points)
            if (!pt_eq(pt, xr.x)) y1s.push_back(pt);
        if (y1s.empty()) {
            if (!p1.complete)
                throw needs_extension_signal{suggest_extensions(preimage_polynomial(phi, xr.x))};
            throw insufficient_precision("preimages of the indifferent fixed point did not separate",
                                         2 * phi.L->n());
        }
        const projective_point& y1 = y1s[cp.y1_index % y1s.size()];

        preimage_list p2 = preimages(phi, y1);
        std::vector<projective_point> y2s;
        for (const auto& [pt, m] : p2.points)
            if (!pt_eq(pt, xr.x) && !pt_eq(pt, y1)) y2s.push_back(pt);
        if (y2s.empty()) {
            if (!p2.complete)
                throw needs_extension_signal{suggest_extensions(preimage_polynomial(phi, y1))};
            throw insufficient_precision("second preimages did not separate", 2 * phi.L->n());
        }
        const projective_point& y2 = y2s[cp.y2_index % y2s.size()];

        v.trace.triple = {xr.x, y1, y2};
        v.trace.steps.push_back("sent an indifferent fixed point and its preimage chain to (0, 1, oo)");
        h = mobius_from_triple(xr.x, y1, y2);
    } else {
        v.decided_case = case_kind::all_attracting;
        if (fl.points.size() < 3)
            throw insufficient_precision("fixed points did not separate", 2 * phi.L->n());
        std::size_t n = fl.points.size();
        std::size_t o = cp.triple_offset % n;
        const projective_point& a = fl.points[o].x;
        const projective_point& b = fl.points[(o + 1) % n].x;
        const projective_point& c = fl.points[(o + 2) % n].x;
        v.trace.triple = {a, b, c};
        v.trace.steps.push_back("sent three attracting fixed points to (0, 1, oo)");
        h = mobius_from_triple(a, b, c);
    }

    rational_map psi = map_conjugate(phi, h);
    reduction_report rep = good_reduction(psi);
    bool good = rep.good;
    v.cert = certificate{h, std::move(psi), std::move(rep)};
    v.outcome = good ? criterion_verdict::outcome_t::potentially_good
                     : criterion_verdict::outcome_t::not_potentially_good;
    return v;
}

} // namespace detail

inline criterion_verdict check_potential_good_reduction(const rational_map& phi,
                                                        const criterion_bounds& bounds = {},
                                                        const choice_path& cp = {}) {
    rational_map cur = phi;
    detail::escalation_state st;
    auto finish = [&](criterion_verdict v) {
        v.trace.precision_escalations = st.precision_escalations;
        v.trace.extension_steps = st.extension_steps;
        v.trace.steps.insert(v.trace.steps.begin(), st.steps.begin(), st.steps.end());
        return v;
    };
    auto undetermined_here = [&](std::string why) {
        criterion_verdict v;
        v.outcome = criterion_verdict::outcome_t::undetermined;
        v.diagnostic = std::move(why);
        v.trace.prime = cur.L->cfg.p;
        v.trace.precision_used = cur.L->n();
        v.trace.level = {cur.L->u, cur.L->e};
        return v;
    };

    try {
        return finish(detail::with_escalation(
            cur, bounds, st, [&](const rational_map& m) { return detail::run_at_level(m, cp); }));
    } catch (const unsupported_extension& ue) {
        criterion_verdict v = undetermined_here(ue.what());
        v.blocked_extension = st.blocked;
        return finish(std::move(v));
    } catch (const insufficient_precision& ip) {
        criterion_verdict v = undetermined_here(ip.what());
        v.suggested_precision = std::max(ip.suggested_precision, 2 * cur.L->n());
        return finish(std::move(v));
    }
}

// Fixed points resolved with the same tower escalation the decision uses;
// returns the escalated map together with the complete list.  Dead ends
// propagate as unsupported_extension or insufficient_precision.
inline std::pair<rational_map, fixed_point_list> fixed_points_in_tower(
    const rational_map& phi, const criterion_bounds& bounds = {}) {
    rational_map cur = phi;
    detail::escalation_state st;
    fixed_point_list fl =
        detail::with_escalation(cur, bounds, st, [](const rational_map& m) {
            fixed_point_list r = fixed_points(m);
            if (!r.complete)
                throw detail::needs_extension_signal{
                    suggest_extensions(fixed_point_polynomial(m))};
            return r;
        });
    return {std::move(cur), std::move(fl)};
}

// Independent re-check of a verdict against the map it was issued for.
inline bool verify_certificate(const rational_map& phi, const criterion_verdict& v) {
    try {
        if (v.outcome == criterion_verdict::outcome_t::undetermined) return false;
        if (v.outcome == criterion_verdict::outcome_t::not_potentially_good && v.repelling) {
            const level_ptr& L2 = v.repelling->lambda.L;
            rational_map cur = detail::map_at_level(phi, L2);
            field_element lam = multiplier(cur, v.repelling->x);
            val_info vi = fe_val_info(lam);
            return vi.determined && vi.sv < 0;
        }
        if (!v.cert) return false;
        rational_map cur = detail::map_at_level(phi, v.cert->psi.L);
        rational_map conj = map_conjugate(cur, v.cert->h);
        if (!detail::maps_equal(conj, v.cert->psi)) return false;
        bool good = good_reduction(conj).good;
        return v.outcome == criterion_verdict::outcome_t::potentially_good ? good : !good;
    } catch (const error&) {
        return false;
    }
}

// Rerun the decision across admissible branch choices; every run that
// completes must agree with the base verdict.  A forced choice can steer the
// point search into an extension outside the supported tame range; such a
// run carries no verdict and is skipped rather than counted as disagreement.
// completed, when given, receives the number of agreeing completed runs.
inline bool choice_independence_probe(const rational_map& phi, long trials,
                                      const criterion_bounds& bounds = {},
                                      long* completed = nullptr) {
    if (completed) *completed = 0;
    criterion_verdict base = check_potential_good_reduction(phi, bounds);
    if (base.outcome == criterion_verdict::outcome_t::undetermined) return false;
    long ran = 0;
    for (unsigned long a = 0; a < 3 && ran < trials; ++a)
        for (unsigned long b = 0; b < 2 && ran < trials; ++b)
            for (unsigned long c = 0; c < 2 && ran < trials; ++c)
                for (unsigned long o = 0; o < 3 && ran < trials; ++o) {
                    choice_path cp{a, b, c, o};
                    criterion_verdict v = check_potential_good_reduction(phi, bounds, cp);
                    ++ran;
                    if (v.outcome == criterion_verdict::outcome_t::undetermined &&
                        v.blocked_extension.has_value())
                        continue;
                    if (v.outcome != base.outcome) return false;
                    if (completed) ++*completed;
                }
    return true;
}

} // namespace padicdyn
