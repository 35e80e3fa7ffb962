#pragma once

#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "padicdyn/criterion.hpp"
#include "padicdyn/expr.hpp"

namespace padicdyn {

using ordered_json = nlohmann::ordered_json;

// --------------------------------------------------------------------------
// Digit-expansion strings: "2 + 3*p + 1*p^2 + O(p^48)".  The prime itself is
// symbolic; it travels in the report header.
// --------------------------------------------------------------------------

inline std::string qp_to_digits(const qp_ctx& C, const qp& x) {
    std::ostringstream os;
    if (x.zero) {
        os << "O(p^" << x.v << ")";
        return os.str();
    }
    mpz_class u = x.unit;
    long k = x.v;
    while (u != 0) {
        mpz_class d = u % C.p;
        if (d != 0) {
            os << d.get_str();
            if (k == 1)
                os << "*p";
            else if (k != 0)
                os << "*p^" << k;
            os << " + ";
        }
        u /= C.p;
        ++k;
    }
    os << "O(p^" << x.aprec << ")";
    return os.str();
}

inline qp qp_from_digits(const qp_ctx& C, const std::string& s) {
    std::size_t i = 0;
    auto ws = [&] { while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i; };
    auto read_int = [&]() -> mpz_class {
        ws();
        std::size_t st = i;
        if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
        std::size_t digits = i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        if (i == digits) throw parse_error(st, "an integer");
        return mpz_class(s.substr(st, i - st));
    };
    auto expect = [&](char c, const char* what) {
        ws();
        if (i >= s.size() || s[i] != c) throw parse_error(i, what);
        ++i;
    };

    std::vector<std::pair<mpz_class, long>> terms;
    std::optional<long> tail;
    for (;;) {
        ws();
        if (i < s.size() && s[i] == 'O') {
            ++i;
            expect('(', "'('");
            expect('p', "'p'");
            long a = 0;
            ws();
            if (i < s.size() && s[i] == '^') {
                ++i;
                a = static_cast<long>(read_int().get_si());
            } else {
                a = 1;
            }
            expect(')', "')'");
            tail = a;
            break;
        }
        mpz_class coeff = read_int();
        long k = 0;
        ws();
        if (i < s.size() && s[i] == '*') {
            ++i;
            expect('p', "'p'");
            ws();
            if (i < s.size() && s[i] == '^') {
                ++i;
                k = static_cast<long>(read_int().get_si());
            } else {
                k = 1;
            }
        }
        terms.emplace_back(std::move(coeff), k);
        ws();
        if (i >= s.size()) throw parse_error(i, "'+' and a precision tail O(p^N)");
        expect('+', "'+'");
    }
    ws();
    if (i != s.size()) throw parse_error(i, "end of the digit expansion");

    long A = *tail;
    if (terms.empty()) return qp_zero_at(A);
    long shift = terms.front().second;
    for (const auto& [c, k] : terms) shift = std::min(shift, k);
    mpz_class mant = 0;
    for (const auto& [c, k] : terms) mant += c * C.pow(k - shift);
    return qp_from_mantissa(C, shift, mant, A);
}

inline ordered_json fe_to_json(const field_element& x) {
    ordered_json a = ordered_json::array();
    for (const qp& q : x.c) a.push_back(qp_to_digits(x.L->qc, q));
    return a;
}

inline field_element fe_from_json(const level_ptr& L, const ordered_json& j) {
    if (!j.is_array() || j.size() != static_cast<std::size_t>(L->dim()))
        throw error("element has the wrong number of coordinates for the level");
    field_element x = fe_zero(L);
    for (std::size_t k = 0; k < x.c.size(); ++k)
        x.c[k] = qp_from_digits(L->qc, j[k].get<std::string>());
    return x;
}

inline ordered_json point_to_json(const projective_point& x) {
    ordered_json j;
    if (pt_is_infinity(x)) {
        j["infinity"] = true;
        return j;
    }
    j["affine"] = fe_to_json(pt_affine(x));
    return j;
}

inline projective_point point_from_json(const level_ptr& L, const ordered_json& j) {
    if (j.contains("infinity")) return pt_infinity(L);
    return pt_from_affine(fe_from_json(L, j.at("affine")));
}

// --------------------------------------------------------------------------
// Report assembly.
// --------------------------------------------------------------------------

struct report_input {
    mpz_class prime;
    std::string map_src;
    long precision = 64;
    long max_unramified = 6;
    long max_ramified = 6;
    int ext_u = 1; // declared extension the expression's symbols refer to
    int ext_e = 1;
};

namespace detail {

inline std::string outcome_name(criterion_verdict::outcome_t o) {
    switch (o) {
    case criterion_verdict::outcome_t::potentially_good: return "PotentiallyGood";
    case criterion_verdict::outcome_t::not_potentially_good: return "NotPotentiallyGood";
    default: return "Undetermined";
    }
}

inline std::string class_name(fp_class c) {
    switch (c) {
    case fp_class::attracting: return "attracting";
    case fp_class::indifferent: return "indifferent";
    default: return "repelling";
    }
}

inline std::string reason_name(reduction_report::reason_t r) {
    switch (r) {
    case reduction_report::reason_t::none: return "none";
    case reduction_report::reason_t::zero_denominator: return "zero-denominator";
    case reduction_report::reason_t::common_factor: return "common-factor";
    default: return "leading-collapse";
    }
}

inline std::string valuation_string(const field_element& x) {
    val_info vi = fe_val_info(x);
    mpq_class q(vi.sv, x.L->e);
    q.canonicalize();
    return vi.determined ? q.get_str() : ">=" + q.get_str();
}

inline ordered_json rpoly_to_json(const rpoly& f) {
    ordered_json a = ordered_json::array();
    for (const residue_element& c : f) {
        ordered_json e = ordered_json::array();
        for (const mpz_class& z : c.c) e.push_back(z.get_str());
        a.push_back(std::move(e));
    }
    return a;
}

inline ordered_json poly_to_json(const poly& f) {
    ordered_json a = ordered_json::array();
    for (const field_element& c : f.c) a.push_back(fe_to_json(c));
    return a;
}

inline poly poly_from_json(const level_ptr& L, const ordered_json& j) {
    std::vector<field_element> cs;
    for (const auto& e : j) cs.push_back(fe_from_json(L, e));
    return p_make(L, std::move(cs));
}

} // namespace detail

inline ordered_json make_report(const report_input& in, const criterion_verdict& v) {
    ordered_json j;
    j["outcome"] = detail::outcome_name(v.outcome);
    j["prime"] = v.trace.prime.get_str();
    j["precision_used"] = v.trace.precision_used;
    j["extension"] = {{"u", v.trace.level.unramified_degree},
                      {"e", v.trace.level.ramification_index}};

    ordered_json fps = ordered_json::array();
    for (const auto& r : v.trace.fixed_pts) {
        ordered_json f;
        f["point"] = point_to_json(r.x);
        f["multiplier_valuation"] = detail::valuation_string(r.lambda);
        f["class"] = detail::class_name(r.cls);
        f["multiplicity"] = r.multiplicity;
        fps.push_back(std::move(f));
    }
    j["fixed_points"] = std::move(fps);

    if (v.decided_case != case_kind::none)
        j["case"] = v.decided_case == case_kind::indifferent ? "indifferent" : "all-attracting";

    if (v.cert) {
        j["h"] = {{"a", fe_to_json(v.cert->h.a)},
                  {"b", fe_to_json(v.cert->h.b)},
                  {"c", fe_to_json(v.cert->h.c)},
                  {"d", fe_to_json(v.cert->h.d)}};
        j["psi"] = {{"numerator", detail::poly_to_json(v.cert->psi.f)},
                    {"denominator", detail::poly_to_json(v.cert->psi.g)}};
        j["reduction"] = {
            {"verdict", v.cert->reduction.good ? "good" : "bad"},
            {"reason", detail::reason_name(v.cert->reduction.reason)},
            {"reduced_map",
             {{"numerator", detail::rpoly_to_json(v.cert->reduction.reduced.f)},
              {"denominator", detail::rpoly_to_json(v.cert->reduction.reduced.g)},
              {"degree", v.cert->reduction.reduced_degree}}}};
    }

    if (v.outcome == criterion_verdict::outcome_t::not_potentially_good) {
        ordered_json w;
        if (v.repelling) {
            w["type"] = "repelling-fixed-point";
            w["point"] = point_to_json(v.repelling->x);
            w["multiplier"] = fe_to_json(v.repelling->lambda);
            w["multiplier_valuation"] = detail::valuation_string(v.repelling->lambda);
        } else {
            w["type"] = "bad-reduction";
            w["reason"] = detail::reason_name(v.cert->reduction.reason);
        }
        j["witness"] = std::move(w);
    }

    if (v.outcome == criterion_verdict::outcome_t::undetermined) {
        ordered_json u;
        u["diagnostic"] = v.diagnostic;
        if (v.suggested_precision > 0) u["suggested_precision"] = v.suggested_precision;
        if (v.blocked_extension)
            u["blocked_extension"] = {{"u", v.blocked_extension->unramified_degree},
                                      {"e", v.blocked_extension->ramification_index}};
        j["undetermined"] = std::move(u);
    }

    ordered_json tr;
    ordered_json triple = ordered_json::array();
    for (const auto& x : v.trace.triple) triple.push_back(point_to_json(x));
    tr["triple"] = std::move(triple);
    tr["precision_escalations"] = v.trace.precision_escalations;
    tr["extension_steps"] = v.trace.extension_steps;
    tr["steps"] = v.trace.steps;
    j["trace"] = std::move(tr);

    j["input"] = {{"prime", in.prime.get_str()},
                  {"map", in.map_src},
                  {"precision", in.precision},
                  {"max_unramified", in.max_unramified},
                  {"max_ramified", in.max_ramified},
                  {"extension", {{"u", in.ext_u}, {"e", in.ext_e}}}};
    return j;
}

struct parsed_report {
    report_input input;
    criterion_verdict verdict;
    level_ptr level; // where the certificate objects live
};

inline parsed_report parse_report(const ordered_json& j) {
    parsed_report out;
    const auto& in = j.at("input");
    out.input.prime = mpz_class(in.at("prime").get<std::string>());
    out.input.map_src = in.at("map").get<std::string>();
    out.input.precision = in.at("precision").get<long>();
    out.input.max_unramified = in.at("max_unramified").get<long>();
    out.input.max_ramified = in.at("max_ramified").get<long>();
    out.input.ext_u = in.at("extension").at("u").get<int>();
    out.input.ext_e = in.at("extension").at("e").get<int>();

    std::string oc = j.at("outcome").get<std::string>();
    out.verdict.outcome = oc == "PotentiallyGood"
                              ? criterion_verdict::outcome_t::potentially_good
                              : (oc == "NotPotentiallyGood"
                                     ? criterion_verdict::outcome_t::not_potentially_good
                                     : criterion_verdict::outcome_t::undetermined);

    long n = j.at("precision_used").get<long>();
    int u = j.at("extension").at("u").get<int>();
    int e = j.at("extension").at("e").get<int>();
    out.level = make_level({out.input.prime, n}, u, e);
    out.verdict.trace.prime = out.input.prime;
    out.verdict.trace.precision_used = n;
    out.verdict.trace.level = {u, e};

    if (j.contains("case"))
        out.verdict.decided_case = j.at("case").get<std::string>() == "indifferent"
                                       ? case_kind::indifferent
                                       : case_kind::all_attracting;

    if (j.contains("h") && j.contains("psi")) {
        const auto& hj = j.at("h");
        mobius h = make_mobius(fe_from_json(out.level, hj.at("a")),
                               fe_from_json(out.level, hj.at("b")),
                               fe_from_json(out.level, hj.at("c")),
                               fe_from_json(out.level, hj.at("d")));
        rational_map psi = make_rational_map(
            out.level, detail::poly_from_json(out.level, j.at("psi").at("numerator")),
            detail::poly_from_json(out.level, j.at("psi").at("denominator")));
        reduction_report rep = good_reduction(psi);
        out.verdict.cert = certificate{std::move(h), std::move(psi), std::move(rep)};
    }

    if (j.contains("witness") &&
        j.at("witness").at("type").get<std::string>() == "repelling-fixed-point") {
        fixed_point_record r;
        r.x = point_from_json(out.level, j.at("witness").at("point"));
        r.lambda = fe_from_json(out.level, j.at("witness").at("multiplier"));
        r.cls = fp_class::repelling;
        out.verdict.repelling = std::move(r);
    }
    return out;
}

// Rebuild the map a report was issued for, with exact provenance.
inline rational_map rebuild_input_map(const report_input& in, long precision) {
    auto R = make_exact_ring(in.prime, in.ext_u, in.ext_e);
    exact_source src = expression_to_source(parse_map(in.map_src), R);
    level_ptr L = make_level({in.prime, precision}, in.ext_u, in.ext_e);
    return realize_map(src, L);
}

// --------------------------------------------------------------------------
// Human-readable summary.
// --------------------------------------------------------------------------

namespace detail {

inline std::string shorten(std::string s) {
    if (s.size() <= 48) return s;
    std::size_t cut = s.rfind(" + ", 44);
    if (cut == std::string::npos) cut = 44;
    return s.substr(0, cut) + " + ...";
}

inline std::string fe_to_text(const field_element& x) {
    if (x.L->dim() == 1) return shorten(qp_to_digits(x.L->qc, x.c[0]));
    std::ostringstream os;
    os << "[";
    for (std::size_t k = 0; k < x.c.size(); ++k) {
        if (k) os << "; ";
        os << shorten(qp_to_digits(x.L->qc, x.c[k]));
    }
    os << "]";
    return os.str();
}

inline std::string point_to_text(const projective_point& x) {
    return pt_is_infinity(x) ? "infinity" : fe_to_text(pt_affine(x));
}

} // namespace detail

inline void print_report(std::ostream& os, const report_input& in, const criterion_verdict& v) {
    os << "map " << in.map_src << " over Q_" << in.prime.get_str() << "\n";
    os << "outcome: " << detail::outcome_name(v.outcome) << "\n";
    os << "working field: u=" << v.trace.level.unramified_degree
       << ", e=" << v.trace.level.ramification_index << ", precision " << v.trace.precision_used
       << " digits\n";
    if (!v.trace.fixed_pts.empty()) {
        os << "fixed points:\n";
        for (const auto& r : v.trace.fixed_pts)
            os << "  " << detail::point_to_text(r.x) << "  v(multiplier)="
               << detail::valuation_string(r.lambda) << "  " << detail::class_name(r.cls)
               << (r.multiplicity > 1 ? " (multiplicity " + std::to_string(r.multiplicity) + ")"
                                      : "")
               << "\n";
    }
    if (v.decided_case != case_kind::none)
        os << "case: "
           << (v.decided_case == case_kind::indifferent ? "indifferent" : "all-attracting")
           << "\n";
    if (v.cert) {
        os << "h: a=" << detail::fe_to_text(v.cert->h.a) << ", b=" << detail::fe_to_text(v.cert->h.b)
           << ", c=" << detail::fe_to_text(v.cert->h.c) << ", d=" << detail::fe_to_text(v.cert->h.d)
           << "\n";
        os << "conjugate reduction: " << (v.cert->reduction.good ? "good" : "bad");
        if (!v.cert->reduction.good)
            os << " (" << detail::reason_name(v.cert->reduction.reason) << ")";
        os << ", reduced degree " << v.cert->reduction.reduced_degree << "\n";
    }
    if (v.repelling)
        os << "witness: repelling fixed point at " << detail::point_to_text(v.repelling->x)
           << " with v(multiplier)=" << detail::valuation_string(v.repelling->lambda) << "\n";
    if (v.outcome == criterion_verdict::outcome_t::undetermined) {
        os << "undetermined: " << v.diagnostic << "\n";
        if (v.suggested_precision > 0)
            os << "  retry with precision " << v.suggested_precision << "\n";
        if (v.blocked_extension)
            os << "  blocked by extension u=" << v.blocked_extension->unramified_degree
               << ", e=" << v.blocked_extension->ramification_index << "\n";
    }
    for (const auto& s : v.trace.steps) os << "  - " << s << "\n";
}

} // namespace padicdyn
