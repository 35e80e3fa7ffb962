#pragma once

#include <cctype>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "padicdyn/errors.hpp"
#include "padicdyn/exact.hpp"

namespace padicdyn {

// Syntax tree for a rational-function expression in z.  Parsing is
// field-agnostic; generator symbols are only checked against the declared
// extension when the tree is evaluated.
struct map_expression;
using expr_ptr = std::shared_ptr<const map_expression>;

struct map_expression {
    enum class kind_t { variable, constant, gen_zeta, gen_pi, add, sub, mul, div, pow };
    kind_t kind;
    mpz_class value;    // constant
    expr_ptr lhs, rhs;  // binary nodes
    long exponent = 0;  // pow
};

namespace detail {

struct expr_parser {
    const std::string& src;
    std::size_t pos = 0;

    explicit expr_parser(const std::string& s) : src(s) {}

    void skip_ws() {
        while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    }
    bool peek(char c) {
        skip_ws();
        return pos < src.size() && src[pos] == c;
    }
    bool eat(char c) {
        if (!peek(c)) return false;
        ++pos;
        return true;
    }

    static expr_ptr node(map_expression n) {
        return std::make_shared<const map_expression>(std::move(n));
    }
    static expr_ptr binary(map_expression::kind_t k, expr_ptr a, expr_ptr b) {
        map_expression n;
        n.kind = k;
        n.lhs = std::move(a);
        n.rhs = std::move(b);
        return node(std::move(n));
    }

    expr_ptr parse_expr() {
        expr_ptr acc;
        if (eat('-')) {
            map_expression zero;
            zero.kind = map_expression::kind_t::constant;
            zero.value = 0;
            acc = binary(map_expression::kind_t::sub, node(std::move(zero)), parse_term());
        } else {
            acc = parse_term();
        }
        for (;;) {
            if (eat('+'))
                acc = binary(map_expression::kind_t::add, std::move(acc), parse_term());
            else if (eat('-'))
                acc = binary(map_expression::kind_t::sub, std::move(acc), parse_term());
            else
                return acc;
        }
    }

    expr_ptr parse_term() {
        expr_ptr acc = parse_factor();
        for (;;) {
            if (eat('*'))
                acc = binary(map_expression::kind_t::mul, std::move(acc), parse_factor());
            else if (eat('/'))
                acc = binary(map_expression::kind_t::div, std::move(acc), parse_factor());
            else
                return acc;
        }
    }

    expr_ptr parse_factor() {
        expr_ptr base = parse_base();
        skip_ws();
        if (!eat('^')) return base;
        skip_ws();
        std::size_t at = pos;
        if (pos >= src.size() || !std::isdigit(static_cast<unsigned char>(src[pos])))
            throw parse_error(at, "a nonnegative integer exponent");
        long ex = 0;
        while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
            ex = ex * 10 + (src[pos] - '0');
            if (ex > 512) throw parse_error(at, "an exponent of at most 512");
            ++pos;
        }
        map_expression n;
        n.kind = map_expression::kind_t::pow;
        n.lhs = std::move(base);
        n.exponent = ex;
        return node(std::move(n));
    }

    expr_ptr parse_base() {
        skip_ws();
        std::size_t at = pos;
        if (pos >= src.size())
            throw parse_error(at, "'z', a number, 'zeta', 'pi_u', or '('");
        char c = src[pos];
        if (c == '(') {
            ++pos;
            expr_ptr inner = parse_expr();
            if (!eat(')')) throw parse_error(pos, "')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string digits;
            while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos])))
                digits += src[pos++];
            map_expression n;
            n.kind = map_expression::kind_t::constant;
            n.value = mpz_class(digits);
            return node(std::move(n));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string word;
            while (pos < src.size() && (std::isalnum(static_cast<unsigned char>(src[pos])) ||
                                        src[pos] == '_'))
                word += src[pos++];
            map_expression n;
            if (word == "z") {
                n.kind = map_expression::kind_t::variable;
            } else if (word == "zeta") {
                n.kind = map_expression::kind_t::gen_zeta;
            } else if (word == "pi_u" || word == "pi") {
                n.kind = map_expression::kind_t::gen_pi;
            } else {
                throw parse_error(at, "'z', 'zeta', or 'pi_u'");
            }
            return node(std::move(n));
        }
        throw parse_error(at, "'z', a number, 'zeta', 'pi_u', or '('");
    }
};

// rational-function value: numerator / denominator over the exact ring
struct rf_value {
    epoly num, den;
};

inline rf_value rf_eval(const expr_ptr& ex, const exact_ring_ptr& R) {
    using kind_t = map_expression::kind_t;
    auto one = [&] { return ep_from_mpq_list(R, {1}); };
    switch (ex->kind) {
    case kind_t::variable:
        return {ep_from_mpq_list(R, {0, 1}), one()};
    case kind_t::constant:
        return {ep_from_mpq_list(R, {mpq_class(ex->value)}), one()};
    case kind_t::gen_zeta: {
        if (R->u < 2) throw error("the expression uses zeta but no unramified extension was declared");
        epoly z;
        z.push_back(ex_zeta(R));
        return {std::move(z), one()};
    }
    case kind_t::gen_pi: {
        if (R->e < 2) throw error("the expression uses pi_u but no ramified extension was declared");
        epoly z;
        z.push_back(ex_pi(R));
        return {std::move(z), one()};
    }
    case kind_t::add:
    case kind_t::sub: {
        rf_value a = rf_eval(ex->lhs, R), b = rf_eval(ex->rhs, R);
        epoly cross = ep_mul(R, a.num, b.den);
        epoly other = ep_mul(R, b.num, a.den);
        epoly num = ex->kind == kind_t::add ? ep_add(R, cross, other) : ep_sub(R, cross, other);
        return {std::move(num), ep_mul(R, a.den, b.den)};
    }
    case kind_t::mul: {
        rf_value a = rf_eval(ex->lhs, R), b = rf_eval(ex->rhs, R);
        return {ep_mul(R, a.num, b.num), ep_mul(R, a.den, b.den)};
    }
    case kind_t::div: {
        rf_value a = rf_eval(ex->lhs, R), b = rf_eval(ex->rhs, R);
        if (ep_is_zero(b.num)) throw error("division by an expression that is identically zero");
        return {ep_mul(R, a.num, b.den), ep_mul(R, a.den, b.num)};
    }
    case kind_t::pow: {
        rf_value a = rf_eval(ex->lhs, R);
        rf_value out{ep_from_mpq_list(R, {1}), one()};
        for (long i = 0; i < ex->exponent; ++i) {
            out.num = ep_mul(R, out.num, a.num);
            out.den = ep_mul(R, out.den, a.den);
        }
        return out;
    }
    }
    throw error("unreachable expression kind");
}

} // namespace detail

inline expr_ptr parse_map(const std::string& src) {
    detail::expr_parser p(src);
    expr_ptr ex = p.parse_expr();
    p.skip_ws();
    if (p.pos != src.size()) throw parse_error(p.pos, "end of input or an operator");
    return ex;
}

// Evaluate the tree into a cancelled exact numerator/denominator pair.
inline exact_source expression_to_source(const expr_ptr& ex, const exact_ring_ptr& R) {
    detail::rf_value v = detail::rf_eval(ex, R);
    if (ep_is_zero(v.den)) throw error("denominator is identically zero");
    return make_exact_source(R, std::move(v.num), std::move(v.den));
}

} // namespace padicdyn
