#include "ldips/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "ldips/errors.hpp"
#include "ldips/typecheck.hpp"

namespace ldips {

namespace {

enum class Tok { Ident, Number, Sym, End };

struct Token {
    Tok kind;
    std::string text;
    double number = 0.0;
    int line = 1;
    int column = 1;
};

std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> out;
    int line = 1;
    int col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < src.size()) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        Token t{Tok::Sym, {}, 0.0, line, col};
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
            t.kind = Tok::Ident;
            t.text = std::string(src.substr(i, j - i));
            advance(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                   (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            std::size_t j = i;
            while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '.')) ++j;
            if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
                if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
                    while (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) ++k;
                    j = k;
                }
            }
            t.kind = Tok::Number;
            t.text = std::string(src.substr(i, j - i));
            auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
            if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size())
                throw ParseError(ParseError::Kind::Syntax, line, col, "malformed number '" + t.text + "'");
            advance(j - i);
        } else {
            static const char* two[] = {"==", "&&", "||"};
            bool matched = false;
            for (const char* s : two) {
                if (src.substr(i, 2) == s) {
                    t.text = s;
                    advance(2);
                    matched = true;
                    break;
                }
            }
            if (!matched) {
                if (std::string_view("()[],:<>+-*/?").find(c) == std::string_view::npos)
                    throw ParseError(ParseError::Kind::Syntax, line, col, std::string("unexpected character '") + c + "'");
                t.text = std::string(1, c);
                advance(1);
            }
        }
        out.push_back(std::move(t));
    }
    out.push_back(Token{Tok::End, "<end>", 0.0, line, col});
    return out;
}

class Parser {
public:
    Parser(std::string_view text, const TypeEnv& env) : toks_(tokenize(text)), env_(env) {}

    Policy policy() {
        Policy p;
        if (accept_ident("return")) {
            p.fallback = action_name();
            expect_end();
            return p;
        }
        expect_ident("if");
        p.branches.push_back(branch());
        while (true) {
            if (accept_ident("elif")) {
                p.branches.push_back(branch());
                continue;
            }
            expect_ident("else");
            if (accept_ident("if")) {
                p.branches.push_back(branch());
                continue;
            }
            expect_sym(":");
            accept_ident("return");
            p.fallback = action_name();
            break;
        }
        expect_end();
        return p;
    }

    Pred whole_pred() {
        Pred p = pred();
        expect_end();
        return p;
    }

    Expr whole_expr() {
        Expr e = expr();
        expect_end();
        return e;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    }

    [[noreturn]] void fail(std::string message, std::set<std::string> expected = {}) const {
        const Token& t = peek();
        throw ParseError(ParseError::Kind::Syntax, t.line, t.column, std::move(message), std::move(expected));
    }

    [[noreturn]] void fail_at(const Token& t, ParseError::Kind kind, std::string message) const {
        throw ParseError(kind, t.line, t.column, std::move(message));
    }

    bool is_sym(const char* s, std::size_t ahead = 0) const {
        const Token& t = peek(ahead);
        return t.kind == Tok::Sym && t.text == s;
    }

    bool is_ident(const char* s, std::size_t ahead = 0) const {
        const Token& t = peek(ahead);
        return t.kind == Tok::Ident && t.text == s;
    }

    bool accept_sym(const char* s) {
        if (!is_sym(s)) return false;
        ++pos_;
        return true;
    }

    bool accept_ident(const char* s) {
        if (!is_ident(s)) return false;
        ++pos_;
        return true;
    }

    void expect_sym(const char* s) {
        if (!accept_sym(s)) fail(std::string("expected '") + s + "', found '" + peek().text + "'", {s});
    }

    void expect_ident(const char* s) {
        if (!accept_ident(s)) fail(std::string("expected '") + s + "', found '" + peek().text + "'", {s});
    }

    void expect_end() {
        if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'", {"<end>"});
    }

    std::string action_name() {
        const Token& t = peek();
        if (t.kind != Tok::Ident) fail("expected action name, found '" + t.text + "'", {"ACTION"});
        if (!env_.has_action(t.text)) fail_at(t, ParseError::Kind::UnknownAction, "unknown action '" + t.text + "'");
        ++pos_;
        return t.text;
    }

    Branch branch() {
        expect_sym("(");
        Pred guard = pred();
        expect_sym(")");
        expect_sym(":");
        accept_ident("return");
        return {guard, action_name()};
    }

    Pred pred() {
        Pred p = conj();
        while (accept_sym("||")) p = Pred::disj(p, conj());
        return p;
    }

    Pred conj() {
        Pred p = atom();
        while (accept_sym("&&")) p = Pred::conj(p, atom());
        return p;
    }

    bool comparison_follows() const {
        return is_sym("<") || is_sym(">") || is_sym("+") || is_sym("-") || is_sym("*") || is_sym("/");
    }

    Pred atom() {
        if (accept_ident("true")) return Pred::truth(true);
        if (accept_ident("false")) return Pred::truth(false);
        if (peek().kind == Tok::Ident && is_sym("==", 1)) {
            ActionRef lhs = action_ref();
            expect_sym("==");
            return Pred::action_eq(lhs, action_ref());
        }
        if (is_sym("(")) {
            // Either a parenthesized predicate or a parenthesized expression
            // on the left of a comparison.
            const std::size_t saved = pos_;
            const std::size_t saved_holes = holes_.size();
            try {
                ++pos_;
                Pred inner = pred();
                expect_sym(")");
                if (!comparison_follows()) return inner;
            } catch (const ParseError& e) {
                if (e.kind() != ParseError::Kind::Syntax) throw;
            }
            pos_ = saved;
            holes_.resize(saved_holes);
            return comparison();
        }
        if (is_sym("?") && peek(1).kind == Tok::Ident) {
            // A blank predicate unless a comparison or arithmetic follows.
            std::size_t ahead = 2;
            if (is_sym(":", ahead)) {
                while (peek(ahead).kind != Tok::End && !is_sym("]", ahead)) ++ahead;
                ++ahead;
            }
            const Token& next = peek(ahead);
            const bool is_expr = next.kind == Tok::Sym &&
                                 (next.text == "<" || next.text == ">" || next.text == "+" ||
                                  next.text == "-" || next.text == "*" || next.text == "/");
            if (!is_expr) {
                ++pos_;
                const Token& id = peek();
                ++pos_;
                register_hole(id);
                return Pred::hole(id.text);
            }
        }
        return comparison();
    }

    ActionRef action_ref() {
        const Token& t = peek();
        if (t.kind != Tok::Ident) fail("expected action, found '" + t.text + "'", {"ACTION"});
        ++pos_;
        if (t.text == kStartActionName) return ActionRef::start();
        if (!env_.has_action(t.text)) fail_at(t, ParseError::Kind::UnknownAction, "unknown action '" + t.text + "'");
        return ActionRef::named(t.text);
    }

    Pred comparison() {
        Expr e = expr();
        bool less;
        if (accept_sym("<"))
            less = true;
        else if (accept_sym(">"))
            less = false;
        else
            fail("expected comparison, found '" + peek().text + "'", {"<", ">"});

        std::optional<Dimension> inferred;
        if (!(e.kind() == ExprKind::Hole && !e.declared_type())) {
            try {
                ValueType t = check_expr(e, env_);
                if (t.is_scalar()) inferred = t.dim;
            } catch (const TypeError&) {
                // left for check_policy to report
            }
        }
        Threshold th = threshold(inferred);
        return less ? Pred::lt(e, th) : Pred::gt(e, th);
    }

    Threshold threshold(std::optional<Dimension> inferred) {
        if (accept_sym("?")) {
            const Token& id = peek();
            if (id.kind != Tok::Ident) fail("expected parameter name", {"ID"});
            ++pos_;
            register_hole(id);
            std::optional<Dimension> dim = inferred;
            if (accept_sym(":")) dim = dimension();
            return Threshold::hole(id.text, dim);
        }
        const double v = signed_number();
        std::optional<Dimension> dim = inferred;
        if (accept_sym(":")) dim = dimension();
        return Threshold::param({}, v, dim);
    }

    double signed_number() {
        const bool neg = accept_sym("-");
        const Token& t = peek();
        if (t.kind != Tok::Number) fail("expected number, found '" + t.text + "'", {"NUMBER"});
        ++pos_;
        return neg ? -t.number : t.number;
    }

    int integer() {
        const Token& t = peek();
        const double v = signed_number();
        if (v != std::floor(v) || std::fabs(v) > 1e6) fail_at(t, ParseError::Kind::Syntax, "dimension exponents must be integers");
        return static_cast<int>(v);
    }

    Dimension dimension() {
        expect_sym("[");
        const int l = integer();
        expect_sym(",");
        const int t = integer();
        expect_sym(",");
        const int m = integer();
        expect_sym("]");
        return {l, t, m};
    }

    ValueType value_type() {
        if (accept_ident("V")) return ValueType::vector(dimension());
        return ValueType::scalar(dimension());
    }

    void register_hole(const Token& id) {
        if (std::find(holes_.begin(), holes_.end(), id.text) != holes_.end())
            fail_at(id, ParseError::Kind::DuplicateHole, "duplicate hole '?" + id.text + "'");
        holes_.push_back(id.text);
    }

    Expr expr() {
        Expr e = term();
        while (is_sym("+") || is_sym("-")) {
            std::string op = peek().text;
            ++pos_;
            e = binary(op, e, term());
        }
        return e;
    }

    Expr term() {
        Expr e = unary();
        while (is_sym("*") || is_sym("/")) {
            std::string op = peek().text;
            ++pos_;
            e = binary(op, e, unary());
        }
        return e;
    }

    Expr binary(const std::string& op, Expr lhs, Expr rhs) {
        if (!env_.ops.find(op)) fail_at(peek(), ParseError::Kind::UnknownOperator, "operator '" + op + "' not enabled");
        return Expr::binary(op, std::move(lhs), std::move(rhs));
    }

    Expr unary() {
        if (is_sym("-") && peek(1).kind == Tok::Number) {
            ++pos_;
            const double v = -peek().number;
            ++pos_;
            return scalar_constant(v);
        }
        return primary();
    }

    Expr scalar_constant(double v) {
        Dimension d;
        if (accept_sym(":")) d = dimension();
        return Expr::constant(Value::scalar(v), ValueType::scalar(d));
    }

    Expr primary() {
        const Token& t = peek();
        if (t.kind == Tok::Number) {
            ++pos_;
            return scalar_constant(t.number);
        }
        if (accept_sym("<")) {
            const double x = signed_number();
            expect_sym(",");
            const double y = signed_number();
            expect_sym(">");
            Dimension d;
            if (accept_sym(":")) d = dimension();
            return Expr::constant(Value::vec(x, y), ValueType::vector(d));
        }
        if (accept_sym("(")) {
            Expr e = expr();
            expect_sym(")");
            return e;
        }
        if (accept_sym("?")) {
            const Token& id = peek();
            if (id.kind != Tok::Ident) fail("expected hole name", {"ID"});
            ++pos_;
            register_hole(id);
            std::optional<ValueType> type;
            if (accept_sym(":")) type = value_type();
            return Expr::hole(id.text, type);
        }
        if (t.kind == Tok::Ident) {
            ++pos_;
            if (accept_sym("(")) {
                const OpSignature* op = env_.ops.find(t.text);
                if (!op) fail_at(t, ParseError::Kind::UnknownOperator, "unknown operator '" + t.text + "'");
                Expr a = expr();
                if (op->arity == 1) {
                    expect_sym(")");
                    return Expr::unary(t.text, a);
                }
                expect_sym(",");
                Expr b = expr();
                expect_sym(")");
                return Expr::binary(t.text, a, b);
            }
            const InputDecl* in = env_.find_input(t.text);
            if (!in) fail_at(t, ParseError::Kind::UnknownInput, "unknown input '" + t.text + "'");
            return Expr::var(t.text, in->type);
        }
        fail("expected expression, found '" + t.text + "'", {"EXPR"});
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    const TypeEnv& env_;
    std::vector<std::string> holes_;
};

}  // namespace

Policy parse_policy(std::string_view text, const TypeEnv& env) {
    return number_params(Parser(text, env).policy());
}

Policy parse_policy(std::string_view text, const DomainDef& domain) {
    return parse_policy(text, make_env(domain));
}

Pred parse_pred(std::string_view text, const TypeEnv& env) {
    Policy wrapper{{Branch{Parser(text, env).whole_pred(), {}}}, {}};
    return number_params(wrapper).branches[0].guard;
}

Expr parse_expr(std::string_view text, const TypeEnv& env) { return Parser(text, env).whole_expr(); }

}  // namespace ldips
