// SPDX-License-Identifier: MIT
//
// Recursive-descent parser for the model expression language. Text is parsed
// into a small AST first so constant exponents can be folded before the
// expression is lowered into a ModelGraph.

#include "gudr/errors.hpp"
#include "gudr/model_graph.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <numbers>
#include <string>

namespace gudr {
namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
    Tok kind;
    std::size_t pos;
    std::string text;
    double number = 0.0;
};

const char* describe(Tok t) {
    switch (t) {
        case Tok::Number: return "number";
        case Tok::Ident: return "identifier";
        case Tok::Plus: return "'+'";
        case Tok::Minus: return "'-'";
        case Tok::Star: return "'*'";
        case Tok::Slash: return "'/'";
        case Tok::Caret: return "'^'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::Comma: return "','";
        case Tok::End: return "end of input";
    }
    return "?";
}

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    Token next() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        const std::size_t start = pos_;
        if (pos_ >= text_.size()) return {Tok::End, start, ""};
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number(start);
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            return {Tok::Ident, start, std::string(text_.substr(start, pos_ - start))};
        }
        ++pos_;
        switch (c) {
            case '+': return {Tok::Plus, start, "+"};
            case '-': return {Tok::Minus, start, "-"};
            case '*': return {Tok::Star, start, "*"};
            case '/': return {Tok::Slash, start, "/"};
            case '^': return {Tok::Caret, start, "^"};
            case '(': return {Tok::LParen, start, "("};
            case ')': return {Tok::RParen, start, ")"};
            case ',': return {Tok::Comma, start, ","};
            default:
                throw SyntaxError(start, "expression", "'" + std::string(1, c) + "'");
        }
    }

private:
    Token number(std::size_t start) {
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                ++pos_;
                ++n;
            }
            return n;
        };
        std::size_t mantissa = digits();
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            mantissa += digits();
        }
        if (mantissa == 0) throw SyntaxError(start, "number", "'.'");
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t look = pos_ + 1;
            if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
            if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
                pos_ = look;
                digits();
            }
        }
        const std::string s(text_.substr(start, pos_ - start));
        Token t{Tok::Number, start, s};
        t.number = std::strtod(s.c_str(), nullptr);
        if (!std::isfinite(t.number)) throw SyntaxError(start, "finite number", s);
        return t;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

struct Ast {
    enum Kind { Number, Var, Neg, Binary, Call, Pow } kind;
    double number = 0.0;
    std::size_t var = 0;
    Op op = Op::Add;  // Binary operator or Call function
    std::unique_ptr<Ast> a, b;
};
using AstPtr = std::unique_ptr<Ast>;

AstPtr make(Ast::Kind k) {
    auto p = std::make_unique<Ast>();
    p->kind = k;
    return p;
}

class Parser {
public:
    explicit Parser(std::string_view text) : lexer_(text) { advance(); }

    AstPtr parse() {
        AstPtr e = expression();
        if (tok_.kind != Tok::End) {
            throw SyntaxError(tok_.pos, "operator or end of input", describe(tok_.kind));
        }
        return e;
    }

private:
    void advance() { tok_ = lexer_.next(); }

    void expect(Tok kind) {
        if (tok_.kind != kind) throw SyntaxError(tok_.pos, describe(kind), describe(tok_.kind));
        advance();
    }

    // expression := term (('+' | '-') term)*
    AstPtr expression() {
        AstPtr lhs = term();
        while (tok_.kind == Tok::Plus || tok_.kind == Tok::Minus) {
            const Op op = tok_.kind == Tok::Plus ? Op::Add : Op::Sub;
            advance();
            lhs = binary(op, std::move(lhs), term());
        }
        return lhs;
    }

    // term := power (('*' | '/') power)*
    AstPtr term() {
        AstPtr lhs = power();
        while (tok_.kind == Tok::Star || tok_.kind == Tok::Slash) {
            const Op op = tok_.kind == Tok::Star ? Op::Mul : Op::Div;
            advance();
            lhs = binary(op, std::move(lhs), power());
        }
        return lhs;
    }

    // power := unary ('^' power)?
    AstPtr power() {
        AstPtr base = unary();
        if (tok_.kind != Tok::Caret) return base;
        advance();
        AstPtr p = make(Ast::Pow);
        p->a = std::move(base);
        p->b = power();
        return p;
    }

    // unary := '-' unary | '+' unary | primary
    AstPtr unary() {
        if (tok_.kind == Tok::Minus) {
            advance();
            AstPtr n = make(Ast::Neg);
            n->a = unary();
            return n;
        }
        if (tok_.kind == Tok::Plus) {
            advance();
            return unary();
        }
        return primary();
    }

    AstPtr primary() {
        switch (tok_.kind) {
            case Tok::Number: {
                AstPtr n = make(Ast::Number);
                n->number = tok_.number;
                advance();
                return n;
            }
            case Tok::LParen: {
                advance();
                AstPtr e = expression();
                expect(Tok::RParen);
                return e;
            }
            case Tok::Ident: return identifier();
            default:
                throw SyntaxError(tok_.pos, "number, variable, function call or '('", describe(tok_.kind));
        }
    }

    AstPtr identifier() {
        const Token id = tok_;
        advance();
        if (tok_.kind == Tok::LParen) return call(id);
        if (id.text == "pi" || id.text == "e") {
            AstPtr n = make(Ast::Number);
            n->number = id.text == "pi" ? std::numbers::pi : std::numbers::e;
            return n;
        }
        if (id.text.size() >= 2 && id.text[0] == 'x' && id.text[1] != '0') {
            bool digits = true;
            for (std::size_t i = 1; i < id.text.size(); ++i)
                digits = digits && std::isdigit(static_cast<unsigned char>(id.text[i]));
            if (digits && id.text.size() <= 10) {
                AstPtr v = make(Ast::Var);
                v->var = std::stoul(id.text.substr(1)) - 1;
                return v;
            }
        }
        throw UnknownIdentifier(id.pos, id.text);
    }

    AstPtr call(const Token& id) {
        Op fn;
        if (id.text == "exp") fn = Op::Exp;
        else if (id.text == "log") fn = Op::Log;
        else if (id.text == "sqrt") fn = Op::Sqrt;
        else if (id.text == "sin") fn = Op::Sin;
        else if (id.text == "cos") fn = Op::Cos;
        else throw UnknownIdentifier(id.pos, id.text);
        expect(Tok::LParen);
        if (tok_.kind == Tok::RParen) throw ArityError(id.text, 0);
        AstPtr arg = expression();
        std::size_t count = 1;
        while (tok_.kind == Tok::Comma) {
            advance();
            expression();
            ++count;
        }
        expect(Tok::RParen);
        if (count != 1) throw ArityError(id.text, count);
        AstPtr c = make(Ast::Call);
        c->op = fn;
        c->a = std::move(arg);
        return c;
    }

    static AstPtr binary(Op op, AstPtr lhs, AstPtr rhs) {
        AstPtr n = make(Ast::Binary);
        n->op = op;
        n->a = std::move(lhs);
        n->b = std::move(rhs);
        return n;
    }

    Lexer lexer_;
    Token tok_{Tok::End, 0, ""};
};

bool has_variables(const Ast& e) {
    if (e.kind == Ast::Var) return true;
    return (e.a && has_variables(*e.a)) || (e.b && has_variables(*e.b));
}

// Numeric value of a variable-free subexpression (exponents only).
double fold(const Ast& e) {
    switch (e.kind) {
        case Ast::Number: return e.number;
        case Ast::Neg: return -fold(*e.a);
        case Ast::Binary: {
            const double a = fold(*e.a), b = fold(*e.b);
            switch (e.op) {
                case Op::Add: return a + b;
                case Op::Sub: return a - b;
                case Op::Mul: return a * b;
                default: return a / b;
            }
        }
        case Ast::Call: {
            Node n;
            n.op = e.op;
            return apply_op(n, fold(*e.a), 0.0, 0);
        }
        case Ast::Pow: return std::pow(fold(*e.a), fold(*e.b));
        case Ast::Var: break;
    }
    return 0.0;
}

std::size_t lower(const Ast& e, GraphBuilder& g) {
    switch (e.kind) {
        case Ast::Number: return g.constant(e.number);
        case Ast::Var: return g.input(e.var);
        case Ast::Neg: return g.unary(Op::Neg, lower(*e.a, g));
        case Ast::Binary: {
            const std::size_t a = lower(*e.a, g);
            const std::size_t b = lower(*e.b, g);
            return g.binary(e.op, a, b);
        }
        case Ast::Call: return g.unary(e.op, lower(*e.a, g));
        case Ast::Pow: {
            const std::size_t base = lower(*e.a, g);
            if (!has_variables(*e.b)) {
                double exponent = 0.0;
                try {
                    exponent = fold(*e.b);
                } catch (const EvaluationError&) {
                    throw ModelError("exponent does not evaluate to a finite number");
                }
                if (!std::isfinite(exponent)) throw ModelError("exponent does not evaluate to a finite number");
                return g.pow_real(base, exponent);  // integer-valued exponents become PowInt
            }
            // base^y = exp(y * log(base)) for variable exponents.
            const std::size_t y = lower(*e.b, g);
            return g.unary(Op::Exp, g.binary(Op::Mul, y, g.unary(Op::Log, base)));
        }
    }
    return 0;
}

}  // namespace

ModelGraph parse_model(std::string_view text, std::optional<std::size_t> declared_dim) {
    const AstPtr ast = Parser(text).parse();
    GraphBuilder g;
    const std::size_t out = lower(*ast, g);
    const std::size_t referenced = g.max_input_referenced();
    std::size_t dim = referenced;
    if (declared_dim) {
        if (referenced > *declared_dim) {
            throw DimensionError("variable x" + std::to_string(referenced) + " exceeds declared dimension " +
                                 std::to_string(*declared_dim));
        }
        dim = *declared_dim;
    } else {
        for (std::size_t i = 0; i < referenced; ++i) {
            if (!g.references_input(i)) {
                throw DimensionError("x" + std::to_string(i + 1) +
                                     " is never referenced; declare the dimension explicitly");
            }
        }
    }
    return std::move(g).finish(out, dim);
}

}  // namespace gudr
