#include "neno/lang/parser.hpp"

#include <algorithm>

namespace neno::lang {

namespace {

class Parser {
public:
    explicit Parser(const std::vector<Token>& toks) : t_(toks) {}

    SourceUnit unit() {
        SourceUnit u;
        while (peek().kind == Tok::Prefix) {
            advance();
            auto name = expect(Tok::Ident, "prefix name").text;
            expect(Tok::Colon, "':' after prefix name");
            auto iri = expect(Tok::Iri, "namespace IRI in angle brackets").text;
            expect(Tok::Semi, "';' after prefix declaration");
            u.prefixes.emplace_back(name, iri);
        }
        while (peek().kind != Tok::End)
            u.classes.push_back(class_decl());
        return u;
    }

private:
    const Token& peek(std::size_t k = 0) const { return t_[std::min(i_ + k, t_.size() - 1)]; }
    const Token& advance() { return t_[i_ < t_.size() - 1 ? i_++ : i_]; }
    bool at(Tok k) const { return peek().kind == k; }

    bool accept(Tok k) {
        if (!at(k))
            return false;
        advance();
        return true;
    }

    [[noreturn]] void fail(const Token& tok, const std::string& msg) const { throw ParseError(tok.pos, msg); }

    [[noreturn]] void expected(const std::string& what) const {
        const Token& tok = peek();
        std::string found = token_name(tok.kind);
        if (!tok.text.empty() && tok.kind != Tok::End)
            found += " '" + tok.text + "'";
        fail(tok, "expected " + what + " but found " + found);
    }

    const Token& expect(Tok k, const std::string& what) {
        if (!at(k))
            expected(what);
        return advance();
    }

    bool at_name() const { return at(Tok::Ident) || at(Tok::QName); }

    std::string type_name(const std::string& what) {
        if (!at_name())
            expected(what);
        return advance().text;
    }

    // ---- declarations -----------------------------------------------------

    ClassDecl class_decl() {
        ClassDecl c;
        c.loc.pos = peek().pos;
        std::vector<std::string> names;
        while (at_name()) {
            names.push_back(advance().text);
            accept(Tok::Comma);
        }
        if (names.size() > 2)
            fail(t_[i_ - 1], "multiple inheritance: class '" + names.back() + "' declares more than one parent");
        if (names.size() < 2)
            expected("'Parent ClassName' class header");
        c.superclass = names[0];
        c.name = names[1];
        expect(Tok::LBrace, "'{' to open class body");
        bool has_destructor = false;
        while (!accept(Tok::RBrace)) {
            if (at(Tok::End))
                expected("'}' to close class '" + c.name + "'");
            member(c, has_destructor);
        }
        return c;
    }

    void member(ClassDecl& c, bool& has_destructor) {
        SourcePos start = peek().pos;
        if (at(Tok::Bang) || at(Tok::Tilde)) {
            bool ctor = advance().kind == Tok::Bang;
            MethodDecl m;
            m.loc.pos = start;
            m.kind = ctor ? MethodKind::Constructor : MethodKind::Destructor;
            m.name = expect(Tok::Ident, ctor ? "constructor name" : "destructor name").text;
            m.params = params();
            if (!ctor) {
                if (!m.params.empty())
                    throw ParseError(start, "destructor takes no arguments");
                if (has_destructor)
                    throw ParseError(start, "duplicate destructor in class '" + c.name + "'");
                has_destructor = true;
            }
            m.body = block();
            c.methods.push_back(std::move(m));
            return;
        }
        if (at(Tok::Ident) && peek(1).kind == Tok::LParen) {
            MethodDecl m;
            m.loc.pos = start;
            m.name = advance().text;
            m.params = params();
            m.body = block();
            c.methods.push_back(std::move(m));
            return;
        }
        std::string type = type_name("field or method declaration");
        if (at(Tok::Bang) || at(Tok::Tilde))
            throw ParseError(start, std::string(at(Tok::Bang) ? "constructor" : "destructor") +
                                        " with return type");
        std::string name = expect(Tok::Ident, "member name").text;
        if (at(Tok::LParen)) {
            MethodDecl m;
            m.loc.pos = start;
            m.return_type = type;
            m.name = name;
            m.params = params();
            m.body = block();
            c.methods.push_back(std::move(m));
            return;
        }
        FieldDecl f;
        f.loc.pos = start;
        f.range = type;
        f.name = name;
        if (at(Tok::LBracket))
            f.card = cardinality();
        expect(Tok::Semi, "';' after field declaration");
        c.fields.push_back(std::move(f));
    }

    std::vector<Param> params() {
        expect(Tok::LParen, "'('");
        std::vector<Param> ps;
        if (accept(Tok::RParen))
            return ps;
        do {
            Param p;
            p.type = type_name("parameter type");
            p.name = expect(Tok::Ident, "parameter name").text;
            ps.push_back(std::move(p));
        } while (accept(Tok::Comma));
        expect(Tok::RParen, "')' after parameters");
        return ps;
    }

    std::uint64_t count(const char* what) {
        const Token& tok = expect(Tok::Number, what);
        if (tok.text.find_first_not_of("0123456789") != std::string::npos)
            fail(tok, "cardinality bounds must be whole numbers");
        return std::stoull(tok.text);
    }

    Cardinality cardinality() {
        const Token& open = expect(Tok::LBracket, "'['");
        Cardinality c;
        if (!at(Tok::Number))
            fail(peek(), "malformed cardinality: expected [n], [n..m] or [n..*]");
        c.min = count("lower bound");
        if (accept(Tok::DotDot)) {
            if (accept(Tok::Star))
                c.max.reset();
            else if (at(Tok::Number))
                c.max = count("upper bound");
            else
                fail(peek(), "malformed cardinality: expected a number or '*' after '..'");
        } else {
            c.max = c.min;
        }
        if (!at(Tok::RBracket))
            fail(peek(), "malformed cardinality: expected ']'");
        advance();
        if (c.max && *c.max < c.min)
            fail(open, "malformed cardinality: lower bound exceeds upper bound");
        return c;
    }

    // ---- statements -------------------------------------------------------

    std::vector<Stmt> block() {
        expect(Tok::LBrace, "'{'");
        std::vector<Stmt> out;
        while (!accept(Tok::RBrace)) {
            if (at(Tok::End))
                expected("'}'");
            out.push_back(statement());
        }
        return out;
    }

    // A braced block, or a single statement treated as one.
    std::vector<Stmt> body() {
        if (at(Tok::LBrace))
            return block();
        std::vector<Stmt> out;
        out.push_back(statement());
        return out;
    }

    Stmt make(StmtKind k, SourcePos p) {
        Stmt s;
        s.kind = k;
        s.loc.pos = p;
        return s;
    }

    bool at_var_decl() const {
        return (peek().kind == Tok::Ident || peek().kind == Tok::QName) && peek(1).kind == Tok::Ident;
    }

    Stmt statement() {
        SourcePos p = peek().pos;
        switch (peek().kind) {
        case Tok::LBrace: {
            Stmt s = make(StmtKind::Block, p);
            s.body = block();
            return s;
        }
        case Tok::If: {
            advance();
            Stmt s = make(StmtKind::If, p);
            expect(Tok::LParen, "'(' after 'if'");
            s.exprs.push_back(expression());
            expect(Tok::RParen, "')' after condition");
            s.body = body();
            if (accept(Tok::Else)) {
                s.has_else = true;
                s.else_body = body();
            } else if (at(Tok::LBrace)) {
                fail(peek(), "expected 'else' before the second block of an if statement");
            }
            return s;
        }
        case Tok::While: {
            advance();
            Stmt s = make(StmtKind::While, p);
            expect(Tok::LParen, "'(' after 'while'");
            s.exprs.push_back(expression());
            expect(Tok::RParen, "')' after condition");
            s.body = body();
            return s;
        }
        case Tok::For:
            return for_statement();
        case Tok::Return: {
            advance();
            Stmt s = make(StmtKind::Return, p);
            if (!at(Tok::Semi))
                s.exprs.push_back(expression());
            expect(Tok::Semi, "';' after return");
            return s;
        }
        case Tok::Delete: {
            advance();
            Stmt s = make(StmtKind::Delete, p);
            s.exprs.push_back(expression());
            expect(Tok::Semi, "';' after delete");
            return s;
        }
        default: {
            Stmt s = simple();
            if (s.kind == StmtKind::SetClear)
                accept(Tok::Semi);
            else
                expect(Tok::Semi, "';' after statement");
            return s;
        }
        }
    }

    Stmt for_statement() {
        SourcePos p = advance().pos;
        expect(Tok::LParen, "'(' after 'for'");
        if (at_var_decl() && peek(2).kind == Tok::Colon) {
            Stmt s = make(StmtKind::ForEach, p);
            s.type = advance().text;
            s.name = advance().text;
            advance();
            s.exprs.push_back(expression());
            expect(Tok::RParen, "')' after field loop header");
            s.body = body();
            return s;
        }
        Stmt s = make(StmtKind::For, p);
        if (!at(Tok::Semi))
            s.init.push_back(simple());
        expect(Tok::Semi, "';' after for-loop initializer");
        s.exprs.push_back(expression());
        expect(Tok::Semi, "';' after for-loop condition");
        if (!at(Tok::RParen))
            s.update.push_back(simple());
        expect(Tok::RParen, "')' after for-loop header");
        s.body = body();
        return s;
    }

    // Declarations, assignments, field operators, increments and bare
    // expressions; no trailing ';'.
    Stmt simple() {
        SourcePos p = peek().pos;
        if (at_var_decl()) {
            Stmt s = make(StmtKind::VarDecl, p);
            s.type = advance().text;
            s.name = advance().text;
            if (at(Tok::LBracket))
                s.card = cardinality();
            if (accept(Tok::Assign)) {
                s.op = "=";
                s.exprs.push_back(expression());
            } else if (accept(Tok::NetQuery)) {
                s.op = "<?";
                s.exprs.push_back(expression());
            }
            return s;
        }
        Expr target = expression();
        switch (peek().kind) {
        case Tok::Assign:
        case Tok::SetPlus:
        case Tok::SetMinus: {
            Stmt s = make(StmtKind::Assign, p);
            s.op = advance().text;
            s.exprs.push_back(std::move(target));
            s.exprs.push_back(expression());
            return s;
        }
        case Tok::SetClear: {
            advance();
            Stmt s = make(StmtKind::SetClear, p);
            s.exprs.push_back(std::move(target));
            return s;
        }
        case Tok::NetQuery: {
            advance();
            Stmt s = make(StmtKind::NetQuery, p);
            s.exprs.push_back(std::move(target));
            s.exprs.push_back(expression());
            return s;
        }
        case Tok::PlusPlus:
        case Tok::MinusMinus: {
            Stmt s = make(StmtKind::Increment, p);
            s.op = advance().text;
            s.exprs.push_back(std::move(target));
            return s;
        }
        default: {
            Stmt s = make(StmtKind::ExprStmt, p);
            s.exprs.push_back(std::move(target));
            return s;
        }
        }
    }

    // ---- expressions ------------------------------------------------------

    static Expr node(ExprKind k, SourcePos p, std::string text = {}) {
        Expr e;
        e.kind = k;
        e.loc.pos = p;
        e.text = std::move(text);
        return e;
    }

    static Expr binary(ExprKind k, std::string op, Expr l, Expr r) {
        Expr e = node(k, l.loc.pos, std::move(op));
        e.args.push_back(std::move(l));
        e.args.push_back(std::move(r));
        return e;
    }

    Expr expression() { return equality(); }

    Expr equality() {
        Expr l = relational();
        while (at(Tok::Eq) || at(Tok::Ne) || at(Tok::SetQuery)) {
            Tok k = advance().kind;
            Expr r = relational();
            if (k == Tok::SetQuery)
                l = binary(ExprKind::SetQuery, "=?", std::move(l), std::move(r));
            else
                l = binary(ExprKind::Binary, k == Tok::Eq ? "==" : "!=", std::move(l), std::move(r));
        }
        return l;
    }

    Expr relational() {
        Expr l = type_test();
        while (at(Tok::Lt) || at(Tok::Le) || at(Tok::Gt) || at(Tok::Ge)) {
            std::string op = advance().text;
            l = binary(ExprKind::Binary, op, std::move(l), type_test());
        }
        return l;
    }

    Expr type_test() {
        Expr e = additive();
        while (at(Tok::TypeOf) || at(Tok::TypeOfQ)) {
            if (advance().kind == Tok::TypeOfQ) {
                Expr q = node(ExprKind::TypeOfQuery, e.loc.pos);
                q.args.push_back(std::move(e));
                e = std::move(q);
            } else {
                Expr q = node(ExprKind::TypeOf, e.loc.pos, type_name("class name after 'typeof'"));
                q.args.push_back(std::move(e));
                e = std::move(q);
            }
        }
        return e;
    }

    Expr additive() {
        Expr l = multiplicative();
        while (at(Tok::Plus) || at(Tok::Minus)) {
            std::string op = advance().text;
            l = binary(ExprKind::Binary, op, std::move(l), multiplicative());
        }
        return l;
    }

    Expr multiplicative() {
        Expr l = unary();
        while (at(Tok::Star) || at(Tok::Slash)) {
            std::string op = advance().text;
            l = binary(ExprKind::Binary, op, std::move(l), unary());
        }
        return l;
    }

    Expr unary() {
        SourcePos p = peek().pos;
        if (accept(Tok::Bang)) {
            Expr e = node(ExprKind::Not, p);
            e.args.push_back(unary());
            return e;
        }
        if (at(Tok::Minus) && peek(1).kind == Tok::Number) {
            advance();
            Expr e = node(ExprKind::Literal, p, "-" + advance().text);
            return postfix(std::move(e));
        }
        return postfix(primary());
    }

    // Can the token begin an operand? Decides whether a trailing `*` is
    // multiplication or the cardinality operator.
    bool starts_operand(Tok k) const {
        switch (k) {
        case Tok::Ident: case Tok::QName: case Tok::Iri: case Tok::Number: case Tok::String:
        case Tok::TypedLiteral: case Tok::This: case Tok::New: case Tok::True: case Tok::False:
        case Tok::LParen: case Tok::Bang:
            return true;
        default:
            return false;
        }
    }

    Expr postfix(Expr e) {
        while (true) {
            SourcePos p = peek().pos;
            if (at(Tok::Dot) || at(Tok::DotDot)) {
                bool inverse = advance().kind == Tok::DotDot;
                std::string name = expect(Tok::Ident, inverse ? "field name after '..'" : "field or method name").text;
                if (!inverse && at(Tok::LParen)) {
                    Expr call = node(ExprKind::Call, p, name);
                    call.args.push_back(std::move(e));
                    arguments(call.args);
                    e = std::move(call);
                } else {
                    Expr f = node(inverse ? ExprKind::InverseField : ExprKind::Field, p, name);
                    f.args.push_back(std::move(e));
                    e = std::move(f);
                }
            } else if (at(Tok::LBracket) && (e.kind == ExprKind::Field || e.kind == ExprKind::InverseField ||
                                             e.kind == ExprKind::Var)) {
                advance();
                Expr idx = node(ExprKind::Index, p);
                idx.args.push_back(std::move(e));
                idx.args.push_back(expression());
                expect(Tok::RBracket, "']' after index");
                e = std::move(idx);
            } else if (at(Tok::Star) && !starts_operand(peek(1).kind) &&
                       (e.kind == ExprKind::Field || e.kind == ExprKind::InverseField || e.kind == ExprKind::Var)) {
                advance();
                Expr c = node(ExprKind::Count, p);
                c.args.push_back(std::move(e));
                e = std::move(c);
            } else {
                return e;
            }
        }
    }

    void arguments(std::vector<Expr>& out) {
        expect(Tok::LParen, "'('");
        if (accept(Tok::RParen))
            return;
        do
            out.push_back(expression());
        while (accept(Tok::Comma));
        expect(Tok::RParen, "')' after arguments");
    }

    Expr primary() {
        const Token& tok = peek();
        SourcePos p = tok.pos;
        switch (tok.kind) {
        case Tok::Number:
            return node(ExprKind::Literal, p, advance().text);
        case Tok::String: {
            Expr e = node(ExprKind::Literal, p, advance().text);
            e.type = "xsd:string";
            return e;
        }
        case Tok::TypedLiteral: {
            Expr e = node(ExprKind::Literal, p, tok.text);
            e.type = tok.datatype;
            advance();
            return e;
        }
        case Tok::True:
        case Tok::False: {
            Expr e = node(ExprKind::Literal, p, advance().text);
            e.type = "xsd:boolean";
            return e;
        }
        case Tok::Iri: {
            Expr e = node(ExprKind::Uri, p, "<" + tok.text + ">");
            advance();
            return e;
        }
        case Tok::This:
            advance();
            return node(ExprKind::This, p);
        case Tok::New: {
            advance();
            Expr e = node(ExprKind::New, p, type_name("class name after 'new'"));
            arguments(e.args);
            return e;
        }
        case Tok::LParen: {
            advance();
            Expr e = expression();
            expect(Tok::RParen, "')'");
            return e;
        }
        case Tok::QName:
        case Tok::Ident: {
            if (peek(1).kind == Tok::Ident) {
                // inline-typed variable reference: `xsd:integer i`
                std::string type = advance().text;
                Expr e = node(ExprKind::Var, p, advance().text);
                e.type = std::move(type);
                return e;
            }
            if (tok.kind == Tok::QName)
                return node(ExprKind::Uri, p, advance().text);
            std::string name = advance().text;
            if (at(Tok::LParen)) {
                // bare call on this
                Expr call = node(ExprKind::Call, p, name);
                call.args.push_back(node(ExprKind::This, p));
                arguments(call.args);
                return call;
            }
            return node(ExprKind::Var, p, name);
        }
        default:
            expected("expression");
        }
    }

    const std::vector<Token>& t_;
    std::size_t i_ = 0;
};

} // namespace

SourceUnit parse(const std::vector<Token>& tokens) { return Parser(tokens).unit(); }

SourceUnit parse(std::string_view text) { return parse(tokenize(text)); }

} // namespace neno::lang
