#include <cctype>

#include "neno/rdf/ntriples.hpp"
#include "neno/rdf/vocab.hpp"
#include "neno/sparql/sparql.hpp"

namespace neno::sparql {

namespace {

bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::toupper(static_cast<unsigned char>(a[i])) != std::toupper(static_cast<unsigned char>(b[i])))
            return false;
    return true;
}

class Parser {
public:
    Parser(std::string_view text, const rdf::NamespaceMap& ns) : s_(text), ns_(ns) {}

    std::vector<Request> parse_all() {
        std::vector<Request> out;
        skip_ws();
        while (!at_end()) {
            out.push_back(parse_request());
            skip_ws();
            while (!at_end() && peek() == ';') {
                ++i_;
                skip_ws();
            }
        }
        return out;
    }

private:
    bool at_end() const { return i_ >= s_.size(); }
    char peek() const { return s_[i_]; }

    SourcePos pos() const {
        SourcePos p{1, 1};
        for (std::size_t k = 0; k < i_ && k < s_.size(); ++k) {
            if (s_[k] == '\n') {
                ++p.line;
                p.column = 1;
            } else {
                ++p.column;
            }
        }
        return p;
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos(), msg); }

    void skip_ws() {
        while (!at_end()) {
            if (std::isspace(static_cast<unsigned char>(peek()))) {
                ++i_;
            } else if (peek() == '#') {
                while (!at_end() && peek() != '\n')
                    ++i_;
            } else {
                break;
            }
        }
    }

    std::string_view word() {
        std::size_t start = i_;
        while (!at_end() && std::isalpha(static_cast<unsigned char>(peek())))
            ++i_;
        return s_.substr(start, i_ - start);
    }

    bool accept_keyword(std::string_view kw) {
        skip_ws();
        std::size_t save = i_;
        if (iequals(word(), kw) && (at_end() || !is_name_char(peek()) || peek() == '-'))
            return true;
        i_ = save;
        return false;
    }

    void expect(char c) {
        skip_ws();
        if (at_end() || peek() != c)
            fail(std::string("expected '") + c + "'");
        ++i_;
    }

    bool accept(char c) {
        skip_ws();
        if (!at_end() && peek() == c) {
            ++i_;
            return true;
        }
        return false;
    }

    Request parse_request() {
        if (accept_keyword("SELECT"))
            return parse_select();
        if (accept_keyword("ASK")) {
            Query q;
            q.form = QueryForm::Ask;
            accept_keyword("WHERE");
            q.where = parse_group();
            return q;
        }
        if (accept_keyword("INSERT")) {
            accept_keyword("DATA");
            return UpdateCommand{UpdateKind::Insert, parse_group()};
        }
        if (accept_keyword("DELETE")) {
            accept_keyword("DATA");
            return UpdateCommand{UpdateKind::Delete, parse_group()};
        }
        fail("expected SELECT, ASK, INSERT or DELETE");
    }

    Query parse_select() {
        Query q;
        q.form = QueryForm::Select;
        if (accept('*')) {
        } else {
            skip_ws();
            while (!at_end() && peek() == '?') {
                q.projected.push_back(parse_variable().name);
                skip_ws();
            }
            if (q.projected.empty())
                fail("expected projected variable or '*'");
        }
        if (!accept_keyword("WHERE"))
            fail("expected WHERE");
        q.where = parse_group();
        if (accept_keyword("LIMIT")) {
            skip_ws();
            std::size_t start = i_;
            while (!at_end() && std::isdigit(static_cast<unsigned char>(peek())))
                ++i_;
            if (start == i_)
                fail("expected LIMIT count");
            auto n = std::stoull(std::string(s_.substr(start, i_ - start)));
            if (n == 0)
                fail("LIMIT must be positive");
            q.limit = n;
        }
        auto vars = variables_of(q.where);
        for (const auto& name : q.projected)
            if (!vars.contains(name))
                fail("projected variable ?" + name + " does not occur in the pattern");
        return q;
    }

    std::vector<TriplePattern> parse_group() {
        expect('{');
        std::vector<TriplePattern> out;
        while (true) {
            if (accept('}'))
                break;
            TriplePattern p;
            p.subject = parse_term();
            p.predicate = parse_term();
            p.object = parse_term();
            if (std::holds_alternative<rdf::Term>(p.subject) && std::get<rdf::Term>(p.subject).is_literal())
                fail("literal in subject position");
            if (std::holds_alternative<rdf::Term>(p.predicate) && std::get<rdf::Term>(p.predicate).is_literal())
                fail("literal in predicate position");
            out.push_back(std::move(p));
            if (accept('}'))
                break;
            expect('.');
        }
        return out;
    }

    Variable parse_variable() {
        expect('?');
        std::size_t start = i_;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_'))
            ++i_;
        auto name = s_.substr(start, i_ - start);
        if (name.empty())
            fail("empty variable name");
        return Variable{std::string(name)};
    }

    std::string expand_name(std::string_view name) {
        if (auto colon = name.find(':'); colon != std::string_view::npos && name.find("//") == std::string_view::npos) {
            if (ns_.has(name.substr(0, colon)))
                return *ns_.expand(name);
        }
        return std::string(name);
    }

    PatternTerm parse_term() {
        skip_ws();
        if (at_end())
            fail("unexpected end of input");
        char c = peek();
        if (c == '?')
            return parse_variable();
        if (c == '<') {
            ++i_;
            auto close = s_.find('>', i_);
            if (close == std::string_view::npos)
                fail("unterminated IRI");
            auto iri = s_.substr(i_, close - i_);
            if (iri.empty())
                fail("empty IRI");
            i_ = close + 1;
            return rdf::Term::uri(expand_name(iri));
        }
        if (c == '"')
            return parse_literal();
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+') {
            std::size_t start = i_++;
            bool decimal = false;
            while (!at_end() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.')) {
                if (peek() == '.') {
                    if (i_ + 1 >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[i_ + 1])))
                        break;
                    decimal = true;
                }
                ++i_;
            }
            return rdf::Term::literal(std::string(s_.substr(start, i_ - start)),
                                      vocab::xsd(decimal ? "double" : "integer"));
        }
        std::size_t start = i_;
        while (!at_end() && (is_name_char(peek()) || peek() == ':' || peek() == '.')) {
            if (peek() == '.' && (i_ + 1 >= s_.size() || !is_name_char(s_[i_ + 1])))
                break;
            ++i_;
        }
        auto name = s_.substr(start, i_ - start);
        if (name == "a")
            return vocab::type();
        if (name == "true" || name == "false")
            return vocab::boolean(name == "true");
        if (name.find(':') == std::string_view::npos)
            fail("unexpected '" + std::string(name.empty() ? std::string_view(&s_[i_], 1) : name) + "'");
        auto colon = name.find(':');
        if (!ns_.has(name.substr(0, colon)))
            fail("unknown prefix '" + std::string(name.substr(0, colon)) + "'");
        return rdf::Term::uri(*ns_.expand(name));
    }

    rdf::Term parse_literal() {
        SourcePos start_pos = pos();
        ++i_;
        std::size_t start = i_;
        while (!at_end() && peek() != '"') {
            if (peek() == '\\')
                ++i_;
            ++i_;
        }
        if (at_end())
            fail("unterminated literal");
        auto lexical = rdf::unescape_string(s_.substr(start, i_ - start), start_pos);
        ++i_;
        if (i_ + 1 < s_.size() && s_[i_] == '^' && s_[i_ + 1] == '^') {
            i_ += 2;
            auto dt = parse_term();
            auto* t = std::get_if<rdf::Term>(&dt);
            if (!t || !t->is_uri())
                fail("expected datatype IRI");
            return rdf::Term::literal(std::move(lexical), t->value());
        }
        return rdf::Term::string(std::move(lexical));
    }

    std::string_view s_;
    const rdf::NamespaceMap& ns_;
    std::size_t i_ = 0;
};

std::string render_iri(const std::string& iri, const rdf::NamespaceMap* ns) {
    if (ns)
        if (auto c = ns->compact(iri))
            return *c;
    return iri;
}

std::string render_patterns(const std::vector<TriplePattern>& ps, const rdf::NamespaceMap* ns) {
    std::string out = "{ ";
    for (const auto& p : ps)
        out += render(p.subject, ns) + " " + render(p.predicate, ns) + " " + render(p.object, ns) + " . ";
    return out + "}";
}

} // namespace

std::vector<Request> parse_requests(std::string_view text, const rdf::NamespaceMap& ns) {
    return Parser(text, ns).parse_all();
}

Query parse_query(std::string_view text, const rdf::NamespaceMap& ns) {
    auto rs = parse_requests(text, ns);
    if (rs.size() != 1 || !std::holds_alternative<Query>(rs.front()))
        throw ParseError({1, 1}, "expected exactly one SELECT or ASK query");
    return std::get<Query>(rs.front());
}

UpdateCommand parse_update(std::string_view text, const rdf::NamespaceMap& ns) {
    auto rs = parse_requests(text, ns);
    if (rs.size() != 1 || !std::holds_alternative<UpdateCommand>(rs.front()))
        throw ParseError({1, 1}, "expected exactly one INSERT or DELETE command");
    return std::get<UpdateCommand>(rs.front());
}

std::string render(const PatternTerm& t, const rdf::NamespaceMap* ns) {
    if (auto* v = std::get_if<Variable>(&t))
        return "?" + v->name;
    const auto& term = std::get<rdf::Term>(t);
    if (term.is_uri())
        return "<" + render_iri(term.value(), ns) + ">";
    auto dt = render_iri(term.datatype(), ns);
    return "\"" + rdf::escape_string(term.value()) + "\"^^<" + dt + ">";
}

std::string render(const Query& q, const rdf::NamespaceMap* ns) {
    if (q.form == QueryForm::Ask)
        return "ASK " + render_patterns(q.where, ns);
    std::string out = "SELECT";
    if (q.projected.empty())
        out += " *";
    for (const auto& v : q.projected)
        out += " ?" + v;
    out += " WHERE " + render_patterns(q.where, ns);
    if (q.limit)
        out += " LIMIT " + std::to_string(*q.limit);
    return out;
}

std::string render(const UpdateCommand& u, const rdf::NamespaceMap* ns) {
    return std::string(u.kind == UpdateKind::Insert ? "INSERT " : "DELETE ") + render_patterns(u.patterns, ns);
}

std::string render(const Request& r, const rdf::NamespaceMap* ns) {
    return std::visit([&](const auto& x) { return render(x, ns); }, r);
}

std::string render(const std::vector<Request>& rs, const rdf::NamespaceMap* ns) {
    std::string out;
    for (const auto& r : rs) {
        if (!out.empty())
            out += "\n";
        out += render(r, ns);
    }
    return out;
}

} // namespace neno::sparql
