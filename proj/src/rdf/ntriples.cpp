#include "neno/rdf/ntriples.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

#include "neno/rdf/vocab.hpp"

namespace neno::rdf {

std::string serialize_ntriples(const Graph& g) {
    std::vector<std::string> lines;
    lines.reserve(g.size());
    for (const auto& t : g.triples())
        lines.push_back(t.to_ntriples());
    std::sort(lines.begin(), lines.end());
    std::string out;
    for (const auto& l : lines) {
        out += l;
        out += '\n';
    }
    return out;
}

namespace {

void append_utf8(std::string& out, unsigned long cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xc0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3f));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xe0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
        out += static_cast<char>(0x80 | (cp & 0x3f));
    } else {
        out += static_cast<char>(0xf0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3f));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
        out += static_cast<char>(0x80 | (cp & 0x3f));
    }
}

class LineParser {
public:
    LineParser(std::string_view line, std::size_t lineno) : s_(line), line_(lineno) {}

    // Returns false for blank and comment lines.
    bool parse(Triple& out) {
        skip_ws();
        if (at_end() || peek() == '#')
            return false;
        out.subject = parse_iri();
        skip_ws();
        out.predicate = parse_iri();
        skip_ws();
        out.object = parse_object();
        skip_ws();
        expect('.');
        skip_ws();
        if (!at_end() && peek() != '#')
            fail("trailing characters after '.'");
        return true;
    }

private:
    bool at_end() const { return i_ >= s_.size(); }
    char peek() const { return s_[i_]; }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError({line_, i_ + 1}, msg);
    }

    void skip_ws() {
        while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r'))
            ++i_;
    }

    void expect(char c) {
        if (at_end() || peek() != c)
            fail(std::string("expected '") + c + "'");
        ++i_;
    }

    Term parse_iri() {
        if (at_end())
            fail("unexpected end of line");
        if (peek() == '_')
            fail("blank nodes are not supported");
        expect('<');
        auto close = s_.find('>', i_);
        if (close == std::string_view::npos)
            fail("unterminated IRI");
        std::string iri(s_.substr(i_, close - i_));
        if (iri.empty() || iri.find_first_of(" \"<") != std::string::npos)
            fail("malformed IRI");
        i_ = close + 1;
        return Term::uri(std::move(iri));
    }

    Term parse_object() {
        if (!at_end() && peek() == '"')
            return parse_literal();
        return parse_iri();
    }

    Term parse_literal() {
        SourcePos start{line_, i_ + 1};
        expect('"');
        std::size_t begin = i_;
        while (!at_end() && peek() != '"') {
            if (peek() == '\\')
                ++i_;
            ++i_;
        }
        if (at_end())
            fail("unterminated literal");
        auto lexical = unescape_string(s_.substr(begin, i_ - begin), start);
        ++i_;
        if (!at_end() && peek() == '@')
            fail("language-tagged literals are not supported");
        if (!at_end() && peek() == '^') {
            expect('^');
            expect('^');
            auto dt = parse_iri();
            return Term::literal(std::move(lexical), dt.value());
        }
        return Term::string(std::move(lexical));
    }

    std::string_view s_;
    std::size_t line_;
    std::size_t i_ = 0;
};

} // namespace

std::string unescape_string(std::string_view in, SourcePos pos) {
    std::string out;
    out.reserve(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
        char c = in[i];
        if (c != '\\') {
            out += c;
            continue;
        }
        if (++i >= in.size())
            throw ParseError(pos, "dangling escape");
        switch (in[i]) {
        case 'n': out += '\n'; break;
        case 'r': out += '\r'; break;
        case 't': out += '\t'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'u':
        case 'U': {
            std::size_t len = in[i] == 'u' ? 4 : 8;
            auto hex = in.substr(i + 1, len);
            if (hex.size() != len || !std::all_of(hex.begin(), hex.end(), [](char h) {
                    return std::isxdigit(static_cast<unsigned char>(h));
                }))
                throw ParseError(pos, "malformed unicode escape");
            append_utf8(out, std::stoul(std::string(hex), nullptr, 16));
            i += len;
            break;
        }
        default: throw ParseError(pos, std::string("unknown escape \\") + in[i]);
        }
    }
    return out;
}

void parse_ntriples_into(std::string_view text, Graph& g) {
    std::size_t lineno = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos)
            end = text.size();
        ++lineno;
        Triple t;
        if (LineParser(text.substr(start, end - start), lineno).parse(t))
            g.insert(t);
        start = end + 1;
    }
}

Graph parse_ntriples(std::string_view text) {
    Graph g;
    parse_ntriples_into(text, g);
    return g;
}

} // namespace neno::rdf
