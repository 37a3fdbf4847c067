#include "neno/lang/lexer.hpp"

#include <cctype>
#include <unordered_map>

#include "neno/rdf/ntriples.hpp"

namespace neno::lang {

namespace {

bool name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

const std::unordered_map<std::string_view, Tok>& keywords() {
    static const std::unordered_map<std::string_view, Tok> kw = {
        {"prefix", Tok::Prefix}, {"this", Tok::This},     {"new", Tok::New},     {"delete", Tok::Delete},
        {"return", Tok::Return}, {"if", Tok::If},         {"else", Tok::Else},   {"while", Tok::While},
        {"for", Tok::For},       {"typeof", Tok::TypeOf}, {"true", Tok::True},   {"false", Tok::False},
    };
    return kw;
}

class Lexer {
public:
    explicit Lexer(std::string_view s) : s_(s) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_trivia();
            if (i_ >= s_.size()) {
                out.push_back({Tok::End, "", "", pos_});
                return out;
            }
            out.push_back(next());
        }
    }

private:
    char at(std::size_t k) const { return i_ + k < s_.size() ? s_[i_ + k] : '\0'; }

    void advance(std::size_t n = 1) {
        for (; n && i_ < s_.size(); --n, ++i_) {
            if (s_[i_] == '\n') {
                ++pos_.line;
                pos_.column = 1;
            } else {
                ++pos_.column;
            }
        }
    }

    [[noreturn]] void fail(SourcePos p, const std::string& msg) const { throw ParseError(p, msg); }

    void skip_trivia() {
        while (i_ < s_.size()) {
            char c = at(0);
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '/' && at(1) == '*') {
                SourcePos start = pos_;
                advance(2);
                while (i_ < s_.size() && !(at(0) == '*' && at(1) == '/'))
                    advance();
                if (i_ >= s_.size())
                    fail(start, "unterminated comment");
                advance(2);
            } else if (c == '/' && at(1) == '/') {
                while (i_ < s_.size() && at(0) != '\n')
                    advance();
            } else {
                break;
            }
        }
    }

    Token make(Tok k, std::size_t len, SourcePos p) {
        Token t{k, std::string(s_.substr(i_, len)), "", p};
        advance(len);
        return t;
    }

    // `<scheme:...>` with no whitespace; anything else starting with '<' is
    // an operator.
    bool looks_like_iri() const {
        std::size_t k = i_ + 1;
        if (k >= s_.size() || !std::isalpha(static_cast<unsigned char>(s_[k])))
            return false;
        bool colon = false;
        for (; k < s_.size(); ++k) {
            char c = s_[k];
            if (c == '>')
                return colon;
            if (std::isspace(static_cast<unsigned char>(c)) || c == '<' || c == '"' || c == ';')
                return false;
            colon = colon || c == ':';
        }
        return false;
    }

    Token next() {
        SourcePos p = pos_;
        char c = at(0);
        if (name_start(c))
            return name(p);
        if (std::isdigit(static_cast<unsigned char>(c)))
            return number(p);
        if (c == '"')
            return literal(p);
        if (c == '<' && looks_like_iri()) {
            std::size_t close = s_.find('>', i_);
            Token t{Tok::Iri, std::string(s_.substr(i_ + 1, close - i_ - 1)), "", p};
            advance(close - i_ + 1);
            return t;
        }
        switch (c) {
        case '{': return make(Tok::LBrace, 1, p);
        case '}': return make(Tok::RBrace, 1, p);
        case '(': return make(Tok::LParen, 1, p);
        case ')': return make(Tok::RParen, 1, p);
        case '[': return make(Tok::LBracket, 1, p);
        case ']': return make(Tok::RBracket, 1, p);
        case ';': return make(Tok::Semi, 1, p);
        case ',': return make(Tok::Comma, 1, p);
        case ':': return make(Tok::Colon, 1, p);
        case '~': return make(Tok::Tilde, 1, p);
        case '*': return make(Tok::Star, 1, p);
        case '/': return make(Tok::Slash, 1, p);
        case '.': return at(1) == '.' ? make(Tok::DotDot, 2, p) : make(Tok::Dot, 1, p);
        case '+': return at(1) == '+' ? make(Tok::PlusPlus, 2, p) : make(Tok::Plus, 1, p);
        case '-': return at(1) == '-' ? make(Tok::MinusMinus, 2, p) : make(Tok::Minus, 1, p);
        case '!': return at(1) == '=' ? make(Tok::Ne, 2, p) : make(Tok::Bang, 1, p);
        case '>': return at(1) == '=' ? make(Tok::Ge, 2, p) : make(Tok::Gt, 1, p);
        case '<':
            if (at(1) == '=')
                return make(Tok::Le, 2, p);
            if (at(1) == '?')
                return make(Tok::NetQuery, 2, p);
            return make(Tok::Lt, 1, p);
        case '=':
            switch (at(1)) {
            case '=': return make(Tok::Eq, 2, p);
            case '+': return make(Tok::SetPlus, 2, p);
            case '-': return make(Tok::SetMinus, 2, p);
            case '/': return make(Tok::SetClear, 2, p);
            case '?': return make(Tok::SetQuery, 2, p);
            default: return make(Tok::Assign, 1, p);
            }
        default:
            break;
        }
        fail(p, std::string("unexpected character '") + c + "'");
    }

    Token name(SourcePos p) {
        std::size_t start = i_;
        while (name_char(at(0)))
            advance();
        bool qualified = false;
        // prefix:local, and multi-colon forms such as urn:uuid:<uuid>
        while (at(0) == ':' && name_char(at(1))) {
            qualified = true;
            advance();
            while (name_char(at(0)) || (at(0) == '-' && name_char(at(1))))
                advance();
        }
        std::string text(s_.substr(start, i_ - start));
        if (qualified)
            return {Tok::QName, text, "", p};
        if (auto it = keywords().find(text); it != keywords().end()) {
            if (it->second == Tok::TypeOf && at(0) == '?') {
                advance();
                return {Tok::TypeOfQ, "typeof?", "", p};
            }
            return {it->second, text, "", p};
        }
        return {Tok::Ident, text, "", p};
    }

    Token number(SourcePos p) {
        std::size_t start = i_;
        while (std::isdigit(static_cast<unsigned char>(at(0))))
            advance();
        if (at(0) == '.' && std::isdigit(static_cast<unsigned char>(at(1)))) {
            advance();
            while (std::isdigit(static_cast<unsigned char>(at(0))))
                advance();
        }
        if ((at(0) == 'e' || at(0) == 'E') &&
            (std::isdigit(static_cast<unsigned char>(at(1))) ||
             ((at(1) == '-' || at(1) == '+') && std::isdigit(static_cast<unsigned char>(at(2)))))) {
            advance(2);
            while (std::isdigit(static_cast<unsigned char>(at(0))))
                advance();
        }
        if (name_start(at(0)))
            fail(pos_, "malformed number");
        return {Tok::Number, std::string(s_.substr(start, i_ - start)), "", p};
    }

    Token literal(SourcePos p) {
        advance();
        std::size_t start = i_;
        while (i_ < s_.size() && at(0) != '"') {
            if (at(0) == '\\')
                advance();
            if (at(0) == '\n')
                fail(pos_, "newline in string literal");
            advance();
        }
        if (i_ >= s_.size())
            fail(p, "unterminated string literal");
        std::string lexical = rdf::unescape_string(s_.substr(start, i_ - start), p);
        advance();
        if (at(0) != '^' || at(1) != '^')
            return {Tok::String, lexical, "", p};
        advance(2);
        SourcePos dp = pos_;
        std::string dt;
        if (at(0) == '<') {
            std::size_t close = s_.find('>', i_);
            if (close == std::string_view::npos)
                fail(dp, "unterminated datatype IRI");
            dt = "<" + std::string(s_.substr(i_ + 1, close - i_ - 1)) + ">";
            advance(close - i_ + 1);
        } else {
            Token t = name_start(at(0)) ? name(dp) : Token{};
            if (t.kind != Tok::QName && t.kind != Tok::Ident)
                fail(dp, "expected datatype after '^^'");
            dt = t.text;
        }
        return {Tok::TypedLiteral, lexical, dt, p};
    }

    std::string_view s_;
    std::size_t i_ = 0;
    SourcePos pos_{1, 1};
};

} // namespace

std::vector<Token> tokenize(std::string_view text) { return Lexer(text).run(); }

const char* token_name(Tok t) {
    switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::QName: return "prefixed name";
    case Tok::Iri: return "IRI";
    case Tok::Number: return "number";
    case Tok::String: return "string literal";
    case Tok::TypedLiteral: return "typed literal";
    case Tok::Prefix: return "'prefix'";
    case Tok::This: return "'this'";
    case Tok::New: return "'new'";
    case Tok::Delete: return "'delete'";
    case Tok::Return: return "'return'";
    case Tok::If: return "'if'";
    case Tok::Else: return "'else'";
    case Tok::While: return "'while'";
    case Tok::For: return "'for'";
    case Tok::TypeOf: return "'typeof'";
    case Tok::TypeOfQ: return "'typeof?'";
    case Tok::True: return "'true'";
    case Tok::False: return "'false'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Semi: return "';'";
    case Tok::Comma: return "','";
    case Tok::Colon: return "':'";
    case Tok::Dot: return "'.'";
    case Tok::DotDot: return "'..'";
    case Tok::Assign: return "'='";
    case Tok::SetPlus: return "'=+'";
    case Tok::SetMinus: return "'=-'";
    case Tok::SetClear: return "'=/'";
    case Tok::SetQuery: return "'=?'";
    case Tok::NetQuery: return "'<?'";
    case Tok::Eq: return "'=='";
    case Tok::Ne: return "'!='";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Gt: return "'>'";
    case Tok::Ge: return "'>='";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Bang: return "'!'";
    case Tok::Tilde: return "'~'";
    case Tok::PlusPlus: return "'++'";
    case Tok::MinusMinus: return "'--'";
    case Tok::End: return "end of input";
    }
    return "token";
}

} // namespace neno::lang
