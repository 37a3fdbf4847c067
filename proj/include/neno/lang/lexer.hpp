#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "neno/error.hpp"

namespace neno::lang {

enum class Tok {
    Ident,
    QName,         // prefix:local, also urn:uuid:...
    Iri,           // <...>; text without brackets
    Number,        // integer or decimal, unsigned
    String,        // "..." unescaped, no datatype
    TypedLiteral,  // "..."^^dt ; text = lexical, datatype = dt as written
    // keywords
    Prefix, This, New, Delete, Return, If, Else, While, For, TypeOf, TypeOfQ, True, False,
    // punctuation and operators
    LBrace, RBrace, LParen, RParen, LBracket, RBracket, Semi, Comma, Colon, Dot, DotDot,
    Assign, SetPlus, SetMinus, SetClear, SetQuery, NetQuery,
    Eq, Ne, Lt, Le, Gt, Ge, Plus, Minus, Star, Slash, Bang, Tilde, PlusPlus, MinusMinus,
    End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::string datatype;
    SourcePos pos;
};

// `/* */` and `//` comments are skipped. The returned stream always ends
// with a Tok::End token.
std::vector<Token> tokenize(std::string_view text);

const char* token_name(Tok t);

} // namespace neno::lang
