#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "neno/lang/ast.hpp"
#include "neno/lang/lexer.hpp"

namespace neno::lang {

// Throws ParseError with a position and, where it helps, the expected token.
SourceUnit parse(const std::vector<Token>& tokens);
SourceUnit parse(std::string_view text);

// Canonical source text; parse(pretty_print(u)) == u.
std::string pretty_print(const SourceUnit& u);
std::string pretty_print(const Expr& e);
std::string pretty_print(const Cardinality& c);

} // namespace neno::lang
