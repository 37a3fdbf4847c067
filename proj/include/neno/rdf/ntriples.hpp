#pragma once

#include <string>
#include <string_view>

#include "neno/error.hpp"
#include "neno/rdf/graph.hpp"

namespace neno::rdf {

// One line per triple, lines sorted lexicographically, '\n' terminated.
std::string serialize_ntriples(const Graph& g);

// Throws ParseError carrying the 1-based line number on malformed input.
Graph parse_ntriples(std::string_view text);
void parse_ntriples_into(std::string_view text, Graph& g);

std::string unescape_string(std::string_view escaped, SourcePos pos);

} // namespace neno::rdf
