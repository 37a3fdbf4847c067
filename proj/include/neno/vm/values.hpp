#pragma once

#include <string>
#include <string_view>

#include "neno/error.hpp"
#include "neno/rdf/term.hpp"

// Literal semantics shared by the compiler's type checks and both
// interpreters: the datatype operation table, numeric promotion, lexical
// canonicalization, comparison and arithmetic.
namespace neno::vm {

class ValueError : public Error {
public:
    using Error::Error;
};

enum class Category { Other, Numeric, String, Boolean, Date, DateTime, AnyUri, Object };

enum class Op { Add, Subtract, Multiply, Divide, Not, Equals, Compare };

// Category of a datatype IRI; URIs that are not XSD datatypes are objects.
Category category_of(std::string_view datatype);
bool is_integer_type(std::string_view datatype);
bool is_numeric_type(std::string_view datatype);
bool is_known_datatype(std::string_view datatype);

// Static view of the operation table. `result` is the datatype produced
// (xsd:boolean for comparisons).
struct OpCheck {
    enum class Verdict { Ok, Mismatch, Unsupported } verdict = Verdict::Ok;
    std::string result;
};
OpCheck check_operation(Op op, std::string_view left, std::string_view right);

// Result datatype of numeric promotion.
std::string promote(std::string_view a, std::string_view b);

// Canonical lexical form for numerics and booleans; other terms unchanged.
// Throws ValueError for a malformed numeric or boolean literal.
rdf::Term canonical(const rdf::Term& t);

rdf::Term arithmetic(Op op, const rdf::Term& left, const rdf::Term& right);
rdf::Term logical_not(const rdf::Term& t);

// Value equality: numbers by value, dates chronologically, everything else
// by term identity.
bool equals(const rdf::Term& a, const rdf::Term& b);
// <0, 0, >0; throws ValueError when the pair is not comparable.
int compare(const rdf::Term& a, const rdf::Term& b);

// Integer value of an integer-family literal; throws otherwise.
long long to_index(const rdf::Term& t);

} // namespace neno::vm
