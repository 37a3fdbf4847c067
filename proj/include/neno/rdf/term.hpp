#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>

namespace neno::rdf {

enum class TermKind : unsigned char { Uri, Literal };

// A URI or a typed literal. There are no blank nodes.
class Term {
public:
    Term() = default;

    static Term uri(std::string iri) { return Term{TermKind::Uri, std::move(iri), {}}; }
    static Term literal(std::string lexical, std::string datatype);
    static Term string(std::string lexical);

    TermKind kind() const { return kind_; }
    bool is_uri() const { return kind_ == TermKind::Uri; }
    bool is_literal() const { return kind_ == TermKind::Literal; }

    // IRI text for URIs, lexical form for literals.
    const std::string& value() const { return value_; }
    // Datatype IRI; empty for URIs.
    const std::string& datatype() const { return datatype_; }

    bool empty() const { return kind_ == TermKind::Uri && value_.empty(); }

    std::string to_ntriples() const;

    friend auto operator<=>(const Term&, const Term&) = default;
    friend bool operator==(const Term&, const Term&) = default;

private:
    Term(TermKind kind, std::string value, std::string datatype)
        : kind_(kind), value_(std::move(value)), datatype_(std::move(datatype)) {}

    TermKind kind_ = TermKind::Uri;
    std::string value_;
    std::string datatype_;
};

std::ostream& operator<<(std::ostream& os, const Term& t);

struct Triple {
    Term subject;
    Term predicate;
    Term object;

    std::string to_ntriples() const;

    friend auto operator<=>(const Triple&, const Triple&) = default;
    friend bool operator==(const Triple&, const Triple&) = default;
};

std::ostream& operator<<(std::ostream& os, const Triple& t);

// N-Triples string escaping shared by the serializer, the SPARQL surface and
// Neno string literals.
std::string escape_string(std::string_view raw);

struct TermHash {
    std::size_t operator()(const Term& t) const noexcept {
        std::size_t h = std::hash<std::string>{}(t.value());
        h ^= std::hash<std::string>{}(t.datatype()) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h ^ static_cast<std::size_t>(t.kind());
    }
};

} // namespace neno::rdf
