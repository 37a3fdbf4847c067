#include "neno/rdf/term.hpp"

#include "neno/rdf/vocab.hpp"

namespace neno::rdf {

Term Term::literal(std::string lexical, std::string datatype) {
    if (datatype.empty())
        datatype = vocab::xsd("string");
    return Term{TermKind::Literal, std::move(lexical), std::move(datatype)};
}

Term Term::string(std::string lexical) {
    return literal(std::move(lexical), vocab::xsd("string"));
}

std::string escape_string(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        switch (c) {
        case '\\': out += "\\\\"; break;
        case '"': out += "\\\""; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        default: out += c;
        }
    }
    return out;
}

std::string Term::to_ntriples() const {
    if (is_uri())
        return "<" + value_ + ">";
    return "\"" + escape_string(value_) + "\"^^<" + datatype_ + ">";
}

std::ostream& operator<<(std::ostream& os, const Term& t) {
    return os << t.to_ntriples();
}

std::string Triple::to_ntriples() const {
    return subject.to_ntriples() + " " + predicate.to_ntriples() + " " + object.to_ntriples() + " .";
}

std::ostream& operator<<(std::ostream& os, const Triple& t) {
    return os << t.to_ntriples();
}

} // namespace neno::rdf
