#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "neno/error.hpp"
#include "neno/rdf/graph.hpp"
#include "neno/rdf/namespaces.hpp"

// The query/update subset the machine issues against a store: SELECT over
// basic graph patterns with LIMIT, ASK, and pattern INSERT / DELETE.
namespace neno::sparql {

struct Variable {
    std::string name;  // without the leading '?'

    friend auto operator<=>(const Variable&, const Variable&) = default;
    friend bool operator==(const Variable&, const Variable&) = default;
};

using PatternTerm = std::variant<rdf::Term, Variable>;

struct TriplePattern {
    PatternTerm subject;
    PatternTerm predicate;
    PatternTerm object;

    friend bool operator==(const TriplePattern&, const TriplePattern&) = default;
};

enum class QueryForm { Select, Ask };

struct Query {
    QueryForm form = QueryForm::Select;
    // Projected variable names; empty means `SELECT *`.
    std::vector<std::string> projected;
    std::vector<TriplePattern> where;
    std::optional<std::size_t> limit;

    friend bool operator==(const Query&, const Query&) = default;
};

enum class UpdateKind { Insert, Delete };

struct UpdateCommand {
    UpdateKind kind = UpdateKind::Insert;
    std::vector<TriplePattern> patterns;

    friend bool operator==(const UpdateCommand&, const UpdateCommand&) = default;
};

using Request = std::variant<Query, UpdateCommand>;

using Binding = std::map<std::string, rdf::Term>;
using BindingSet = std::vector<Binding>;

class SparqlError : public Error {
public:
    using Error::Error;
};

// --- evaluation -----------------------------------------------------------

// Every assignment (extending `initial`) under which all patterns, after
// substitution, are triples of g. Joined left to right, deduplicated, in
// lexicographic order.
BindingSet solve(const rdf::Graph& g, const std::vector<TriplePattern>& patterns,
                 const Binding& initial = {});

// Solutions restricted to the projected variables, deduplicated, ordered,
// then truncated to the limit.
BindingSet eval_select(const rdf::Graph& g, const Query& q, const Binding& initial = {});

bool eval_ask(const rdf::Graph& g, const Query& q, const Binding& initial = {});

// Returns the number of triples actually added or removed. Throws
// SparqlError("unbound insert variable") for a non-ground insert.
std::size_t exec_update(rdf::Graph& g, const UpdateCommand& u, const Binding& initial = {});

// --- helpers --------------------------------------------------------------

TriplePattern substitute(const TriplePattern& p, const Binding& b);
std::optional<rdf::Triple> ground(const TriplePattern& p);
std::set<std::string> variables_of(const std::vector<TriplePattern>& patterns);
// Pattern groups connected through shared variables not bound in `bound`.
std::vector<std::vector<TriplePattern>> connected_components(const std::vector<TriplePattern>& patterns,
                                                             const Binding& bound = {});

// --- surface syntax -------------------------------------------------------

// Parses one or more requests separated by ';' or simply juxtaposed.
// `<p:local>` and bare `p:local` are expanded when `p` is bound in ns.
std::vector<Request> parse_requests(std::string_view text,
                                    const rdf::NamespaceMap& ns = rdf::NamespaceMap::standard());
Query parse_query(std::string_view text, const rdf::NamespaceMap& ns = rdf::NamespaceMap::standard());
UpdateCommand parse_update(std::string_view text,
                           const rdf::NamespaceMap& ns = rdf::NamespaceMap::standard());

// Renders in the surface syntax. With a namespace map, IRIs are compacted to
// `<prefix:local>`.
std::string render(const PatternTerm& t, const rdf::NamespaceMap* ns = nullptr);
std::string render(const Query& q, const rdf::NamespaceMap* ns = nullptr);
std::string render(const UpdateCommand& u, const rdf::NamespaceMap* ns = nullptr);
std::string render(const Request& r, const rdf::NamespaceMap* ns = nullptr);
std::string render(const std::vector<Request>& rs, const rdf::NamespaceMap* ns = nullptr);

// Tab-separated rows with a header line of variable names; the wire format
// of SELECT results.
std::string bindings_to_tsv(const BindingSet& rows, const std::vector<std::string>& columns);

} // namespace neno::sparql
