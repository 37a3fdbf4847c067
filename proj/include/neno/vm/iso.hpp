#pragma once

#include <optional>
#include <string>

#include "neno/rdf/graph.hpp"

namespace neno::vm {

// Object-level triples: rdf:type links to declared classes and values of
// declared field properties. Machine state and code are left out.
rdf::Graph object_graph(const rdf::Graph& g);

struct IsoResult {
    bool isomorphic = false;
    // Why not, when isomorphic is false.
    std::string counterexample;
    explicit operator bool() const { return isomorphic; }
};

// Equality up to a bijection of urn:uuid: nodes; every other term must match.
IsoResult isomorphic(const rdf::Graph& a, const rdf::Graph& b);

// isomorphic(object_graph(a), object_graph(b))
IsoResult object_graph_iso(const rdf::Graph& a, const rdf::Graph& b);

} // namespace neno::vm
