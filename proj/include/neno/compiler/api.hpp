#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "neno/rdf/graph.hpp"

// Reading the class-level API graph: OWL restrictions on compiled classes,
// the declared classes and properties of Neno programs.
namespace neno::api {

struct Restriction {
    enum class Kind { AllValuesFrom, HasValue, MinCardinality, MaxCardinality };
    rdf::Term node;
    rdf::Term property;
    Kind kind = Kind::AllValuesFrom;
    rdf::Term value;
};

// Restrictions that `cls` is directly a subclass of.
std::vector<Restriction> restrictions(const rdf::Graph& g, const rdf::Term& cls);

// Targets of allValuesFrom / hasValue restrictions on `prop`, in term order.
std::vector<rdf::Term> restricted(const rdf::Graph& g, const rdf::Term& cls, const rdf::Term& prop);
std::optional<rdf::Term> restricted_one(const rdf::Graph& g, const rdf::Term& cls, const rdf::Term& prop);

// The superclass of `cls` that is not a restriction.
std::optional<rdf::Term> named_superclass(const rdf::Graph& g, const rdf::Term& cls);

// Classes declared by Neno programs: owl:Class whose named superclass chain
// reaches owl:Thing or rdfs:Resource outside the neno: vocabulary.
std::vector<rdf::Term> declared_classes(const rdf::Graph& g);
bool is_declared_class(const rdf::Graph& g, const rdf::Term& cls);
// Field properties of declared classes.
std::set<rdf::Term> declared_properties(const rdf::Graph& g);

// `cls`, its named superclass, and so on; stops at classes outside the graph.
std::vector<rdf::Term> superclass_chain(const rdf::Graph& g, const rdf::Term& cls);
// rdfs:subClassOf* over named superclasses; rdfs:Resource is above everything.
bool is_subclass_of(const rdf::Graph& g, const rdf::Term& sub, const rdf::Term& super);

struct FieldBounds {
    rdf::Term property;
    rdf::Term range;
    std::uint64_t min = 0;
    std::optional<std::uint64_t> max;
};
// Field restrictions declared on `cls` and its superclasses.
std::vector<FieldBounds> fields_of(const rdf::Graph& g, const rdf::Term& cls);

struct MethodEntry {
    rdf::Term method_class;
    std::string name;
    std::size_t arity = 0;
};
// Methods visible on instances of `cls`: its own first, then inherited ones
// not overridden by name and arity. Constructors are not inherited.
std::vector<MethodEntry> methods_of(const rdf::Graph& g, const rdf::Term& cls);
std::size_t method_arity(const rdf::Graph& g, const rdf::Term& method_class);

} // namespace neno::api
