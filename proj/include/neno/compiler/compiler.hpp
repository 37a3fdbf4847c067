#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "neno/error.hpp"
#include "neno/lang/ast.hpp"
#include "neno/rdf/graph.hpp"
#include "neno/rdf/namespaces.hpp"
#include "neno/rdf/uuid.hpp"

// Neno source -> Fhat OWL API: classes, field properties with cardinality
// restrictions, and method triple-code as UUID-named instruction classes.
namespace neno::compiler {

class CompileError : public ParseError {
public:
    using ParseError::ParseError;
};

struct FieldInfo {
    std::string name;
    std::string property;
    std::string range;
    std::string owner;
    lang::Cardinality card;
};

struct ParamInfo {
    std::string type;
    std::string name;
};

struct MethodInfo {
    // As stored under hasMethodName: `m`, `!Class` for constructors, `~Class`
    // for destructors.
    std::string name;
    lang::MethodKind kind = lang::MethodKind::Ordinary;
    std::string return_type;  // empty for void
    std::vector<ParamInfo> params;
    std::string owner;
    const lang::MethodDecl* decl = nullptr;
};

struct ClassInfo {
    std::string iri;
    std::string parent;
    std::vector<FieldInfo> fields;
    std::vector<MethodInfo> methods;
    const lang::ClassDecl* decl = nullptr;
    std::size_t unit = 0;
    bool imported = false;
    bool builtin = false;
};

class SymbolTable {
public:
    SymbolTable();

    void add(ClassInfo c);
    const ClassInfo* find_class(std::string_view iri) const;
    ClassInfo* find_class_mut(std::string_view iri);
    const std::map<std::string, ClassInfo, std::less<>>& classes() const { return classes_; }

    // `iri`, then its parents among known classes.
    std::vector<std::string> chain(std::string_view iri) const;
    bool is_subclass(std::string_view sub, std::string_view super) const;

    const FieldInfo* find_field(std::string_view cls, std::string_view name) const;
    std::vector<const FieldInfo*> fields_named(std::string_view name) const;
    const MethodInfo* find_method(std::string_view cls, std::string_view name, std::size_t arity) const;
    bool has_constructor(std::string_view cls) const;

    // A type as written in source (`xsd:string`, `demo:Human`, `Human`,
    // `<iri>`) to its IRI. Throws CompileError for unknown prefixes and types.
    std::string resolve_type(const rdf::NamespaceMap& ns, std::string_view text, SourcePos pos) const;

    // Classes already compiled into a store.
    void import(const rdf::Graph& g);

private:
    std::map<std::string, ClassInfo, std::less<>> classes_;
};

struct SourceFile {
    lang::SourceUnit unit;
    // Object of hasHumanCode on every compiled method.
    std::string uri;
};

SourceFile load_source(const std::string& path);
rdf::NamespaceMap unit_namespaces(const lang::SourceUnit& unit);

// Declares every class, then type-checks every method body. `existing` is a
// store whose previously compiled classes may be referenced.
SymbolTable analyze(const std::vector<SourceFile>& files, const rdf::Graph* existing = nullptr);

// The API graph for `files`, naming classes in each class's namespace with
// UUIDs drawn from gen. The instruction ontology is not included.
rdf::Graph compile(const std::vector<SourceFile>& files, const SymbolTable& symbols, rdf::UuidGenerator& gen);
rdf::Graph compile(const std::vector<SourceFile>& files, rdf::UuidGenerator& gen,
                   const rdf::Graph* existing = nullptr);

// Helpers shared with the interpreters.
std::string namespace_of(std::string_view iri);
std::string local_name(std::string_view iri);
std::string field_property(std::string_view class_iri, std::string_view field);

} // namespace neno::compiler
