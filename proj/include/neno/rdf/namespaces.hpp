#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace neno::rdf {

// prefix -> namespace IRI. A namespace that does not end in '#' or '/' is
// joined to local names with '#', so `demo: <http://neno.lanl.gov/demo>`
// expands `demo:Human` to `http://neno.lanl.gov/demo#Human`.
class NamespaceMap {
public:
    NamespaceMap() = default;

    // rdf, rdfs, owl, xsd and neno.
    static NamespaceMap standard();

    void bind(std::string prefix, std::string iri);
    bool has(std::string_view prefix) const;
    std::optional<std::string> namespace_of(std::string_view prefix) const;

    // `prefix:local` -> full IRI; nullopt when the prefix is unbound.
    std::optional<std::string> expand(std::string_view prefixed) const;
    // Full IRI -> `prefix:local` if some bound namespace covers it.
    std::optional<std::string> compact(std::string_view iri) const;

    const std::map<std::string, std::string, std::less<>>& bindings() const { return bindings_; }

    static std::string join(std::string_view ns, std::string_view local);

private:
    std::map<std::string, std::string, std::less<>> bindings_;
};

} // namespace neno::rdf
