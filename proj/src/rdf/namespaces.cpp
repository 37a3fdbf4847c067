#include "neno/rdf/namespaces.hpp"

#include "neno/rdf/vocab.hpp"

namespace neno::rdf {

namespace {

std::string base_of(std::string_view ns) {
    if (!ns.empty() && (ns.back() == '#' || ns.back() == '/'))
        return std::string(ns);
    return std::string(ns) + "#";
}

} // namespace

NamespaceMap NamespaceMap::standard() {
    NamespaceMap m;
    m.bind("rdf", std::string(vocab::kRdf));
    m.bind("rdfs", std::string(vocab::kRdfs));
    m.bind("owl", std::string(vocab::kOwl));
    m.bind("xsd", std::string(vocab::kXsd));
    m.bind("neno", std::string(vocab::kNeno));
    return m;
}

std::string NamespaceMap::join(std::string_view ns, std::string_view local) {
    return base_of(ns) + std::string(local);
}

void NamespaceMap::bind(std::string prefix, std::string iri) {
    bindings_[std::move(prefix)] = std::move(iri);
}

bool NamespaceMap::has(std::string_view prefix) const {
    return bindings_.find(prefix) != bindings_.end();
}

std::optional<std::string> NamespaceMap::namespace_of(std::string_view prefix) const {
    auto it = bindings_.find(prefix);
    if (it == bindings_.end())
        return std::nullopt;
    return it->second;
}

std::optional<std::string> NamespaceMap::expand(std::string_view prefixed) const {
    auto colon = prefixed.find(':');
    if (colon == std::string_view::npos)
        return std::nullopt;
    auto ns = namespace_of(prefixed.substr(0, colon));
    if (!ns)
        return std::nullopt;
    return join(*ns, prefixed.substr(colon + 1));
}

std::optional<std::string> NamespaceMap::compact(std::string_view iri) const {
    const std::string* best_prefix = nullptr;
    std::size_t best_len = 0;
    for (const auto& [prefix, ns] : bindings_) {
        auto base = base_of(ns);
        if (iri.size() > base.size() && iri.substr(0, base.size()) == base && base.size() > best_len) {
            best_prefix = &prefix;
            best_len = base.size();
        }
    }
    if (!best_prefix)
        return std::nullopt;
    auto local = iri.substr(best_len);
    if (local.find_first_of("#/") != std::string_view::npos)
        return std::nullopt;
    return *best_prefix + ":" + std::string(local);
}

} // namespace neno::rdf
