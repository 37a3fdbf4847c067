#include "neno/compiler/api.hpp"

#include <algorithm>
#include <map>

#include "neno/compiler/ontology.hpp"
#include "neno/rdf/vocab.hpp"

namespace neno::api {

namespace {

using rdf::Term;

std::uint64_t as_count(const Term& t) {
    try {
        return std::stoull(t.value());
    } catch (const std::exception&) {
        return 0;
    }
}

bool in_vocabulary(const Term& t) {
    return t.value().rfind(std::string(vocab::kNeno), 0) == 0;
}

} // namespace

std::vector<Restriction> restrictions(const rdf::Graph& g, const Term& cls) {
    static const Term restriction = vocab::owl_uri("Restriction");
    static const Term on_property = vocab::owl_uri("onProperty");
    static const std::pair<Term, Restriction::Kind> kinds[] = {
        {vocab::owl_uri("allValuesFrom"), Restriction::Kind::AllValuesFrom},
        {vocab::owl_uri("hasValue"), Restriction::Kind::HasValue},
        {vocab::owl_uri("minCardinality"), Restriction::Kind::MinCardinality},
        {vocab::owl_uri("maxCardinality"), Restriction::Kind::MaxCardinality},
    };
    std::vector<Restriction> out;
    for (const auto& r : g.objects(cls, vocab::sub_class_of())) {
        if (!g.contains({r, vocab::type(), restriction}))
            continue;
        auto prop = g.object(r, on_property);
        if (!prop)
            continue;
        for (const auto& [pred, kind] : kinds)
            for (const auto& v : g.objects(r, pred))
                out.push_back({r, *prop, kind, v});
    }
    return out;
}

std::vector<Term> restricted(const rdf::Graph& g, const Term& cls, const Term& prop) {
    std::vector<Term> out;
    for (const auto& r : restrictions(g, cls))
        if (r.property == prop &&
            (r.kind == Restriction::Kind::AllValuesFrom || r.kind == Restriction::Kind::HasValue))
            out.push_back(r.value);
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<Term> restricted_one(const rdf::Graph& g, const Term& cls, const Term& prop) {
    auto all = restricted(g, cls, prop);
    if (all.empty())
        return std::nullopt;
    return all.front();
}

std::optional<Term> named_superclass(const rdf::Graph& g, const Term& cls) {
    static const Term restriction = vocab::owl_uri("Restriction");
    for (const auto& s : g.objects(cls, vocab::sub_class_of()))
        if (!g.contains({s, vocab::type(), restriction}))
            return s;
    return std::nullopt;
}

std::vector<Term> superclass_chain(const rdf::Graph& g, const Term& cls) {
    std::vector<Term> out{cls};
    while (auto s = named_superclass(g, out.back())) {
        if (std::find(out.begin(), out.end(), *s) != out.end())
            break;
        out.push_back(*s);
    }
    return out;
}

bool is_subclass_of(const rdf::Graph& g, const Term& sub, const Term& super) {
    if (super == vocab::rdfs_uri("Resource"))
        return true;
    auto chain = superclass_chain(g, sub);
    return std::find(chain.begin(), chain.end(), super) != chain.end();
}

bool is_declared_class(const rdf::Graph& g, const Term& cls) {
    if (!cls.is_uri() || in_vocabulary(cls) || !g.contains({cls, vocab::type(), vocab::owl_uri("Class")}))
        return false;
    auto chain = superclass_chain(g, cls);
    const Term& top = chain.back();
    if (top != vocab::owl_uri("Thing") && top != vocab::rdfs_uri("Resource"))
        return false;
    return std::none_of(chain.begin(), chain.end(), in_vocabulary);
}

std::vector<Term> declared_classes(const rdf::Graph& g) {
    std::vector<Term> out;
    for (const auto& s : g.subjects(vocab::type(), vocab::owl_uri("Class")))
        if (is_declared_class(g, s))
            out.push_back(s);
    return out;
}

std::set<Term> declared_properties(const rdf::Graph& g) {
    std::set<Term> out;
    for (const auto& t : g.match(rdf::any, vocab::rdfs_uri("domain"), rdf::any))
        if (is_declared_class(g, t.object))
            out.insert(t.subject);
    return out;
}

std::vector<FieldBounds> fields_of(const rdf::Graph& g, const Term& cls) {
    std::map<Term, FieldBounds> by_prop;
    for (const auto& c : superclass_chain(g, cls)) {
        for (const auto& r : restrictions(g, c)) {
            if (r.property == nv::has_method())
                continue;
            auto [it, fresh] = by_prop.try_emplace(r.property);
            auto& f = it->second;
            f.property = r.property;
            switch (r.kind) {
            case Restriction::Kind::AllValuesFrom:
                if (f.range.empty())
                    f.range = r.value;
                break;
            case Restriction::Kind::MinCardinality: f.min = std::max(f.min, as_count(r.value)); break;
            case Restriction::Kind::MaxCardinality: {
                auto m = as_count(r.value);
                f.max = f.max ? std::min(*f.max, m) : m;
                break;
            }
            case Restriction::Kind::HasValue: break;
            }
        }
    }
    std::vector<FieldBounds> out;
    for (auto& [p, f] : by_prop)
        out.push_back(std::move(f));
    return out;
}

std::size_t method_arity(const rdf::Graph& g, const Term& method_class) {
    auto ad = restricted_one(g, method_class, nv::has_argument_descriptor());
    if (!ad)
        return 0;
    std::size_t n = 0;
    while (restricted_one(g, *ad, vocab::rdf_uri("_" + std::to_string(n + 1))))
        ++n;
    return n;
}

std::vector<MethodEntry> methods_of(const rdf::Graph& g, const Term& cls) {
    std::vector<MethodEntry> out;
    bool own = true;
    for (const auto& c : superclass_chain(g, cls)) {
        for (const auto& mc : restricted(g, c, nv::has_method())) {
            auto name = restricted_one(g, mc, nv::has_method_name());
            if (!name)
                continue;
            if (!own && !name->value().empty() && name->value()[0] == '!')
                continue;
            std::size_t arity = method_arity(g, mc);
            bool shadowed = std::any_of(out.begin(), out.end(), [&](const MethodEntry& m) {
                return m.name == name->value() && m.arity == arity;
            });
            if (!shadowed)
                out.push_back({mc, name->value(), arity});
        }
        own = false;
    }
    return out;
}

} // namespace neno::api
