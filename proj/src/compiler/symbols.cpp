#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "neno/compiler/api.hpp"
#include "neno/compiler/compiler.hpp"
#include "neno/compiler/ontology.hpp"
#include "neno/lang/parser.hpp"
#include "neno/rdf/vocab.hpp"
#include "neno/vm/values.hpp"

namespace neno::compiler {

namespace {

using rdf::Term;

bool is_builtin_top(std::string_view iri) {
    return iri == vocab::owl("Thing") || iri == vocab::rdfs("Resource");
}

std::string method_name(const lang::MethodDecl& m) {
    switch (m.kind) {
    case lang::MethodKind::Constructor: return "!" + m.name;
    case lang::MethodKind::Destructor: return "~" + m.name;
    default: return m.name;
    }
}

lang::MethodKind kind_of(std::string_view name) {
    if (!name.empty() && name[0] == '!')
        return lang::MethodKind::Constructor;
    if (!name.empty() && name[0] == '~')
        return lang::MethodKind::Destructor;
    return lang::MethodKind::Ordinary;
}

ClassInfo machine_class() {
    ClassInfo c;
    c.iri = vocab::neno("Fhat");
    c.parent = vocab::owl("Thing");
    c.builtin = true;
    lang::Cardinality one{1, 1}, opt{0, 1};
    c.fields.push_back({"halt", vocab::neno("halt"), vocab::xsd("boolean"), c.iri, one});
    c.fields.push_back({"methodReuse", vocab::neno("methodReuse"), vocab::xsd("boolean"), c.iri, one});
    c.fields.push_back({"programLocation", vocab::neno("programLocation"), vocab::rdfs("Resource"), c.iri, opt});
    return c;
}

} // namespace

std::string namespace_of(std::string_view iri) {
    auto cut = iri.find_last_of("#/");
    if (cut == std::string_view::npos)
        cut = iri.find_last_of(':');
    return std::string(iri.substr(0, cut == std::string_view::npos ? 0 : cut + 1));
}

std::string local_name(std::string_view iri) { return std::string(iri.substr(namespace_of(iri).size())); }

std::string field_property(std::string_view class_iri, std::string_view field) {
    return namespace_of(class_iri) + std::string(field);
}

SymbolTable::SymbolTable() { add(machine_class()); }

void SymbolTable::add(ClassInfo c) {
    std::string key = c.iri;
    classes_[key] = std::move(c);
}

const ClassInfo* SymbolTable::find_class(std::string_view iri) const {
    auto it = classes_.find(iri);
    return it == classes_.end() ? nullptr : &it->second;
}

ClassInfo* SymbolTable::find_class_mut(std::string_view iri) {
    auto it = classes_.find(iri);
    return it == classes_.end() ? nullptr : &it->second;
}

std::vector<std::string> SymbolTable::chain(std::string_view iri) const {
    std::vector<std::string> out;
    const ClassInfo* c = find_class(iri);
    while (c && std::find(out.begin(), out.end(), c->iri) == out.end()) {
        out.push_back(c->iri);
        c = find_class(c->parent);
    }
    return out;
}

bool SymbolTable::is_subclass(std::string_view sub, std::string_view super) const {
    if (sub == super || super == vocab::rdfs("Resource"))
        return true;
    if (super == vocab::owl("Thing"))
        return find_class(sub) != nullptr;
    auto c = chain(sub);
    return std::find(c.begin(), c.end(), super) != c.end();
}

const FieldInfo* SymbolTable::find_field(std::string_view cls, std::string_view name) const {
    for (const auto& iri : chain(cls))
        for (const auto& f : find_class(iri)->fields)
            if (f.name == name)
                return &f;
    return nullptr;
}

std::vector<const FieldInfo*> SymbolTable::fields_named(std::string_view name) const {
    std::vector<const FieldInfo*> out;
    for (const auto& [iri, c] : classes_)
        for (const auto& f : c.fields)
            if (f.name == name)
                out.push_back(&f);
    return out;
}

const MethodInfo* SymbolTable::find_method(std::string_view cls, std::string_view name, std::size_t arity) const {
    bool own = true;
    for (const auto& iri : chain(cls)) {
        for (const auto& m : find_class(iri)->methods)
            if (m.name == name && m.params.size() == arity &&
                (own || m.kind != lang::MethodKind::Constructor))
                return &m;
        own = false;
    }
    return nullptr;
}

bool SymbolTable::has_constructor(std::string_view cls) const {
    const ClassInfo* c = find_class(cls);
    return c && std::any_of(c->methods.begin(), c->methods.end(),
                            [](const MethodInfo& m) { return m.kind == lang::MethodKind::Constructor; });
}

std::string SymbolTable::resolve_type(const rdf::NamespaceMap& ns, std::string_view text, SourcePos pos) const {
    std::string iri;
    if (!text.empty() && text.front() == '<' && text.back() == '>') {
        iri = std::string(text.substr(1, text.size() - 2));
    } else if (auto colon = text.find(':'); colon != std::string_view::npos) {
        auto expanded = ns.expand(text);
        if (!expanded)
            throw CompileError(pos, "unknown prefix '" + std::string(text.substr(0, colon)) + "'");
        iri = *expanded;
    } else {
        if (text == "Thing")
            return vocab::owl("Thing");
        if (text == "Resource")
            return vocab::rdfs("Resource");
        if (vm::is_known_datatype(vocab::xsd(text)))
            return vocab::xsd(text);
        std::vector<std::string> hits;
        for (const auto& [key, c] : classes_)
            if (local_name(key) == text)
                hits.push_back(key);
        if (hits.size() == 1)
            return hits.front();
        if (hits.size() > 1)
            throw CompileError(pos, "ambiguous type '" + std::string(text) + "'");
        throw CompileError(pos, "unknown type '" + std::string(text) + "'");
    }
    if (is_builtin_top(iri) || find_class(iri) || vm::is_known_datatype(iri))
        return iri;
    if (iri.rfind(std::string(vocab::kXsd), 0) == 0)
        throw CompileError(pos, "unsupported datatype '" + std::string(text) + "'");
    throw CompileError(pos, "unknown type '" + std::string(text) + "'");
}

void SymbolTable::import(const rdf::Graph& g) {
    for (const auto& cls : api::declared_classes(g)) {
        ClassInfo c;
        c.iri = cls.value();
        c.imported = true;
        if (auto parent = api::named_superclass(g, cls))
            c.parent = parent->value();
        std::map<Term, FieldInfo> fields;
        for (const auto& r : api::restrictions(g, cls)) {
            if (r.property == nv::has_method())
                continue;
            auto& f = fields[r.property];
            f.name = local_name(r.property.value());
            f.property = r.property.value();
            f.owner = c.iri;
            using K = api::Restriction::Kind;
            if (r.kind == K::AllValuesFrom)
                f.range = r.value.value();
            else if (r.kind == K::MinCardinality)
                f.card.min = std::stoull(r.value.value());
            else if (r.kind == K::MaxCardinality)
                f.card.max = std::stoull(r.value.value());
        }
        for (auto& [p, f] : fields) {
            bool has_max = false;
            for (const auto& r : api::restrictions(g, cls))
                has_max |= r.property == p && r.kind == api::Restriction::Kind::MaxCardinality;
            if (!has_max)
                f.card.max.reset();
            c.fields.push_back(f);
        }
        for (const auto& mc : api::restricted(g, cls, nv::has_method())) {
            MethodInfo m;
            m.owner = c.iri;
            if (auto n = api::restricted_one(g, mc, nv::has_method_name()))
                m.name = n->value();
            m.kind = kind_of(m.name);
            if (auto r = api::restricted_one(g, mc, nv::has_return_descriptor()))
                m.return_type = r->value();
            if (auto ad = api::restricted_one(g, mc, nv::has_argument_descriptor())) {
                for (std::size_t i = 1;; ++i) {
                    auto arg = api::restricted_one(g, *ad, vocab::rdf_uri("_" + std::to_string(i)));
                    if (!arg)
                        break;
                    ParamInfo p;
                    if (auto n = api::restricted_one(g, *arg, nv::has_name()))
                        p.name = n->value();
                    if (auto t = api::restricted_one(g, *arg, nv::has_type()))
                        p.type = t->value();
                    m.params.push_back(p);
                }
            }
            c.methods.push_back(m);
        }
        add(std::move(c));
    }
}

rdf::NamespaceMap unit_namespaces(const lang::SourceUnit& unit) {
    auto ns = rdf::NamespaceMap::standard();
    for (const auto& [prefix, iri] : unit.prefixes)
        ns.bind(prefix, iri);
    return ns;
}

SourceFile load_source(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot read " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    SourceFile f;
    f.unit = lang::parse(buf.str());
    f.uri = "file://" + std::filesystem::absolute(path).lexically_normal().string();
    return f;
}

SymbolTable analyze(const std::vector<SourceFile>& files, const rdf::Graph* existing) {
    SymbolTable st;
    if (existing)
        st.import(*existing);

    for (std::size_t u = 0; u < files.size(); ++u) {
        auto ns = unit_namespaces(files[u].unit);
        for (const auto& decl : files[u].unit.classes) {
            if (decl.name.find(':') == std::string::npos)
                throw CompileError(decl.loc.pos, "class name '" + decl.name + "' must be a prefixed name");
            auto iri = ns.expand(decl.name);
            if (!iri)
                throw CompileError(decl.loc.pos,
                                   "unknown prefix '" + decl.name.substr(0, decl.name.find(':')) + "'");
            if (const ClassInfo* prior = st.find_class(*iri)) {
                if (prior->imported)
                    throw CompileError(decl.loc.pos, "class " + decl.name + " is already defined in the store");
                throw CompileError(decl.loc.pos, "duplicate class " + decl.name);
            }
            ClassInfo c;
            c.iri = *iri;
            c.decl = &decl;
            c.unit = u;
            st.add(std::move(c));
        }
    }

    for (std::size_t u = 0; u < files.size(); ++u) {
        auto ns = unit_namespaces(files[u].unit);
        for (const auto& decl : files[u].unit.classes) {
            ClassInfo* c = st.find_class_mut(*ns.expand(decl.name));
            c->parent = st.resolve_type(ns, decl.superclass, decl.loc.pos);
            if (!is_builtin_top(c->parent)) {
                const ClassInfo* p = st.find_class(c->parent);
                if (!p || p->builtin)
                    throw CompileError(decl.loc.pos, "superclass " + decl.superclass + " is not a class");
            }
            std::set<std::string> names;
            for (const auto& f : decl.fields) {
                if (!names.insert(f.name).second)
                    throw CompileError(f.loc.pos, "duplicate field '" + f.name + "'");
                if (f.card.max && *f.card.max < f.card.min)
                    throw CompileError(f.loc.pos, "malformed cardinality on field '" + f.name + "'");
                c->fields.push_back(
                    {f.name, field_property(c->iri, f.name), st.resolve_type(ns, f.range, f.loc.pos), c->iri, f.card});
            }
            std::set<std::pair<std::string, std::size_t>> sigs;
            for (const auto& md : decl.methods) {
                MethodInfo m;
                m.name = method_name(md);
                m.kind = md.kind;
                m.owner = c->iri;
                m.decl = &md;
                if (md.kind != lang::MethodKind::Ordinary && md.name != local_name(c->iri))
                    throw CompileError(md.loc.pos, (md.kind == lang::MethodKind::Constructor ? "constructor " : "destructor ") +
                                                       md.name + " does not match class " + decl.name);
                if (md.return_type)
                    m.return_type = st.resolve_type(ns, *md.return_type, md.loc.pos);
                std::set<std::string> pnames;
                for (const auto& p : md.params) {
                    if (p.name == "this" || !pnames.insert(p.name).second)
                        throw CompileError(md.loc.pos, "duplicate parameter '" + p.name + "'");
                    m.params.push_back({st.resolve_type(ns, p.type, md.loc.pos), p.name});
                }
                if (!sigs.insert({m.name, m.params.size()}).second)
                    throw CompileError(md.loc.pos, "duplicate method " + md.name + " with " +
                                                       std::to_string(m.params.size()) + " parameters");
                c->methods.push_back(std::move(m));
            }
        }
    }

    for (const auto& [iri, c] : st.classes()) {
        if (c.imported || c.builtin)
            continue;
        std::set<std::string> seen;
        const ClassInfo* p = &c;
        while (p && !is_builtin_top(p->iri)) {
            if (!seen.insert(p->iri).second)
                throw CompileError(c.decl->loc.pos, "inheritance cycle through " + iri);
            p = st.find_class(p->parent);
        }
        for (const auto& f : c.fields) {
            const ClassInfo* up = st.find_class(c.parent);
            if (up && st.find_field(up->iri, f.name))
                throw CompileError(c.decl->loc.pos, "field '" + f.name + "' is already declared by a superclass");
        }
    }

    // Bodies are checked by generating code into a scratch graph.
    rdf::SeededUuidGenerator scratch(0);
    compile(files, st, scratch);
    return st;
}

rdf::Graph compile(const std::vector<SourceFile>& files, rdf::UuidGenerator& gen, const rdf::Graph* existing) {
    SymbolTable st = analyze(files, existing);
    return compile(files, st, gen);
}

} // namespace neno::compiler
