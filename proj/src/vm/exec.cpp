#include "neno/vm/exec.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "neno/compiler/api.hpp"
#include "neno/rdf/vocab.hpp"
#include "neno/sparql/sparql.hpp"
#include "neno/vm/values.hpp"

namespace neno::vm {

namespace {

using nv::Opcode;
using rdf::Term;

const std::vector<sparql::Request>& parsed(const std::string& command) {
    thread_local std::unordered_map<std::string, std::vector<sparql::Request>> cache;
    auto it = cache.find(command);
    if (it == cache.end()) {
        try {
            it = cache.emplace(command, sparql::parse_requests(command)).first;
        } catch (const Error& e) {
            throw Fault(std::string("malformed command template: ") + e.what());
        }
    }
    return it->second;
}

std::vector<sparql::TriplePattern> patterns_of(const sparql::Request& r) {
    if (auto q = std::get_if<sparql::Query>(&r))
        return q->where;
    return std::get<sparql::UpdateCommand>(r).patterns;
}

// Calls fn(binding) for every combination of the slots mentioned by `r`.
template <typename Fn>
void for_each_binding(const sparql::Request& r, const Slots& slots, Fn&& fn) {
    std::vector<std::pair<std::string, const std::vector<Term>*>> used;
    for (const auto& v : sparql::variables_of(patterns_of(r)))
        if (auto it = slots.find(v); it != slots.end())
            used.push_back({v, &it->second});
    for (const auto& u : used)
        if (u.second->empty())
            return;
    std::vector<std::size_t> at(used.size(), 0);
    while (true) {
        sparql::Binding b;
        for (std::size_t i = 0; i < used.size(); ++i)
            b[used[i].first] = (*used[i].second)[at[i]];
        if (fn(b))
            return;
        std::size_t i = 0;
        for (; i < used.size(); ++i) {
            if (++at[i] < used[i].second->size())
                break;
            at[i] = 0;
        }
        if (i == used.size())
            return;
    }
}

sparql::Request substituted(const sparql::Request& r, const sparql::Binding& b) {
    if (auto q = std::get_if<sparql::Query>(&r)) {
        sparql::Query out = *q;
        for (auto& p : out.where)
            p = sparql::substitute(p, b);
        return out;
    }
    sparql::UpdateCommand out = std::get<sparql::UpdateCommand>(r);
    for (auto& p : out.patterns)
        p = sparql::substitute(p, b);
    return out;
}

std::vector<Term> sorted_unique(std::vector<Term> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

std::vector<Term> select_values(const Value& v, const std::vector<Term>& subjects, Env& env) {
    const auto& reqs = parsed(v.command);
    if (reqs.size() != 1 || !std::holds_alternative<sparql::Query>(reqs[0]))
        throw Fault("read template is not a query");
    const auto& q = std::get<sparql::Query>(reqs[0]);
    std::vector<Term> out;
    for (const auto& s : subjects) {
        if (!s.is_uri())
            throw Fault("field access on literal " + s.to_ntriples());
        sparql::Binding b{{"_s", s}};
        env.command(sparql::render(substituted(q, b)));
        for (const auto& row : sparql::eval_select(env.graph(), q, b))
            if (auto it = row.find(q.projected.at(0)); it != row.end())
                out.push_back(it->second);
    }
    return sorted_unique(std::move(out));
}

std::vector<Term> apply_selectors(const Value& v, std::vector<Term> values, std::optional<long long> index) {
    if (index) {
        values = sorted_unique(std::move(values));
        if (*index >= static_cast<long long>(values.size()))
            throw Fault("index " + std::to_string(*index) + " out of range for " + std::to_string(values.size()) +
                        " values");
        return {values[static_cast<std::size_t>(*index)]};
    }
    if (v.count)
        return {vocab::integer(static_cast<long long>(sorted_unique(std::move(values)).size()))};
    return values;
}

std::optional<long long> read_index(const Value& v, Env& env) {
    if (!v.index)
        return std::nullopt;
    try {
        return to_index(read_one(*v.index, env));
    } catch (const ValueError& e) {
        throw Fault(e.what());
    }
}

std::shared_ptr<const Value> decode_value(const CodeView& code, const Term& node, int depth) {
    if (depth > 64)
        throw Fault("value nesting too deep at " + node.value());
    auto v = std::make_shared<Value>();
    v->node = node;
    v->kind = code.opcode(node);
    if (!nv::is_value(v->kind))
        throw Fault("not a value: " + node.value());
    auto str = [&](const Term& p) {
        auto t = code.get(node, p);
        return t ? t->value() : std::string();
    };
    auto flag = [&](const Term& p) {
        auto t = code.get(node, p);
        return t && truth(*t);
    };
    switch (v->kind) {
    case Opcode::LocalDirect: {
        auto d = code.get(node, nv::has_uri());
        if (!d)
            throw Fault("LocalDirect without hasURI: " + node.value());
        v->direct = *d;
        break;
    }
    case Opcode::LocalVariable:
        v->name = str(nv::has_name());
        v->declares = flag(nv::declares());
        break;
    case Opcode::FieldVariable:
    case Opcode::ObjectVariable: {
        auto obj = code.get(node, nv::has_object());
        if (!obj)
            throw Fault("variable without hasObject: " + node.value());
        v->object = decode_value(code, *obj, depth + 1);
        if (auto p = code.get(node, nv::has_property()))
            v->property = *p;
        v->command = str(nv::has_command());
        break;
    }
    default:
        break;
    }
    if (auto idx = code.get(node, nv::has_index()))
        v->index = decode_value(code, *idx, depth + 1);
    v->count = flag(nv::has_count());
    return v;
}

} // namespace

bool truth(const Term& t) { return t.is_literal() && (t.value() == "true" || t.value() == "1"); }

Opcode InstanceView::opcode(const Term& node) const {
    for (const auto& cls : g_.objects(node, vocab::type())) {
        if (auto s = api::named_superclass(g_, cls)) {
            Opcode op = nv::opcode_of(*s);
            if (op != Opcode::None)
                return op;
        }
    }
    return Opcode::None;
}

std::optional<Term> InstanceView::get(const Term& node, const Term& prop) const { return g_.object(node, prop); }

Opcode ClassView::opcode(const Term& node) const {
    if (auto s = api::named_superclass(g_, node))
        return nv::opcode_of(*s);
    return Opcode::None;
}

std::optional<Term> ClassView::get(const Term& node, const Term& prop) const {
    return api::restricted_one(g_, node, prop);
}

Instruction decode(const CodeView& code, const Term& node) {
    Instruction in;
    in.node = node;
    in.op = code.opcode(node);
    if (!nv::is_instruction(in.op))
        throw Fault("not an instruction: " + node.value());
    in.next = code.get(node, nv::next_inst());
    in.on_true = code.get(node, nv::true_inst());
    in.on_false = code.get(node, nv::false_inst());
    in.first = code.get(node, nv::first_inst());
    auto value = [&](const Term& p) -> std::shared_ptr<const Value> {
        auto t = code.get(node, p);
        return t ? decode_value(code, *t, 0) : nullptr;
    };
    in.left = value(nv::has_left());
    in.right = value(nv::has_right());
    in.value = value(nv::has_value());
    if (auto c = code.get(node, nv::has_command()))
        in.command = c->value();
    if (auto m = code.get(node, nv::has_method_name()))
        in.method_name = m->value();
    if (auto n = code.get(node, nv::has_arg_count())) {
        try {
            in.argc = static_cast<std::size_t>(to_index(*n));
        } catch (const ValueError& e) {
            throw Fault(e.what());
        }
    }
    if (auto d = code.get(node, nv::discards_result()))
        in.discards = truth(*d);
    if (auto c = code.get(node, nv::has_class()))
        in.cls = *c;

    using O = Opcode;
    auto need = [&](bool ok, const char* what) {
        if (!ok)
            throw Fault(std::string(nv::opcode_name(in.op)) + " without " + what + ": " + node.value());
    };
    if (nv::is_condition(in.op)) {
        need(in.on_true && in.on_false, "both branches");
        need(in.left && in.right, "operands");
    } else if (nv::is_arithmetic(in.op)) {
        need(in.left && (in.op == O::Not || in.right), "operands");
    } else if (nv::is_setter(in.op)) {
        need(in.left != nullptr, "target");
    } else if (in.op == O::PushValue) {
        need(in.value != nullptr, "value");
    } else if (in.op == O::InvokeMethod || in.op == O::Destruct || in.op == O::TypeOf || in.op == O::TypeOfQuery) {
        need(in.left != nullptr, "operand");
    }
    if (in.op == O::Construct || in.op == O::TypeOf)
        need(!in.cls.empty(), "class");
    return in;
}

std::vector<Term> read(const Value& v, Env& env) {
    switch (v.kind) {
    case Opcode::LocalDirect: return {v.direct};
    case Opcode::PopDirect: return {env.pop()};
    case Opcode::LocalVariable: {
        auto index = read_index(v, env);
        return apply_selectors(v, env.local(v.name), index);
    }
    case Opcode::FieldVariable:
    case Opcode::ObjectVariable: {
        auto index = read_index(v, env);
        auto subjects = read(*v.object, env);
        return apply_selectors(v, select_values(v, subjects, env), index);
    }
    default: throw Fault("cannot read " + v.node.value());
    }
}

Term read_one(const Value& v, Env& env) {
    auto vals = read(v, env);
    if (vals.size() != 1)
        throw Fault("expected a single value from " + (v.name.empty() ? v.node.value() : "'" + v.name + "'") +
                    ", found " + std::to_string(vals.size()));
    return vals.front();
}

TargetSlots read_target(const Value& target, Env& env) {
    TargetSlots out;
    auto index = read_index(target, env);
    out.subjects = read(*target.object, env);
    for (const auto& s : out.subjects)
        if (!s.is_uri())
            throw Fault("field assignment on literal " + s.to_ntriples());
    if (index) {
        auto current = select_values(target, out.subjects, env);
        out.old = apply_selectors(target, current, index).front();
    }
    return out;
}

void run_update_template(rdf::Graph& g, const std::string& command, const Slots& slots, Env& env) {
    for (const auto& req : parsed(command)) {
        const auto* u = std::get_if<sparql::UpdateCommand>(&req);
        if (!u)
            throw Fault("setter template is not an update");
        for_each_binding(req, slots, [&](const sparql::Binding& b) {
            env.command(sparql::render(substituted(req, b)));
            try {
                sparql::exec_update(g, *u, b);
            } catch (const sparql::SparqlError& e) {
                throw Fault(e.what());
            }
            return false;
        });
    }
}

bool run_ask_template(const rdf::Graph& g, const std::string& command, const Slots& slots, Env& env) {
    const auto& reqs = parsed(command);
    if (reqs.size() != 1 || !std::holds_alternative<sparql::Query>(reqs[0]))
        throw Fault("=? template is not a query");
    const auto& q = std::get<sparql::Query>(reqs[0]);
    bool found = false;
    for_each_binding(reqs[0], slots, [&](const sparql::Binding& b) {
        env.command(sparql::render(substituted(q, b)));
        found = sparql::eval_ask(g, q, b);
        return found;
    });
    return found;
}

rdf::NamespaceMap program_namespaces(const rdf::Graph& g) {
    auto ns = rdf::NamespaceMap::standard();
    for (const auto& t : g.match(rdf::any, nv::prefix(), rdf::any))
        if (t.subject.is_uri() && t.object.is_literal())
            ns.bind(t.object.value(), t.subject.value());
    return ns;
}

std::vector<Term> run_net_query(const rdf::Graph& g, const std::string& text, Env& env) {
    sparql::Query q;
    try {
        q = sparql::parse_query(text, program_namespaces(g));
    } catch (const Error& e) {
        throw Fault(std::string("bad network query: ") + e.what());
    }
    if (q.form != sparql::QueryForm::Select)
        throw Fault("network query must be a SELECT");
    env.command(sparql::render(q));
    std::string column = q.projected.empty() ? "" : q.projected.front();
    if (column.empty()) {
        auto vars = sparql::variables_of(q.where);
        if (vars.empty())
            return {};
        column = *vars.begin();
    }
    std::vector<Term> out;
    for (const auto& row : sparql::eval_select(g, q))
        if (auto it = row.find(column); it != row.end())
            out.push_back(it->second);
    return out;
}

std::optional<Term> declared_type(const rdf::Graph& g, const Term& object) {
    for (const auto& t : g.objects(object, vocab::type()))
        if (api::is_declared_class(g, t))
            return t;
    return std::nullopt;
}

void check_max(const rdf::Graph& g, const Term& subject, const Term& property) {
    if (!subject.is_uri())
        return;
    auto type = declared_type(g, subject);
    if (!type)
        return;
    for (const auto& f : api::fields_of(g, *type)) {
        if (f.property != property || !f.max)
            continue;
        auto n = g.count(subject, property, rdf::any);
        if (n > *f.max)
            throw Fault("cardinality violation: " + subject.value() + " has " + std::to_string(n) + " values of " +
                        property.value() + ", at most " + std::to_string(*f.max) + " allowed");
    }
}

void check_min(const rdf::Graph& g, const Term& object) {
    auto type = declared_type(g, object);
    if (!type)
        return;
    for (const auto& f : api::fields_of(g, *type)) {
        auto n = g.count(object, f.property, rdf::any);
        if (n < f.min)
            throw Fault("cardinality violation: " + object.value() + " has " + std::to_string(n) + " values of " +
                        f.property.value() + ", at least " + std::to_string(f.min) + " required");
    }
}

bool has_type(const rdf::Graph& g, const Term& v, const Term& cls) {
    if (cls == vocab::rdfs_uri("Resource"))
        return true;
    if (v.is_literal())
        return v.datatype() == cls.value() || cls == vocab::rdfs_uri("Literal");
    for (const auto& t : g.objects(v, vocab::type()))
        if (api::is_subclass_of(g, t, cls))
            return true;
    return false;
}

Term type_query(const rdf::Graph& g, const Term& v) {
    if (v.is_literal())
        return Term::uri(v.datatype());
    if (auto t = declared_type(g, v))
        return *t;
    auto types = g.objects(v, vocab::type());
    if (types.empty())
        throw Fault("typeof? on untyped resource " + v.value());
    return types.front();
}

void destroy_object(rdf::Graph& g, const Term& o) {
    g.remove_matching(o, rdf::any, rdf::any);
    g.remove_matching(rdf::any, rdf::any, o);
}

} // namespace neno::vm
