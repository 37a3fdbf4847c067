#include <algorithm>
#include <functional>
#include <numeric>

#include "neno/sparql/sparql.hpp"

namespace neno::sparql {

namespace {

const Variable* as_var(const PatternTerm& t) { return std::get_if<Variable>(&t); }

rdf::TermPattern to_match(const PatternTerm& t) {
    if (auto* term = std::get_if<rdf::Term>(&t))
        return *term;
    return rdf::any;
}

// Binds `t`'s variable to `value`; false when it conflicts with an earlier
// binding of the same variable (e.g. `?x <p> ?x`).
bool bind_term(Binding& b, const PatternTerm& t, const rdf::Term& value) {
    auto* v = as_var(t);
    if (!v)
        return true;
    auto [it, inserted] = b.emplace(v->name, value);
    return inserted || it->second == value;
}

} // namespace

TriplePattern substitute(const TriplePattern& p, const Binding& b) {
    auto sub = [&](const PatternTerm& t) -> PatternTerm {
        if (auto* v = as_var(t)) {
            auto it = b.find(v->name);
            if (it != b.end())
                return it->second;
        }
        return t;
    };
    return TriplePattern{sub(p.subject), sub(p.predicate), sub(p.object)};
}

std::optional<rdf::Triple> ground(const TriplePattern& p) {
    auto* s = std::get_if<rdf::Term>(&p.subject);
    auto* pr = std::get_if<rdf::Term>(&p.predicate);
    auto* o = std::get_if<rdf::Term>(&p.object);
    if (!s || !pr || !o)
        return std::nullopt;
    return rdf::Triple{*s, *pr, *o};
}

std::set<std::string> variables_of(const std::vector<TriplePattern>& patterns) {
    std::set<std::string> out;
    for (const auto& p : patterns)
        for (const auto* t : {&p.subject, &p.predicate, &p.object})
            if (auto* v = as_var(*t))
                out.insert(v->name);
    return out;
}

BindingSet solve(const rdf::Graph& g, const std::vector<TriplePattern>& patterns, const Binding& initial) {
    std::vector<Binding> partial{initial};
    for (const auto& pattern : patterns) {
        std::vector<Binding> next;
        for (const auto& b : partial) {
            auto p = substitute(pattern, b);
            for (const auto& t : g.match(to_match(p.subject), to_match(p.predicate), to_match(p.object))) {
                Binding extended = b;
                if (bind_term(extended, p.subject, t.subject) && bind_term(extended, p.predicate, t.predicate) &&
                    bind_term(extended, p.object, t.object))
                    next.push_back(std::move(extended));
            }
        }
        partial = std::move(next);
        if (partial.empty())
            break;
    }
    std::sort(partial.begin(), partial.end());
    partial.erase(std::unique(partial.begin(), partial.end()), partial.end());
    return partial;
}

BindingSet eval_select(const rdf::Graph& g, const Query& q, const Binding& initial) {
    auto rows = solve(g, q.where, initial);
    if (!q.projected.empty()) {
        for (auto& row : rows) {
            Binding projected;
            for (const auto& name : q.projected) {
                auto it = row.find(name);
                if (it != row.end())
                    projected.emplace(name, it->second);
            }
            row = std::move(projected);
        }
        std::sort(rows.begin(), rows.end());
        rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    }
    if (q.limit && rows.size() > *q.limit)
        rows.resize(*q.limit);
    return rows;
}

bool eval_ask(const rdf::Graph& g, const Query& q, const Binding& initial) {
    return !solve(g, q.where, initial).empty();
}

std::vector<std::vector<TriplePattern>> connected_components(const std::vector<TriplePattern>& patterns,
                                                             const Binding& bound) {
    std::vector<std::size_t> parent(patterns.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
        return parent[i] == i ? i : parent[i] = find(parent[i]);
    };
    std::map<std::string, std::size_t> owner;
    for (std::size_t i = 0; i < patterns.size(); ++i) {
        for (const auto& name : variables_of({patterns[i]})) {
            if (bound.contains(name))
                continue;
            auto [it, inserted] = owner.emplace(name, i);
            if (!inserted)
                parent[find(i)] = find(it->second);
        }
    }
    std::map<std::size_t, std::vector<TriplePattern>> groups;
    for (std::size_t i = 0; i < patterns.size(); ++i)
        groups[find(i)].push_back(patterns[i]);
    std::vector<std::vector<TriplePattern>> out;
    for (auto& [root, group] : groups)
        out.push_back(std::move(group));
    return out;
}

std::size_t exec_update(rdf::Graph& g, const UpdateCommand& u, const Binding& initial) {
    std::size_t affected = 0;
    if (u.kind == UpdateKind::Insert) {
        std::vector<rdf::Triple> triples;
        for (const auto& p : u.patterns) {
            auto t = ground(substitute(p, initial));
            if (!t)
                throw SparqlError("unbound insert variable");
            triples.push_back(std::move(*t));
        }
        for (const auto& t : triples)
            affected += g.insert(t) ? 1 : 0;
        return affected;
    }

    // Delete: join each independent group of patterns, then remove every
    // instantiated triple. Collected first so removals cannot affect the join.
    std::set<rdf::Triple> doomed;
    for (const auto& group : connected_components(u.patterns, initial)) {
        for (const auto& solution : solve(g, group, initial))
            for (const auto& p : group)
                if (auto t = ground(substitute(p, solution)))
                    doomed.insert(*t);
    }
    for (const auto& t : doomed)
        affected += g.remove(t) ? 1 : 0;
    return affected;
}

std::string bindings_to_tsv(const BindingSet& rows, const std::vector<std::string>& columns) {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        out += (i ? "\t?" : "?") + columns[i];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (i)
                out += '\t';
            auto it = row.find(columns[i]);
            if (it != row.end())
                out += it->second.to_ntriples();
        }
        out += '\n';
    }
    return out;
}

} // namespace neno::sparql
