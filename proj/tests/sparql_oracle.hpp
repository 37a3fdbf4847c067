#pragma once

// Brute-force reference semantics for the query subset: try every assignment
// of graph terms to the query variables and keep those that make each pattern
// a triple of the graph.

#include <random>
#include <set>
#include <string>
#include <vector>

#include "neno/sparql/sparql.hpp"
#include "test_util.hpp"

namespace testutil {

inline neno::sparql::BindingSet brute_force_solutions(const neno::rdf::Graph& g,
                                                       const std::vector<neno::sparql::TriplePattern>& ps) {
    using namespace neno;
    auto vars = sparql::variables_of(ps);
    std::vector<std::string> names(vars.begin(), vars.end());
    auto domain = graph_terms(g);
    std::set<sparql::Binding> out;
    if (!names.empty() && domain.empty())
        return {};
    std::vector<std::size_t> idx(names.size(), 0);
    while (true) {
        sparql::Binding b;
        for (std::size_t i = 0; i < names.size(); ++i)
            b[names[i]] = domain[idx[i]];
        bool all = true;
        for (const auto& p : ps) {
            auto t = sparql::ground(sparql::substitute(p, b));
            if (!t || !g.contains(*t)) {
                all = false;
                break;
            }
        }
        if (all)
            out.insert(b);
        std::size_t k = 0;
        while (k < idx.size() && ++idx[k] == domain.size())
            idx[k++] = 0;
        if (k == idx.size())
            break;
    }
    return {out.begin(), out.end()};
}

// Scan-based DELETE: every pattern instance under any solution of its own
// connected group is removed.
inline neno::rdf::Graph brute_force_delete(const neno::rdf::Graph& g,
                                           const std::vector<neno::sparql::TriplePattern>& ps) {
    using namespace neno;
    rdf::Graph out = g;
    for (const auto& group : sparql::connected_components(ps)) {
        for (const auto& b : brute_force_solutions(g, group))
            for (const auto& p : group)
                out.remove(*sparql::ground(sparql::substitute(p, b)));
    }
    return out;
}

// Random patterns over the graph's terms and up to three variables.
inline std::vector<neno::sparql::TriplePattern> random_patterns(std::mt19937& rng, const neno::rdf::Graph& g,
                                                                 std::size_t max_patterns) {
    using namespace neno;
    auto terms = graph_terms(g);
    terms.push_back(rdf::Term::uri("urn:test:missing"));
    static const char* names[] = {"a", "b", "c"};
    auto pick = [&](bool allow_literal) -> sparql::PatternTerm {
        if (rng() % 2)
            return sparql::Variable{names[rng() % 3]};
        for (int tries = 0; tries < 20; ++tries) {
            const auto& t = terms[rng() % terms.size()];
            if (allow_literal || t.is_uri())
                return t;
        }
        return sparql::Variable{names[rng() % 3]};
    };
    std::vector<sparql::TriplePattern> ps;
    std::size_t n = 1 + rng() % max_patterns;
    for (std::size_t i = 0; i < n; ++i)
        ps.push_back({pick(false), pick(false), pick(true)});
    return ps;
}

} // namespace testutil
