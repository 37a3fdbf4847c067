#include "neno/vm/iso.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "neno/compiler/api.hpp"
#include "neno/rdf/uuid.hpp"
#include "neno/rdf/vocab.hpp"

namespace neno::vm {

using rdf::Term;
using rdf::Triple;

rdf::Graph object_graph(const rdf::Graph& g) {
    rdf::Graph out;
    std::set<Term> classes;
    for (const auto& c : api::declared_classes(g))
        classes.insert(c);
    for (const auto& t : g.match(rdf::any, vocab::type(), rdf::any))
        if (classes.count(t.object))
            out.insert(t);
    for (const auto& p : api::declared_properties(g))
        for (const auto& t : g.match(rdf::any, p, rdf::any))
            out.insert(t);
    return out;
}

namespace {

bool renamable(const Term& t) { return rdf::is_minted(t); }

struct Edge {
    bool out;
    std::string pred;
    int node;          // -1 when the other end is a fixed term
    std::string fixed;
};

struct Side {
    std::vector<Term> nodes;
    std::map<Term, int> index;
    std::vector<std::vector<Edge>> adj;
    std::set<Triple> triples;

    explicit Side(const rdf::Graph& g) {
        for (const auto& t : g.triples()) {
            triples.insert(t);
            for (const Term* x : {&t.subject, &t.object})
                if (renamable(*x) && !index.count(*x)) {
                    index.emplace(*x, static_cast<int>(nodes.size()));
                    nodes.push_back(*x);
                }
        }
        adj.resize(nodes.size());
        for (const auto& t : triples) {
            auto s = index.find(t.subject);
            auto o = index.find(t.object);
            int si = s == index.end() ? -1 : s->second;
            int oi = o == index.end() ? -1 : o->second;
            if (si >= 0)
                adj[si].push_back({true, t.predicate.value(), oi, oi < 0 ? t.object.to_ntriples() : ""});
            if (oi >= 0)
                adj[oi].push_back({false, t.predicate.value(), si, si < 0 ? t.subject.to_ntriples() : ""});
        }
    }
};

using Colours = std::vector<int>;

class Matcher {
public:
    Matcher(const Side& a, const Side& b) : a_(a), b_(b) {}

    std::optional<std::map<Term, Term>> run() {
        Colours ca(a_.nodes.size(), 0), cb(b_.nodes.size(), 0);
        return search(ca, cb);
    }

    std::string why;

private:
    std::string signature(const Side& s, const Colours& c, int n) const {
        std::vector<std::string> parts;
        for (const auto& e : s.adj[n])
            parts.push_back((e.out ? ">" : "<") + e.pred + " " + (e.node < 0 ? e.fixed : "#" + std::to_string(c[e.node])));
        std::sort(parts.begin(), parts.end());
        std::string sig = std::to_string(c[n]);
        for (const auto& p : parts)
            sig += "|" + p;
        return sig;
    }

    // Refines both colourings together; false when their histograms diverge.
    bool refine(Colours& ca, Colours& cb) {
        std::size_t classes = 0;
        while (true) {
            std::map<std::string, int> ids;
            auto recolour = [&](const Side& s, const Colours& c) {
                std::vector<std::string> sigs(c.size());
                for (std::size_t i = 0; i < c.size(); ++i)
                    sigs[i] = signature(s, c, static_cast<int>(i));
                return sigs;
            };
            auto sa = recolour(a_, ca);
            auto sb = recolour(b_, cb);
            std::set<std::string> all(sa.begin(), sa.end());
            all.insert(sb.begin(), sb.end());
            for (const auto& s : all)
                ids.emplace(s, static_cast<int>(ids.size()));
            std::map<int, int> ha, hb;
            for (std::size_t i = 0; i < ca.size(); ++i)
                ++ha[ca[i] = ids[sa[i]]];
            for (std::size_t i = 0; i < cb.size(); ++i)
                ++hb[cb[i] = ids[sb[i]]];
            if (ha != hb) {
                for (const auto& [colour, n] : ha)
                    if (hb[colour] != n) {
                        auto it = std::find(sa.begin(), sa.end(),
                                            std::find_if(ids.begin(), ids.end(), [&](const auto& kv) {
                                                return kv.second == colour;
                                            })->first);
                        if (it != sa.end() && why.empty())
                            why = "no counterpart for " + a_.nodes[it - sa.begin()].to_ntriples() + " (" +
                                  std::to_string(n) + " vs " + std::to_string(hb[colour]) + " nodes like it)";
                        break;
                    }
                if (why.empty())
                    why = "node neighbourhoods differ";
                return false;
            }
            if (ids.size() == classes)
                return true;
            classes = ids.size();
        }
    }

    std::optional<std::map<Term, Term>> search(Colours ca, Colours cb) {
        if (!refine(ca, cb))
            return std::nullopt;
        std::map<int, std::vector<int>> ka, kb;
        for (std::size_t i = 0; i < ca.size(); ++i)
            ka[ca[i]].push_back(static_cast<int>(i));
        for (std::size_t i = 0; i < cb.size(); ++i)
            kb[cb[i]].push_back(static_cast<int>(i));
        int pick = -1;
        std::size_t best = 0;
        for (const auto& [colour, members] : ka)
            if (members.size() > 1 && (pick < 0 || members.size() < best)) {
                pick = colour;
                best = members.size();
            }
        if (pick < 0) {
            std::map<Term, Term> m;
            for (const auto& [colour, members] : ka)
                m.emplace(a_.nodes[members[0]], b_.nodes[kb[colour][0]]);
            if (verify(m))
                return m;
            if (why.empty())
                why = "colour refinement matched nodes but the triples differ";
            return std::nullopt;
        }
        int fresh = static_cast<int>(ca.size() + cb.size()) + 1000000;
        int x = ka[pick][0];
        for (int y : kb[pick]) {
            Colours na = ca, nb = cb;
            na[x] = fresh;
            nb[y] = fresh;
            if (auto m = search(na, nb))
                return m;
        }
        return std::nullopt;
    }

    bool verify(const std::map<Term, Term>& m) const {
        auto map = [&](const Term& t) {
            auto it = m.find(t);
            return it == m.end() ? t : it->second;
        };
        for (const auto& t : a_.triples)
            if (!b_.triples.count({map(t.subject), t.predicate, map(t.object)}))
                return false;
        return true;
    }

    const Side& a_;
    const Side& b_;
};

} // namespace

IsoResult isomorphic(const rdf::Graph& a, const rdf::Graph& b) {
    Side sa(a), sb(b);
    if (sa.triples.size() != sb.triples.size())
        return {false, "triple counts differ: " + std::to_string(sa.triples.size()) + " vs " +
                           std::to_string(sb.triples.size())};
    if (sa.nodes.size() != sb.nodes.size())
        return {false, "node counts differ: " + std::to_string(sa.nodes.size()) + " vs " +
                           std::to_string(sb.nodes.size())};
    auto fixed = [](const Triple& t) { return !renamable(t.subject) && !renamable(t.object); };
    for (const auto& t : sa.triples)
        if (fixed(t) && !sb.triples.count(t))
            return {false, "missing on the right: " + t.to_ntriples()};
    for (const auto& t : sb.triples)
        if (fixed(t) && !sa.triples.count(t))
            return {false, "missing on the left: " + t.to_ntriples()};
    Matcher m(sa, sb);
    if (m.run())
        return {true, ""};
    return {false, m.why.empty() ? "no bijection found" : m.why};
}

IsoResult object_graph_iso(const rdf::Graph& a, const rdf::Graph& b) {
    return isomorphic(object_graph(a), object_graph(b));
}

} // namespace neno::vm
