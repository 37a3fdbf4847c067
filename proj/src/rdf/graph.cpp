#include "neno/rdf/graph.hpp"

#include <algorithm>
#include <limits>

namespace neno::rdf {

namespace {

constexpr std::uint32_t kMaxId = std::numeric_limits<std::uint32_t>::max();

} // namespace

std::optional<Graph::Id> Graph::find_id(const Term& t) const {
    auto it = ids_.find(t);
    if (it == ids_.end())
        return std::nullopt;
    return it->second;
}

Graph::Id Graph::intern(const Term& t) {
    auto [it, inserted] = ids_.try_emplace(t, static_cast<Id>(terms_.size()));
    if (inserted)
        terms_.push_back(t);
    return it->second;
}

bool Graph::insert_key(const Key& k) {
    if (!spo_.insert(k).second)
        return false;
    pos_.insert({k[1], k[2], k[0]});
    osp_.insert({k[2], k[0], k[1]});
    if (journaling_)
        journal_.emplace_back(true, k);
    return true;
}

bool Graph::remove_key(const Key& k) {
    if (spo_.erase(k) == 0)
        return false;
    pos_.erase({k[1], k[2], k[0]});
    osp_.erase({k[2], k[0], k[1]});
    if (journaling_)
        journal_.emplace_back(false, k);
    return true;
}

bool Graph::insert(const Triple& t) {
    return insert_key({intern(t.subject), intern(t.predicate), intern(t.object)});
}

bool Graph::remove(const Triple& t) {
    auto s = find_id(t.subject), p = find_id(t.predicate), o = find_id(t.object);
    if (!s || !p || !o)
        return false;
    return remove_key({*s, *p, *o});
}

bool Graph::contains(const Triple& t) const {
    auto s = find_id(t.subject), p = find_id(t.predicate), o = find_id(t.object);
    return s && p && o && spo_.contains({*s, *p, *o});
}

Triple Graph::materialize(const Key& k) const {
    return Triple{terms_[k[0]], terms_[k[1]], terms_[k[2]]};
}

// Calls fn(spo key) for every triple matching the pattern, using the index
// whose key prefix covers the most bound positions.
template <typename Fn>
void Graph::scan(const TermPattern& s, const TermPattern& p, const TermPattern& o, Fn&& fn) const {
    std::optional<Id> sid, pid, oid;
    if (s && !(sid = find_id(*s)))
        return;
    if (p && !(pid = find_id(*p)))
        return;
    if (o && !(oid = find_id(*o)))
        return;

    auto range = [&](const std::set<Key>& index, Key lo, int bound, auto&& to_spo) {
        Key hi = lo;
        for (int i = bound; i < 3; ++i) {
            lo[i] = 0;
            hi[i] = kMaxId;
        }
        for (auto it = index.lower_bound(lo); it != index.end() && *it <= hi; ++it)
            fn(to_spo(*it));
    };
    auto from_spo = [](const Key& k) { return k; };
    auto from_pos = [](const Key& k) { return Key{k[2], k[0], k[1]}; };
    auto from_osp = [](const Key& k) { return Key{k[1], k[2], k[0]}; };

    if (sid && pid && oid) {
        Key k{*sid, *pid, *oid};
        if (spo_.contains(k))
            fn(k);
    } else if (sid && pid) {
        range(spo_, {*sid, *pid, 0}, 2, from_spo);
    } else if (sid && oid) {
        range(osp_, {*oid, *sid, 0}, 2, from_osp);
    } else if (sid) {
        range(spo_, {*sid, 0, 0}, 1, from_spo);
    } else if (pid && oid) {
        range(pos_, {*pid, *oid, 0}, 2, from_pos);
    } else if (pid) {
        range(pos_, {*pid, 0, 0}, 1, from_pos);
    } else if (oid) {
        range(osp_, {*oid, 0, 0}, 1, from_osp);
    } else {
        for (const auto& k : spo_)
            fn(k);
    }
}

std::vector<Triple> Graph::match(const TermPattern& s, const TermPattern& p, const TermPattern& o) const {
    std::vector<Triple> out;
    scan(s, p, o, [&](const Key& k) { out.push_back(materialize(k)); });
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t Graph::count(const TermPattern& s, const TermPattern& p, const TermPattern& o) const {
    std::size_t n = 0;
    scan(s, p, o, [&](const Key&) { ++n; });
    return n;
}

std::size_t Graph::remove_matching(const TermPattern& s, const TermPattern& p, const TermPattern& o) {
    std::vector<Key> doomed;
    scan(s, p, o, [&](const Key& k) { doomed.push_back(k); });
    for (const auto& k : doomed)
        remove_key(k);
    return doomed.size();
}

std::vector<Term> Graph::objects(const Term& s, const Term& p) const {
    std::vector<Term> out;
    scan(s, p, any, [&](const Key& k) { out.push_back(terms_[k[2]]); });
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Term> Graph::subjects(const Term& p, const Term& o) const {
    std::vector<Term> out;
    scan(any, p, o, [&](const Key& k) { out.push_back(terms_[k[0]]); });
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<Term> Graph::object(const Term& s, const Term& p) const {
    auto all = objects(s, p);
    if (all.empty())
        return std::nullopt;
    return all.front();
}

void Graph::set_object(const Term& s, const Term& p, const Term& o) {
    remove_matching(s, p, any);
    insert(s, p, o);
}

std::vector<Triple> Graph::triples() const {
    return match(any, any, any);
}

void Graph::merge(const Graph& other) {
    for (const auto& k : other.spo_)
        insert(other.materialize(k));
}

void Graph::clear() {
    std::vector<Key> all(spo_.begin(), spo_.end());
    for (const auto& k : all)
        remove_key(k);
}

void Graph::begin_journal() {
    journaling_ = true;
    journal_.clear();
}

void Graph::commit() {
    journaling_ = false;
    journal_.clear();
}

void Graph::rollback() {
    journaling_ = false;
    for (auto it = journal_.rbegin(); it != journal_.rend(); ++it) {
        if (it->first)
            remove_key(it->second);
        else
            insert_key(it->second);
    }
    journal_.clear();
}

bool operator==(const Graph& a, const Graph& b) {
    return a.size() == b.size() && a.triples() == b.triples();
}

} // namespace neno::rdf
