#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include "neno/rdf/term.hpp"

namespace neno::rdf {

// A position in a match pattern: a concrete term or a wildcard.
using TermPattern = std::optional<Term>;
inline constexpr std::nullopt_t any = std::nullopt;

// In-memory triple set with SPO, POS and OSP indexes over interned terms.
//
// Single writer, many readers: const member functions may run concurrently,
// mutations must be serialized by the owner.
class Graph {
public:
    bool insert(const Triple& t);
    bool insert(const Term& s, const Term& p, const Term& o) { return insert(Triple{s, p, o}); }
    bool remove(const Triple& t);
    bool remove(const Term& s, const Term& p, const Term& o) { return remove(Triple{s, p, o}); }
    bool contains(const Triple& t) const;

    // Triples agreeing with every non-wildcard position, in term order.
    std::vector<Triple> match(const TermPattern& s, const TermPattern& p, const TermPattern& o) const;
    std::size_t count(const TermPattern& s, const TermPattern& p, const TermPattern& o) const;
    std::size_t remove_matching(const TermPattern& s, const TermPattern& p, const TermPattern& o);

    std::vector<Term> objects(const Term& s, const Term& p) const;
    std::vector<Term> subjects(const Term& p, const Term& o) const;
    std::optional<Term> object(const Term& s, const Term& p) const;
    // Replaces every (s, p, *) triple with (s, p, o).
    void set_object(const Term& s, const Term& p, const Term& o);

    std::size_t size() const { return spo_.size(); }
    bool empty() const { return spo_.empty(); }
    // All triples in term order.
    std::vector<Triple> triples() const;
    void merge(const Graph& other);
    void clear();

    // Records mutations until commit() or rollback(); rollback undoes them.
    void begin_journal();
    void commit();
    void rollback();
    bool journaling() const { return journaling_; }

    friend bool operator==(const Graph& a, const Graph& b);

private:
    using Id = std::uint32_t;
    using Key = std::array<Id, 3>;

    std::optional<Id> find_id(const Term& t) const;
    Id intern(const Term& t);
    bool insert_key(const Key& spo);
    bool remove_key(const Key& spo);
    template <typename Fn>
    void scan(const TermPattern& s, const TermPattern& p, const TermPattern& o, Fn&& fn) const;
    Triple materialize(const Key& spo) const;

    std::vector<Term> terms_;
    std::unordered_map<Term, Id, TermHash> ids_;
    std::set<Key> spo_;
    std::set<Key> pos_;
    std::set<Key> osp_;

    bool journaling_ = false;
    std::vector<std::pair<bool, Key>> journal_;
};

} // namespace neno::rdf
