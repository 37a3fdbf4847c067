#include <gtest/gtest.h>

#include <random>
#include <unordered_set>

#include "neno/rdf/graph.hpp"
#include "neno/rdf/namespaces.hpp"
#include "neno/rdf/ntriples.hpp"
#include "neno/rdf/uuid.hpp"
#include "neno/rdf/vocab.hpp"
#include "test_util.hpp"

using namespace neno;
using rdf::Graph;
using rdf::Term;
using rdf::Triple;

namespace {

Term u(const std::string& s) { return Term::uri("http://example.org/" + s); }

// Marko is both kinds of scientist.
Graph scientists() {
    Graph g;
    g.insert(u("Marko"), vocab::type(), u("ComputerScientist"));
    g.insert(u("Marko"), vocab::type(), u("CognitiveScientist"));
    g.insert(u("Johan"), vocab::type(), u("CognitiveScientist"));
    g.insert(u("Marko"), u("hasFriend"), u("Johan"));
    return g;
}

} // namespace

TEST(Term, LiteralAlwaysCarriesDatatype) {
    auto t = Term::literal("x", "");
    EXPECT_EQ(t.datatype(), vocab::xsd("string"));
    EXPECT_NE(Term::literal("1", vocab::xsd("integer")), Term::literal("01", vocab::xsd("integer")));
    EXPECT_NE(Term::uri("a"), Term::string("a"));
}

TEST(Uuid, UrnFormat) {
    rdf::SeededUuidGenerator gen(1);
    auto t = rdf::mint_uuid_uri(gen);
    ASSERT_TRUE(t.is_uri());
    ASSERT_EQ(t.value().rfind("urn:uuid:", 0), 0u);
    EXPECT_TRUE(rdf::is_uuid_text(t.value().substr(9)));
    EXPECT_TRUE(rdf::is_uuid_text("6c3f8afe-ec3d-11db-8314-0800200c9a66"));
    EXPECT_FALSE(rdf::is_uuid_text("6c3f8afe"));
    EXPECT_TRUE(rdf::has_uuid_suffix("http://neno.lanl.gov/demo#6c3f8afe-ec3d-11db-8314-0800200c9a66"));
}

TEST(Uuid, DistinctAndReplayable) {
    rdf::SeededUuidGenerator a(42), b(42);
    auto first = a.next();
    EXPECT_NE(first, a.next());
    EXPECT_EQ(first, b.next());
    rdf::RandomUuidGenerator r;
    EXPECT_NE(r.next(), r.next());
}

TEST(Uuid, InjectiveOverHundredThousandDraws) {
    rdf::SeededUuidGenerator gen(7);
    std::unordered_set<std::string> seen;
    for (int i = 0; i < 100000; ++i)
        ASSERT_TRUE(seen.insert(gen.next()).second) << "collision at draw " << i;
}

TEST(Graph, InsertHasSetSemantics) {
    Graph g;
    Triple t{u("Marko"), vocab::type(), u("Human")};
    EXPECT_TRUE(g.insert(t));
    EXPECT_EQ(g.size(), 1u);
    EXPECT_FALSE(g.insert(t));
    EXPECT_EQ(g.size(), 1u);
    EXPECT_TRUE(g.remove(t));
    EXPECT_TRUE(g.insert(t));
    EXPECT_EQ(g.size(), 1u);
}

TEST(Graph, Remove) {
    Graph g;
    Triple iam{u("I"), u("am"), u("I")};
    Triple other{u("I"), u("am"), u("here")};
    g.insert(iam);
    EXPECT_TRUE(g.remove(iam));
    EXPECT_TRUE(g.empty());
    EXPECT_FALSE(g.remove(iam));
    g.insert(iam);
    g.insert(other);
    g.remove(iam);
    EXPECT_TRUE(g.contains(other));
    EXPECT_EQ(g.size(), 1u);
}

TEST(Graph, MatchScientists) {
    auto g = scientists();
    auto r = g.match(rdf::any, vocab::type(), u("ComputerScientist"));
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0].subject, u("Marko"));
    EXPECT_EQ(g.match(rdf::any, rdf::any, rdf::any).size(), g.size());
    EXPECT_TRUE(g.match(u("nobody"), rdf::any, rdf::any).empty());
}

TEST(Graph, IndexCoherenceAgainstFullScan) {
    std::mt19937 rng(3);
    for (int round = 0; round < 30; ++round) {
        auto g = testutil::random_graph(rng, 1 + rng() % 100, 6);
        auto all = g.triples();
        auto terms = testutil::graph_terms(g);
        terms.push_back(u("absent"));
        for (int q = 0; q < 40; ++q) {
            auto pick = [&]() -> rdf::TermPattern {
                if (rng() % 2)
                    return rdf::any;
                return terms[rng() % terms.size()];
            };
            auto s = pick(), p = pick(), o = pick();
            std::vector<Triple> expected;
            for (const auto& t : all)
                if ((!s || t.subject == *s) && (!p || t.predicate == *p) && (!o || t.object == *o))
                    expected.push_back(t);
            EXPECT_EQ(g.match(s, p, o), expected);
            EXPECT_EQ(g.count(s, p, o), expected.size());
        }
    }
}

TEST(Graph, JournalRollback) {
    auto g = scientists();
    auto before = g;
    g.begin_journal();
    g.insert(u("x"), u("y"), u("z"));
    g.remove(u("Marko"), u("hasFriend"), u("Johan"));
    g.rollback();
    EXPECT_EQ(g, before);
}

TEST(Namespaces, ExpandCompact) {
    auto ns = rdf::NamespaceMap::standard();
    ns.bind("demo", "http://neno.lanl.gov/demo");
    EXPECT_EQ(*ns.expand("demo:Human"), "http://neno.lanl.gov/demo#Human");
    EXPECT_EQ(*ns.expand("owl:Thing"), "http://www.w3.org/2002/07/owl#Thing");
    EXPECT_EQ(*ns.expand("neno:PushValue"), "http://neno.lanl.gov#PushValue");
    EXPECT_FALSE(ns.expand("nope:x"));
    for (std::string name : {"demo:Human", "xsd:string", "rdf:type", "neno:Add", "rdfs:subClassOf"})
        EXPECT_EQ(*ns.compact(*ns.expand(name)), name);
}

TEST(NTriples, ParsesTypedLiteral) {
    auto g = rdf::parse_ntriples(
        "<urn:uuid:a> <urn:uuid:b> \"1\"^^<http://www.w3.org/2001/XMLSchema#integer> .\n");
    ASSERT_EQ(g.size(), 1u);
    auto t = g.triples()[0];
    EXPECT_EQ(t.object, Term::literal("1", vocab::xsd("integer")));
}

TEST(NTriples, SerializationIsAFixpoint) {
    Graph g;
    g.insert(u("a"), u("b"), Term::string("tab\there \"quoted\"\nline"));
    auto once = rdf::serialize_ntriples(g);
    auto twice = rdf::serialize_ntriples(rdf::parse_ntriples(once));
    EXPECT_EQ(once, twice);
}

TEST(NTriples, RandomRoundTripAndOrderIndependence) {
    std::mt19937 rng(11);
    for (int round = 0; round < 20; ++round) {
        auto g = testutil::random_graph(rng, 50, 20);
        auto text = rdf::serialize_ntriples(g);
        EXPECT_EQ(rdf::parse_ntriples(text), g);
        auto triples = g.triples();
        std::shuffle(triples.begin(), triples.end(), rng);
        Graph shuffled;
        for (const auto& t : triples)
            shuffled.insert(t);
        EXPECT_EQ(rdf::serialize_ntriples(shuffled), text);
    }
}

TEST(NTriples, ErrorsCarryLineNumbers) {
    try {
        rdf::parse_ntriples("<a> <b> <c> .\n<a> <b> \"open .\n");
        FAIL() << "expected parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.pos().line, 2u);
    }
    EXPECT_THROW(rdf::parse_ntriples("_:b <p> <o> ."), ParseError);
    EXPECT_THROW(rdf::parse_ntriples("<a> <b> <c>"), ParseError);
    EXPECT_NO_THROW(rdf::parse_ntriples("# comment\n\n"));
}
