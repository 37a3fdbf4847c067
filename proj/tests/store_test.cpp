#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "neno/cli/commands.hpp"
#include "neno/rdf/ntriples.hpp"
#include "neno/store/server.hpp"
#include "neno/store/store.hpp"
#include "neno/vm/iso.hpp"
#include "vm_util.hpp"

using namespace neno;
using namespace testutil;
using rdf::Term;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    TempDir() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("neno-test-" + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

// A store server on a free local port for the lifetime of the object.
struct LiveServer {
    store::Server server;
    int port = 0;
    std::thread thread;
    explicit LiveServer(const std::string& data = "") : server(data) {
        port = server.bind("127.0.0.1", 0);
        thread = std::thread([this] { server.serve(); });
    }
    ~LiveServer() {
        server.stop();
        thread.join();
    }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port); }
};

struct Cmd {
    int code;
    std::string out, err;
};

Cmd nenofhat(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = cli::nenofhat(args, out, err);
    return {code, out.str(), err.str()};
}

Cmd fhat(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = cli::fhat(args, out, err);
    return {code, out.str(), err.str()};
}

std::string read_file(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> sources_of(const std::string& program) {
    std::vector<std::string> out;
    for (const auto& e : fs::directory_iterator(corpus_dir() + "/" + program))
        if (e.path().extension() == ".neno")
            out.push_back(e.path().string());
    std::sort(out.begin(), out.end());
    return out;
}

std::string entry_name(const std::string& program) {
    auto code = load_code(program_sources(program));
    return "<" + entry_class(code).value() + ">";
}

rdf::Graph random_graph(std::mt19937& rng, int n) {
    rdf::Graph g;
    for (int i = 0; i < n; ++i) {
        Term s = Term::uri("urn:x:s" + std::to_string(rng() % 6));
        Term p = Term::uri("urn:x:p" + std::to_string(rng() % 3));
        Term o = rng() % 2 ? Term::uri("urn:x:s" + std::to_string(rng() % 6))
                           : Term::literal(std::to_string(rng() % 5), vocab::xsd("integer"));
        g.insert(s, p, o);
    }
    return g;
}

std::string machine_in(const std::string& listing) { return listing.substr(0, listing.find('\n')); }

} // namespace

TEST(Store, DeltaRequestsTurnOneGraphIntoAnother) {
    std::mt19937 rng(3);
    for (int i = 0; i < 50; ++i) {
        auto a = random_graph(rng, 20);
        auto b = random_graph(rng, 20);
        store::Server s;
        s.load(rdf::serialize_ntriples(a));
        auto d = store::diff(a, b);
        auto r = s.sparql(d.empty() ? "ASK { ?s ?p ?o . }" : store::delta_requests(d));
        ASSERT_EQ(r.status, 200) << r.body;
        EXPECT_TRUE(s.graph() == b);
    }
}

TEST(Store, ServerAnswersQueriesAndUpdates) {
    store::Server s;
    auto r = s.sparql("INSERT { <urn:a> <urn:p> \"x\" . <urn:b> <urn:p> \"y\" . }");
    EXPECT_EQ(r.status, 200);
    EXPECT_EQ(r.body, "2\n");
    EXPECT_EQ(s.sparql("ASK { <urn:a> <urn:p> \"x\" . }").body, "true\n");
    EXPECT_EQ(s.sparql("ASK { <urn:a> <urn:p> \"y\" . }").body, "false\n");
    EXPECT_EQ(s.sparql("SELECT ?s WHERE { ?s <urn:p> ?o . }").body, "?s\n<urn:a>\n<urn:b>\n");
    EXPECT_EQ(s.sparql("DELETE { <urn:a> <urn:p> ?o . }").body, "1\n");

    EXPECT_EQ(s.sparql("SELEC ?x").status, 400);
    EXPECT_EQ(s.sparql("").status, 400);
    EXPECT_EQ(s.sparql("ASK { ?s ?p ?o . } INSERT { <urn:c> <urn:p> \"z\" . }").status, 400);
    // A failing document leaves no partial effect.
    auto before = s.graph();
    auto bad = s.sparql("INSERT { <urn:d> <urn:p> \"1\" . }\nINSERT { <urn:d> <urn:p> ?unbound . }");
    EXPECT_EQ(bad.status, 400);
    EXPECT_TRUE(s.graph() == before);
}

TEST(Store, ServerPersistsAndReloads) {
    TempDir dir;
    {
        store::Server s(dir / "data.nt");
        s.sparql("INSERT { <urn:a> <urn:p> \"x\" . }");
        s.save();
    }
    store::Server again(dir / "data.nt");
    EXPECT_EQ(again.sparql("ASK { <urn:a> <urn:p> \"x\" . }").body, "true\n");
    EXPECT_EQ(again.dump(), "<urn:a> <urn:p> \"x\"^^<http://www.w3.org/2001/XMLSchema#string> .\n");
}

TEST(Store, ClaimsExcludeOtherProcesses) {
    store::Server s;
    EXPECT_EQ(s.claim("urn:m", "one", false).status, 200);
    EXPECT_EQ(s.claim("urn:m", "one", false).status, 200);
    auto taken = s.claim("urn:m", "two", false);
    EXPECT_EQ(taken.status, 409);
    EXPECT_EQ(taken.body, "one");
    s.release("urn:m", "two");
    EXPECT_EQ(s.claim("urn:m", "two", false).status, 409);
    EXPECT_EQ(s.claim("urn:m", "two", true).status, 200);
    s.release("urn:m", "two");
    EXPECT_EQ(s.graph().size(), 0u);
}

TEST(Store, FileStoreAppliesAndClaims) {
    TempDir dir;
    store::FileStore fs(dir / "s.nt");
    EXPECT_EQ(fs.load().size(), 0u);
    store::Delta d;
    d.added.insert(Term::uri("urn:a"), Term::uri("urn:p"), Term::string("x"));
    fs.apply(d);
    EXPECT_EQ(fs.load().size(), 1u);
    Term m = Term::uri("urn:m");
    EXPECT_FALSE(fs.claim(m, "one", false));
    EXPECT_EQ(fs.claim(m, "two", false), std::optional<std::string>("one"));
    fs.release(m, "one");
    EXPECT_FALSE(fs.claim(m, "two", false));
    EXPECT_THROW(store::FileStore(dir / "missing/s.nt"), store::Unreachable);
}

TEST(Store, HttpStoreRoundTrip) {
    LiveServer live;
    store::HttpStore hs(live.url() + "/sparql");
    store::Delta d;
    d.added.insert(Term::uri("urn:a"), Term::uri("urn:p"), Term::literal("5", vocab::xsd("integer")));
    hs.apply(d);
    EXPECT_TRUE(hs.load() == d.added);
    EXPECT_EQ(hs.sparql("ASK { <urn:a> <urn:p> 5 . }"), "true\n");
    Term m = Term::uri("urn:m");
    EXPECT_FALSE(hs.claim(m, "one", false));
    EXPECT_EQ(hs.claim(m, "two", false), std::optional<std::string>("one"));
    hs.release(m, "one");
    EXPECT_FALSE(hs.claim(m, "two", false));
    EXPECT_THROW(hs.sparql("nonsense"), store::StoreError);

    store::HttpStore nowhere("http://127.0.0.1:1");
    EXPECT_THROW(nowhere.load(), store::Unreachable);
}

TEST(Cli, CompilerLoadsTheApiIntoAFileStore) {
    TempDir dir;
    auto files = sources_of("marko");
    auto args = files;
    args.insert(args.end(), {"-o", "ntriple", "-t", dir / "a.nt", "--seed", "5"});
    auto r = nenofhat(args);
    ASSERT_EQ(r.code, 0) << r.err;
    auto g = rdf::parse_ntriples(read_file(dir / "a.nt"));
    EXPECT_TRUE(nv::has_instruction_ontology(g));
    EXPECT_TRUE(api::is_declared_class(g, demo("Human")));

    auto again = files;
    again.insert(again.end(), {"-t", dir / "b.nt", "--seed", "5"});
    ASSERT_EQ(nenofhat(again).code, 0);
    EXPECT_EQ(read_file(dir / "a.nt"), read_file(dir / "b.nt"));

    // Human is already in the store.
    auto twice = nenofhat({files[0], "-t", dir / "a.nt"});
    EXPECT_EQ(twice.code, 1);
    EXPECT_NE(twice.err.find("already defined"), std::string::npos) << twice.err;
}

TEST(Cli, CompilerErrors) {
    TempDir dir;
    auto files = sources_of("marko");
    EXPECT_EQ(nenofhat({files[0], "-o", "xml"}).code, 1);
    auto n3 = nenofhat({files[0], "-o", "n3"});
    EXPECT_EQ(n3.code, 1);
    EXPECT_NE(n3.err.find("unsupported format"), std::string::npos);

    std::ofstream(dir / "bad.neno") << "owl:Thing demo:X {\n  m() { x = ; }\n}\n";
    auto bad = nenofhat({dir / "bad.neno", "-t", dir / "s.nt"});
    EXPECT_EQ(bad.code, 1);
    EXPECT_NE(bad.err.find("bad.neno:2:"), std::string::npos) << bad.err;

    EXPECT_EQ(nenofhat({files[0], files[1], "-t", "http://127.0.0.1:1/sparql"}).code, 2);
    EXPECT_EQ(nenofhat({files[0], files[1], "-t", dir / "no/such/dir.nt"}).code, 2);

    auto stdout_only = nenofhat({files[0], files[1], "--seed", "1"});
    EXPECT_EQ(stdout_only.code, 0);
    EXPECT_GT(rdf::parse_ntriples(stdout_only.out).size(), 0u);

    auto onto = nenofhat({"--ontology"});
    EXPECT_EQ(onto.out, nv::instruction_ontology_ntriples());
}

TEST(Cli, FhatRunsTheMarkoProgram) {
    TempDir dir;
    auto store = dir / "s.nt";
    auto args = sources_of("marko");
    args.insert(args.end(), {"-t", store, "--seed", "1"});
    ASSERT_EQ(nenofhat(args).code, 0);
    auto r = fhat({"-vmc", "neno:Fhat", "-c", "demo:Test", "-cm", "main", "-t", store, "--seed", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.rfind("finished urn:uuid:", 0), 0u) << r.out;
    auto g = rdf::parse_ntriples(read_file(store));
    auto humans = g.subjects(vocab::type(), demo("Human"));
    ASSERT_EQ(humans.size(), 1u);
    EXPECT_EQ(g.objects(humans[0], demo("hasName")), std::vector<Term>{Term::string("Marko Antonio Rodriguez")});

    auto full = fhat({"-vmc", "http://neno.lanl.gov#Fhat", "-c", "http://neno.lanl.gov/demo#Test", "-cm", "main",
                      "-t", store});
    EXPECT_EQ(full.code, 0) << full.err;
    auto rf = fhat({"-vmc", "neno:Fhat", "-c", "demo:Test", "-cm", "main", "-t", store, "--engine", "rfhat"});
    EXPECT_EQ(rf.code, 0) << rf.err;
}

TEST(Cli, FhatErrors) {
    TempDir dir;
    auto store = dir / "s.nt";
    EXPECT_EQ(fhat({"-vmc", "neno:Fhat", "-c", "demo:Test", "-cm", "main", "-t", store}).code, 1);
    auto args = sources_of("marko");
    args.insert(args.end(), {"-t", store});
    ASSERT_EQ(nenofhat(args).code, 0);
    std::ofstream(dir / "f.neno") << "prefix demo: <http://neno.lanl.gov/demo>;\n"
                                     "owl:Thing demo:Boom { main() { xsd:integer z = 0; z = 1 / z; } }\n";
    ASSERT_EQ(nenofhat({dir / "f.neno", "-t", store}).code, 0);

    EXPECT_EQ(fhat({"-vmc", "neno:Other", "-c", "demo:Test", "-cm", "main", "-t", store}).code, 1);
    EXPECT_EQ(fhat({"-vmc", "neno:Fhat", "-c", "demo:Nope", "-cm", "main", "-t", store}).code, 1);
    EXPECT_EQ(fhat({"-vmc", "neno:Fhat", "-c", "demo:Test", "-cm", "nope", "-t", store}).code, 1);
    EXPECT_EQ(fhat({"-vmi", "urn:uuid:00000000-0000-4000-8000-000000000000", "-t", store}).code, 1);
    EXPECT_EQ(fhat({"-vmc", "neno:Fhat", "-c", "demo:Test", "-t", store}).code, 1);
    EXPECT_EQ(fhat({"-t", store}).code, 1);
    EXPECT_EQ(fhat({"-vmc", "neno:Fhat", "-c", "demo:Test", "-cm", "main", "-t", "http://127.0.0.1:1"}).code, 2);
    auto boom = fhat({"-vmc", "neno:Fhat", "-c", "demo:Boom", "-cm", "main", "-t", store});
    EXPECT_EQ(boom.code, 3);
    EXPECT_NE(boom.err.find("division by zero"), std::string::npos) << boom.err;
    EXPECT_EQ(fhat({"-vmi", "urn:x", "-t", store, "--engine", "rfhat"}).code, 1);
}

TEST(Cli, ClaimedMachineIsNotResumedTwice) {
    TempDir dir;
    auto store = dir / "s.nt";
    auto args = sources_of("marko");
    args.insert(args.end(), {"-t", store});
    ASSERT_EQ(nenofhat(args).code, 0);
    auto r = fhat({"-vmc", "neno:Fhat", "-c", "demo:Test", "-cm", "main", "-t", store, "--max-steps", "3"});
    ASSERT_EQ(r.code, 0);
    ASSERT_EQ(r.out.rfind("halted ", 0), 0u);
    std::string m = r.out.substr(7, r.out.size() - 8);

    store::FileStore fs(store);
    ASSERT_FALSE(fs.claim(Term::uri(m), "someone-else", false));
    auto held = fhat({"-vmi", m, "-t", store});
    EXPECT_EQ(held.code, 4);
    EXPECT_NE(held.err.find("someone-else"), std::string::npos);
    auto stolen = fhat({"-vmi", m, "-t", store, "--steal"});
    EXPECT_EQ(stolen.code, 0) << stolen.err;
    EXPECT_EQ(stolen.out.rfind("finished ", 0), 0u);
    EXPECT_EQ(fs.load().count(rdf::any, nv::claimed_by(), rdf::any), 0u);
}

TEST(Cli, StoreFromEnvironment) {
    TempDir dir;
    auto store = dir / "env.nt";
    ::setenv(cli::kStoreEnv, store.c_str(), 1);
    auto args = sources_of("marko");
    auto c = nenofhat(args);
    auto r = fhat({"-vmc", "neno:Fhat", "-c", "demo:Test", "-cm", "main"});
    ::unsetenv(cli::kStoreEnv);
    EXPECT_EQ(c.code, 0) << c.err;
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(store));
}

// One uninterrupted run into a file store against a run where every
// instruction is executed by a separate invocation resuming over HTTP.
TEST(Migration, AlternatingProcessesOverHttpMatchOneRun) {
    for (const std::string program : {"marko", "friends", "lifecycle", "netquery"}) {
        SCOPED_TRACE(program);
        TempDir dir;
        auto cls = entry_name(program);
        auto compile = [&](const std::string& target) {
            auto args = sources_of(program);
            args.insert(args.end(), {"-t", target, "--seed", "7"});
            ASSERT_EQ(nenofhat(args).code, 0);
        };

        auto local = dir / "one.nt";
        compile(local);
        auto one = fhat({"-vmc", "neno:Fhat", "-c", cls, "-cm", "main", "-t", local, "--seed", "1"});
        ASSERT_EQ(one.code, 0) << one.err;

        LiveServer live;
        compile(live.url());
        auto first = fhat({"-vmc", "neno:Fhat", "-c", cls, "-cm", "main", "-t", live.url(), "--max-steps", "1"});
        ASSERT_EQ(first.code, 0) << first.err;
        std::string m = machine_in(live.server.machines());
        int hops = 0;
        while (true) {
            auto r = fhat({"-vmi", m, "-t", live.url(), "--max-steps", "1", "--seed", std::to_string(100 + hops)});
            ASSERT_EQ(r.code, 0) << r.err;
            ++hops;
            if (r.out.rfind("finished", 0) == 0)
                break;
            ASSERT_LT(hops, 100000);
        }
        auto iso = vm::isomorphic(live.server.graph(), rdf::parse_ntriples(read_file(local)));
        EXPECT_TRUE(iso) << iso.counterexample;
    }
}
