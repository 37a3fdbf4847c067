#include <gtest/gtest.h>

#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "neno/compiler/api.hpp"
#include "neno/compiler/compiler.hpp"
#include "neno/compiler/ontology.hpp"
#include "neno/lang/parser.hpp"
#include "neno/rdf/ntriples.hpp"
#include "neno/rdf/vocab.hpp"
#include "neno/vm/exec.hpp"
#include "vm_util.hpp"

using namespace neno;
using rdf::Term;
using testutil::demo;

namespace {

const char* kHeader = R"(
prefix xsd: <http://www.w3.org/2001/XMLSchema>;
prefix demo: <http://neno.lanl.gov/demo>;
)";

std::string compile_error(const std::string& body) {
    try {
        rdf::SeededUuidGenerator gen(1);
        compiler::compile({testutil::inline_source(kHeader + body)}, gen);
    } catch (const ParseError& e) {
        return e.message();
    }
    return "<compiled>";
}

rdf::Graph compile_text(const std::string& body, std::uint64_t seed = 1) {
    rdf::SeededUuidGenerator gen(seed);
    return compiler::compile({testutil::inline_source(kHeader + body)}, gen);
}

std::set<std::string> templates(const rdf::Graph& g) {
    std::set<std::string> out;
    for (const auto& r : g.subjects(vocab::owl_uri("onProperty"), nv::has_command()))
        if (auto v = g.object(r, vocab::owl_uri("hasValue")))
            out.insert(v->value());
    return out;
}

const std::string kHuman = "http://neno.lanl.gov/demo#";

// ---- control-flow oracle over compiled classes ---------------------------

struct Flow {
    const rdf::Graph& g;
    vm::ClassView code{g};
    std::map<Term, vm::Instruction> cache;

    const vm::Instruction& at(const Term& n) {
        auto it = cache.find(n);
        if (it == cache.end())
            it = cache.emplace(n, vm::decode(code, n)).first;
        return it->second;
    }

    static int pops(const vm::Value* v) {
        if (!v)
            return 0;
        return (v->kind == nv::Opcode::PopDirect ? 1 : 0) + pops(v->object.get()) + pops(v->index.get());
    }

    int delta(const vm::Instruction& in) const {
        int d = -(pops(in.left.get()) + pops(in.right.get()) + pops(in.value.get()));
        using O = nv::Opcode;
        switch (in.op) {
        case O::InvokeMethod:
        case O::Construct: d -= static_cast<int>(in.argc); d += in.discards ? 0 : 1; break;
        case O::PushValue:
        case O::SetQuery:
        case O::TypeOf:
        case O::TypeOfQuery: d += 1; break;
        default:
            if (nv::is_arithmetic(in.op))
                d += 1;
            break;
        }
        return d;
    }
};

struct MethodReport {
    std::size_t instructions = 0;
    std::vector<std::string> problems;
};

// Walks every path of a method: each instruction belongs to one block, the
// operand stack never underflows, agrees at joins and is empty at statement
// boundaries where control leaves a block or returns.
MethodReport check_method(const rdf::Graph& g, const Term& method_class) {
    MethodReport rep;
    Flow flow{g};
    auto root = api::restricted_one(g, method_class, nv::has_block());
    if (!root) {
        rep.problems.push_back("no root block");
        return rep;
    }
    std::map<Term, Term> owner;     // instruction -> enclosing block
    std::map<Term, Term> parent;    // block -> enclosing block
    std::map<Term, int> depth;
    struct Item {
        Term node;
        Term block;
        int depth;
    };
    std::vector<Item> work{{*root, Term(), 0}};
    auto problem = [&](const std::string& s) { rep.problems.push_back(s); };
    // Control falls off the end of block b.
    auto after_block = [&](Term b, int d) {
        if (d != 0)
            problem("stack depth " + std::to_string(d) + " at end of block");
        while (!b.empty()) {
            const auto& bi = flow.at(b);
            if (bi.next) {
                work.push_back({*bi.next, parent[b], 0});
                return;
            }
            b = parent[b];
        }
    };
    while (!work.empty()) {
        Item it = work.back();
        work.pop_back();
        if (auto o = owner.find(it.node); o != owner.end()) {
            if (o->second != it.block)
                problem("instruction in two blocks: " + it.node.value());
            if (depth[it.node] != it.depth)
                problem("stack depth disagrees at join: " + it.node.value());
            continue;
        }
        owner[it.node] = it.block;
        depth[it.node] = it.depth;
        ++rep.instructions;
        const auto& in = flow.at(it.node);
        int d = it.depth + flow.delta(in);
        int needs = Flow::pops(in.left.get()) + Flow::pops(in.right.get()) + Flow::pops(in.value.get()) +
                    static_cast<int>(in.argc);
        if (it.depth < needs)
            problem("operand stack underflow at " + std::string(nv::opcode_name(in.op)));
        if (in.op == nv::Opcode::Block) {
            if (it.depth != 0)
                problem("block entered with non-empty stack");
            parent[it.node] = it.block;
            if (in.first)
                work.push_back({*in.first, it.node, 0});
            else
                after_block(it.node, 0);
            continue;
        }
        if (nv::is_condition(in.op)) {
            if (!in.on_true || !in.on_false) {
                problem("condition without two branches");
                continue;
            }
            work.push_back({*in.on_true, it.block, d});
            work.push_back({*in.on_false, it.block, d});
            continue;
        }
        if (in.op == nv::Opcode::Return) {
            if (d != 0)
                problem("return with stack depth " + std::to_string(d));
            continue;
        }
        if (in.next)
            work.push_back({*in.next, it.block, d});
        else
            after_block(it.block, d);
    }
    return rep;
}

} // namespace

TEST(CompilerTemplates, HumanFieldOperators) {
    auto g = testutil::load_code(testutil::program_sources("marko"));
    auto t = templates(g);
    auto p = [](const char* l) { return "<" + kHuman + l + ">"; };
    std::set<std::string> expected{
        "ASK { ?_l " + p("hasFriend") + " ?_r . }",
        "ASK { ?_l " + p("hasFriend") + " ?x . ?x " + p("hasName") + " ?y . ?_r " + p("hasName") + " ?y . }",
        "DELETE { ?_s " + p("hasFriend") + " ?_v . }",
        "DELETE { ?_s " + p("hasFriend") + " ?human . }",
        "DELETE { ?_s " + p("hasName") + " ?name . }",
        "DELETE { ?_s " + p("hasName") + " ?x . }\nINSERT { ?_s " + p("hasName") + " ?_v . }",
        "DELETE { ?human " + p("hasFriend") + " ?_s . }",
        "INSERT { ?_s " + p("hasFriend") + " ?_v . }",
        "SELECT ?v WHERE { ?_s " + p("hasFriend") + " ?v . }",
        "SELECT ?v WHERE { ?_s " + p("hasName") + " ?v . }",
        "SELECT ?v WHERE { ?v " + p("hasFriend") + " ?_s . }",
    };
    EXPECT_EQ(t, expected);
}

TEST(CompilerTemplates, SelectVariableAndLimitFollowTarget) {
    auto g = compile_text(R"(
owl:Thing demo:H {
  demo:H hasFriend[0..*];
  f() {
    demo:H h[0..*] = this.hasFriend;
    demo:H g[0..*] = this..hasFriend;
    demo:H k[0..3] = this..hasFriend;
  }
})");
    auto t = templates(g);
    std::string p = "<" + kHuman + "hasFriend>";
    EXPECT_TRUE(t.count("SELECT ?h WHERE { ?_s " + p + " ?h . }"));
    EXPECT_TRUE(t.count("SELECT ?g WHERE { ?g " + p + " ?_s . }"));
    EXPECT_TRUE(t.count("SELECT ?k WHERE { ?k " + p + " ?_s . } LIMIT 3"));
}

TEST(CompilerTemplates, InverseSettersSwapDirection) {
    auto g = compile_text(R"(
owl:Thing demo:T {
  demo:E member[0..*];
}
owl:Thing demo:E {
  demo:T worksIn[0..1];
  f(demo:T t) {
    t..worksIn =+ this;
    t..worksIn =- this;
    t..worksIn =/
  }
})");
    auto t = templates(g);
    std::string p = "<" + kHuman + "worksIn>";
    EXPECT_TRUE(t.count("INSERT { ?_v " + p + " ?_s . }"));
    EXPECT_TRUE(t.count("DELETE { ?_v " + p + " ?_s . }"));
    EXPECT_TRUE(t.count("DELETE { ?e " + p + " ?_s . }"));
}

TEST(CompilerStructure, ClassLevelEncoding) {
    auto g = testutil::load_code(testutil::program_sources("marko"));
    Term human = demo("Human");
    EXPECT_TRUE(g.contains({human, vocab::type(), vocab::owl_uri("Class")}));
    EXPECT_TRUE(api::is_declared_class(g, human));
    auto fields = api::fields_of(g, human);
    ASSERT_EQ(fields.size(), 2u);
    std::map<std::string, api::FieldBounds> by;
    for (const auto& f : fields)
        by.emplace(f.property.value(), f);
    auto name = by.at(kHuman + "hasName");
    EXPECT_EQ(name.min, 1u);
    EXPECT_EQ(name.max, 1u);
    EXPECT_EQ(name.range, vocab::xsd_uri("string"));
    auto friend_ = by.at(kHuman + "hasFriend");
    EXPECT_EQ(friend_.min, 0u);
    EXPECT_FALSE(friend_.max);
    EXPECT_EQ(friend_.range, human);
    EXPECT_TRUE(g.contains({Term::uri(kHuman + "hasFriend"), vocab::type(), vocab::owl_uri("ObjectProperty")}));
    EXPECT_TRUE(g.contains({Term::uri(kHuman + "hasName"), vocab::type(), vocab::owl_uri("DatatypeProperty")}));

    std::multiset<std::pair<std::string, std::size_t>> methods;
    for (const auto& m : api::methods_of(g, human))
        methods.insert({m.name, m.arity});
    std::multiset<std::pair<std::string, std::size_t>> expected{
        {"!Human", 1}, {"~Human", 0},     {"makeFriend", 1},     {"setName", 1},
        {"makeEnemy", 1}, {"makeEnemy", 0}, {"isFriend", 1}, {"isFriendByName", 1}, {"example", 1}};
    EXPECT_EQ(methods, expected);
}

TEST(CompilerStructure, EveryInstructionClassIsTypedByTheOntology) {
    auto g = testutil::load_code(testutil::program_sources("friends"));
    std::size_t checked = 0;
    for (const auto& c : g.subjects(vocab::type(), vocab::owl_uri("Class"))) {
        auto s = api::named_superclass(g, c);
        if (!s || s->value().rfind(vocab::kNeno, 0) != 0)
            continue;
        EXPECT_TRUE(nv::instruction_ontology().contains({*s, vocab::type(), vocab::owl_uri("Class")})) << s->value();
        ++checked;
    }
    EXPECT_GT(checked, 100u);
}

TEST(CompilerInvariants, ControlFlowAndStackBalanceOverCorpus) {
    for (const auto& prog : testutil::corpus_programs(true)) {
        auto g = testutil::load_code(testutil::program_sources(prog));
        for (const auto& cls : api::declared_classes(g)) {
            for (const auto& m : api::methods_of(g, cls)) {
                auto rep = check_method(g, m.method_class);
                EXPECT_GT(rep.instructions, 0u) << prog << " " << m.name;
                for (const auto& p : rep.problems)
                    ADD_FAILURE() << prog << " " << cls.value() << " " << m.name << ": " << p;
            }
        }
    }
}

TEST(CompilerInvariants, EveryInstructionClassIsReachable) {
    auto g = testutil::load_code(testutil::program_sources("loops"));
    std::set<Term> reachable;
    for (const auto& cls : api::declared_classes(g))
        for (const auto& m : api::methods_of(g, cls)) {
            std::vector<Term> work{*api::restricted_one(g, m.method_class, nv::has_block())};
            while (!work.empty()) {
                Term n = work.back();
                work.pop_back();
                if (!reachable.insert(n).second)
                    continue;
                for (const auto& p : {nv::next_inst(), nv::true_inst(), nv::false_inst(), nv::first_inst()})
                    if (auto t = api::restricted_one(g, n, p))
                        work.push_back(*t);
            }
        }
    std::size_t instructions = 0;
    for (const auto& c : g.subjects(vocab::type(), vocab::owl_uri("Class"))) {
        auto s = api::named_superclass(g, c);
        if (s && nv::is_instruction(nv::opcode_of(*s))) {
            ++instructions;
            EXPECT_TRUE(reachable.count(c)) << "unreachable " << c.value() << " " << s->value();
        }
    }
    EXPECT_GT(instructions, 0u);
}

TEST(CompilerInvariants, ConditionsHaveBothBranches) {
    for (const auto& prog : testutil::corpus_programs(true)) {
        auto g = testutil::load_code(testutil::program_sources(prog));
        for (const auto& c : g.subjects(vocab::type(), vocab::owl_uri("Class"))) {
            auto s = api::named_superclass(g, c);
            if (!s || !nv::is_condition(nv::opcode_of(*s)))
                continue;
            EXPECT_TRUE(api::restricted_one(g, c, nv::true_inst())) << prog;
            EXPECT_TRUE(api::restricted_one(g, c, nv::false_inst())) << prog;
            EXPECT_FALSE(api::restricted_one(g, c, nv::next_inst())) << prog;
        }
    }
}

TEST(CompilerDeterminism, SameSeedSameTriples) {
    auto files = testutil::program_sources("friends");
    rdf::SeededUuidGenerator a(42), b(42), c(43);
    auto ga = compiler::compile(files, a);
    auto gb = compiler::compile(files, b);
    auto gc = compiler::compile(files, c);
    EXPECT_EQ(rdf::serialize_ntriples(ga), rdf::serialize_ntriples(gb));
    EXPECT_NE(rdf::serialize_ntriples(ga), rdf::serialize_ntriples(gc));
    EXPECT_EQ(ga.size(), gc.size());
}

TEST(CompilerDeterminism, NTriplesRoundTrip) {
    for (const auto& prog : testutil::corpus_programs(true)) {
        auto g = testutil::load_code(testutil::program_sources(prog));
        auto text = rdf::serialize_ntriples(g);
        auto back = rdf::parse_ntriples(text);
        EXPECT_EQ(back.triples(), g.triples()) << prog;
        EXPECT_EQ(rdf::serialize_ntriples(back), text);
    }
}

TEST(CompilerStructure, MethodsPointAtTheirSource) {
    auto g = testutil::load_code(testutil::program_sources("marko"));
    bool found = false;
    for (const auto& m : api::methods_of(g, demo("Human")))
        if (m.name == "setName")
            if (auto code = api::restricted_one(g, m.method_class, nv::has_human_code()))
                found = code->is_uri() && code->value().rfind("file://", 0) == 0 &&
                        code->value().ends_with("/marko/Human.neno");
    EXPECT_TRUE(found);
}

TEST(CompilerDiagnostics, SetPlusOnSingularField) {
    EXPECT_EQ(compile_error(R"(
owl:Thing demo:A {
  xsd:string hasName[1];
  f() { this.hasName =+ "x"; }
})"),
              "=+ on singular field 'hasName'");
    EXPECT_EQ(compile_error(R"(
owl:Thing demo:A {
  xsd:string nick[0..1];
  f() { this.nick =+ "x"; }
})"),
              "=+ on singular field 'nick'");
}

TEST(CompilerDiagnostics, DualInheritance) {
    EXPECT_NE(compile_error("owl:Thing, demo:B demo:A { }").find("multiple inheritance"), std::string::npos);
}

TEST(CompilerDiagnostics, DuplicateDestructor) {
    EXPECT_NE(compile_error("owl:Thing demo:A { ~A() { } ~A() { } }").find("duplicate destructor"),
              std::string::npos);
}

TEST(CompilerDiagnostics, UnknownPropertyUnderClosedWorld) {
    EXPECT_EQ(compile_error(R"(
owl:Thing demo:A {
  xsd:string hasName[1];
  f() { this.hasNickname = "x"; }
})"),
              "unknown property 'hasNickname' on demo:A");
}

TEST(CompilerDiagnostics, UnsupportedDatatypeOperation) {
    auto msg = compile_error(R"(
owl:Thing demo:A {
  f() { xsd:string s = "a" - "b"; }
})");
    EXPECT_NE(msg.find("unsupported datatype operation: '-'"), std::string::npos) << msg;
    msg = compile_error(R"(
owl:Thing demo:A {
  f() { xsd:boolean b = true * false; }
})");
    EXPECT_NE(msg.find("unsupported datatype operation: '*'"), std::string::npos) << msg;
}

TEST(CompilerDiagnostics, OtherErrors) {
    auto has = [](const std::string& body, const std::string& part) {
        auto msg = compile_error(body);
        EXPECT_NE(msg.find(part), std::string::npos) << "got: " << msg << "\nwanted: " << part;
    };
    has("owl:Thing demo:A { } owl:Thing demo:A { }", "duplicate class");
    has("demo:B demo:A { } demo:A demo:B { }", "inheritance cycle");
    has("owl:Thing demo:A { xsd:string x[1]; xsd:string x[1]; }", "duplicate field 'x'");
    has("owl:Thing demo:A { xsd:string x[1]; } demo:A demo:B { xsd:string x[1]; }",
        "field 'x' is already declared by a superclass");
    has("owl:Thing demo:A { f() { } f() { } }", "duplicate method");
    has("owl:Thing demo:A { f() { y = 1; } }", "unknown variable 'y'");
    has("owl:Thing demo:A { f() { xsd:integer y = 1; xsd:integer y = 2; } }", "variable 'y' already declared");
    has("owl:Thing demo:A { f() { xsd:integer y = \"s\"; } }", "type mismatch: cannot assign");
    has("owl:Thing demo:A { f() { if(1) { } } }", "type mismatch: condition must be xsd:boolean");
    has("owl:Thing demo:A { f() { this.g(1); } }", "unknown method 'g' with 1 arguments");
    has("owl:Thing demo:A { f() { demo:A a = new A(1); } }", "no constructor of demo:A takes 1 arguments");
    has("owl:Thing demo:A { g() { } f() { xsd:integer x = this.g() + 1; } }", "void");
    has("owl:Thing demo:A { g() { } f() { xsd:integer x = this.g(); } }", "void");
    has("owl:Thing demo:A { xsd:integer g() { } }", "missing return value");
    has("owl:Thing demo:A { xsd:integer g(xsd:boolean b) { if(b) return 1; } }", "missing return value");
    EXPECT_EQ(compile_error("owl:Thing demo:A { xsd:integer g(xsd:boolean b) { if(b) return 1; else { return 2; } } }"),
              "<compiled>");
    has("owl:Thing demo:A { f() { return; xsd:integer x = 1; } }", "unreachable statement");
    has("owl:Thing demo:A { f() { 1 + 2; } }", "expression statement has no effect");
    has("owl:Thing demo:A { f() { machine = this; } }", "cannot assign to machine");
    has("owl:Thing demo:A { f() { xsd:integer x = 1; delete x; } }", "delete needs an object");
    has("owl:Thing demo:A { f(xsd:integer a) { xsd:boolean b = a =? 1; } }",
        "'=?' needs a field path on at least one side");
    has("owl:Thing demo:A { xsd:gYear y[1]; }", "unsupported datatype");
    has("owl:Thing foo:A { }", "unknown prefix 'foo'");
    has("owl:Thing demo:A { demo:Nope x[1]; }", "unknown type");
    has("xsd:string demo:A { }", "superclass xsd:string is not a class");
    has("owl:Thing demo:A { !B() { } }", "constructor B does not match class");
}

TEST(CompilerDiagnostics, ErrorsCarryPositions) {
    try {
        rdf::SeededUuidGenerator gen(1);
        compiler::compile({testutil::inline_source(std::string(kHeader) + "owl:Thing demo:A {\n  f() { y = 1; }\n}")},
                          gen);
        FAIL() << "no error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.pos().line, 5u);
        EXPECT_GT(e.pos().column, 1u);
    }
}

TEST(CompilerStore, ClassesAlreadyInStoreAreRejectedButUsable) {
    auto existing = compile_text("owl:Thing demo:A { xsd:integer n[0..1]; xsd:integer get() { return 1; } }");
    rdf::SeededUuidGenerator gen(2);
    auto err = [&](const std::string& body) {
        try {
            compiler::compile({testutil::inline_source(kHeader + body)}, gen, &existing);
        } catch (const ParseError& e) {
            return e.message();
        }
        return std::string("<compiled>");
    };
    EXPECT_NE(err("owl:Thing demo:A { }").find("already defined in the store"), std::string::npos);
    EXPECT_EQ(err("owl:Thing demo:B { f(demo:A a) { a.n = a.get() + 1; } }"), "<compiled>");
}

TEST(Ontology, ShippedAssetMatchesGenerated) {
    std::ifstream in(std::string(NENO_ASSET_DIR) + "/neno-ontology.nt", std::ios::binary);
    ASSERT_TRUE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(ss.str(), nv::instruction_ontology_ntriples());
    EXPECT_TRUE(rdf::parse_ntriples(ss.str()) == nv::instruction_ontology());
}
