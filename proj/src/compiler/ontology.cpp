#include "neno/compiler/ontology.hpp"

#include <array>
#include <map>
#include <utility>

#include "neno/rdf/ntriples.hpp"

namespace neno::nv {

namespace {

using rdf::Term;

struct Entry {
    Opcode op;
    std::string_view name;
};

constexpr std::array<Entry, 29> kOpcodes{{
    {Opcode::Block, "Block"},
    {Opcode::Add, "Add"},
    {Opcode::Subtract, "Subtract"},
    {Opcode::Multiply, "Multiply"},
    {Opcode::Divide, "Divide"},
    {Opcode::Not, "Not"},
    {Opcode::Equals, "Equals"},
    {Opcode::GreaterThan, "GreaterThan"},
    {Opcode::GreaterThanEqual, "GreaterThanEqual"},
    {Opcode::LessThan, "LessThan"},
    {Opcode::LessThanEqual, "LessThanEqual"},
    {Opcode::Set, "Set"},
    {Opcode::SetPlus, "SetPlus"},
    {Opcode::SetMinus, "SetMinus"},
    {Opcode::SetClear, "SetClear"},
    {Opcode::SetQuery, "SetQuery"},
    {Opcode::NetQuery, "NetQuery"},
    {Opcode::InvokeMethod, "InvokeMethod"},
    {Opcode::Construct, "Construct"},
    {Opcode::Destruct, "Destruct"},
    {Opcode::PushValue, "PushValue"},
    {Opcode::Return, "Return"},
    {Opcode::TypeOf, "TypeOf"},
    {Opcode::TypeOfQuery, "TypeOfQuery"},
    {Opcode::LocalDirect, "LocalDirect"},
    {Opcode::PopDirect, "PopDirect"},
    {Opcode::LocalVariable, "LocalVariable"},
    {Opcode::FieldVariable, "FieldVariable"},
    {Opcode::ObjectVariable, "ObjectVariable"},
}};

// child -> parent within the vocabulary
const std::vector<std::pair<std::string_view, std::string_view>>& hierarchy() {
    static const std::vector<std::pair<std::string_view, std::string_view>> h{
        {"Block", "Instruction"},
        {"Arithmetic", "Instruction"},
        {"Add", "Arithmetic"},
        {"Subtract", "Arithmetic"},
        {"Multiply", "Arithmetic"},
        {"Divide", "Arithmetic"},
        {"Not", "Arithmetic"},
        {"Condition", "Instruction"},
        {"Equals", "Condition"},
        {"GreaterThan", "Condition"},
        {"GreaterThanEqual", "Condition"},
        {"LessThan", "Condition"},
        {"LessThanEqual", "Condition"},
        {"Setter", "Instruction"},
        {"Set", "Setter"},
        {"SetPlus", "Setter"},
        {"SetMinus", "Setter"},
        {"SetClear", "Setter"},
        {"SetQuery", "Setter"},
        {"NetQuery", "Setter"},
        {"Invoke", "Instruction"},
        {"InvokeMethod", "Invoke"},
        {"Construct", "Invoke"},
        {"Destruct", "Invoke"},
        {"PushValue", "Instruction"},
        {"Return", "Instruction"},
        {"TypeOf", "Instruction"},
        {"TypeOfQuery", "Instruction"},
        {"Direct", "Value"},
        {"LocalDirect", "Direct"},
        {"PopDirect", "Direct"},
        {"Variable", "Value"},
        {"LocalVariable", "Variable"},
        {"FieldVariable", "Variable"},
        {"ObjectVariable", "Variable"},
        {"Frame", "MachineState"},
        {"FrameVariable", "MachineState"},
    };
    return h;
}

struct Prop {
    std::string_view name;
    bool object;  // owl:ObjectProperty vs owl:DatatypeProperty
};

const std::vector<Prop>& properties() {
    static const std::vector<Prop> p{
        {"nextInst", true}, {"trueInst", true}, {"falseInst", true}, {"firstInst", true},
        {"hasValue", true}, {"hasLeft", true}, {"hasRight", true}, {"hasURI", true},
        {"hasName", false}, {"hasObject", true}, {"hasProperty", true}, {"hasIndex", true},
        {"hasCount", false}, {"hasLimit", false}, {"declares", false}, {"hasType", true},
        {"hasCommand", false}, {"hasMethodName", false}, {"hasArgCount", false},
        {"discardsResult", false}, {"hasClass", true}, {"hasBlock", true},
        {"hasArgumentDescriptor", true}, {"hasReturnDescriptor", true}, {"hasHumanCode", true},
        {"hasMethod", true}, {"prefix", false}, {"programLocation", true}, {"blockTop", true},
        {"blockStack", true}, {"operandStack", true}, {"returnStack", true}, {"hasFrame", true},
        {"hasVariable", true}, {"fromBlock", true}, {"destructs", true}, {"constructs", true},
        {"claimedBy", false}, {"fault", false}, {"faultInstruction", true},
    };
    return p;
}

rdf::Graph build() {
    rdf::Graph g;
    const Term cls = vocab::owl_uri("Class");
    g.insert(Term::uri(std::string(vocab::kNeno.substr(0, vocab::kNeno.size() - 1))), vocab::type(),
             vocab::owl_uri("Ontology"));
    for (auto root : {"Instruction", "Value", "Method", "Argument", "MachineState"}) {
        g.insert(vocab::neno_uri(root), vocab::type(), cls);
        g.insert(vocab::neno_uri(root), vocab::sub_class_of(), vocab::owl_uri("Thing"));
    }
    for (const auto& [child, parent] : hierarchy()) {
        g.insert(vocab::neno_uri(child), vocab::type(), cls);
        g.insert(vocab::neno_uri(child), vocab::sub_class_of(), vocab::neno_uri(parent));
    }
    g.insert(vocab::neno_uri("ArgumentDescriptor"), vocab::type(), cls);
    g.insert(vocab::neno_uri("ArgumentDescriptor"), vocab::sub_class_of(), vocab::rdf_uri("Seq"));
    g.insert(vocab::neno_uri("Fhat"), vocab::type(), cls);
    g.insert(vocab::neno_uri("Fhat"), vocab::sub_class_of(), vocab::owl_uri("Thing"));
    for (const auto& p : properties())
        g.insert(vocab::neno_uri(p.name), vocab::type(),
                 vocab::owl_uri(p.object ? "ObjectProperty" : "DatatypeProperty"));
    // The reflective part of the machine, visible to programs as fields.
    for (auto [name, range] : {std::pair{"halt", "boolean"}, std::pair{"methodReuse", "boolean"}}) {
        g.insert(vocab::neno_uri(name), vocab::type(), vocab::owl_uri("DatatypeProperty"));
        g.insert(vocab::neno_uri(name), vocab::rdfs_uri("domain"), fhat());
        g.insert(vocab::neno_uri(name), vocab::rdfs_uri("range"), vocab::xsd_uri(range));
    }
    g.insert(program_location(), vocab::rdfs_uri("domain"), fhat());
    g.insert(program_location(), vocab::rdfs_uri("range"), vocab::neno_uri("Instruction"));
    return g;
}

} // namespace

std::string_view opcode_name(Opcode op) {
    for (const auto& e : kOpcodes)
        if (e.op == op)
            return e.name;
    return "None";
}

Term opcode_class(Opcode op) { return vocab::neno_uri(opcode_name(op)); }

Opcode opcode_of(const Term& c) {
    static const std::map<Term, Opcode> table = [] {
        std::map<Term, Opcode> m;
        for (const auto& e : kOpcodes)
            m.emplace(vocab::neno_uri(e.name), e.op);
        return m;
    }();
    auto it = table.find(c);
    return it == table.end() ? Opcode::None : it->second;
}

bool is_instruction(Opcode op) { return op != Opcode::None && op < Opcode::LocalDirect; }
bool is_condition(Opcode op) { return op >= Opcode::Equals && op <= Opcode::LessThanEqual; }
bool is_arithmetic(Opcode op) { return op >= Opcode::Add && op <= Opcode::Not; }
bool is_setter(Opcode op) { return op >= Opcode::Set && op <= Opcode::NetQuery; }
bool is_value(Opcode op) { return op >= Opcode::LocalDirect && op <= Opcode::ObjectVariable; }

const rdf::Graph& instruction_ontology() {
    static const rdf::Graph g = build();
    return g;
}

std::string instruction_ontology_ntriples() { return rdf::serialize_ntriples(instruction_ontology()); }

bool has_instruction_ontology(const rdf::Graph& g) {
    for (const auto& t : instruction_ontology().triples())
        if (!g.contains(t))
            return false;
    return true;
}

} // namespace neno::nv
