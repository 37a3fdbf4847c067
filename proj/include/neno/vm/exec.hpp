#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "neno/compiler/ontology.hpp"
#include "neno/error.hpp"
#include "neno/rdf/graph.hpp"
#include "neno/rdf/namespaces.hpp"

// Pieces both interpreters share: decoding triple-code into instructions,
// reading Value operands, and running store-command templates.
namespace neno::vm {

// A runtime error inside a program; the machine records it and halts.
class Fault : public Error {
public:
    using Error::Error;
};

// How code is read: from instantiated instructions (subject triples) or from
// compiled classes (restrictions).
class CodeView {
public:
    virtual ~CodeView() = default;
    virtual nv::Opcode opcode(const rdf::Term& node) const = 0;
    virtual std::optional<rdf::Term> get(const rdf::Term& node, const rdf::Term& prop) const = 0;
};

class InstanceView final : public CodeView {
public:
    explicit InstanceView(const rdf::Graph& g) : g_(g) {}
    nv::Opcode opcode(const rdf::Term& node) const override;
    std::optional<rdf::Term> get(const rdf::Term& node, const rdf::Term& prop) const override;

private:
    const rdf::Graph& g_;
};

class ClassView final : public CodeView {
public:
    explicit ClassView(const rdf::Graph& g) : g_(g) {}
    nv::Opcode opcode(const rdf::Term& node) const override;
    std::optional<rdf::Term> get(const rdf::Term& node, const rdf::Term& prop) const override;

private:
    const rdf::Graph& g_;
};

struct Value {
    nv::Opcode kind = nv::Opcode::None;
    rdf::Term node;
    rdf::Term direct;
    std::string name;
    std::shared_ptr<const Value> object;
    std::shared_ptr<const Value> index;
    rdf::Term property;
    std::string command;
    bool count = false;
    bool declares = false;
};

struct Instruction {
    nv::Opcode op = nv::Opcode::None;
    rdf::Term node;
    std::optional<rdf::Term> next, on_true, on_false, first;
    std::shared_ptr<const Value> left, right, value;
    std::string command;
    std::string method_name;
    std::size_t argc = 0;
    bool discards = false;
    rdf::Term cls;
};

// Throws Fault for anything that is not a well-formed instruction.
Instruction decode(const CodeView& code, const rdf::Term& node);

// What operand reads need from the running machine.
class Env {
public:
    virtual ~Env() = default;
    virtual rdf::Term pop() = 0;
    // Values of a local variable; Fault when it is not declared.
    virtual std::vector<rdf::Term> local(const std::string& name) = 0;
    virtual const rdf::Graph& graph() const = 0;
    // Every store command as executed, slots substituted.
    virtual void command(const std::string& rendered) { (void)rendered; }
};

// Operands are read right to left: an index before its object.
std::vector<rdf::Term> read(const Value& v, Env& env);
rdf::Term read_one(const Value& v, Env& env);

struct TargetSlots {
    std::vector<rdf::Term> subjects;
    std::optional<rdf::Term> old;
};
// ?_s (and ?_o for an indexed target) of a field or object variable target.
TargetSlots read_target(const Value& target, Env& env);

using Slots = std::map<std::string, std::vector<rdf::Term>>;

// Runs each request of the template once per combination of the slot values
// it mentions, request by request.
void run_update_template(rdf::Graph& g, const std::string& command, const Slots& slots, Env& env);
bool run_ask_template(const rdf::Graph& g, const std::string& command, const Slots& slots, Env& env);
// A program-built SELECT; values of its first projected variable.
std::vector<rdf::Term> run_net_query(const rdf::Graph& g, const std::string& query, Env& env);

// Standard prefixes plus the `neno:prefix` declarations of compiled programs.
rdf::NamespaceMap program_namespaces(const rdf::Graph& g);

std::optional<rdf::Term> declared_type(const rdf::Graph& g, const rdf::Term& object);
void check_max(const rdf::Graph& g, const rdf::Term& subject, const rdf::Term& property);
void check_min(const rdf::Graph& g, const rdf::Term& object);
bool has_type(const rdf::Graph& g, const rdf::Term& v, const rdf::Term& cls);
rdf::Term type_query(const rdf::Graph& g, const rdf::Term& v);
// Removes every triple mentioning o.
void destroy_object(rdf::Graph& g, const rdf::Term& o);

bool truth(const rdf::Term& t);

} // namespace neno::vm
