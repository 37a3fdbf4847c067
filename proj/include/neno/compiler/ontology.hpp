#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "neno/rdf/graph.hpp"
#include "neno/rdf/vocab.hpp"

// The neno: vocabulary: instruction and value superclasses, the method
// ontology and the machine's own properties.
namespace neno::nv {

#define NENO_TERM(fn, local)                                                                                 \
    inline const rdf::Term& fn() {                                                                           \
        static const rdf::Term t = vocab::neno_uri(local);                                                   \
        return t;                                                                                            \
    }

// code
NENO_TERM(next_inst, "nextInst")
NENO_TERM(true_inst, "trueInst")
NENO_TERM(false_inst, "falseInst")
NENO_TERM(first_inst, "firstInst")
NENO_TERM(has_value, "hasValue")
NENO_TERM(has_left, "hasLeft")
NENO_TERM(has_right, "hasRight")
NENO_TERM(has_uri, "hasURI")
NENO_TERM(has_name, "hasName")
NENO_TERM(has_object, "hasObject")
NENO_TERM(has_property, "hasProperty")
NENO_TERM(has_index, "hasIndex")
NENO_TERM(has_count, "hasCount")
NENO_TERM(has_limit, "hasLimit")
NENO_TERM(declares, "declares")
NENO_TERM(has_type, "hasType")
NENO_TERM(has_command, "hasCommand")
NENO_TERM(has_method_name, "hasMethodName")
NENO_TERM(has_arg_count, "hasArgCount")
NENO_TERM(discards_result, "discardsResult")
NENO_TERM(has_class, "hasClass")
NENO_TERM(has_block, "hasBlock")
NENO_TERM(has_argument_descriptor, "hasArgumentDescriptor")
NENO_TERM(has_return_descriptor, "hasReturnDescriptor")
NENO_TERM(has_human_code, "hasHumanCode")
NENO_TERM(has_method, "hasMethod")
NENO_TERM(prefix, "prefix")

// machine
NENO_TERM(halt, "halt")
NENO_TERM(method_reuse, "methodReuse")
NENO_TERM(program_location, "programLocation")
NENO_TERM(block_top, "blockTop")
NENO_TERM(block_stack, "blockStack")
NENO_TERM(operand_stack, "operandStack")
NENO_TERM(return_stack, "returnStack")
NENO_TERM(has_frame, "hasFrame")
NENO_TERM(has_variable, "hasVariable")
NENO_TERM(from_block, "fromBlock")
NENO_TERM(destructs, "destructs")
NENO_TERM(constructs, "constructs")
NENO_TERM(claimed_by, "claimedBy")
NENO_TERM(fault, "fault")
NENO_TERM(fault_instruction, "faultInstruction")

// classes
NENO_TERM(fhat, "Fhat")
NENO_TERM(frame, "Frame")
NENO_TERM(frame_variable, "FrameVariable")
NENO_TERM(method, "Method")
NENO_TERM(argument_descriptor, "ArgumentDescriptor")
NENO_TERM(argument, "Argument")

#undef NENO_TERM

// Leaf opcodes and value kinds.
enum class Opcode {
    Block, Add, Subtract, Multiply, Divide, Not,
    Equals, GreaterThan, GreaterThanEqual, LessThan, LessThanEqual,
    Set, SetPlus, SetMinus, SetClear, SetQuery, NetQuery,
    InvokeMethod, Construct, Destruct,
    PushValue, Return, TypeOf, TypeOfQuery,
    LocalDirect, PopDirect, LocalVariable, FieldVariable, ObjectVariable,
    None,
};

std::string_view opcode_name(Opcode op);
rdf::Term opcode_class(Opcode op);
// Leaf opcode of a vocabulary class IRI; None for anything else.
Opcode opcode_of(const rdf::Term& vocabulary_class);

bool is_instruction(Opcode op);
bool is_condition(Opcode op);
bool is_arithmetic(Opcode op);
bool is_setter(Opcode op);
bool is_value(Opcode op);

// The instruction-superclass ontology as a graph and as sorted N-Triples.
const rdf::Graph& instruction_ontology();
std::string instruction_ontology_ntriples();
// True when every triple of the ontology is present in g.
bool has_instruction_ontology(const rdf::Graph& g);

} // namespace neno::nv
