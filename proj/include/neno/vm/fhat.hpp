#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "neno/rdf/graph.hpp"
#include "neno/rdf/uuid.hpp"

namespace neno::vm {

enum class Status { Running, Halted, Finished, Faulted };
std::string_view status_name(Status s);

using CommandLog = std::function<void(const std::string&)>;

// The RDF virtual machine. Everything it knows about a running program (the
// program counter, operand/block/return stacks, frames and variables) lives
// as triples in the graph under the machine's URI, so a machine can be
// snapshotted, moved and resumed by another process.
class Fhat {
public:
    Fhat(rdf::Graph& g, rdf::UuidGenerator& gen) : g_(g), gen_(gen) {}

    // Store commands (slots substituted) as they are executed.
    void on_command(CommandLog log) { log_ = std::move(log); }

    // A fresh idle machine. Throws Error when the instruction ontology is
    // missing from the graph.
    rdf::Term boot(bool method_reuse = true);

    // A new instance of `cls` with its methods attached and no constructor run.
    rdf::Term create_object(const rdf::Term& machine, const rdf::Term& cls);

    // Instantiates `cls` and points the machine at the first instruction of
    // its zero-argument `method`. Throws Error("machine busy") when a program
    // is already loaded.
    void start_program(const rdf::Term& machine, const rdf::Term& cls, const std::string& method = "main");

    // Executes one instruction atomically. A fault rolls the graph back to the
    // state before the step, then records the fault and halts.
    Status step(const rdf::Term& machine);
    Status run(const rdf::Term& machine, std::optional<std::uint64_t> max_steps = std::nullopt);

    // Sets the halt flag, the machine's own pause.
    void halt(const rdf::Term& machine);
    // Clears the halt flag of a machine that has not faulted and still has
    // an instruction to run. False when the machine cannot continue.
    bool unhalt(const rdf::Term& machine);

    Status status(const rdf::Term& machine) const;
    std::optional<std::string> fault(const rdf::Term& machine) const;

    // Bottom first.
    std::vector<rdf::Term> operand_stack(const rdf::Term& machine) const;
    // Values of a variable in the current frame.
    std::optional<std::vector<rdf::Term>> variable(const rdf::Term& machine, const std::string& name) const;

private:
    rdf::Graph& g_;
    rdf::UuidGenerator& gen_;
    CommandLog log_;
};

// Machines (neno:Fhat instances) in a graph.
std::vector<rdf::Term> machines(const rdf::Graph& g);

// The machine's state and every object of a declared class, plus everything
// reachable from those: forward along any URI object, backward along declared
// field properties. Vocabulary triples are left out; the receiving graph must
// already hold them.
rdf::Graph snapshot_graph(const rdf::Graph& g, const rdf::Term& machine);
std::string snapshot(const rdf::Graph& g, const rdf::Term& machine);

// Loads a snapshot into g and clears its halt flag unless it faulted.
// Throws Error when g lacks the instruction ontology or the text holds no
// machine.
rdf::Term resume(const std::string& ntriples, rdf::Graph& g);

} // namespace neno::vm
