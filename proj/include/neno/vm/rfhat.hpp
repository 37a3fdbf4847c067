#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "neno/rdf/graph.hpp"
#include "neno/rdf/uuid.hpp"
#include "neno/vm/fhat.hpp"

namespace neno::vm {

// Interprets compiled classes directly with native stacks. Only objects and
// their field triples live in the graph; methods are not instantiated and the
// machine itself is not reflected, so `machine` faults.
class RFhat {
public:
    RFhat(rdf::Graph& g, rdf::UuidGenerator& gen);
    ~RFhat();
    RFhat(const RFhat&) = delete;
    RFhat& operator=(const RFhat&) = delete;

    void on_command(CommandLog log);

    rdf::Term create_object(const rdf::Term& cls);
    void start_program(const rdf::Term& cls, const std::string& method = "main");

    Status step();
    Status run(std::optional<std::uint64_t> max_steps = std::nullopt);
    Status status() const;
    std::optional<std::string> fault() const;

    std::vector<rdf::Term> operand_stack() const;
    std::optional<std::vector<rdf::Term>> variable(const std::string& name) const;

    struct State;
    struct Code;

private:
    rdf::Graph& g_;
    rdf::UuidGenerator& gen_;
    CommandLog log_;
    std::unique_ptr<State> state_;
    std::unique_ptr<Code> code_;
};

} // namespace neno::vm
