#include "neno/vm/rfhat.hpp"

#include <algorithm>

#include "neno/compiler/api.hpp"
#include "neno/compiler/compiler.hpp"
#include "neno/compiler/ontology.hpp"
#include "neno/rdf/vocab.hpp"
#include "neno/vm/exec.hpp"
#include "neno/vm/values.hpp"

namespace neno::vm {

using nv::Opcode;
using rdf::Term;

namespace {

struct Var {
    std::string name;
    std::vector<Term> values;
    std::size_t block;
};

struct Frame {
    std::vector<Var> vars;
};

struct BlockEntry {
    Term block;
    std::size_t frame;
};

struct ReturnEntry {
    std::optional<Term> to;
    bool discards = false;
    std::optional<Term> constructs;
    std::optional<Term> destructs;
};

struct Method {
    Term cls;
    Term block;
    std::vector<std::string> params;
};

} // namespace

struct RFhat::State {
    std::optional<Term> pc;
    std::vector<Term> operands;
    std::vector<BlockEntry> blocks;
    std::vector<ReturnEntry> returns;
    std::vector<Frame> frames;
    std::optional<std::string> fault;
    std::optional<Term> fault_instruction;
};

// Decoded code depends only on the compiled classes, so it survives steps.
struct RFhat::Code {
    std::map<Term, Instruction> decoded;
    std::map<Term, Method> methods;
};

namespace {

using Code = RFhat::Code;

class Runner final : public Env {
public:
    Runner(rdf::Graph& g, rdf::UuidGenerator& gen, RFhat::State& s, Code& code, const CommandLog& log)
        : g_(g), gen_(gen), s_(s), code_(code), log_(log) {}

    Term pop() override {
        if (s_.operands.empty())
            throw Fault("operand stack underflow");
        Term v = s_.operands.back();
        s_.operands.pop_back();
        return v;
    }

    std::vector<Term> local(const std::string& name) override {
        if (auto* v = find_var(name))
            return v->values;
        if (name == "machine")
            throw Fault("reflection is not supported");
        throw Fault("unknown variable '" + name + "'");
    }

    const rdf::Graph& graph() const override { return g_; }

    void command(const std::string& c) override {
        if (log_)
            log_(c);
    }

    Term create_object(const Term& cls) {
        if (!api::is_declared_class(g_, cls))
            throw Fault("unknown class " + cls.value());
        Term o = rdf::mint_uuid_uri(gen_);
        g_.insert(o, vocab::type(), cls);
        return o;
    }

    std::optional<Method> find_method(const Term& o, const std::string& name, std::size_t argc) {
        auto type = declared_type(g_, o);
        if (!type)
            return std::nullopt;
        for (const auto& e : api::methods_of(g_, *type))
            if (e.name == name && e.arity == argc)
                return method(e.method_class);
        return std::nullopt;
    }

    void invoke(const Method& m, const Term& self, const std::vector<Term>& args, const ReturnEntry& ret,
                bool push_return) {
        if (m.params.size() != args.size())
            throw Fault("argument count mismatch calling " + m.cls.value());
        if (push_return)
            s_.returns.push_back(ret);
        s_.frames.emplace_back();
        s_.blocks.push_back({m.block, s_.frames.size() - 1});
        declare("this", {self});
        for (std::size_t i = 0; i < args.size(); ++i)
            declare(m.params[i], {args[i]});
        enter(m.block);
    }

    void execute() {
        if (!s_.pc)
            throw Fault("no program location");
        const Instruction& in = instruction(*s_.pc);
        switch (in.op) {
        case Opcode::Block:
            if (s_.frames.empty())
                throw Fault("no active frame");
            s_.blocks.push_back({in.node, s_.frames.size() - 1});
            enter(in.node);
            return;
        case Opcode::PushValue:
            s_.operands.push_back(read_one(*in.value, *this));
            advance(in);
            return;
        case Opcode::Add:
        case Opcode::Subtract:
        case Opcode::Multiply:
        case Opcode::Divide: {
            Term r = read_one(*in.right, *this);
            Term l = read_one(*in.left, *this);
            Op op = in.op == Opcode::Add        ? Op::Add
                    : in.op == Opcode::Subtract ? Op::Subtract
                    : in.op == Opcode::Multiply ? Op::Multiply
                                                : Op::Divide;
            s_.operands.push_back(arithmetic(op, l, r));
            advance(in);
            return;
        }
        case Opcode::Not:
            s_.operands.push_back(logical_not(read_one(*in.left, *this)));
            advance(in);
            return;
        case Opcode::Equals:
        case Opcode::GreaterThan:
        case Opcode::GreaterThanEqual:
        case Opcode::LessThan:
        case Opcode::LessThanEqual: {
            Term r = read_one(*in.right, *this);
            Term l = read_one(*in.left, *this);
            bool yes = false;
            switch (in.op) {
            case Opcode::Equals: yes = equals(l, r); break;
            case Opcode::GreaterThan: yes = compare(l, r) > 0; break;
            case Opcode::GreaterThanEqual: yes = compare(l, r) >= 0; break;
            case Opcode::LessThan: yes = compare(l, r) < 0; break;
            default: yes = compare(l, r) <= 0; break;
            }
            s_.pc = yes ? *in.on_true : *in.on_false;
            return;
        }
        case Opcode::Set:
        case Opcode::SetPlus:
        case Opcode::SetMinus:
        case Opcode::SetClear:
        case Opcode::NetQuery:
            setter(in);
            advance(in);
            return;
        case Opcode::SetQuery: {
            auto r = in.right ? read(*in.right, *this) : std::vector<Term>{};
            auto l = read(*in.left, *this);
            s_.operands.push_back(vocab::boolean(run_ask_template(g_, in.command, {{"_l", l}, {"_r", r}}, *this)));
            advance(in);
            return;
        }
        case Opcode::InvokeMethod: {
            auto args = pop_args(in.argc);
            Term recv = read_one(*in.left, *this);
            if (!recv.is_uri())
                throw Fault("method call on literal " + recv.to_ntriples());
            auto m = find_method(recv, in.method_name, in.argc);
            if (!m)
                throw Fault("no method " + in.method_name + "/" + std::to_string(in.argc) + " on " + recv.value());
            invoke(*m, recv, args, {in.next, in.discards, {}, {}}, true);
            return;
        }
        case Opcode::Construct: {
            auto args = pop_args(in.argc);
            Term o = create_object(in.cls);
            if (auto ctor = find_method(o, "!" + compiler::local_name(in.cls.value()), in.argc)) {
                invoke(*ctor, o, args, {in.next, in.discards, o, {}}, true);
                return;
            }
            if (in.argc > 0)
                throw Fault("no constructor of " + in.cls.value() + " takes " + std::to_string(in.argc) +
                            " arguments");
            check_min(g_, o);
            if (!in.discards)
                s_.operands.push_back(o);
            advance(in);
            return;
        }
        case Opcode::Destruct: {
            Term o = read_one(*in.left, *this);
            if (!o.is_uri() || !declared_type(g_, o))
                throw Fault("delete of a non-object " + o.to_ntriples());
            if (auto d = destructor(o)) {
                invoke(*d, o, {}, {in.next, true, {}, o}, true);
                return;
            }
            destroy_object(g_, o);
            advance(in);
            return;
        }
        case Opcode::Return: {
            std::optional<Term> v;
            if (in.value)
                v = read_one(*in.value, *this);
            do_return(v);
            return;
        }
        case Opcode::TypeOf:
            s_.operands.push_back(vocab::boolean(has_type(g_, read_one(*in.left, *this), in.cls)));
            advance(in);
            return;
        case Opcode::TypeOfQuery:
            s_.operands.push_back(type_query(g_, read_one(*in.left, *this)));
            advance(in);
            return;
        default:
            throw Fault("cannot execute " + in.node.value());
        }
    }

    const Method& method(const Term& cls) {
        if (auto it = code_.methods.find(cls); it != code_.methods.end())
            return it->second;
        Method m{cls, {}, {}};
        auto block = api::restricted_one(g_, cls, nv::has_block());
        if (!block)
            throw Fault("method without a block: " + cls.value());
        m.block = *block;
        if (auto ad = api::restricted_one(g_, cls, nv::has_argument_descriptor())) {
            for (std::size_t i = 1;; ++i) {
                auto arg = api::restricted_one(g_, *ad, vocab::rdf_uri("_" + std::to_string(i)));
                if (!arg)
                    break;
                auto n = api::restricted_one(g_, *arg, nv::has_name());
                m.params.push_back(n ? n->value() : "");
            }
        }
        return code_.methods.emplace(cls, std::move(m)).first->second;
    }

private:
    const Instruction& instruction(const Term& node) {
        if (auto it = code_.decoded.find(node); it != code_.decoded.end())
            return it->second;
        return code_.decoded.emplace(node, decode(ClassView(g_), node)).first->second;
    }

    Frame& frame() {
        if (s_.frames.empty())
            throw Fault("no active frame");
        return s_.frames.back();
    }

    Var* find_var(const std::string& name) {
        if (s_.frames.empty())
            return nullptr;
        for (auto& v : s_.frames.back().vars)
            if (v.name == name)
                return &v;
        return nullptr;
    }

    void declare(const std::string& name, std::vector<Term> values) {
        auto& vars = frame().vars;
        std::erase_if(vars, [&](const Var& v) { return v.name == name; });
        vars.push_back({name, std::move(values), s_.blocks.size() - 1});
    }

    std::optional<Method> destructor(const Term& o) {
        auto type = declared_type(g_, o);
        if (!type)
            return std::nullopt;
        std::string own = "~" + compiler::local_name(type->value());
        std::optional<Term> any;
        for (const auto& e : api::methods_of(g_, *type)) {
            if (e.name.empty() || e.name[0] != '~' || e.arity != 0)
                continue;
            if (e.name == own)
                return method(e.method_class);
            if (!any)
                any = e.method_class;
        }
        if (any)
            return method(*any);
        return std::nullopt;
    }

    std::vector<Term> pop_args(std::size_t n) {
        std::vector<Term> args(n);
        for (std::size_t i = n; i-- > 0;)
            args[i] = pop();
        return args;
    }

    void pop_block() {
        std::size_t at = s_.blocks.size() - 1;
        std::size_t f = s_.blocks.back().frame;
        if (f < s_.frames.size())
            std::erase_if(s_.frames[f].vars, [&](const Var& v) { return v.block == at; });
        s_.blocks.pop_back();
    }

    void enter(const Term& block) {
        const Instruction& b = instruction(block);
        if (b.first)
            s_.pc = *b.first;
        else
            block_end();
    }

    void advance(const Instruction& in) {
        if (in.next)
            s_.pc = *in.next;
        else
            block_end();
    }

    void block_end() {
        while (true) {
            if (s_.blocks.empty() || s_.blocks.back().frame + 1 != s_.frames.size()) {
                do_return(std::nullopt);
                return;
            }
            Term b = s_.blocks.back().block;
            pop_block();
            if (auto next = instruction(b).next) {
                s_.pc = *next;
                return;
            }
        }
    }

    void do_return(const std::optional<Term>& value) {
        while (!s_.blocks.empty() && s_.blocks.back().frame + 1 == s_.frames.size())
            pop_block();
        if (!s_.frames.empty())
            s_.frames.pop_back();
        if (s_.returns.empty()) {
            s_.pc.reset();
            return;
        }
        ReturnEntry r = s_.returns.back();
        s_.returns.pop_back();
        if (r.destructs)
            destroy_object(g_, *r.destructs);
        if (r.constructs) {
            check_min(g_, *r.constructs);
            if (!r.discards)
                s_.operands.push_back(*r.constructs);
        } else if (!r.discards) {
            if (!value)
                throw Fault("method returned no value");
            s_.operands.push_back(*value);
        }
        if (r.to)
            s_.pc = *r.to;
        else
            block_end();
    }

    void setter(const Instruction& in) {
        std::vector<Term> src;
        if (in.op == Opcode::NetQuery) {
            Term q = read_one(*in.right, *this);
            if (!q.is_literal())
                throw Fault("network query must be a string");
            src = run_net_query(g_, q.value(), *this);
        } else if (in.right) {
            src = read(*in.right, *this);
        }
        const Value& target = *in.left;
        if (target.kind == Opcode::LocalVariable) {
            if (target.declares) {
                declare(target.name, {});
            }
            Var* v = find_var(target.name);
            if (!v) {
                if (target.name == "machine")
                    throw Fault("reflection is not supported");
                throw Fault("unknown variable '" + target.name + "'");
            }
            auto add = [&](const Term& x) {
                if (std::find(v->values.begin(), v->values.end(), x) == v->values.end())
                    v->values.push_back(x);
            };
            switch (in.op) {
            case Opcode::SetPlus:
                for (const auto& x : src)
                    add(x);
                break;
            case Opcode::SetMinus:
                for (const auto& x : src)
                    std::erase(v->values, x);
                break;
            case Opcode::SetClear: v->values.clear(); break;
            default:
                v->values.clear();
                for (const auto& x : src)
                    add(x);
                break;
            }
            std::sort(v->values.begin(), v->values.end());
            return;
        }
        if (target.kind != Opcode::FieldVariable && target.kind != Opcode::ObjectVariable)
            throw Fault("invalid assignment target " + target.node.value());
        TargetSlots slots = read_target(target, *this);
        Slots bind{{"_s", slots.subjects}, {"_v", src}};
        if (slots.old)
            bind["_o"] = {*slots.old};
        run_update_template(g_, in.command, bind, *this);
        const auto& touched = target.kind == Opcode::FieldVariable ? slots.subjects : src;
        for (const auto& s : touched)
            check_max(g_, s, target.property);
    }

    rdf::Graph& g_;
    rdf::UuidGenerator& gen_;
    RFhat::State& s_;
    Code& code_;
    const CommandLog& log_;
};

} // namespace

RFhat::RFhat(rdf::Graph& g, rdf::UuidGenerator& gen)
    : g_(g), gen_(gen), state_(std::make_unique<State>()), code_(std::make_unique<Code>()) {}

RFhat::~RFhat() = default;

void RFhat::on_command(CommandLog log) { log_ = std::move(log); }

Term RFhat::create_object(const Term& cls) {
    try {
        return Runner(g_, gen_, *state_, *code_, log_).create_object(cls);
    } catch (const Fault& f) {
        throw Error(f.what());
    }
}

void RFhat::start_program(const Term& cls, const std::string& method) {
    if (state_->pc)
        throw Error("machine busy");
    if (state_->fault)
        throw Error("machine faulted");
    State saved = *state_;
    g_.begin_journal();
    try {
        Runner r(g_, gen_, *state_, *code_, log_);
        Term o = r.create_object(cls);
        auto m = r.find_method(o, method, 0);
        if (!m)
            throw Fault("class " + cls.value() + " has no method " + method + "()");
        r.invoke(*m, o, {}, {}, false);
        g_.commit();
    } catch (const Error& e) {
        g_.rollback();
        *state_ = std::move(saved);
        throw Error(e.what());
    }
}

Status RFhat::status() const {
    if (state_->fault)
        return Status::Faulted;
    if (!state_->pc)
        return Status::Finished;
    return Status::Running;
}

std::optional<std::string> RFhat::fault() const { return state_->fault; }

Status RFhat::step() {
    Status st = status();
    if (st != Status::Running)
        return st;
    State saved = *state_;
    g_.begin_journal();
    try {
        Runner(g_, gen_, *state_, *code_, log_).execute();
        g_.commit();
    } catch (const Error& e) {
        g_.rollback();
        *state_ = std::move(saved);
        state_->fault = e.what();
        state_->fault_instruction = state_->pc;
    }
    return status();
}

Status RFhat::run(std::optional<std::uint64_t> max_steps) {
    std::uint64_t n = 0;
    Status s = status();
    while (s == Status::Running && (!max_steps || n < *max_steps)) {
        s = step();
        ++n;
    }
    return s;
}

std::vector<Term> RFhat::operand_stack() const { return state_->operands; }

std::optional<std::vector<Term>> RFhat::variable(const std::string& name) const {
    if (state_->frames.empty())
        return std::nullopt;
    for (const auto& v : state_->frames.back().vars)
        if (v.name == name)
            return v.values;
    return std::nullopt;
}

} // namespace neno::vm
