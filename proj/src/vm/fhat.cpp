#include "neno/vm/fhat.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "neno/compiler/api.hpp"
#include "neno/compiler/compiler.hpp"
#include "neno/compiler/ontology.hpp"
#include "neno/rdf/ntriples.hpp"
#include "neno/rdf/vocab.hpp"
#include "neno/vm/exec.hpp"
#include "neno/vm/values.hpp"

namespace neno::vm {

namespace {

using nv::Opcode;
using rdf::Term;

struct ReturnSpec {
    std::optional<Term> to;
    bool discards = false;
    std::optional<Term> constructs;
    std::optional<Term> destructs;
};

enum class VarMode { Replace, Add, Remove, Clear };

// One machine's view of the graph for the duration of a step.
class Machine final : public Env {
public:
    Machine(rdf::Graph& g, rdf::UuidGenerator& gen, Term m, const CommandLog& log)
        : g_(g), gen_(gen), m_(std::move(m)), log_(log) {}

    Term pop() override {
        Term h = head(nv::operand_stack());
        if (h == vocab::nil())
            throw Fault("operand stack underflow");
        auto v = g_.object(h, vocab::first());
        auto rest = g_.object(h, vocab::rest());
        if (!v || !rest)
            throw Fault("corrupt operand stack cell " + h.value());
        g_.remove_matching(h, rdf::any, rdf::any);
        g_.set_object(m_, nv::operand_stack(), *rest);
        return *v;
    }

    std::vector<Term> local(const std::string& name) override {
        if (auto f = frame())
            if (auto v = find_var(*f, name))
                return g_.objects(*v, nv::has_value());
        if (name == "machine")
            return {m_};
        throw Fault("unknown variable '" + name + "'");
    }

    const rdf::Graph& graph() const override { return g_; }

    void command(const std::string& c) override {
        if (log_)
            log_(c);
    }

    void push(const Term& v) {
        Term c = mint();
        g_.insert(c, vocab::first(), v);
        g_.insert(c, vocab::rest(), head(nv::operand_stack()));
        g_.set_object(m_, nv::operand_stack(), c);
    }

    Term create_object(const Term& cls) {
        if (!api::is_declared_class(g_, cls))
            throw Fault("unknown class " + cls.value());
        Term o = rdf::mint_uuid_uri(gen_);
        g_.insert(o, vocab::type(), cls);
        bool reuse = flag(nv::method_reuse());
        for (const auto& entry : api::methods_of(g_, cls)) {
            std::optional<Term> mi;
            if (reuse) {
                auto existing = g_.subjects(vocab::type(), entry.method_class);
                if (!existing.empty())
                    mi = existing.front();
            }
            if (!mi)
                mi = instantiate(entry.method_class);
            g_.insert(o, nv::has_method(), *mi);
        }
        return o;
    }

    std::optional<Term> find_method(const Term& o, const std::string& name, std::size_t argc) const {
        for (const auto& mi : g_.objects(o, nv::has_method())) {
            auto n = g_.object(mi, nv::has_method_name());
            if (n && n->value() == name && params(mi).size() == argc)
                return mi;
        }
        return std::nullopt;
    }

    void invoke(const Term& mi, const Term& self, const std::vector<Term>& args, const ReturnSpec& ret,
                bool push_return) {
        auto block = g_.object(mi, nv::has_block());
        if (!block)
            throw Fault("method without a block: " + mi.value());
        auto names = params(mi);
        if (names.size() != args.size())
            throw Fault("argument count mismatch calling " + mi.value());
        if (push_return) {
            Term c = mint();
            g_.insert(c, vocab::first(), ret.to.value_or(vocab::nil()));
            g_.insert(c, vocab::rest(), head(nv::return_stack()));
            if (auto caller = frame())
                g_.insert(c, nv::has_frame(), *caller);
            if (ret.discards)
                g_.insert(c, nv::discards_result(), vocab::boolean(true));
            if (ret.constructs)
                g_.insert(c, nv::constructs(), *ret.constructs);
            if (ret.destructs)
                g_.insert(c, nv::destructs(), *ret.destructs);
            g_.set_object(m_, nv::return_stack(), c);
        }
        Term f = mint();
        g_.insert(f, vocab::type(), nv::frame());
        g_.set_object(m_, nv::has_frame(), f);
        push_block(*block, f);
        set_var("this", {self}, true, VarMode::Replace);
        for (std::size_t i = 0; i < args.size(); ++i)
            set_var(names[i], {args[i]}, true, VarMode::Replace);
        enter(*block);
    }

    void execute() {
        auto pl = g_.object(m_, nv::program_location());
        if (!pl)
            throw Fault("no program location");
        Instruction in = decode(InstanceView(g_), *pl);
        switch (in.op) {
        case Opcode::Block:
            push_block(in.node, *frame_or_fault());
            enter(in.node);
            return;
        case Opcode::PushValue:
            push(read_one(*in.value, *this));
            advance(in);
            return;
        case Opcode::Add:
        case Opcode::Subtract:
        case Opcode::Multiply:
        case Opcode::Divide: {
            Term r = read_one(*in.right, *this);
            Term l = read_one(*in.left, *this);
            static const std::map<Opcode, Op> ops{{Opcode::Add, Op::Add},
                                                  {Opcode::Subtract, Op::Subtract},
                                                  {Opcode::Multiply, Op::Multiply},
                                                  {Opcode::Divide, Op::Divide}};
            push(arithmetic(ops.at(in.op), l, r));
            advance(in);
            return;
        }
        case Opcode::Not:
            push(logical_not(read_one(*in.left, *this)));
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
            jump(yes ? *in.on_true : *in.on_false);
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
            push(vocab::boolean(run_ask_template(g_, in.command, {{"_l", l}, {"_r", r}}, *this)));
            advance(in);
            return;
        }
        case Opcode::InvokeMethod: {
            auto args = pop_args(in.argc);
            Term recv = read_one(*in.left, *this);
            if (!recv.is_uri())
                throw Fault("method call on literal " + recv.to_ntriples());
            auto mi = find_method(recv, in.method_name, in.argc);
            if (!mi)
                throw Fault("no method " + in.method_name + "/" + std::to_string(in.argc) + " on " + recv.value());
            invoke(*mi, recv, args, {in.next, in.discards, {}, {}}, true);
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
                push(o);
            advance(in);
            return;
        }
        case Opcode::Destruct: {
            Term o = read_one(*in.left, *this);
            if (!o.is_uri() || !declared_type(g_, o))
                throw Fault("delete of a non-object " + o.to_ntriples());
            if (auto dtor = destructor(o)) {
                invoke(*dtor, o, {}, {in.next, true, {}, o}, true);
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
            push(vocab::boolean(has_type(g_, read_one(*in.left, *this), in.cls)));
            advance(in);
            return;
        case Opcode::TypeOfQuery:
            push(type_query(g_, read_one(*in.left, *this)));
            advance(in);
            return;
        default:
            throw Fault("cannot execute " + in.node.value());
        }
    }

private:
    Term mint() { return rdf::mint_uuid_uri(gen_); }

    bool flag(const Term& p) const {
        auto v = g_.object(m_, p);
        return v && truth(*v);
    }

    Term head(const Term& stack) const { return g_.object(m_, stack).value_or(vocab::nil()); }

    std::optional<Term> frame() const { return g_.object(m_, nv::has_frame()); }

    std::optional<Term> frame_or_fault() const {
        auto f = frame();
        if (!f)
            throw Fault("no active frame");
        return f;
    }

    std::optional<Term> find_var(const Term& f, const std::string& name) const {
        for (const auto& v : g_.objects(f, nv::has_variable())) {
            auto n = g_.object(v, nv::has_name());
            if (n && n->value() == name)
                return v;
        }
        return std::nullopt;
    }

    void remove_var(const Term& f, const Term& v) {
        g_.remove_matching(v, rdf::any, rdf::any);
        g_.remove(f, nv::has_variable(), v);
    }

    void set_var(const std::string& name, const std::vector<Term>& values, bool declares, VarMode mode) {
        Term f = *frame_or_fault();
        auto v = find_var(f, name);
        if (declares) {
            if (v)
                remove_var(f, *v);
            v = mint();
            g_.insert(f, nv::has_variable(), *v);
            g_.insert(*v, vocab::type(), nv::frame_variable());
            g_.insert(*v, nv::has_name(), vocab::string(name));
            if (auto b = g_.object(m_, nv::block_top()))
                g_.insert(*v, nv::from_block(), *b);
        }
        if (!v)
            throw Fault(name == "machine" ? "cannot assign to machine" : "unknown variable '" + name + "'");
        if (mode == VarMode::Replace || mode == VarMode::Clear)
            g_.remove_matching(*v, nv::has_value(), rdf::any);
        for (const auto& x : values) {
            if (mode == VarMode::Remove)
                g_.remove(*v, nv::has_value(), x);
            else if (mode != VarMode::Clear)
                g_.insert(*v, nv::has_value(), x);
        }
    }

    std::vector<std::string> params(const Term& mi) const {
        std::vector<std::string> out;
        auto ad = g_.object(mi, nv::has_argument_descriptor());
        if (!ad)
            return out;
        for (std::size_t i = 1;; ++i) {
            auto arg = g_.object(*ad, vocab::rdf_uri("_" + std::to_string(i)));
            if (!arg)
                break;
            auto n = g_.object(*arg, nv::has_name());
            out.push_back(n ? n->value() : "");
        }
        return out;
    }

    std::optional<Term> destructor(const Term& o) const {
        std::optional<Term> any;
        auto type = declared_type(g_, o);
        std::string own = type ? "~" + compiler::local_name(type->value()) : "";
        for (const auto& mi : g_.objects(o, nv::has_method())) {
            auto n = g_.object(mi, nv::has_method_name());
            if (!n || n->value().empty() || n->value()[0] != '~' || !params(mi).empty())
                continue;
            if (n->value() == own)
                return mi;
            if (!any)
                any = mi;
        }
        return any;
    }

    Term instantiate(const Term& root) {
        std::map<Term, Term> memo;
        std::vector<Term> work;
        auto inst = [&](const Term& c) {
            if (auto it = memo.find(c); it != memo.end())
                return it->second;
            Term i = mint();
            memo.emplace(c, i);
            g_.insert(i, vocab::type(), c);
            work.push_back(c);
            return i;
        };
        Term out = inst(root);
        while (!work.empty()) {
            Term c = work.back();
            work.pop_back();
            Term i = memo.at(c);
            for (const auto& r : api::restrictions(g_, c)) {
                if (r.kind == api::Restriction::Kind::AllValuesFrom)
                    g_.insert(i, r.property, inst(r.value));
                else if (r.kind == api::Restriction::Kind::HasValue)
                    g_.insert(i, r.property, r.value);
            }
        }
        return out;
    }

    std::vector<Term> pop_args(std::size_t n) {
        std::vector<Term> args(n);
        for (std::size_t i = n; i-- > 0;)
            args[i] = pop();
        return args;
    }

    void jump(const Term& to) { g_.set_object(m_, nv::program_location(), to); }

    void push_block(const Term& b, const Term& f) {
        Term c = mint();
        g_.insert(c, vocab::first(), b);
        g_.insert(c, vocab::rest(), head(nv::block_stack()));
        g_.insert(c, nv::has_frame(), f);
        g_.set_object(m_, nv::block_stack(), c);
        g_.set_object(m_, nv::block_top(), b);
    }

    void pop_block() {
        Term h = head(nv::block_stack());
        auto b = g_.object(h, vocab::first());
        auto f = g_.object(h, nv::has_frame());
        Term rest = g_.object(h, vocab::rest()).value_or(vocab::nil());
        if (b && f)
            for (const auto& v : g_.objects(*f, nv::has_variable()))
                if (g_.contains({v, nv::from_block(), *b}))
                    remove_var(*f, v);
        g_.remove_matching(h, rdf::any, rdf::any);
        g_.set_object(m_, nv::block_stack(), rest);
        if (auto top = g_.object(rest, vocab::first()))
            g_.set_object(m_, nv::block_top(), *top);
        else
            g_.remove_matching(m_, nv::block_top(), rdf::any);
    }

    void enter(const Term& block) {
        if (auto first = g_.object(block, nv::first_inst()))
            jump(*first);
        else
            block_end();
    }

    void advance(const Instruction& in) {
        if (in.next)
            jump(*in.next);
        else
            block_end();
    }

    // Control fell off the end of the innermost block.
    void block_end() {
        while (true) {
            auto f = frame();
            Term h = head(nv::block_stack());
            if (h == vocab::nil() || g_.object(h, nv::has_frame()) != f) {
                do_return(std::nullopt);
                return;
            }
            Term b = *g_.object(h, vocab::first());
            pop_block();
            if (auto next = g_.object(b, nv::next_inst())) {
                jump(*next);
                return;
            }
        }
    }

    void do_return(const std::optional<Term>& value) {
        auto f = frame();
        while (true) {
            Term h = head(nv::block_stack());
            if (h == vocab::nil() || g_.object(h, nv::has_frame()) != f)
                break;
            pop_block();
        }
        if (f) {
            for (const auto& v : g_.objects(*f, nv::has_variable()))
                remove_var(*f, v);
            g_.remove_matching(*f, rdf::any, rdf::any);
            g_.remove_matching(m_, nv::has_frame(), rdf::any);
        }
        Term h = head(nv::return_stack());
        if (h == vocab::nil()) {
            g_.remove_matching(m_, nv::program_location(), rdf::any);
            g_.set_object(m_, nv::halt(), vocab::boolean(true));
            return;
        }
        Term to = g_.object(h, vocab::first()).value_or(vocab::nil());
        auto caller = g_.object(h, nv::has_frame());
        auto discards = g_.object(h, nv::discards_result());
        auto constructs = g_.object(h, nv::constructs());
        auto destructs = g_.object(h, nv::destructs());
        g_.set_object(m_, nv::return_stack(), g_.object(h, vocab::rest()).value_or(vocab::nil()));
        g_.remove_matching(h, rdf::any, rdf::any);
        if (caller)
            g_.set_object(m_, nv::has_frame(), *caller);
        bool drop = discards && truth(*discards);
        if (destructs)
            destroy_object(g_, *destructs);
        if (constructs) {
            check_min(g_, *constructs);
            if (!drop)
                push(*constructs);
        } else if (!drop) {
            if (!value)
                throw Fault("method returned no value");
            push(*value);
        }
        if (to == vocab::nil())
            block_end();
        else
            jump(to);
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
            VarMode mode = VarMode::Replace;
            if (in.op == Opcode::SetPlus)
                mode = VarMode::Add;
            else if (in.op == Opcode::SetMinus)
                mode = VarMode::Remove;
            else if (in.op == Opcode::SetClear)
                mode = VarMode::Clear;
            set_var(target.name, src, target.declares, mode);
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
    Term m_;
    const CommandLog& log_;
};

} // namespace

std::string_view status_name(Status s) {
    switch (s) {
    case Status::Running: return "running";
    case Status::Halted: return "halted";
    case Status::Finished: return "finished";
    case Status::Faulted: return "faulted";
    }
    return "?";
}

Term Fhat::boot(bool method_reuse) {
    if (!nv::has_instruction_ontology(g_))
        throw Error("instruction ontology missing from graph");
    Term m = rdf::mint_uuid_uri(gen_);
    g_.insert(m, vocab::type(), nv::fhat());
    g_.insert(m, nv::halt(), vocab::boolean(false));
    g_.insert(m, nv::method_reuse(), vocab::boolean(method_reuse));
    g_.insert(m, nv::operand_stack(), vocab::nil());
    g_.insert(m, nv::block_stack(), vocab::nil());
    g_.insert(m, nv::return_stack(), vocab::nil());
    return m;
}

Term Fhat::create_object(const Term& machine, const Term& cls) {
    try {
        return Machine(g_, gen_, machine, log_).create_object(cls);
    } catch (const Fault& f) {
        throw Error(f.what());
    }
}

void Fhat::start_program(const Term& machine, const Term& cls, const std::string& method) {
    if (!g_.contains({machine, vocab::type(), nv::fhat()}))
        throw Error("no machine " + machine.value());
    if (g_.object(machine, nv::fault()))
        throw Error("machine faulted");
    if (g_.object(machine, nv::program_location()))
        throw Error("machine busy");
    g_.begin_journal();
    try {
        Machine mc(g_, gen_, machine, log_);
        Term o = mc.create_object(cls);
        auto mi = mc.find_method(o, method, 0);
        if (!mi)
            throw Fault("class " + cls.value() + " has no method " + method + "()");
        g_.set_object(machine, nv::halt(), vocab::boolean(false));
        mc.invoke(*mi, o, {}, {}, false);
        g_.commit();
    } catch (const Error& e) {
        g_.rollback();
        throw Error(e.what());
    }
}

Status Fhat::status(const Term& machine) const {
    if (g_.object(machine, nv::fault()))
        return Status::Faulted;
    if (!g_.object(machine, nv::program_location()))
        return Status::Finished;
    auto h = g_.object(machine, nv::halt());
    if (h && truth(*h))
        return Status::Halted;
    return Status::Running;
}

std::optional<std::string> Fhat::fault(const Term& machine) const {
    if (auto f = g_.object(machine, nv::fault()))
        return f->value();
    return std::nullopt;
}

Status Fhat::step(const Term& machine) {
    Status s = status(machine);
    if (s != Status::Running)
        return s;
    auto pl = g_.object(machine, nv::program_location());
    g_.begin_journal();
    try {
        Machine(g_, gen_, machine, log_).execute();
        g_.commit();
    } catch (const Error& e) {
        g_.rollback();
        g_.set_object(machine, nv::halt(), vocab::boolean(true));
        g_.set_object(machine, nv::fault(), vocab::string(e.what()));
        if (pl)
            g_.set_object(machine, nv::fault_instruction(), *pl);
    }
    return status(machine);
}

void Fhat::halt(const Term& machine) { g_.set_object(machine, nv::halt(), vocab::boolean(true)); }

bool Fhat::unhalt(const Term& machine) {
    if (g_.object(machine, nv::fault()) || !g_.object(machine, nv::program_location()))
        return false;
    g_.set_object(machine, nv::halt(), vocab::boolean(false));
    return true;
}

Status Fhat::run(const Term& machine, std::optional<std::uint64_t> max_steps) {
    std::uint64_t n = 0;
    Status s = status(machine);
    while (s == Status::Running && (!max_steps || n < *max_steps)) {
        s = step(machine);
        ++n;
    }
    return s;
}

std::vector<Term> Fhat::operand_stack(const Term& machine) const {
    std::vector<Term> out;
    Term h = g_.object(machine, nv::operand_stack()).value_or(vocab::nil());
    std::set<Term> seen;
    while (h != vocab::nil() && seen.insert(h).second) {
        if (auto v = g_.object(h, vocab::first()))
            out.push_back(*v);
        h = g_.object(h, vocab::rest()).value_or(vocab::nil());
    }
    std::reverse(out.begin(), out.end());
    return out;
}

std::optional<std::vector<Term>> Fhat::variable(const Term& machine, const std::string& name) const {
    auto f = g_.object(machine, nv::has_frame());
    if (!f)
        return std::nullopt;
    for (const auto& v : g_.objects(*f, nv::has_variable())) {
        auto n = g_.object(v, nv::has_name());
        if (n && n->value() == name)
            return g_.objects(v, nv::has_value());
    }
    return std::nullopt;
}

std::vector<Term> machines(const rdf::Graph& g) { return g.subjects(vocab::type(), nv::fhat()); }

rdf::Graph snapshot_graph(const rdf::Graph& g, const Term& machine) {
    const auto props = api::declared_properties(g);

    rdf::Graph out;
    std::set<Term> seen{machine};
    std::deque<Term> queue{machine};
    for (const auto& cls : api::declared_classes(g))
        for (const auto& o : g.subjects(vocab::type(), cls))
            if (seen.insert(o).second)
                queue.push_back(o);
    auto visit = [&](const Term& t) {
        if (t.is_uri() && rdf::is_minted(t) && seen.insert(t).second)
            queue.push_back(t);
    };
    while (!queue.empty()) {
        Term n = queue.front();
        queue.pop_front();
        for (const auto& t : g.match(n, rdf::any, rdf::any)) {
            out.insert(t);
            visit(t.object);
        }
        for (const auto& p : props)
            for (const auto& s : g.subjects(p, n)) {
                out.insert(s, p, n);
                visit(s);
            }
    }
    for (const auto& t : g.match(rdf::any, nv::prefix(), rdf::any)) {
        out.insert(t);
        for (const auto& u : g.match(t.subject, vocab::type(), rdf::any))
            out.insert(u);
    }
    return out;
}

std::string snapshot(const rdf::Graph& g, const Term& machine) {
    return rdf::serialize_ntriples(snapshot_graph(g, machine));
}

Term resume(const std::string& ntriples, rdf::Graph& g) {
    rdf::Graph incoming = rdf::parse_ntriples(ntriples);
    auto ms = machines(incoming);
    if (ms.empty())
        throw Error("snapshot holds no machine");
    if (!nv::has_instruction_ontology(g))
        throw Error("instruction ontology missing from graph");
    g.merge(incoming);
    Term m = ms.front();
    if (!g.object(m, nv::fault()) && g.object(m, nv::program_location()))
        g.set_object(m, nv::halt(), vocab::boolean(false));
    return m;
}

} // namespace neno::vm
