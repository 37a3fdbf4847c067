#include <algorithm>
#include <cctype>
#include <regex>

#include "neno/compiler/compiler.hpp"
#include "neno/compiler/ontology.hpp"
#include "neno/rdf/vocab.hpp"
#include "neno/sparql/sparql.hpp"
#include "neno/vm/values.hpp"

namespace neno::compiler {

namespace {

using lang::Expr;
using lang::ExprKind;
using lang::Stmt;
using lang::StmtKind;
using nv::Opcode;
using rdf::Term;

const std::string kAny = vocab::rdfs("Resource");

class Emitter {
public:
    Emitter(rdf::Graph& g, rdf::UuidGenerator& gen) : g_(g), gen_(gen) {}

    void set_namespace(std::string ns) { ns_ = std::move(ns); }

    Term mint() { return Term::uri(ns_ + gen_.next()); }

    Term klass(const Term& super) {
        Term c = mint();
        g_.insert(c, vocab::type(), vocab::owl_uri("Class"));
        g_.insert(c, vocab::sub_class_of(), super);
        return c;
    }

    Term op(Opcode o) { return klass(nv::opcode_class(o)); }

    void link(const Term& c, const Term& p, const Term& d) { restrict(c, p, vocab::owl_uri("allValuesFrom"), d); }
    void value(const Term& c, const Term& p, const Term& v) { restrict(c, p, vocab::owl_uri("hasValue"), v); }
    void cardinality(const Term& c, const Term& p, const char* which, std::uint64_t n) {
        restrict(c, p, vocab::owl_uri(which), Term::literal(std::to_string(n), vocab::xsd("nonNegativeInteger")));
    }

    rdf::Graph& graph() { return g_; }

private:
    void restrict(const Term& c, const Term& p, const Term& kind, const Term& v) {
        Term r = mint();
        g_.insert(r, vocab::type(), vocab::owl_uri("Restriction"));
        g_.insert(r, vocab::owl_uri("onProperty"), p);
        g_.insert(r, kind, v);
        g_.insert(c, vocab::sub_class_of(), r);
    }

    rdf::Graph& g_;
    rdf::UuidGenerator& gen_;
    std::string ns_;
};

struct Hole {
    Term cls;
    Term prop;
};
using Holes = std::vector<Hole>;

// A straight-line piece of code under construction: its first instruction
// and the dangling edges that continue it.
struct Seq {
    std::optional<Term> entry;
    Holes exits;
};

struct Typed {
    std::string type;
    bool multi = false;
};

struct VarInfo {
    std::string type;
    lang::Cardinality card;
};

// Context for the top-level read that feeds an assignment.
struct ReadCtx {
    std::string select_var = "v";
    std::optional<std::uint64_t> limit;
};

bool is_sparql_name(const std::string& s) {
    static const std::regex re("[A-Za-z][A-Za-z0-9]*");
    return std::regex_match(s, re);
}

std::string lower_first(std::string s) {
    if (!s.empty())
        s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
    return s;
}

bool is_class_type(const std::string& t) {
    return t != kAny && !vm::is_known_datatype(t);
}

bool bare_number(const Expr& e) { return e.kind == ExprKind::Literal && e.type.empty(); }

bool readable(const Expr& e) {
    switch (e.kind) {
    case ExprKind::Literal: case ExprKind::Uri: case ExprKind::Var: case ExprKind::This:
    case ExprKind::Field: case ExprKind::InverseField: case ExprKind::Index: case ExprKind::Count:
        return true;
    default:
        return false;
    }
}

bool is_comparison(const std::string& op) {
    return op == "==" || op == "!=" || op == "<" || op == "<=" || op == ">" || op == ">=";
}

sparql::PatternTerm var(std::string name) { return sparql::Variable{std::move(name)}; }
sparql::PatternTerm iri(const std::string& s) { return Term::uri(s); }

// Every path through the statements ends in a return.
bool returns(const std::vector<Stmt>& body) {
    if (body.empty())
        return false;
    const auto& last = body.back();
    switch (last.kind) {
    case StmtKind::Return: return true;
    case StmtKind::Block: return returns(last.body);
    case StmtKind::If: return last.has_else && returns(last.body) && returns(last.else_body);
    default: return false;
    }
}

class MethodCompiler {
public:
    MethodCompiler(Emitter& em, const SymbolTable& st, const ClassInfo& cls, const MethodInfo& m,
                   const rdf::NamespaceMap& ns)
        : em_(em), st_(st), cls_(cls), m_(m), ns_(ns) {}

    Term compile() {
        scopes_.emplace_back();
        scopes_.back()["this"] = {cls_.iri, {1, 1}};
        for (const auto& p : m_.params)
            scopes_.back()[p.name] = {p.type, {1, 1}};
        Term root = em_.op(Opcode::Block);
        Seq body;
        cur_ = &body;
        pos_ = m_.decl->loc.pos;
        for (const auto& s : m_.decl->body)
            stmt(s);
        if (!m_.return_type.empty() && !returns(m_.decl->body))
            fail(m_.decl->loc.pos, "missing return value in method returning " + show(m_.return_type));
        if (m_.decl->body.empty() || m_.decl->body.back().kind != StmtKind::Return)
            append(em_.op(Opcode::Return));
        close(body);
        em_.link(root, nv::first_inst(), *body.entry);
        return root;
    }

private:
    [[noreturn]] void fail(SourcePos pos, const std::string& msg) const { throw CompileError(pos, msg); }

    std::string show(const std::string& type) const {
        if (type.empty())
            return "void";
        if (auto c = ns_.compact(type))
            return *c;
        return "<" + type + ">";
    }

    // --- code layout -------------------------------------------------------

    void patch(const Holes& holes, const Term& target) {
        for (const auto& h : holes)
            em_.link(h.cls, h.prop, target);
    }

    void append(const Term& c) {
        if (!cur_->entry)
            cur_->entry = c;
        else if (cur_->exits.empty())
            fail(pos_, "unreachable statement");
        else
            patch(cur_->exits, c);
        cur_->exits = {{c, nv::next_inst()}};
    }

    // Branch edges left open at the end of a block go to an empty block.
    void close(Seq& s) {
        Holes keep;
        for (const auto& h : s.exits) {
            if (h.prop == nv::next_inst())
                keep.push_back(h);
            else
                em_.link(h.cls, h.prop, em_.op(Opcode::Block));
        }
        s.exits = std::move(keep);
    }

    Term block_of(const std::vector<Stmt>& body) {
        Term b = em_.op(Opcode::Block);
        Seq inner;
        Seq* saved = cur_;
        cur_ = &inner;
        scopes_.emplace_back();
        for (const auto& s : body)
            stmt(s);
        scopes_.pop_back();
        cur_ = saved;
        close(inner);
        if (inner.entry)
            em_.link(b, nv::first_inst(), *inner.entry);
        return b;
    }

    // --- scope ---------------------------------------------------------------

    const VarInfo* lookup(const std::string& name) const {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it)
            if (auto f = it->find(name); f != it->end())
                return &f->second;
        return nullptr;
    }

    void declare(const std::string& name, VarInfo info, SourcePos pos) {
        if (lookup(name) || name == "machine")
            fail(pos, "variable '" + name + "' already declared");
        scopes_.back()[name] = std::move(info);
    }

    std::string hidden(const std::string& stem) { return "$" + stem + std::to_string(++hidden_); }

    // --- typing --------------------------------------------------------------

    std::string datatype_iri(const std::string& text, SourcePos pos) const {
        std::string dt = st_.resolve_type(ns_, text, pos);
        if (!vm::is_known_datatype(dt))
            fail(pos, "unsupported datatype '" + text + "'");
        return dt;
    }

    Term literal_term(const Expr& e, const std::string& hint) const {
        std::string dt;
        if (!e.type.empty()) {
            dt = datatype_iri(e.type, e.loc.pos);
        } else {
            bool real = e.text.find_first_of(".eE") != std::string::npos;
            if (vm::is_numeric_type(hint) && !(real && vm::is_integer_type(hint)))
                dt = hint;
            else
                dt = vocab::xsd(real ? "double" : "integer");
        }
        try {
            return vm::canonical(Term::literal(e.text, dt));
        } catch (const vm::ValueError& err) {
            fail(e.loc.pos, err.what());
        }
    }

    Term uri_term(const Expr& e) const {
        const std::string& t = e.text;
        if (t.size() >= 2 && t.front() == '<' && t.back() == '>')
            return Term::uri(t.substr(1, t.size() - 2));
        auto colon = t.find(':');
        if (colon != std::string::npos && ns_.has(t.substr(0, colon)))
            return Term::uri(*ns_.expand(t));
        return Term::uri(t);
    }

    const FieldInfo& field(const Typed& base, const Expr& e) const {
        bool inverse = e.kind == ExprKind::InverseField;
        if (!inverse) {
            if (!is_class_type(base.type))
                fail(e.loc.pos, "unknown property '" + e.text + "' on " + show(base.type));
            const FieldInfo* f = st_.find_field(base.type, e.text);
            if (!f)
                fail(e.loc.pos, "unknown property '" + e.text + "' on " + show(base.type));
            return *f;
        }
        const FieldInfo* hit = nullptr;
        for (const FieldInfo* f : st_.fields_named(e.text)) {
            if (base.type != kAny && !st_.is_subclass(base.type, f->range) && !st_.is_subclass(f->range, base.type))
                continue;
            if (hit && hit->property != f->property)
                fail(e.loc.pos, "ambiguous inverse property '" + e.text + "'");
            hit = f;
        }
        if (!hit)
            fail(e.loc.pos, "unknown property '" + e.text + "' referring to " + show(base.type));
        return *hit;
    }

    std::pair<std::string, std::string> operand_hints(const Expr& l, const Expr& r, const std::string& hint) {
        if (bare_number(l) && !bare_number(r))
            return {type_of(r, "").type, ""};
        if (bare_number(r) && !bare_number(l))
            return {"", type_of(l, "").type};
        if (bare_number(l) && bare_number(r))
            return {hint, hint};
        return {"", ""};
    }

    vm::Op arith_op(const std::string& op) const {
        if (op == "+") return vm::Op::Add;
        if (op == "-") return vm::Op::Subtract;
        if (op == "*") return vm::Op::Multiply;
        return vm::Op::Divide;
    }

    std::string check_op(vm::Op op, const std::string& symbol, const std::string& l, const std::string& r,
                         SourcePos pos) const {
        auto res = vm::check_operation(op, l, r);
        switch (res.verdict) {
        case vm::OpCheck::Verdict::Mismatch:
            fail(pos, "type mismatch: '" + symbol + "' on " + show(l) + " and " + show(r));
        case vm::OpCheck::Verdict::Unsupported:
            fail(pos, "unsupported datatype operation: '" + symbol + "' on " + show(l));
        case vm::OpCheck::Verdict::Ok: break;
        }
        return res.result;
    }

    bool assignable(const std::string& target, const std::string& source) const {
        if (target == source || target == kAny || source == kAny)
            return true;
        if (vm::is_numeric_type(target) && vm::is_numeric_type(source))
            return true;
        bool tc = is_class_type(target), sc = is_class_type(source);
        if (tc && sc)
            return st_.is_subclass(source, target);
        if ((tc && source == vocab::xsd("anyURI")) || (sc && target == vocab::xsd("anyURI")))
            return true;
        return false;
    }

    void check_assign(const std::string& target, const std::string& source, SourcePos pos) const {
        if (source.empty())
            fail(pos, "void value cannot be assigned");
        if (!assignable(target, source))
            fail(pos, "type mismatch: cannot assign " + show(source) + " to " + show(target));
    }

    const MethodInfo& method_for(const Expr& call) {
        Typed rt = type_of(call.args[0], "");
        if (!is_class_type(rt.type) || !st_.find_class(rt.type))
            fail(call.loc.pos, "method call on non-object type " + show(rt.type));
        std::size_t n = call.args.size() - 1;
        const MethodInfo* m = st_.find_method(rt.type, call.text, n);
        if (!m || m->kind != lang::MethodKind::Ordinary)
            fail(call.loc.pos, "unknown method '" + call.text + "' with " + std::to_string(n) +
                                   " arguments on " + show(rt.type));
        return *m;
    }

    const MethodInfo* constructor_for(const Expr& e, const std::string& cls) const {
        std::size_t n = e.args.size();
        const MethodInfo* ctor = st_.find_method(cls, "!" + local_name(cls), n);
        if (!ctor && (n > 0 || st_.has_constructor(cls)))
            fail(e.loc.pos, "no constructor of " + show(cls) + " takes " + std::to_string(n) + " arguments");
        return ctor;
    }

    std::string class_of_new(const Expr& e) const {
        std::string cls = st_.resolve_type(ns_, e.text, e.loc.pos);
        const ClassInfo* c = st_.find_class(cls);
        if (!c || c->builtin)
            fail(e.loc.pos, "cannot instantiate " + e.text);
        return cls;
    }

    Typed type_of(const Expr& e, const std::string& hint) {
        switch (e.kind) {
        case ExprKind::Literal: return {literal_term(e, hint).datatype(), false};
        case ExprKind::Uri: return {kAny, false};
        case ExprKind::Var: {
            if (const VarInfo* v = lookup(e.text))
                return {v->type, !v->card.singular()};
            if (e.text == "machine")
                return {vocab::neno("Fhat"), false};
            fail(e.loc.pos, "unknown variable '" + e.text + "'");
        }
        case ExprKind::This: return {cls_.iri, false};
        case ExprKind::Field: {
            Typed base = type_of(e.args[0], "");
            const FieldInfo& f = field(base, e);
            return {f.range, base.multi || !f.card.singular()};
        }
        case ExprKind::InverseField: {
            Typed base = type_of(e.args[0], "");
            return {field(base, e).owner, true};
        }
        case ExprKind::Index: {
            const Expr& b = e.args[0];
            if (b.kind != ExprKind::Field && b.kind != ExprKind::InverseField && b.kind != ExprKind::Var)
                fail(e.loc.pos, "index applies to a field or variable");
            Typed it = type_of(e.args[1], vocab::xsd("integer"));
            if (!vm::is_integer_type(it.type) && it.type != kAny)
                fail(e.args[1].loc.pos, "type mismatch: index must be an integer, got " + show(it.type));
            return {type_of(b, "").type, false};
        }
        case ExprKind::Count: {
            const Expr& b = e.args[0];
            if (b.kind != ExprKind::Field && b.kind != ExprKind::InverseField && b.kind != ExprKind::Var)
                fail(e.loc.pos, "count applies to a field or variable");
            type_of(b, "");
            return {vocab::xsd("integer"), false};
        }
        case ExprKind::Call: {
            const MethodInfo& m = method_for(e);
            for (std::size_t i = 1; i < e.args.size(); ++i)
                check_assign(m.params[i - 1].type, type_of(e.args[i], m.params[i - 1].type).type, e.args[i].loc.pos);
            return {m.return_type, false};
        }
        case ExprKind::New: {
            std::string cls = class_of_new(e);
            const MethodInfo* ctor = constructor_for(e, cls);
            for (std::size_t i = 0; i < e.args.size(); ++i)
                check_assign(ctor->params[i].type, type_of(e.args[i], ctor->params[i].type).type, e.args[i].loc.pos);
            return {cls, false};
        }
        case ExprKind::Binary: {
            auto [hl, hr] = operand_hints(e.args[0], e.args[1], is_comparison(e.text) ? "" : hint);
            std::string lt = type_of(e.args[0], hl).type, rt = type_of(e.args[1], hr).type;
            if (lt.empty() || rt.empty())
                fail(e.loc.pos, "void value used in expression");
            if (e.text == "==" || e.text == "!=")
                return {check_op(vm::Op::Equals, e.text, lt, rt, e.loc.pos), false};
            if (is_comparison(e.text))
                return {check_op(vm::Op::Compare, e.text, lt, rt, e.loc.pos), false};
            return {check_op(arith_op(e.text), e.text, lt, rt, e.loc.pos), false};
        }
        case ExprKind::Not: {
            std::string t = type_of(e.args[0], "").type;
            return {check_op(vm::Op::Not, "!", t, t, e.loc.pos), false};
        }
        case ExprKind::SetQuery: {
            auto l = path_of(e.args[0]), r = path_of(e.args[1]);
            if (l.steps.empty() && r.steps.empty())
                fail(e.loc.pos, "'=?' needs a field path on at least one side");
            check_op(vm::Op::Equals, "=?", l.end_type, r.end_type, e.loc.pos);
            return {vocab::xsd("boolean"), false};
        }
        case ExprKind::TypeOf:
            type_of(e.args[0], "");
            st_.resolve_type(ns_, e.text, e.loc.pos);
            return {vocab::xsd("boolean"), false};
        case ExprKind::TypeOfQuery:
            type_of(e.args[0], "");
            return {kAny, false};
        }
        fail(e.loc.pos, "unsupported expression");
    }

    // --- =? paths --------------------------------------------------------------

    struct Step {
        const FieldInfo* field;
        bool inverse;
    };
    struct Path {
        const Expr* root = nullptr;
        std::vector<Step> steps;
        std::string end_type;
    };

    Path path_of(const Expr& e) {
        std::vector<const Expr*> hops;
        const Expr* cur = &e;
        while (cur->kind == ExprKind::Field || cur->kind == ExprKind::InverseField) {
            hops.push_back(cur);
            cur = &cur->args[0];
        }
        Path p;
        p.root = cur;
        Typed t = type_of(*cur, "");
        for (auto it = hops.rbegin(); it != hops.rend(); ++it) {
            const FieldInfo& f = field(t, **it);
            bool inverse = (*it)->kind == ExprKind::InverseField;
            p.steps.push_back({&f, inverse});
            t = {inverse ? f.owner : f.range, true};
        }
        p.end_type = t.type;
        return p;
    }

    std::string ask_template(const Path& l, const Path& r) {
        std::vector<sparql::TriplePattern> where;
        int fresh = 0;
        auto next_var = [&]() { return var(++fresh == 1 ? "x" : "x" + std::to_string(fresh)); };
        auto walk = [&](const Path& p, sparql::PatternTerm from, sparql::PatternTerm end) {
            sparql::PatternTerm at = std::move(from);
            for (std::size_t i = 0; i < p.steps.size(); ++i) {
                sparql::PatternTerm to = i + 1 == p.steps.size() ? end : next_var();
                auto pred = iri(p.steps[i].field->property);
                if (p.steps[i].inverse)
                    where.push_back({to, pred, at});
                else
                    where.push_back({at, pred, to});
                at = to;
            }
        };
        if (!l.steps.empty() && !r.steps.empty()) {
            walk(l, var("_l"), var("y"));
            walk(r, var("_r"), var("y"));
        } else if (!l.steps.empty()) {
            walk(l, var("_l"), var("_r"));
        } else {
            walk(r, var("_r"), var("_l"));
        }
        sparql::Query q;
        q.form = sparql::QueryForm::Ask;
        q.where = std::move(where);
        return sparql::render(q);
    }

    // --- values and pushes -------------------------------------------------------

    Term pop() { return em_.op(Opcode::PopDirect); }

    Term local(const std::string& name) {
        Term c = em_.op(Opcode::LocalVariable);
        em_.value(c, nv::has_name(), vocab::string(name));
        return c;
    }

    Term direct(const Term& v) {
        Term c = em_.op(Opcode::LocalDirect);
        em_.value(c, nv::has_uri(), v);
        return c;
    }

    std::string read_template(const FieldInfo& f, bool inverse, const ReadCtx& ctx) const {
        sparql::Query q;
        std::string v = is_sparql_name(ctx.select_var) ? ctx.select_var : "v";
        q.projected = {v};
        if (inverse) {
            q.where = {{var(v), iri(f.property), var("_s")}};
            q.limit = ctx.limit;
        } else {
            q.where = {{var("_s"), iri(f.property), var(v)}};
        }
        return sparql::render(q);
    }

    // Value class that reads `e` without touching the operand stack, or a
    // PopDirect after code that pushes it.
    Term value_of(const Expr& e, const std::string& hint, const ReadCtx& ctx = {}) {
        switch (e.kind) {
        case ExprKind::Literal: return direct(literal_term(e, hint));
        case ExprKind::Uri: return direct(uri_term(e));
        case ExprKind::Var: type_of(e, ""); return local(e.text);
        case ExprKind::This: return local("this");
        case ExprKind::Field:
        case ExprKind::InverseField: {
            bool inverse = e.kind == ExprKind::InverseField;
            const FieldInfo& f = field(type_of(e.args[0], ""), e);
            Term base = value_of(e.args[0], "");
            Term c = em_.op(inverse ? Opcode::ObjectVariable : Opcode::FieldVariable);
            em_.link(c, nv::has_object(), base);
            em_.value(c, nv::has_property(), Term::uri(f.property));
            em_.value(c, nv::has_command(), vocab::string(read_template(f, inverse, ctx)));
            if (inverse && ctx.limit)
                em_.value(c, nv::has_limit(), vocab::integer(static_cast<long long>(*ctx.limit)));
            return c;
        }
        case ExprKind::Index: {
            type_of(e, "");
            Term base = value_of(e.args[0], "");
            Term idx = value_of(e.args[1], vocab::xsd("integer"));
            em_.link(base, nv::has_index(), idx);
            return base;
        }
        case ExprKind::Count: {
            type_of(e, "");
            Term base = value_of(e.args[0], "");
            em_.value(base, nv::has_count(), vocab::boolean(true));
            return base;
        }
        default:
            push(e, hint);
            return pop();
        }
    }

    std::string push(const Expr& e, const std::string& hint) {
        if (readable(e)) {
            Typed t = type_of(e, hint);
            Term c = em_.op(Opcode::PushValue);
            em_.link(c, nv::has_value(), value_of(e, hint));
            append(c);
            return t.type;
        }
        switch (e.kind) {
        case ExprKind::Binary: {
            std::string result = type_of(e, hint).type;
            if (is_comparison(e.text)) {
                Holes t, f;
                branch(e, t, f);
                Term pt = em_.op(Opcode::PushValue), pf = em_.op(Opcode::PushValue);
                em_.link(pt, nv::has_value(), direct(vocab::boolean(true)));
                em_.link(pf, nv::has_value(), direct(vocab::boolean(false)));
                patch(t, pt);
                patch(f, pf);
                cur_->exits = {{pt, nv::next_inst()}, {pf, nv::next_inst()}};
                return result;
            }
            auto [hl, hr] = operand_hints(e.args[0], e.args[1], hint);
            push(e.args[0], hl);
            push(e.args[1], hr);
            static const std::map<std::string, Opcode> ops{
                {"+", Opcode::Add}, {"-", Opcode::Subtract}, {"*", Opcode::Multiply}, {"/", Opcode::Divide}};
            Term c = em_.op(ops.at(e.text));
            em_.link(c, nv::has_left(), pop());
            em_.link(c, nv::has_right(), pop());
            append(c);
            return result;
        }
        case ExprKind::Not: {
            std::string result = type_of(e, hint).type;
            push(e.args[0], "");
            Term c = em_.op(Opcode::Not);
            em_.link(c, nv::has_left(), pop());
            append(c);
            return result;
        }
        case ExprKind::SetQuery: {
            type_of(e, hint);
            Path l = path_of(e.args[0]), r = path_of(e.args[1]);
            std::string ask = ask_template(l, r);
            Term lv = value_of(*l.root, ""), rv = value_of(*r.root, "");
            Term c = em_.op(Opcode::SetQuery);
            em_.link(c, nv::has_left(), lv);
            em_.link(c, nv::has_right(), rv);
            em_.value(c, nv::has_command(), vocab::string(ask));
            append(c);
            return vocab::xsd("boolean");
        }
        case ExprKind::TypeOf:
        case ExprKind::TypeOfQuery: {
            std::string result = type_of(e, hint).type;
            Term v = value_of(e.args[0], "");
            Term c = em_.op(e.kind == ExprKind::TypeOf ? Opcode::TypeOf : Opcode::TypeOfQuery);
            em_.link(c, nv::has_left(), v);
            if (e.kind == ExprKind::TypeOf)
                em_.value(c, nv::has_class(), Term::uri(st_.resolve_type(ns_, e.text, e.loc.pos)));
            append(c);
            return result;
        }
        case ExprKind::Call: {
            std::string t = invoke(e, false);
            if (t.empty())
                fail(e.loc.pos, "void method '" + e.text + "' used as a value");
            return t;
        }
        case ExprKind::New: return construct(e, false);
        default: break;
        }
        fail(e.loc.pos, "unsupported expression");
    }

    void branch(const Expr& e, Holes& t, Holes& f) {
        if (e.kind == ExprKind::Not) {
            type_of(e, "");
            branch(e.args[0], f, t);
            return;
        }
        if (e.kind == ExprKind::Binary && is_comparison(e.text)) {
            type_of(e, "");
            auto [hl, hr] = operand_hints(e.args[0], e.args[1], "");
            push(e.args[0], hl);
            push(e.args[1], hr);
            static const std::map<std::string, Opcode> ops{
                {"==", Opcode::Equals}, {"!=", Opcode::Equals}, {"<", Opcode::LessThan},
                {"<=", Opcode::LessThanEqual}, {">", Opcode::GreaterThan}, {">=", Opcode::GreaterThanEqual}};
            Term c = em_.op(ops.at(e.text));
            em_.link(c, nv::has_left(), pop());
            em_.link(c, nv::has_right(), pop());
            append(c);
            cur_->exits.clear();
            Hole yes{c, nv::true_inst()}, no{c, nv::false_inst()};
            if (e.text == "!=")
                std::swap(yes, no);
            t.push_back(yes);
            f.push_back(no);
            return;
        }
        std::string type = type_of(e, "").type;
        if (type != vocab::xsd("boolean") && type != kAny)
            fail(e.loc.pos, "type mismatch: condition must be xsd:boolean, got " + show(type));
        push(e, "");
        Term pt = em_.op(Opcode::PushValue);
        em_.link(pt, nv::has_value(), direct(vocab::boolean(true)));
        append(pt);
        Term c = em_.op(Opcode::Equals);
        em_.link(c, nv::has_left(), pop());
        em_.link(c, nv::has_right(), pop());
        append(c);
        cur_->exits.clear();
        t.push_back({c, nv::true_inst()});
        f.push_back({c, nv::false_inst()});
    }

    std::string invoke(const Expr& call, bool discard) {
        const MethodInfo& m = method_for(call);
        const Expr& recv = call.args[0];
        if (recv.kind == ExprKind::InverseField || type_of(recv, "").multi)
            fail(call.loc.pos, "call on a multi-valued receiver has no single value");
        Term rv = value_of(recv, "");
        for (std::size_t i = 1; i < call.args.size(); ++i) {
            const std::string& pt = m.params[i - 1].type;
            check_assign(pt, push(call.args[i], pt), call.args[i].loc.pos);
        }
        Term c = em_.op(Opcode::InvokeMethod);
        em_.link(c, nv::has_left(), rv);
        em_.value(c, nv::has_method_name(), vocab::string(m.name));
        em_.value(c, nv::has_arg_count(), vocab::integer(static_cast<long long>(call.args.size() - 1)));
        if (discard)
            em_.value(c, nv::discards_result(), vocab::boolean(true));
        append(c);
        return m.return_type;
    }

    std::string construct(const Expr& e, bool discard) {
        std::string cls = class_of_new(e);
        const MethodInfo* ctor = constructor_for(e, cls);
        for (std::size_t i = 0; i < e.args.size(); ++i) {
            const std::string& pt = ctor->params[i].type;
            check_assign(pt, push(e.args[i], pt), e.args[i].loc.pos);
        }
        Term c = em_.op(Opcode::Construct);
        em_.value(c, nv::has_class(), Term::uri(cls));
        em_.value(c, nv::has_arg_count(), vocab::integer(static_cast<long long>(e.args.size())));
        if (discard)
            em_.value(c, nv::discards_result(), vocab::boolean(true));
        append(c);
        return cls;
    }

    // --- setters -------------------------------------------------------------

    struct Target {
        Term value;
        std::string elem_type;
        const FieldInfo* field = nullptr;
        bool inverse = false;
        bool indexed = false;
        std::string var_name;
        lang::Cardinality card;
    };

    Target target_of(const Expr& e, const std::string& op) {
        Target t;
        switch (e.kind) {
        case ExprKind::Var: {
            const VarInfo* v = lookup(e.text);
            if (!v)
                fail(e.loc.pos, e.text == "machine" ? "cannot assign to machine" : "unknown variable '" + e.text + "'");
            t.value = local(e.text);
            t.elem_type = v->type;
            t.var_name = e.text;
            t.card = v->card;
            return t;
        }
        case ExprKind::Field:
        case ExprKind::InverseField: {
            t.inverse = e.kind == ExprKind::InverseField;
            t.field = &field(type_of(e.args[0], ""), e);
            if (op == "=+" && !t.inverse && t.field->card.singular())
                fail(e.loc.pos, "=+ on singular field '" + e.text + "'");
            t.elem_type = t.inverse ? t.field->owner : t.field->range;
            t.value = value_of(e, "");
            return t;
        }
        case ExprKind::Index: {
            const Expr& b = e.args[0];
            if (b.kind != ExprKind::Field || op != "=")
                fail(e.loc.pos, "indexed assignment needs '=' on a forward field");
            t.field = &field(type_of(b.args[0], ""), b);
            t.indexed = true;
            t.elem_type = t.field->range;
            t.value = value_of(e, "");
            return t;
        }
        default:
            fail(e.loc.pos, "invalid assignment target");
        }
    }

    std::string clear_var(const Target& t) const {
        std::string name;
        if (t.inverse)
            name = lower_first(local_name(t.field->owner));
        else if (is_class_type(t.field->range))
            name = lower_first(local_name(t.field->range));
        else
            name = lower_first(t.field->name.rfind("has", 0) == 0 ? t.field->name.substr(3) : t.field->name);
        return is_sparql_name(name) ? name : "x";
    }

    std::string setter_template(const Target& t, const std::string& op) const {
        auto p = iri(t.field->property);
        auto edge = [&](sparql::PatternTerm other) -> sparql::TriplePattern {
            if (t.inverse)
                return {std::move(other), p, var("_s")};
            return {var("_s"), p, std::move(other)};
        };
        using sparql::UpdateCommand;
        using sparql::UpdateKind;
        std::vector<sparql::Request> cmds;
        if (op == "=") {
            cmds.push_back(UpdateCommand{UpdateKind::Delete, {edge(var(t.indexed ? "_o" : "x"))}});
            cmds.push_back(UpdateCommand{UpdateKind::Insert, {edge(var("_v"))}});
        } else if (op == "=+") {
            cmds.push_back(UpdateCommand{UpdateKind::Insert, {edge(var("_v"))}});
        } else if (op == "=-") {
            cmds.push_back(UpdateCommand{UpdateKind::Delete, {edge(var("_v"))}});
        } else {
            cmds.push_back(UpdateCommand{UpdateKind::Delete, {edge(var(clear_var(t)))}});
        }
        return sparql::render(cmds);
    }

    void setter(Opcode opcode, const std::string& op, const Target& t, std::optional<Term> source) {
        Term c = em_.op(opcode);
        em_.link(c, nv::has_left(), t.value);
        if (source)
            em_.link(c, nv::has_right(), *source);
        if (t.field)
            em_.value(c, nv::has_command(), vocab::string(setter_template(t, op)));
        append(c);
    }

    static Opcode setter_opcode(const std::string& op) {
        if (op == "=+") return Opcode::SetPlus;
        if (op == "=-") return Opcode::SetMinus;
        if (op == "=/") return Opcode::SetClear;
        return Opcode::Set;
    }

    ReadCtx read_ctx(const std::string& var_name, const lang::Cardinality& card) const {
        ReadCtx ctx;
        if (!var_name.empty())
            ctx.select_var = var_name;
        ctx.limit = card.max;
        return ctx;
    }

    void assign(const Expr& target, const std::string& op, const Expr& value, SourcePos pos) {
        Target t = target_of(target, op);
        Typed src = type_of(value, t.elem_type);
        check_assign(t.elem_type, src.type, pos);
        Term sv = value_of(value, t.elem_type, t.var_name.empty() ? ReadCtx{} : read_ctx(t.var_name, t.card));
        setter(setter_opcode(op), op, t, sv);
    }

    // --- statements ------------------------------------------------------------

    void var_decl(const Stmt& s) {
        std::string type = st_.resolve_type(ns_, s.type, s.loc.pos);
        lang::Cardinality card = s.card.value_or(lang::Cardinality{});
        Target t;
        t.elem_type = type;
        t.var_name = s.name;
        t.card = card;
        std::optional<Term> source;
        if (s.op == "=") {
            Typed src = type_of(s.exprs[0], type);
            check_assign(type, src.type, s.exprs[0].loc.pos);
            source = value_of(s.exprs[0], type, read_ctx(s.name, card));
        } else if (s.op == "<?") {
            std::string qt = type_of(s.exprs[0], "").type;
            if (qt != vocab::xsd("string") && qt != kAny)
                fail(s.exprs[0].loc.pos, "type mismatch: query must be xsd:string, got " + show(qt));
            source = value_of(s.exprs[0], "");
        }
        if (lookup(s.name) || s.name == "machine")
            fail(s.loc.pos, "variable '" + s.name + "' already declared");
        t.value = local(s.name);
        em_.value(t.value, nv::declares(), vocab::boolean(true));
        em_.value(t.value, nv::has_type(), Term::uri(type));
        declare(s.name, {type, card}, s.loc.pos);
        setter(s.op == "<?" ? Opcode::NetQuery : Opcode::Set, "=", t, source);
    }

    void foreach_stmt(const Stmt& s) {
        std::string type = st_.resolve_type(ns_, s.type, s.loc.pos);
        Typed coll = type_of(s.exprs[0], "");
        check_assign(type, coll.type, s.exprs[0].loc.pos);
        std::string each = hidden("each"), idx = hidden("idx");
        const std::string integer = vocab::xsd("integer");

        Term outer = em_.op(Opcode::Block);
        Seq inner;
        Seq* saved = cur_;
        cur_ = &inner;
        scopes_.emplace_back();
        scopes_.back()[each] = {type, {0, std::nullopt}};
        scopes_.back()[idx] = {integer, {1, 1}};

        auto decl = [&](const std::string& name, const std::string& t, std::optional<Term> src) {
            Term v = local(name);
            em_.value(v, nv::declares(), vocab::boolean(true));
            em_.value(v, nv::has_type(), Term::uri(t));
            Term c = em_.op(Opcode::Set);
            em_.link(c, nv::has_left(), v);
            if (src)
                em_.link(c, nv::has_right(), *src);
            append(c);
        };
        decl(each, type, value_of(s.exprs[0], type, ReadCtx{"v", std::nullopt}));
        decl(idx, integer, direct(vocab::integer(0)));

        // loop head: idx < each*
        Seq head;
        cur_ = &head;
        auto push_value = [&](const Term& v) {
            Term c = em_.op(Opcode::PushValue);
            em_.link(c, nv::has_value(), v);
            append(c);
        };
        push_value(local(idx));
        Term count = local(each);
        em_.value(count, nv::has_count(), vocab::boolean(true));
        push_value(count);
        Term test = em_.op(Opcode::LessThan);
        em_.link(test, nv::has_left(), pop());
        em_.link(test, nv::has_right(), pop());
        append(test);

        // body: T name = each[idx]; ...
        Term body = em_.op(Opcode::Block);
        Seq body_seq;
        cur_ = &body_seq;
        scopes_.emplace_back();
        Term element = local(each);
        em_.link(element, nv::has_index(), local(idx));
        decl(s.name, type, element);
        declare(s.name, {type, {1, 1}}, s.loc.pos);
        for (const auto& st : s.body)
            stmt(st);
        scopes_.pop_back();
        close(body_seq);
        em_.link(body, nv::first_inst(), *body_seq.entry);
        em_.link(test, nv::true_inst(), body);

        // increment: idx = idx + 1
        Seq inc;
        cur_ = &inc;
        push_value(local(idx));
        push_value(direct(vocab::integer(1)));
        Term add = em_.op(Opcode::Add);
        em_.link(add, nv::has_left(), pop());
        em_.link(add, nv::has_right(), pop());
        append(add);
        Term set = em_.op(Opcode::Set);
        em_.link(set, nv::has_left(), local(idx));
        em_.link(set, nv::has_right(), pop());
        append(set);
        em_.link(body, nv::next_inst(), *inc.entry);
        patch(inc.exits, *head.entry);

        cur_ = &inner;
        append(*head.entry);
        inner.exits = {{test, nv::false_inst()}};
        scopes_.pop_back();
        close(inner);
        em_.link(outer, nv::first_inst(), *inner.entry);
        cur_ = saved;
        append(outer);
    }

    void for_stmt(const Stmt& s) {
        Term outer = em_.op(Opcode::Block);
        Seq inner;
        Seq* saved = cur_;
        cur_ = &inner;
        scopes_.emplace_back();
        for (const auto& i : s.init)
            stmt(i);

        Seq head;
        cur_ = &head;
        Holes t, f;
        branch(s.exprs[0], t, f);

        Term body = block_of(s.body);
        patch(t, body);
        Seq update;
        cur_ = &update;
        for (const auto& u : s.update)
            stmt(u);
        if (update.entry) {
            em_.link(body, nv::next_inst(), *update.entry);
            patch(update.exits, *head.entry);
        } else {
            em_.link(body, nv::next_inst(), *head.entry);
        }

        cur_ = &inner;
        if (!inner.entry)
            inner.entry = head.entry;
        else
            patch(inner.exits, *head.entry);
        inner.exits = f;
        scopes_.pop_back();
        close(inner);
        em_.link(outer, nv::first_inst(), *inner.entry);
        cur_ = saved;
        append(outer);
    }

    void stmt(const Stmt& s) {
        pos_ = s.loc.pos;
        if (cur_->entry && cur_->exits.empty())
            fail(s.loc.pos, "unreachable statement");
        switch (s.kind) {
        case StmtKind::Block:
            append(block_of(s.body));
            return;
        case StmtKind::VarDecl:
            var_decl(s);
            return;
        case StmtKind::Assign:
            assign(s.exprs[0], s.op, s.exprs[1], s.loc.pos);
            return;
        case StmtKind::SetClear: {
            Target t = target_of(s.exprs[0], "=/");
            if (t.indexed)
                fail(s.loc.pos, "cannot clear an indexed value");
            setter(Opcode::SetClear, "=/", t, std::nullopt);
            return;
        }
        case StmtKind::NetQuery: {
            if (s.exprs[0].kind != ExprKind::Var)
                fail(s.loc.pos, "'<?' target must be a variable");
            Target t = target_of(s.exprs[0], "=");
            std::string qt = type_of(s.exprs[1], "").type;
            if (qt != vocab::xsd("string") && qt != kAny)
                fail(s.exprs[1].loc.pos, "type mismatch: query must be xsd:string, got " + show(qt));
            setter(Opcode::NetQuery, "=", t, value_of(s.exprs[1], ""));
            return;
        }
        case StmtKind::Increment: {
            Expr one;
            one.kind = ExprKind::Literal;
            one.loc = s.loc;
            one.text = "1";
            Expr sum;
            sum.kind = ExprKind::Binary;
            sum.loc = s.loc;
            sum.text = s.op == "++" ? "+" : "-";
            sum.args = {s.exprs[0], one};
            assign(s.exprs[0], "=", sum, s.loc.pos);
            return;
        }
        case StmtKind::If: {
            Holes t, f;
            branch(s.exprs[0], t, f);
            Term then_b = block_of(s.body);
            patch(t, then_b);
            Holes exits{{then_b, nv::next_inst()}};
            if (s.has_else) {
                Term else_b = block_of(s.else_body);
                patch(f, else_b);
                exits.push_back({else_b, nv::next_inst()});
            } else {
                exits.insert(exits.end(), f.begin(), f.end());
            }
            cur_->exits = std::move(exits);
            return;
        }
        case StmtKind::While: {
            Seq head;
            Seq* saved = cur_;
            cur_ = &head;
            Holes t, f;
            branch(s.exprs[0], t, f);
            cur_ = saved;
            Term body = block_of(s.body);
            patch(t, body);
            em_.link(body, nv::next_inst(), *head.entry);
            append(*head.entry);
            cur_->exits = f;
            return;
        }
        case StmtKind::For:
            for_stmt(s);
            return;
        case StmtKind::ForEach:
            foreach_stmt(s);
            return;
        case StmtKind::Return: {
            Term c = em_.op(Opcode::Return);
            if (s.exprs.empty()) {
                if (!m_.return_type.empty())
                    fail(s.loc.pos, "missing return value in method returning " + show(m_.return_type));
            } else {
                if (m_.return_type.empty())
                    fail(s.loc.pos, "method '" + m_.decl->name + "' returns no value");
                Typed t = type_of(s.exprs[0], m_.return_type);
                check_assign(m_.return_type, t.type, s.exprs[0].loc.pos);
                em_.link(c, nv::has_value(), value_of(s.exprs[0], m_.return_type));
            }
            append(c);
            cur_->exits.clear();
            return;
        }
        case StmtKind::Delete: {
            std::string t = type_of(s.exprs[0], "").type;
            if (!is_class_type(t) && t != kAny)
                fail(s.loc.pos, "delete needs an object, got " + show(t));
            Term v = value_of(s.exprs[0], "");
            Term c = em_.op(Opcode::Destruct);
            em_.link(c, nv::has_left(), v);
            append(c);
            return;
        }
        case StmtKind::ExprStmt: {
            const Expr& e = s.exprs[0];
            if (e.kind == ExprKind::New) {
                construct(e, true);
                return;
            }
            if (e.kind != ExprKind::Call)
                fail(s.loc.pos, "expression statement has no effect");
            const Expr& recv = e.args[0];
            method_for(e);
            Typed rt = type_of(recv, "");
            if (recv.kind == ExprKind::InverseField || rt.multi) {
                // Invoke on every value of the receiver.
                std::string name = hidden("recv");
                Stmt loop;
                loop.kind = StmtKind::ForEach;
                loop.loc = s.loc;
                loop.type = "<" + rt.type + ">";
                loop.name = name;
                loop.exprs = {recv};
                Stmt call = s;
                call.exprs[0].args[0] = Expr{ExprKind::Var, recv.loc, name, "", {}};
                loop.body = {call};
                foreach_stmt(loop);
                return;
            }
            invoke(e, true);
            return;
        }
        }
    }

    Emitter& em_;
    const SymbolTable& st_;
    const ClassInfo& cls_;
    const MethodInfo& m_;
    const rdf::NamespaceMap& ns_;
    std::vector<std::map<std::string, VarInfo>> scopes_;
    Seq* cur_ = nullptr;
    SourcePos pos_;
    int hidden_ = 0;
};

Term compile_method(Emitter& em, const SymbolTable& st, const ClassInfo& cls, const MethodInfo& m,
                    const rdf::NamespaceMap& ns, const std::string& source_uri) {
    Term root = MethodCompiler(em, st, cls, m, ns).compile();
    Term mc = em.klass(nv::method());
    em.value(mc, nv::has_method_name(), vocab::string(m.name));
    em.link(mc, nv::has_block(), root);
    Term ad = em.klass(nv::argument_descriptor());
    em.link(mc, nv::has_argument_descriptor(), ad);
    for (std::size_t i = 0; i < m.params.size(); ++i) {
        Term arg = em.klass(nv::argument());
        em.value(arg, nv::has_name(), vocab::string(m.params[i].name));
        em.value(arg, nv::has_type(), Term::uri(m.params[i].type));
        em.link(ad, vocab::rdf_uri("_" + std::to_string(i + 1)), arg);
    }
    if (!m.return_type.empty())
        em.value(mc, nv::has_return_descriptor(), Term::uri(m.return_type));
    em.value(mc, nv::has_human_code(), Term::uri(source_uri));
    return mc;
}

void compile_class(Emitter& em, const SymbolTable& st, const ClassInfo& c, const rdf::NamespaceMap& ns,
                   const std::string& source_uri) {
    rdf::Graph& g = em.graph();
    Term cls = Term::uri(c.iri);
    em.set_namespace(namespace_of(c.iri));
    g.insert(cls, vocab::type(), vocab::owl_uri("Class"));
    g.insert(cls, vocab::sub_class_of(), Term::uri(c.parent));
    for (const auto& f : c.fields) {
        Term p = Term::uri(f.property);
        bool object = !vm::is_known_datatype(f.range);
        g.insert(p, vocab::type(), vocab::owl_uri(object ? "ObjectProperty" : "DatatypeProperty"));
        g.insert(p, vocab::rdfs_uri("domain"), cls);
        g.insert(p, vocab::rdfs_uri("range"), Term::uri(f.range));
        em.link(cls, p, Term::uri(f.range));
        if (f.card.min > 0)
            em.cardinality(cls, p, "minCardinality", f.card.min);
        if (f.card.max)
            em.cardinality(cls, p, "maxCardinality", *f.card.max);
    }
    for (const auto& m : c.methods)
        em.link(cls, nv::has_method(), compile_method(em, st, c, m, ns, source_uri));
}

} // namespace

rdf::Graph compile(const std::vector<SourceFile>& files, const SymbolTable& st, rdf::UuidGenerator& gen) {
    rdf::Graph g;
    Emitter em(g, gen);
    const auto standard = rdf::NamespaceMap::standard();
    for (std::size_t u = 0; u < files.size(); ++u) {
        const auto& unit = files[u].unit;
        auto ns = unit_namespaces(unit);
        for (const auto& [prefix, ns_iri] : unit.prefixes) {
            auto known = standard.namespace_of(prefix);
            if (known && rdf::NamespaceMap::join(*known, "") == rdf::NamespaceMap::join(ns_iri, ""))
                continue;
            g.insert(Term::uri(ns_iri), vocab::type(), vocab::owl_uri("Ontology"));
            g.insert(Term::uri(ns_iri), nv::prefix(), vocab::string(prefix));
        }
        for (const auto& decl : unit.classes) {
            const ClassInfo* c = st.find_class(*ns.expand(decl.name));
            compile_class(em, st, *c, ns, files[u].uri);
        }
    }
    return g;
}

} // namespace neno::compiler
