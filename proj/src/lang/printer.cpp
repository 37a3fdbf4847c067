#include "neno/lang/parser.hpp"
#include "neno/rdf/term.hpp"

namespace neno::lang {

namespace {

void indent(std::string& out, int depth) { out.append(static_cast<std::size_t>(depth) * 2, ' '); }

std::string params(const std::vector<Param>& ps) {
    std::string out = "(";
    for (std::size_t i = 0; i < ps.size(); ++i)
        out += (i ? ", " : "") + ps[i].type + " " + ps[i].name;
    return out + ")";
}

// Bases that can take `.f`, `[i]` or `*` without parentheses.
bool postfix_safe(const Expr& e) {
    switch (e.kind) {
    case ExprKind::Var: return e.type.empty();
    case ExprKind::This: case ExprKind::Field: case ExprKind::InverseField: case ExprKind::Index:
    case ExprKind::Call: case ExprKind::New: case ExprKind::Uri: case ExprKind::Count:
        return true;
    default:
        return false;
    }
}

std::string base(const Expr& e) {
    auto s = pretty_print(e);
    return postfix_safe(e) ? s : "(" + s + ")";
}

std::string literal(const Expr& e) {
    if (e.type.empty())
        return e.text[0] == '-' ? "(" + e.text + ")" : e.text;
    if (e.type == "xsd:boolean" && (e.text == "true" || e.text == "false"))
        return e.text;
    return "\"" + rdf::escape_string(e.text) + "\"^^" + e.type;
}

void stmt(std::string& out, const Stmt& s, int depth);

void block(std::string& out, const std::vector<Stmt>& body, int depth) {
    out += "{\n";
    for (const auto& s : body)
        stmt(out, s, depth + 1);
    indent(out, depth);
    out += "}";
}

// A statement without its terminator, as used in for-loop headers.
std::string simple(const Stmt& s) {
    switch (s.kind) {
    case StmtKind::VarDecl: {
        std::string out = s.type + " " + s.name;
        if (s.card)
            out += pretty_print(*s.card);
        if (!s.op.empty())
            out += " " + s.op + " " + pretty_print(s.exprs[0]);
        return out;
    }
    case StmtKind::Assign:
        return pretty_print(s.exprs[0]) + " " + s.op + " " + pretty_print(s.exprs[1]);
    case StmtKind::SetClear:
        return pretty_print(s.exprs[0]) + " =/";
    case StmtKind::NetQuery:
        return pretty_print(s.exprs[0]) + " <? " + pretty_print(s.exprs[1]);
    case StmtKind::Increment:
        return pretty_print(s.exprs[0]) + s.op;
    case StmtKind::ExprStmt:
        return pretty_print(s.exprs[0]);
    default:
        return "";
    }
}

void stmt(std::string& out, const Stmt& s, int depth) {
    indent(out, depth);
    switch (s.kind) {
    case StmtKind::Block:
        block(out, s.body, depth);
        break;
    case StmtKind::If:
        out += "if (" + pretty_print(s.exprs[0]) + ") ";
        block(out, s.body, depth);
        if (s.has_else) {
            out += " else ";
            block(out, s.else_body, depth);
        }
        break;
    case StmtKind::While:
        out += "while (" + pretty_print(s.exprs[0]) + ") ";
        block(out, s.body, depth);
        break;
    case StmtKind::For:
        out += "for (" + (s.init.empty() ? "" : simple(s.init[0])) + "; " + pretty_print(s.exprs[0]) + "; " +
               (s.update.empty() ? "" : simple(s.update[0])) + ") ";
        block(out, s.body, depth);
        break;
    case StmtKind::ForEach:
        out += "for (" + s.type + " " + s.name + " : " + pretty_print(s.exprs[0]) + ") ";
        block(out, s.body, depth);
        break;
    case StmtKind::Return:
        out += s.exprs.empty() ? "return;" : "return " + pretty_print(s.exprs[0]) + ";";
        break;
    case StmtKind::Delete:
        out += "delete " + pretty_print(s.exprs[0]) + ";";
        break;
    default:
        out += simple(s) + ";";
        break;
    }
    out += "\n";
}

} // namespace

std::string pretty_print(const Cardinality& c) {
    if (c.max && *c.max == c.min)
        return "[" + std::to_string(c.min) + "]";
    return "[" + std::to_string(c.min) + ".." + (c.max ? std::to_string(*c.max) : "*") + "]";
}

std::string pretty_print(const Expr& e) {
    auto args = [&](std::size_t from) {
        std::string out = "(";
        for (std::size_t i = from; i < e.args.size(); ++i)
            out += (i > from ? ", " : "") + pretty_print(e.args[i]);
        return out + ")";
    };
    switch (e.kind) {
    case ExprKind::Literal: return literal(e);
    case ExprKind::Uri: return e.text;
    case ExprKind::Var: return e.type.empty() ? e.text : e.type + " " + e.text;
    case ExprKind::This: return "this";
    case ExprKind::Field: return base(e.args[0]) + "." + e.text;
    case ExprKind::InverseField: return base(e.args[0]) + ".." + e.text;
    case ExprKind::Index: return base(e.args[0]) + "[" + pretty_print(e.args[1]) + "]";
    case ExprKind::Count: return base(e.args[0]) + "*";
    case ExprKind::Call: return base(e.args[0]) + "." + e.text + args(1);
    case ExprKind::New: return "new " + e.text + args(0);
    case ExprKind::Binary:
    case ExprKind::SetQuery:
        return "(" + pretty_print(e.args[0]) + " " + e.text + " " + pretty_print(e.args[1]) + ")";
    case ExprKind::Not: return "!(" + pretty_print(e.args[0]) + ")";
    case ExprKind::TypeOf: return "(" + pretty_print(e.args[0]) + " typeof " + e.text + ")";
    case ExprKind::TypeOfQuery: return "(" + pretty_print(e.args[0]) + " typeof?)";
    }
    return "";
}

std::string pretty_print(const SourceUnit& u) {
    std::string out;
    for (const auto& [prefix, iri] : u.prefixes)
        out += "prefix " + prefix + ": <" + iri + ">;\n";
    for (const auto& c : u.classes) {
        if (!out.empty())
            out += "\n";
        out += c.superclass + " " + c.name + " {\n";
        for (const auto& f : c.fields)
            out += "  " + f.range + " " + f.name + pretty_print(f.card) + ";\n";
        for (const auto& m : c.methods) {
            out += "\n  ";
            switch (m.kind) {
            case MethodKind::Constructor: out += "!" + m.name; break;
            case MethodKind::Destructor: out += "~" + m.name; break;
            case MethodKind::Ordinary: out += (m.return_type ? *m.return_type + " " : "") + m.name; break;
            }
            out += params(m.params) + " ";
            block(out, m.body, 1);
            out += "\n";
        }
        out += "}\n";
    }
    return out;
}

} // namespace neno::lang
