#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "neno/error.hpp"

namespace neno::lang {

// Source location that never participates in structural equality, so that
// parse(print(ast)) == ast can be checked with the defaulted operators.
struct Loc {
    SourcePos pos;
    friend bool operator==(const Loc&, const Loc&) { return true; }
};

// [min..max]; max empty means unbounded (`*`).
struct Cardinality {
    std::uint64_t min = 0;
    std::optional<std::uint64_t> max = 1;

    bool singular() const { return max && *max <= 1; }
    bool contains(std::uint64_t n) const { return n >= min && (!max || n <= *max); }
    friend bool operator==(const Cardinality&, const Cardinality&) = default;
};

enum class ExprKind {
    Literal,       // text = lexical form, type = datatype as written (empty when inferred)
    Uri,           // text = IRI or prefixed name as written
    Var,           // text = name; type = optional inline type annotation (`xsd:integer i`)
    This,
    Field,         // args[0].text ; text = field name
    InverseField,  // args[0]..text
    Index,         // args[0] = field access, args[1] = index
    Count,         // args[0] = field access or variable, `f*`
    Call,          // args[0] = receiver, args[1..] = arguments; text = method name
    New,           // text = class name; args = constructor arguments
    Binary,        // text = operator; args = {lhs, rhs}
    Not,           // args[0]
    SetQuery,      // args = {lhs, rhs}, `=?`
    TypeOf,        // args[0] typeof text
    TypeOfQuery,   // args[0] typeof?
};

struct Expr {
    ExprKind kind = ExprKind::Literal;
    Loc loc;
    std::string text;
    std::string type;
    std::vector<Expr> args;

    friend bool operator==(const Expr&, const Expr&) = default;
};

enum class StmtKind {
    Block,     // body
    VarDecl,   // type name card? ; op ("=", "<?" or empty) ; exprs = {init}?
    Assign,    // exprs = {target, value}; op in {"=", "=+", "=-"}
    SetClear,  // exprs = {target}
    NetQuery,  // exprs = {target, query}
    Increment, // exprs = {target}; op in {"++", "--"}
    If,        // exprs = {cond}; body ; else_body (may hold a nested If)
    While,     // exprs = {cond}; body
    For,       // init (0..1 stmts), exprs = {cond}, update (0..1 stmts), body
    ForEach,   // type name ; exprs = {collection}; body
    Return,    // exprs = {value}?
    Delete,    // exprs = {object}
    ExprStmt,  // exprs = {expr}
};

struct Stmt {
    StmtKind kind = StmtKind::Block;
    Loc loc;
    std::string type;
    std::string name;
    std::optional<Cardinality> card;
    std::string op;
    std::vector<Expr> exprs;
    std::vector<Stmt> init;
    std::vector<Stmt> update;
    std::vector<Stmt> body;
    std::vector<Stmt> else_body;
    bool has_else = false;

    friend bool operator==(const Stmt&, const Stmt&) = default;
};

struct FieldDecl {
    Loc loc;
    std::string range;
    std::string name;
    Cardinality card;

    friend bool operator==(const FieldDecl&, const FieldDecl&) = default;
};

struct Param {
    std::string type;
    std::string name;

    friend bool operator==(const Param&, const Param&) = default;
};

enum class MethodKind { Ordinary, Constructor, Destructor };

struct MethodDecl {
    Loc loc;
    MethodKind kind = MethodKind::Ordinary;
    std::optional<std::string> return_type;
    std::string name;  // bare name; `!`/`~` are carried by kind
    std::vector<Param> params;
    std::vector<Stmt> body;

    friend bool operator==(const MethodDecl&, const MethodDecl&) = default;
};

struct ClassDecl {
    Loc loc;
    std::string superclass;
    std::string name;
    std::vector<FieldDecl> fields;
    std::vector<MethodDecl> methods;

    friend bool operator==(const ClassDecl&, const ClassDecl&) = default;
};

struct SourceUnit {
    std::vector<std::pair<std::string, std::string>> prefixes;
    std::vector<ClassDecl> classes;

    friend bool operator==(const SourceUnit&, const SourceUnit&) = default;
};

} // namespace neno::lang
