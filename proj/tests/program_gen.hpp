#pragma once

#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "neno/compiler/ontology.hpp"
#include "neno/rdf/vocab.hpp"
#include "neno/vm/fhat.hpp"

namespace testutil {

// Random programs over integer locals. Every local of method mK is named
// mK_..., so a frame holding two prefixes has leaked a variable.
class ProgramGen {
public:
    explicit ProgramGen(std::uint32_t seed) : rng_(seed) {}

    std::string program() {
        methods_ = pick(0, 3);
        std::ostringstream out;
        out << "owl:Thing demo:G {\n  xsd:integer acc[0..*];\n";
        for (int k = 0; k < methods_; ++k) {
            Scope s{"m" + std::to_string(k), {"m" + std::to_string(k) + "_p"}, {}};
            out << "  xsd:integer m" << k << "(xsd:integer m" << k << "_p) {\n";
            out << body(s, k, 0, pick(1, 4));
            out << "    return " << expr(s, k, 0) << ";\n  }\n";
        }
        Scope s{"mm", {}, {}};
        out << "  main() {\n" << body(s, -1, 0, pick(2, 6)) << "  }\n}\n";
        return out.str();
    }

private:
    struct Scope {
        std::string prefix;
        std::vector<std::string> vars;     // assignable
        std::vector<std::string> counters; // readable only
    };

    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

    std::string fresh(const Scope& s) { return s.prefix + "_v" + std::to_string(next_++); }

    std::string expr(const Scope& s, int method, int depth) {
        int r = pick(0, depth > 1 ? 1 : 5);
        std::vector<std::string> readable = s.vars;
        readable.insert(readable.end(), s.counters.begin(), s.counters.end());
        if (r == 1 && !readable.empty())
            return readable[pick(0, static_cast<int>(readable.size()) - 1)];
        if (r == 2 || r == 3)
            return "(" + expr(s, method, depth + 1) + (r == 2 ? " + " : " - ") + expr(s, method, depth + 1) + ")";
        if (r == 4 && method + 1 < methods_)
            return "this.m" + std::to_string(pick(method + 1, methods_ - 1)) + "(" + expr(s, method, depth + 1) +
                   ")";
        if (r == 5)
            return "(" + expr(s, method, depth + 1) + " * " + std::to_string(pick(0, 3)) + ")";
        return std::to_string(pick(-5, 20));
    }

    std::string body(Scope s, int method, int depth, int n) {
        std::string out;
        std::string ind(4 + 2 * depth, ' ');
        bool open_if = false; // a block right after an else-less if does not parse
        for (int i = 0; i < n; ++i) {
            int r = pick(0, depth >= 3 ? 2 : 5);
            if (r == 3 && open_if)
                r = 2;
            open_if = false;
            if (r == 0) {
                auto v = fresh(s);
                out += ind + "xsd:integer " + v + " = " + expr(s, method, 0) + ";\n";
                s.vars.push_back(v);
            } else if (r == 1 && !s.vars.empty()) {
                out += ind + s.vars[pick(0, static_cast<int>(s.vars.size()) - 1)] + " = " + expr(s, method, 0) +
                       ";\n";
            } else if (r <= 2) {
                out += ind + "this.acc =+ " + expr(s, method, 0) + ";\n";
            } else if (r == 3) {
                out += ind + "{\n" + body(s, method, depth + 1, pick(1, 3)) + ind + "}\n";
            } else if (r == 4) {
                out += ind + "if (" + expr(s, method, 1) + " < " + expr(s, method, 1) + ") {\n" +
                       body(s, method, depth + 1, pick(1, 3)) + ind + "}\n";
                if (pick(0, 1))
                    out.insert(out.size() - 1, " else {\n" + body(s, method, depth + 1, pick(1, 2)) + ind + "}");
                else
                    open_if = true;
            } else {
                auto c = fresh(s);
                out += ind + "xsd:integer " + c + " = 0;\n";
                Scope inner = s;
                inner.counters.push_back(c);
                out += ind + "while (" + c + " < " + std::to_string(pick(0, 3)) + ") {\n" +
                       body(inner, method, depth + 1, pick(1, 3)) + ind + "  " + c + "++;\n" + ind + "}\n";
                s.counters.push_back(c);
            }
        }
        return out;
    }

    std::mt19937 rng_;
    int methods_ = 0;
    int next_ = 0;
};

inline std::vector<neno::rdf::Term> list_cells(const neno::rdf::Graph& g, neno::rdf::Term head) {
    using namespace neno;
    std::vector<rdf::Term> out;
    while (head != vocab::nil()) {
        out.push_back(head);
        auto rest = g.object(head, vocab::rest());
        if (!rest)
            break;
        head = *rest;
    }
    return out;
}

// Machine-state invariants that must hold between any two steps. Returns the
// first violation.
inline std::optional<std::string> invariant_violation(const neno::rdf::Graph& g, const neno::rdf::Term& m,
                                                      neno::vm::Status st) {
    using namespace neno;
    using rdf::Term;
    std::size_t pcs = g.count(m, nv::program_location(), rdf::any);
    if (pcs > 1 || (st == vm::Status::Running && pcs != 1))
        return std::to_string(pcs) + " program locations";

    std::set<std::pair<Term, Term>> open; // (block, frame)
    std::set<Term> live;
    for (const auto& c : list_cells(g, g.object(m, nv::block_stack()).value_or(vocab::nil()))) {
        auto b = g.object(c, vocab::first());
        auto f = g.object(c, nv::has_frame());
        if (!b || !f)
            return std::string("malformed block stack cell");
        open.emplace(*b, *f);
        live.insert(*f);
    }
    for (const auto& c : list_cells(g, g.object(m, nv::return_stack()).value_or(vocab::nil())))
        if (auto f = g.object(c, nv::has_frame()))
            live.insert(*f);
    if (auto f = g.object(m, nv::has_frame()))
        live.insert(*f);

    for (const auto& f : g.subjects(vocab::type(), nv::frame())) {
        if (!live.count(f))
            return "orphan frame " + f.value();
        std::set<std::string> prefixes;
        for (const auto& v : g.objects(f, nv::has_variable())) {
            auto name = g.object(v, nv::has_name());
            auto b = g.object(v, nv::from_block());
            if (!name || !b)
                return std::string("variable without name or block");
            if (!open.count({*b, f}))
                return "'" + name->value() + "' outlived its block";
            if (name->value() != "this")
                prefixes.insert(name->value().substr(0, name->value().find('_')));
        }
        if (prefixes.size() > 1)
            return std::string("frame mixes variables of different methods");
    }
    return std::nullopt;
}

} // namespace testutil
