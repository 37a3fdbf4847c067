#include "neno/cli/commands.hpp"

#include <CLI11.hpp>
#include <signal.h>

#include <cstdlib>
#include <optional>
#include <thread>

#include "neno/compiler/api.hpp"
#include "neno/compiler/compiler.hpp"
#include "neno/compiler/ontology.hpp"
#include "neno/rdf/ntriples.hpp"
#include "neno/rdf/uuid.hpp"
#include "neno/store/server.hpp"
#include "neno/store/store.hpp"
#include "neno/vm/exec.hpp"
#include "neno/vm/fhat.hpp"
#include "neno/vm/rfhat.hpp"

namespace neno::cli {

namespace {

using rdf::Term;

// CLI11 reads `-vmc` as three short flags; the tools' spelling is kept by
// rewriting the multi-letter single-dash options to their long forms.
std::vector<std::string> normalize(const std::vector<std::string>& args) {
    std::vector<std::string> out;
    for (const auto& a : args)
        out.push_back(a == "-vmc" || a == "-vmi" || a == "-cm" ? "-" + a : a);
    return out;
}

// Runs CLI11 over args; returns an exit code when parsing ends the command.
std::optional<int> parse(CLI::App& app, const std::vector<std::string>& args, std::ostream& out,
                         std::ostream& err) {
    std::vector<std::string> argv_store{app.get_name()};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store)
        argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_code::ok;
    } catch (const CLI::ParseError& e) {
        err << app.get_name() << ": " << e.what() << "\n";
        return exit_code::error;
    }
    return std::nullopt;
}

std::string default_target(const std::string& given) {
    if (!given.empty())
        return given;
    if (const char* env = std::getenv(kStoreEnv))
        return env;
    return "";
}

std::unique_ptr<rdf::UuidGenerator> uuids(const std::optional<std::uint64_t>& seed) {
    return rdf::make_uuid_generator(seed);
}

// `prefix:local`, `<iri>` or a bare IRI.
std::optional<Term> resolve(const std::string& text, const rdf::NamespaceMap& ns) {
    if (text.size() > 2 && text.front() == '<' && text.back() == '>')
        return Term::uri(text.substr(1, text.size() - 2));
    if (text.find("://") != std::string::npos || text.rfind("urn:", 0) == 0)
        return Term::uri(text);
    if (auto iri = ns.expand(text))
        return Term::uri(*iri);
    return std::nullopt;
}

} // namespace

// --- nenofhat --------------------------------------------------------------

int nenofhat(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Compile Neno source to a Fhat OWL API and load it into a store", "nenofhat"};
    std::vector<std::string> files;
    std::string format = "ntriple";
    std::string target;
    std::optional<std::uint64_t> seed;
    bool ontology = false;
    app.add_option("files", files, "Neno source files");
    app.add_option("-o", format, "Output type: ntriple (n3 and xml are not supported)");
    app.add_option("-t", target, std::string("Store: http://host:port or an N-Triples file; defaults to $") +
                                     kStoreEnv + ", else standard output");
    app.add_option("--seed", seed, "Seed for reproducible UUIDs");
    app.add_flag("--ontology", ontology, "Print the instruction ontology and exit");
    if (auto code = parse(app, args, out, err))
        return *code;

    if (format != "ntriple") {
        err << "nenofhat: unsupported format '" << format << "' (only ntriple)\n";
        return exit_code::error;
    }
    if (ontology) {
        out << nv::instruction_ontology_ntriples();
        return exit_code::ok;
    }
    if (files.empty()) {
        err << "nenofhat: no source files\n";
        return exit_code::error;
    }

    std::vector<compiler::SourceFile> sources;
    for (const auto& f : files) {
        try {
            sources.push_back(compiler::load_source(f));
        } catch (const Error& e) {
            err << f << ":" << e.what() << "\n";
            return exit_code::error;
        }
    }

    target = default_target(target);
    try {
        std::unique_ptr<store::Store> st;
        rdf::Graph existing;
        if (!target.empty()) {
            st = store::open_store(target);
            existing = st->load();
        }
        auto gen = uuids(seed);
        rdf::Graph api;
        try {
            api = compiler::compile(sources, *gen, &existing);
        } catch (const Error& e) {
            err << "nenofhat: " << e.what() << "\n";
            return exit_code::error;
        }
        if (!nv::has_instruction_ontology(existing))
            api.merge(nv::instruction_ontology());
        store::Delta d;
        for (const auto& t : api.triples())
            if (!existing.contains(t))
                d.added.insert(t);
        if (!st) {
            out << rdf::serialize_ntriples(d.added);
            return exit_code::ok;
        }
        st->apply(d);
        out << d.added.size() << " triples written to " << st->describe() << "\n";
        return exit_code::ok;
    } catch (const store::Unreachable& e) {
        err << "nenofhat: " << e.what() << "\n";
        return exit_code::unreachable;
    } catch (const Error& e) {
        err << "nenofhat: " << e.what() << "\n";
        return exit_code::error;
    }
}

// --- fhat ------------------------------------------------------------------

namespace {

struct RunOptions {
    std::string vm_class, vm_instance, cls, method, target, engine = "fhat";
    std::optional<std::uint64_t> max_steps, seed;
    bool reuse = true, steal = false;
};

int report(vm::Status s, const Term& m, const std::optional<std::string>& fault, std::ostream& out,
           std::ostream& err) {
    switch (s) {
    case vm::Status::Finished:
        out << "finished " << m.value() << "\n";
        return exit_code::ok;
    case vm::Status::Halted:
    case vm::Status::Running:
        out << "halted " << m.value() << "\n";
        return exit_code::ok;
    case vm::Status::Faulted:
        err << "faulted " << m.value() << ": " << fault.value_or("unknown fault") << "\n";
        return exit_code::fault;
    }
    return exit_code::error;
}

int run_fresh(const RunOptions& o, store::Store& st, std::ostream& out, std::ostream& err) {
    rdf::Graph g = st.load();
    if (!nv::has_instruction_ontology(g)) {
        err << "fhat: no compiled API in " << st.describe() << " (run nenofhat first)\n";
        return exit_code::error;
    }
    auto ns = vm::program_namespaces(g);
    auto vmc = resolve(o.vm_class, ns);
    if (!vmc || *vmc != nv::fhat()) {
        err << "fhat: unknown virtual machine class '" << o.vm_class << "' (expected neno:Fhat)\n";
        return exit_code::error;
    }
    auto cls = resolve(o.cls, ns);
    if (!cls || !api::is_declared_class(g, *cls)) {
        err << "fhat: no class '" << o.cls << "' in " << st.describe() << "\n";
        return exit_code::error;
    }
    bool found = false;
    for (const auto& m : api::methods_of(g, *cls))
        found = found || (m.name == o.method && m.arity == 0);
    if (!found) {
        err << "fhat: class " << cls->value() << " has no method " << o.method << "()\n";
        return exit_code::error;
    }

    const rdf::Graph before = g;
    auto gen = uuids(o.seed);
    if (o.engine == "rfhat") {
        vm::RFhat r(g, *gen);
        r.start_program(*cls, o.method);
        auto s = r.run();
        st.apply(store::diff(before, g));
        if (s == vm::Status::Faulted) {
            err << "faulted: " << r.fault().value_or("unknown fault") << "\n";
            return exit_code::fault;
        }
        out << "finished (r-Fhat)\n";
        return exit_code::ok;
    }
    vm::Fhat vm(g, *gen);
    Term m = vm.boot(o.reuse);
    vm.start_program(m, *cls, o.method);
    auto s = vm.run(m, o.max_steps);
    if (s == vm::Status::Running)
        vm.halt(m);
    st.apply(store::diff(before, g));
    return report(vm.status(m), m, vm.fault(m), out, err);
}

int run_resume(const RunOptions& o, store::Store& st, std::ostream& out, std::ostream& err) {
    Term m = Term::uri(o.vm_instance.size() > 2 && o.vm_instance.front() == '<'
                           ? o.vm_instance.substr(1, o.vm_instance.size() - 2)
                           : o.vm_instance);
    std::string token = store::process_token();
    if (auto holder = st.claim(m, token, o.steal)) {
        err << "fhat: " << m.value() << " is claimed by " << *holder << " (use --steal to take it)\n";
        return exit_code::claimed;
    }
    struct Release {
        store::Store& st;
        Term m;
        std::string token;
        ~Release() {
            try {
                st.release(m, token);
            } catch (...) {
            }
        }
    } release{st, m, token};

    rdf::Graph g = st.load();
    auto ms = vm::machines(g);
    if (std::find(ms.begin(), ms.end(), m) == ms.end()) {
        err << "fhat: no machine " << m.value() << " in " << st.describe() << "\n";
        return exit_code::error;
    }
    const rdf::Graph before = g;
    auto gen = uuids(o.seed);
    vm::Fhat vm(g, *gen);
    vm.unhalt(m);
    auto s = vm.run(m, o.max_steps);
    if (s == vm::Status::Running)
        vm.halt(m);
    st.apply(store::diff(before, g));
    return report(vm.status(m), m, vm.fault(m), out, err);
}

} // namespace

int fhat(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Run a Fhat machine against a store", "fhat"};
    RunOptions o;
    std::string reuse = "true";
    auto* vmc = app.add_option("--vmc", o.vm_class, "Virtual machine class (-vmc), neno:Fhat");
    auto* vmi = app.add_option("--vmi", o.vm_instance, "Virtual machine instance URI to resume (-vmi)");
    app.add_option("-c", o.cls, "Class whose method starts the program");
    app.add_option("--cm", o.method, "Start method (-cm)");
    app.add_option("-t", o.target, std::string("Store: http://host:port or an N-Triples file; defaults to $") +
                                       kStoreEnv);
    app.add_option("--engine", o.engine, "fhat or rfhat")->check(CLI::IsMember({"fhat", "rfhat"}));
    app.add_option("--max-steps", o.max_steps, "Halt after this many instructions");
    app.add_option("--seed", o.seed, "Seed for reproducible UUIDs");
    app.add_option("--reuse", reuse, "methodReuse of a fresh machine: objects share method triple-code")
        ->check(CLI::IsMember({"true", "false"}));
    app.add_flag("--steal", o.steal, "Take over a machine claimed by another process");
    vmc->excludes(vmi);
    if (auto code = parse(app, normalize(args), out, err))
        return *code;
    o.reuse = reuse == "true";

    bool fresh = !o.vm_class.empty();
    if (fresh && (o.cls.empty() || o.method.empty())) {
        err << "fhat: -vmc needs -c and -cm\n";
        return exit_code::error;
    }
    if (!fresh && o.vm_instance.empty()) {
        err << "fhat: give either -vmc/-c/-cm or -vmi\n";
        return exit_code::error;
    }
    if (o.engine == "rfhat" && (!fresh || o.max_steps)) {
        err << "fhat: the rfhat engine keeps no machine in the store, so it cannot halt or resume\n";
        return exit_code::error;
    }
    o.target = default_target(o.target);
    if (o.target.empty()) {
        err << "fhat: no store given (-t or $" << kStoreEnv << ")\n";
        return exit_code::error;
    }
    try {
        auto st = store::open_store(o.target);
        return fresh ? run_fresh(o, *st, out, err) : run_resume(o, *st, out, err);
    } catch (const store::Unreachable& e) {
        err << "fhat: " << e.what() << "\n";
        return exit_code::unreachable;
    } catch (const Error& e) {
        err << "fhat: " << e.what() << "\n";
        return exit_code::error;
    }
}

// --- neno-store --------------------------------------------------------------

int store_server(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Serve a triple store over HTTP", "neno-store"};
    std::string host = "127.0.0.1", data;
    int port = 8080;
    app.add_option("--host", host, "Address to listen on");
    app.add_option("--port", port, "Port; 0 picks a free one");
    app.add_option("--data", data, "N-Triples file loaded at start and written on save and shutdown");
    if (auto code = parse(app, args, out, err))
        return *code;

    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);
    try {
        store::Server server(data);
        int bound = server.bind(host, port);
        if (bound < 0) {
            err << "neno-store: cannot bind " << host << ":" << port << "\n";
            return exit_code::error;
        }
        out << "listening on http://" << host << ":" << bound << std::endl;
        std::thread watcher([&] {
            int sig = 0;
            sigwait(&signals, &sig);
            server.stop();
        });
        server.serve();
        watcher.join();
        return exit_code::ok;
    } catch (const Error& e) {
        err << "neno-store: " << e.what() << "\n";
        return exit_code::error;
    }
}

} // namespace neno::cli
