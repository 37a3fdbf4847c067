#include "neno/store/server.hpp"

#include <httplib.h>

#include <filesystem>
#include <fstream>
#include <shared_mutex>
#include <sstream>

#include "neno/rdf/ntriples.hpp"
#include "neno/sparql/sparql.hpp"
#include "neno/store/store.hpp"
#include "neno/vm/exec.hpp"
#include "neno/vm/fhat.hpp"

namespace neno::store {

struct Server::Impl {
    std::string path;
    rdf::Graph g;
    mutable std::shared_mutex mu;
    httplib::Server http;
};

namespace {

Response bad(const std::string& msg) { return {400, msg + "\n"}; }

} // namespace

Server::Server(std::string persist_path) : impl_(std::make_unique<Impl>()) {
    impl_->path = std::move(persist_path);
    if (!impl_->path.empty() && std::filesystem::exists(impl_->path)) {
        std::ifstream in(impl_->path, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        impl_->g = rdf::parse_ntriples(ss.str());
    }

    auto reply = [](httplib::Response& res, const Response& r) {
        res.status = r.status;
        res.set_content(r.body, "text/plain; charset=utf-8");
    };
    auto& http = impl_->http;
    http.Post("/sparql", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, sparql(req.body));
    });
    http.Get("/dump", [this](const httplib::Request&, httplib::Response& res) {
        res.set_content(dump(), "application/n-triples");
    });
    http.Post("/load", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, load(req.body));
    });
    http.Post("/save", [this](const httplib::Request&, httplib::Response& res) {
        save();
        res.set_content("saved\n", "text/plain");
    });
    http.Get("/machines", [this](const httplib::Request&, httplib::Response& res) {
        res.set_content(machines(), "text/plain");
    });
    http.Post("/claim", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, claim(req.get_param_value("machine"), req.get_param_value("token"),
                         req.get_param_value("steal") == "1"));
    });
    http.Post("/release", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, release(req.get_param_value("machine"), req.get_param_value("token")));
    });
}

Server::~Server() = default;

int Server::bind(const std::string& host, int port) {
    if (port == 0)
        return impl_->http.bind_to_any_port(host);
    if (!impl_->http.bind_to_port(host, port))
        throw StoreError("cannot bind " + host + ":" + std::to_string(port));
    return port;
}

void Server::serve() { impl_->http.listen_after_bind(); }

void Server::stop() {
    impl_->http.stop();
    save();
}

void Server::save() const {
    if (impl_->path.empty())
        return;
    std::string text;
    {
        std::shared_lock lock(impl_->mu);
        text = rdf::serialize_ntriples(impl_->g);
    }
    std::string tmp = impl_->path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << text;
    }
    std::filesystem::rename(tmp, impl_->path);
}

rdf::Graph Server::graph() const {
    std::shared_lock lock(impl_->mu);
    return impl_->g;
}

Response Server::sparql(const std::string& body) {
    std::vector<sparql::Request> reqs;
    try {
        rdf::NamespaceMap ns;
        {
            std::shared_lock lock(impl_->mu);
            ns = vm::program_namespaces(impl_->g);
        }
        reqs = sparql::parse_requests(body, ns);
    } catch (const Error& e) {
        return bad(e.what());
    }
    if (reqs.empty())
        return bad("empty request");
    std::size_t queries = 0;
    for (const auto& r : reqs)
        queries += std::holds_alternative<sparql::Query>(r);
    if (queries > 0) {
        if (reqs.size() != 1)
            return bad("a query must be sent on its own");
        const auto& q = std::get<sparql::Query>(reqs.front());
        std::shared_lock lock(impl_->mu);
        if (q.form == sparql::QueryForm::Ask)
            return {200, sparql::eval_ask(impl_->g, q) ? "true\n" : "false\n"};
        std::vector<std::string> columns = q.projected;
        if (columns.empty()) {
            auto vars = sparql::variables_of(q.where);
            columns.assign(vars.begin(), vars.end());
        }
        return {200, sparql::bindings_to_tsv(sparql::eval_select(impl_->g, q), columns)};
    }
    std::unique_lock lock(impl_->mu);
    auto& g = impl_->g;
    g.begin_journal();
    std::size_t changed = 0;
    try {
        for (const auto& r : reqs)
            changed += sparql::exec_update(g, std::get<sparql::UpdateCommand>(r));
    } catch (const Error& e) {
        g.rollback();
        return bad(e.what());
    }
    g.commit();
    return {200, std::to_string(changed) + "\n"};
}

Response Server::load(const std::string& body) {
    rdf::Graph incoming;
    try {
        incoming = rdf::parse_ntriples(body);
    } catch (const Error& e) {
        return bad(e.what());
    }
    std::unique_lock lock(impl_->mu);
    std::size_t before = impl_->g.size();
    impl_->g.merge(incoming);
    return {200, std::to_string(impl_->g.size() - before) + "\n"};
}

Response Server::claim(const std::string& machine, const std::string& token, bool steal) {
    if (machine.empty() || token.empty())
        return bad("claim needs machine and token");
    std::unique_lock lock(impl_->mu);
    if (auto holder = claim_in(impl_->g, rdf::Term::uri(machine), token, steal))
        return {409, *holder};
    return {200, "claimed\n"};
}

Response Server::release(const std::string& machine, const std::string& token) {
    if (machine.empty() || token.empty())
        return bad("release needs machine and token");
    std::unique_lock lock(impl_->mu);
    release_in(impl_->g, rdf::Term::uri(machine), token);
    return {200, "released\n"};
}

std::string Server::dump() const {
    std::shared_lock lock(impl_->mu);
    return rdf::serialize_ntriples(impl_->g);
}

std::string Server::machines() const {
    std::shared_lock lock(impl_->mu);
    std::string out;
    for (const auto& m : vm::machines(impl_->g))
        out += m.value() + "\n";
    return out;
}

} // namespace neno::store
