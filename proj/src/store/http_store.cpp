#include <httplib.h>

#include "neno/rdf/ntriples.hpp"
#include "neno/store/store.hpp"

namespace neno::store {

struct HttpStore::Impl {
    explicit Impl(const std::string& base) : client(base) {
        client.set_connection_timeout(5);
        client.set_read_timeout(120);
        client.set_write_timeout(120);
    }
    httplib::Client client;
};

namespace {

// scheme://host:port of a URL, dropping any path.
std::string base_of(const std::string& url) {
    auto start = url.find("://");
    auto slash = url.find('/', start == std::string::npos ? 0 : start + 3);
    return slash == std::string::npos ? url : url.substr(0, slash);
}

} // namespace

HttpStore::HttpStore(const std::string& url) : url_(url), impl_(std::make_unique<Impl>(base_of(url))) {}
HttpStore::~HttpStore() = default;

namespace {

std::string checked(const httplib::Result& r, const std::string& url, const std::string& what) {
    if (!r)
        throw Unreachable("cannot reach store at " + url + " (" + httplib::to_string(r.error()) + ")");
    if (r->status != 200)
        throw StoreError(what + " failed with HTTP " + std::to_string(r->status) + ": " + r->body);
    return r->body;
}

} // namespace

rdf::Graph HttpStore::load() {
    auto body = checked(impl_->client.Get("/dump"), url_, "dump");
    try {
        return rdf::parse_ntriples(body);
    } catch (const ParseError& e) {
        throw StoreError(std::string("store sent malformed N-Triples: ") + e.what());
    }
}

std::string HttpStore::sparql(const std::string& text) {
    return checked(impl_->client.Post("/sparql", text, "application/sparql-update"), url_, "request");
}

void HttpStore::apply(const Delta& d) {
    if (!d.empty())
        sparql(delta_requests(d));
}

std::optional<std::string> HttpStore::claim(const rdf::Term& machine, const std::string& token, bool steal) {
    httplib::Params params{{"machine", machine.value()}, {"token", token}, {"steal", steal ? "1" : "0"}};
    auto r = impl_->client.Post("/claim", params);
    if (r && r->status == 409)
        return r->body;
    checked(r, url_, "claim");
    return std::nullopt;
}

void HttpStore::release(const rdf::Term& machine, const std::string& token) {
    httplib::Params params{{"machine", machine.value()}, {"token", token}};
    checked(impl_->client.Post("/release", params), url_, "release");
}

} // namespace neno::store
