#pragma once

#include <memory>
#include <optional>
#include <string>

#include "neno/error.hpp"
#include "neno/rdf/graph.hpp"

// Where compiled APIs, objects and machines are kept between processes: an
// N-Triples file or a store server reached over HTTP.
namespace neno::store {

class StoreError : public Error {
public:
    using Error::Error;
};

// The target could not be reached at all (no server, missing directory).
class Unreachable : public StoreError {
public:
    using StoreError::StoreError;
};

struct Delta {
    rdf::Graph removed;
    rdf::Graph added;
    bool empty() const { return removed.empty() && added.empty(); }
};

Delta diff(const rdf::Graph& before, const rdf::Graph& after);

// One ground DELETE per removed triple, then one ground INSERT per added one.
std::string delta_requests(const Delta& d);

class Store {
public:
    virtual ~Store() = default;

    virtual rdf::Graph load() = 0;
    // Applied as one unit: no reader sees half of it.
    virtual void apply(const Delta& d) = 0;

    // Records (machine neno:claimedBy token). Returns the current holder's
    // token when another process holds the machine and steal is false.
    virtual std::optional<std::string> claim(const rdf::Term& machine, const std::string& token, bool steal) = 0;
    // Removes the claim if token still holds it.
    virtual void release(const rdf::Term& machine, const std::string& token) = 0;

    virtual std::string describe() const = 0;
};

// http:// targets go to a store server, anything else is a file path.
std::unique_ptr<Store> open_store(const std::string& target);

// host:pid:random, unique per process.
std::string process_token();

// The claim logic shared by every store, applied to an in-memory graph.
std::optional<std::string> claim_in(rdf::Graph& g, const rdf::Term& machine, const std::string& token, bool steal);
bool release_in(rdf::Graph& g, const rdf::Term& machine, const std::string& token);

class FileStore final : public Store {
public:
    explicit FileStore(std::string path);

    rdf::Graph load() override;
    void apply(const Delta& d) override;
    std::optional<std::string> claim(const rdf::Term& machine, const std::string& token, bool steal) override;
    void release(const rdf::Term& machine, const std::string& token) override;
    std::string describe() const override { return path_; }

private:
    template <class Fn>
    auto locked(Fn&& fn);
    rdf::Graph read() const;
    void write(const rdf::Graph& g) const;

    std::string path_;
};

class HttpStore final : public Store {
public:
    // http://host:port with an optional path, which is ignored.
    explicit HttpStore(const std::string& url);
    ~HttpStore() override;

    rdf::Graph load() override;
    void apply(const Delta& d) override;
    std::optional<std::string> claim(const rdf::Term& machine, const std::string& token, bool steal) override;
    void release(const rdf::Term& machine, const std::string& token) override;
    std::string describe() const override { return url_; }

    // Posts a request document to /sparql and returns the response body.
    std::string sparql(const std::string& text);

private:
    struct Impl;
    std::string url_;
    std::unique_ptr<Impl> impl_;
};

} // namespace neno::store
