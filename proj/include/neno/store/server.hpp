#pragma once

#include <memory>
#include <string>

#include "neno/rdf/graph.hpp"

namespace neno::store {

struct Response {
    int status = 200;
    std::string body;
};

// An in-memory graph served over HTTP and persisted to an N-Triples file.
//
//   POST /sparql    request document: SELECT -> TSV, ASK -> true|false,
//                   updates -> number of triples changed
//   GET  /dump      the whole graph as N-Triples
//   POST /load      merges an N-Triples body
//   POST /save      writes the persistence file
//   GET  /machines  one machine URI per line
//   POST /claim     ?machine=&token=[&steal=1]; 409 with the holder if taken
//   POST /release   ?machine=&token=
//
// Queries share a read lock; updates take the write lock one document at a
// time.
class Server {
public:
    // Loads persist_path when it exists; an empty path disables persistence.
    explicit Server(std::string persist_path = "");
    ~Server();

    // Returns the bound port; port 0 picks a free one.
    int bind(const std::string& host, int port);
    // Blocks until stop().
    void serve();
    // Stops serving and saves.
    void stop();

    void save() const;
    rdf::Graph graph() const;

    // The handlers, callable without a socket.
    Response sparql(const std::string& body);
    Response load(const std::string& body);
    Response claim(const std::string& machine, const std::string& token, bool steal);
    Response release(const std::string& machine, const std::string& token);
    std::string dump() const;
    std::string machines() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace neno::store
