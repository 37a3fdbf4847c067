#include "neno/store/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "neno/compiler/ontology.hpp"
#include "neno/rdf/ntriples.hpp"
#include "neno/sparql/sparql.hpp"

namespace neno::store {

namespace fs = std::filesystem;
using rdf::Term;

Delta diff(const rdf::Graph& before, const rdf::Graph& after) {
    Delta d;
    for (const auto& t : before.triples())
        if (!after.contains(t))
            d.removed.insert(t);
    for (const auto& t : after.triples())
        if (!before.contains(t))
            d.added.insert(t);
    return d;
}

std::string delta_requests(const Delta& d) {
    std::string out;
    auto emit = [&](sparql::UpdateKind kind, const rdf::Triple& t) {
        sparql::UpdateCommand u{kind, {{t.subject, t.predicate, t.object}}};
        out += sparql::render(u) + "\n";
    };
    for (const auto& t : d.removed.triples())
        emit(sparql::UpdateKind::Delete, t);
    for (const auto& t : d.added.triples())
        emit(sparql::UpdateKind::Insert, t);
    return out;
}

std::unique_ptr<Store> open_store(const std::string& target) {
    if (target.rfind("http://", 0) == 0)
        return std::make_unique<HttpStore>(target);
    if (target.rfind("https://", 0) == 0)
        throw StoreError("https stores are not supported: " + target);
    return std::make_unique<FileStore>(target);
}

std::string process_token() {
    char host[256] = {};
    gethostname(host, sizeof host - 1);
    std::random_device rd;
    std::ostringstream out;
    out << host << ":" << getpid() << ":" << std::hex << rd();
    return out.str();
}

std::optional<std::string> claim_in(rdf::Graph& g, const Term& machine, const std::string& token, bool steal) {
    for (const auto& holder : g.objects(machine, nv::claimed_by()))
        if (holder.value() != token && !steal)
            return holder.value();
    g.remove_matching(machine, nv::claimed_by(), rdf::any);
    g.insert(machine, nv::claimed_by(), Term::string(token));
    return std::nullopt;
}

bool release_in(rdf::Graph& g, const Term& machine, const std::string& token) {
    return g.remove(machine, nv::claimed_by(), Term::string(token));
}

// --- file store -------------------------------------------------------------

FileStore::FileStore(std::string path) : path_(std::move(path)) {
    auto dir = fs::path(path_).parent_path();
    if (!dir.empty() && !fs::is_directory(dir))
        throw Unreachable("no such directory for store " + path_);
}

template <class Fn>
auto FileStore::locked(Fn&& fn) {
    std::string lock = path_ + ".lock";
    int fd = ::open(lock.c_str(), O_CREAT | O_RDWR, 0644);
    if (fd < 0)
        throw Unreachable("cannot open lock file " + lock);
    ::flock(fd, LOCK_EX);
    struct Unlock {
        int fd;
        ~Unlock() {
            ::flock(fd, LOCK_UN);
            ::close(fd);
        }
    } unlock{fd};
    return fn();
}

rdf::Graph FileStore::read() const {
    std::ifstream in(path_, std::ios::binary);
    if (!in)
        return {};
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return rdf::parse_ntriples(ss.str());
    } catch (const ParseError& e) {
        throw StoreError(path_ + ":" + e.what());
    }
}

void FileStore::write(const rdf::Graph& g) const {
    std::string tmp = path_ + ".tmp" + std::to_string(getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Unreachable("cannot write " + tmp);
        out << rdf::serialize_ntriples(g);
        if (!out)
            throw StoreError("write failed: " + tmp);
    }
    fs::rename(tmp, path_);
}

rdf::Graph FileStore::load() {
    return locked([&] { return read(); });
}

void FileStore::apply(const Delta& d) {
    if (d.empty())
        return;
    locked([&] {
        auto g = read();
        for (const auto& t : d.removed.triples())
            g.remove(t);
        for (const auto& t : d.added.triples())
            g.insert(t);
        write(g);
        return 0;
    });
}

std::optional<std::string> FileStore::claim(const Term& machine, const std::string& token, bool steal) {
    return locked([&]() -> std::optional<std::string> {
        auto g = read();
        if (auto holder = claim_in(g, machine, token, steal))
            return holder;
        write(g);
        return std::nullopt;
    });
}

void FileStore::release(const Term& machine, const std::string& token) {
    locked([&] {
        auto g = read();
        if (release_in(g, machine, token))
            write(g);
        return 0;
    });
}

} // namespace neno::store
