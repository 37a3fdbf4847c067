#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>

#include "neno/rdf/term.hpp"

namespace neno::rdf {

// Source of version-4 UUIDs, the address space of the machine.
class UuidGenerator {
public:
    virtual ~UuidGenerator() = default;
    // 36-character lowercase hexadecimal UUID text.
    virtual std::string next() = 0;
};

// Replays the same sequence for the same seed.
class SeededUuidGenerator final : public UuidGenerator {
public:
    explicit SeededUuidGenerator(std::uint64_t seed) : engine_(seed) {}
    std::string next() override;

private:
    std::mt19937_64 engine_;
};

class RandomUuidGenerator final : public UuidGenerator {
public:
    RandomUuidGenerator();
    std::string next() override;

private:
    std::mt19937_64 engine_;
};

std::unique_ptr<UuidGenerator> make_uuid_generator(std::optional<std::uint64_t> seed);

// `urn:uuid:<uuid>`
Term mint_uuid_uri(UuidGenerator& gen);
// A URI of the form mint_uuid_uri produces.
bool is_minted(const Term& t);

bool is_uuid_text(std::string_view s);
// True when the IRI ends in a UUID, e.g. `urn:uuid:...` or `http://x/demo#<uuid>`.
bool has_uuid_suffix(std::string_view iri);

} // namespace neno::rdf
