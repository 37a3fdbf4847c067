#include "neno/rdf/uuid.hpp"

#include <array>
#include <cctype>
#include <optional>

namespace neno::rdf {

namespace {

std::string format_uuid(std::uint64_t hi, std::uint64_t lo) {
    // version 4, RFC 4122 variant
    hi = (hi & 0xffffffffffff0fffULL) | 0x0000000000004000ULL;
    lo = (lo & 0x3fffffffffffffffULL) | 0x8000000000000000ULL;
    std::array<unsigned char, 16> bytes{};
    for (int i = 0; i < 8; ++i) {
        bytes[i] = static_cast<unsigned char>(hi >> (56 - 8 * i));
        bytes[8 + i] = static_cast<unsigned char>(lo >> (56 - 8 * i));
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(36);
    for (int i = 0; i < 16; ++i) {
        if (i == 4 || i == 6 || i == 8 || i == 10)
            out += '-';
        out += kHex[bytes[i] >> 4];
        out += kHex[bytes[i] & 0xf];
    }
    return out;
}

} // namespace

std::string SeededUuidGenerator::next() {
    auto hi = engine_();
    auto lo = engine_();
    return format_uuid(hi, lo);
}

RandomUuidGenerator::RandomUuidGenerator() {
    std::random_device rd;
    std::seed_seq seq{rd(), rd(), rd(), rd(), rd(), rd(), rd(), rd()};
    engine_.seed(seq);
}

std::string RandomUuidGenerator::next() {
    auto hi = engine_();
    auto lo = engine_();
    return format_uuid(hi, lo);
}

std::unique_ptr<UuidGenerator> make_uuid_generator(std::optional<std::uint64_t> seed) {
    if (seed)
        return std::make_unique<SeededUuidGenerator>(*seed);
    return std::make_unique<RandomUuidGenerator>();
}

Term mint_uuid_uri(UuidGenerator& gen) {
    return Term::uri("urn:uuid:" + gen.next());
}

bool is_minted(const Term& t) {
    return t.is_uri() && t.value().size() == 45 && t.value().rfind("urn:uuid:", 0) == 0 &&
           is_uuid_text(std::string_view(t.value()).substr(9));
}

bool is_uuid_text(std::string_view s) {
    if (s.size() != 36)
        return false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i == 8 || i == 13 || i == 18 || i == 23) {
            if (s[i] != '-')
                return false;
        } else if (!std::isxdigit(static_cast<unsigned char>(s[i]))) {
            return false;
        }
    }
    return true;
}

bool has_uuid_suffix(std::string_view iri) {
    return iri.size() >= 36 && is_uuid_text(iri.substr(iri.size() - 36));
}

} // namespace neno::rdf
