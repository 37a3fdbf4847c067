#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace neno {

struct SourcePos {
    std::size_t line = 0;
    std::size_t column = 0;

    std::string to_string() const { return std::to_string(line) + ":" + std::to_string(column); }
    friend bool operator==(const SourcePos&, const SourcePos&) = default;
};

// Base for every diagnostic raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A diagnostic tied to a location in some input text.
class ParseError : public Error {
public:
    ParseError(SourcePos pos, const std::string& message)
        : Error(pos.to_string() + ": " + message), pos_(pos), message_(message) {}

    SourcePos pos() const { return pos_; }
    const std::string& message() const { return message_; }

private:
    SourcePos pos_;
    std::string message_;
};

} // namespace neno
