#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace crm {

enum class ErrorKind {
    Domain,        // argument outside the mathematical domain of an operation
    Encoding,      // a symbol cannot be coded under the current model
    Parse,         // malformed input bytes (containers, PGM, grammars, datasets)
    Io,
    NotFound,
    Refused,       // request understood but rejected (kind mismatch, stale checksum, cost guard)
    Verification,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(ErrorKind::Domain, what) {}
};

/// Raised when a symbol has zero probability. `position` is the index in the
/// coded sequence.
class EncodingError : public Error {
public:
    EncodingError(const std::string& what, std::size_t position)
        : Error(ErrorKind::Encoding, what + " (at position " + std::to_string(position) + ")"),
          position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(ErrorKind::Parse, what + " (at offset " + std::to_string(offset) + ")"),
          offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

class NotFoundError : public Error {
public:
    explicit NotFoundError(const std::string& what) : Error(ErrorKind::NotFound, what) {}
};

class RefusedError : public Error {
public:
    explicit RefusedError(const std::string& what) : Error(ErrorKind::Refused, what) {}
};

} // namespace crm
