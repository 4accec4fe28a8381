#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nvo {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed textual input (hex strings, maps listings, dictionary and DB
/// files). Carries a 1-based line number when the source is line-oriented,
/// 0 otherwise.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what, std::size_t line = 0)
        : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// A field violates its length bound or cannot be encoded.
class EncodingError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class NotFoundError : public Error {
public:
    using Error::Error;
};

class AlreadyRegisteredError : public Error {
public:
    using Error::Error;
};

class PoolExhaustedError : public Error {
public:
    using Error::Error;
};

class UnknownTemplateError : public Error {
public:
    using Error::Error;
};

class UnsupportedPlatformError : public Error {
public:
    using Error::Error;
};

class NetworkError : public Error {
public:
    using Error::Error;
};

/// Thrown by the client when the guard reports violations and the abort
/// policy is active; no request is emitted in that case.
class GuardViolationError : public Error {
public:
    explicit GuardViolationError(const std::string& what, std::size_t violation_count)
        : Error(what), violation_count_(violation_count) {}
    std::size_t violation_count() const { return violation_count_; }

private:
    std::size_t violation_count_;
};

}  // namespace nvo
