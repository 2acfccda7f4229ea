#pragma once

#include <stdexcept>
#include <string>

namespace recfeed {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed catalog file, schema violation or duplicate id.
class CatalogError : public Error {
public:
    explicit CatalogError(const std::string& message, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Raised at construction time when component dimensions or parameters disagree.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Operation not permitted in the current session state.
class StateError : public Error {
public:
    using Error::Error;
};

/// A remote endpoint (embedding or LLM) could not be reached or answered garbage.
class TransportError : public Error {
public:
    TransportError(const std::string& endpoint, const std::string& message, std::string raw_response = {})
        : Error(endpoint + ": " + message), endpoint_(endpoint), raw_response_(std::move(raw_response)) {}

    const std::string& endpoint() const { return endpoint_; }
    const std::string& raw_response() const { return raw_response_; }

private:
    std::string endpoint_;
    std::string raw_response_;
};

} // namespace recfeed
