#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

namespace therakit {

// Ordered JSON everywhere: several serializations pin their key order.
using Json = nlohmann::ordered_json;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad files, bad parameters, failed validation. CLI exit code 2.
class InputError : public Error {
public:
    using Error::Error;
};

// Anything that went wrong talking to or interpreting the LLM. CLI exit code 3.
class BackendError : public Error {
public:
    using Error::Error;
};

// HTTP/connection-level failure; the only error class eligible for fallback.
class TransportError : public BackendError {
public:
    using BackendError::BackendError;
};

// The model broke the tool-calling contract (unknown function, bad arguments,
// turn budget exhausted).
class ProtocolError : public BackendError {
public:
    using BackendError::BackendError;
};

// The model's final answer did not contain the required report sections.
// Keeps the raw text so callers can log or inspect it.
class FormatError : public BackendError {
public:
    FormatError(const std::string& what, std::string raw_text)
        : BackendError(what), raw_text_(std::move(raw_text)) {}
    const std::string& raw_text() const { return raw_text_; }

private:
    std::string raw_text_;
};

}  // namespace therakit
