#pragma once

#include <stdexcept>
#include <string>

namespace sentistock {

// Base for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input data violated a documented invariant (bad bar, malformed line, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

// File could not be opened, read or had an inconsistent layout.
class IoError : public Error {
public:
    using Error::Error;
};

// Configuration file problems; the CLI maps these to exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Failure while fetching news. `retriable()` distinguishes transient
// transport-level failures from permanent ones (bad credentials, bad request).
class FetchError : public Error {
public:
    FetchError(const std::string& msg, bool retriable)
        : Error(msg), retriable_(retriable) {}
    bool retriable() const { return retriable_; }

private:
    bool retriable_;
};

}  // namespace sentistock
