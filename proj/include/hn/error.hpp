#pragma once

#include <stdexcept>
#include <string>

namespace hn {

/// Base of every error raised across a module boundary. Evaluation errors are
/// never thrown; they travel in-band as ErrorKind values.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PathError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t position, const std::string& message)
        : Error(message + " at position " + std::to_string(position)),
          position_(position),
          message_(message) {}

    std::size_t position() const { return position_; }
    const std::string& message() const { return message_; }

private:
    std::size_t position_;
    std::string message_;
};

class NotFound : public Error {
public:
    using Error::Error;
};

class AlreadyExists : public Error {
public:
    using Error::Error;
};

class PermissionDenied : public Error {
public:
    using Error::Error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class BoundsError : public Error {
public:
    using Error::Error;
};

class SpecError : public Error {
public:
    using Error::Error;
};

/// Journal or snapshot content that cannot be decoded or replayed.
class JournalError : public Error {
public:
    JournalError(long long seq, const std::string& message)
        : Error("journal error at seq " + std::to_string(seq) + ": " + message), seq_(seq) {}

    long long seq() const { return seq_; }

private:
    long long seq_;
};

}  // namespace hn
