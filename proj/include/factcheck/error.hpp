#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace factcheck {

class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Violated operation precondition (bad argument, empty input where forbidden).
class PreconditionError : public Error {
   public:
    using Error::Error;
};

/// Input data that cannot be interpreted (malformed JSONL, unknown label).
class FormatError : public Error {
   public:
    using Error::Error;
};

/// Backend did not answer, or answered with a transport-level failure.
/// Kept separate from empty results so callers never confuse the two.
class TransportError : public Error {
   public:
    TransportError(std::string role, const std::string &detail)
        : Error(role + " backend: " + detail), role_(std::move(role)), detail_(detail)
    {
    }

    [[nodiscard]] const std::string &role() const noexcept { return role_; }
    [[nodiscard]] const std::string &detail() const noexcept { return detail_; }

   private:
    std::string role_;
    std::string detail_;
};

class UnknownCorpusError : public Error {
   public:
    using Error::Error;
};

}  // namespace factcheck
