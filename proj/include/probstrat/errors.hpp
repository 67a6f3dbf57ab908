#pragma once

#include <stdexcept>
#include <string>

namespace probstrat {

// Every library failure carries the name of the operation that raised it
// and a short error kind, so the CLI can report "op: Kind: detail".
class Error : public std::runtime_error {
public:
    Error(std::string op, std::string kind, const std::string& detail)
        : std::runtime_error(op + ": " + kind + (detail.empty() ? "" : ": " + detail)),
          op_(std::move(op)), kind_(std::move(kind)) {}

    const std::string& op() const noexcept { return op_; }
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string op_;
    std::string kind_;
};

// Malformed text input (grammar, automaton, corpus, CLI tokens).
class FormatError : public Error {
public:
    FormatError(const std::string& where, const std::string& detail)
        : Error(where, "FormatError", detail) {}
};

} // namespace probstrat
