#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace anaflow {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t position)
        : std::runtime_error(what + " (at position " + std::to_string(position) + ")"),
          position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

/// Singular evaluation: division by ~0, log outside the real-positive
/// domain, or a series pivot below threshold. Carries the offending subterm.
class DomainError : public std::runtime_error {
public:
    DomainError(const std::string& what, std::string subterm)
        : std::runtime_error(what + " in subterm " + subterm),
          subterm_(std::move(subterm)) {}
    const std::string& subterm() const { return subterm_; }

private:
    std::string subterm_;
};

/// Certification cannot proceed (field not boundedly extendable on the
/// polydisc, unreachable tail target, or blow-up proximity).
class CertifyError : public std::runtime_error {
public:
    explicit CertifyError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace anaflow
