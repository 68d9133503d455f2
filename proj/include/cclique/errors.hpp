#pragma once

#include <stdexcept>
#include <string>

namespace cclique {

// Invalid generator or algorithm parameters.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed edge-list input. Carries the 1-based line number.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// A model contract was broken at runtime: link capacity, oversize word,
// routing precondition, delegate exhaustion.
class ContractViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CapacityViolation : public ContractViolation {
public:
    CapacityViolation(std::size_t round, std::size_t src, std::size_t dst, std::size_t count)
        : ContractViolation("capacity violation in round " + std::to_string(round) + ": link " +
                            std::to_string(src) + "->" + std::to_string(dst) + " carried " +
                            std::to_string(count) + " words"),
          round_(round), src_(src), dst_(dst), count_(count) {}
    std::size_t round() const { return round_; }
    std::size_t src() const { return src_; }
    std::size_t dst() const { return dst_; }
    std::size_t count() const { return count_; }

private:
    std::size_t round_, src_, dst_, count_;
};

class NonTermination : public ContractViolation {
public:
    using ContractViolation::ContractViolation;
};

// More delegates requested than the pool holds; the threshold was too small.
class DelegateExhaustion : public ContractViolation {
public:
    using ContractViolation::ContractViolation;
};

}  // namespace cclique
