#pragma once

#include <stdexcept>
#include <string>

namespace crossgreed {

// Two measures (or a measure and an involution) disagree on their outcome set.
class DomainMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An enumeration or atom budget was exceeded. The CLI maps this to exit code 3.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file (dataset, edge list). The CLI maps this to exit code 2.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller violated an operation's precondition (unknown column, bad parameter,
// failed lemma hypothesis).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace crossgreed
