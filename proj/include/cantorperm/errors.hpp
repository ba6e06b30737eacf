#pragma once

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace cantorperm {

/// Bad input from the caller (shape mismatch, out-of-range index, ...).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An enumeration would exceed its configured budget.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computed result contradicts a proved structural fact. Reaching this
/// means an implementation bug, not a user error.
class IntegrityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Enumeration budgets. Every exponential loop in the library checks one of
/// these before starting and throws CapacityError instead of truncating.
struct Limits {
  unsigned enum_bits = 24;       // subsets of a product with at most 2^enum_bits masks
  unsigned oracle_bits = 20;     // chain-set size for definitional composition
  std::size_t eqrel_base = 3;    // |A| for equivalence-relation checks
  std::size_t algebra_n = 3;     // n for Gram/radical analysis of M_n

  /// Defaults, with CANTOR_PERM_BUDGET_BITS overriding both bit budgets.
  static Limits from_env() {
    Limits lim;
    if (const char* env = std::getenv("CANTOR_PERM_BUDGET_BITS")) {
      char* end = nullptr;
      unsigned long v = std::strtoul(env, &end, 10);
      if (end == env || *end != '\0' || v == 0 || v > 40)
        throw ArgumentError("CANTOR_PERM_BUDGET_BITS must be an integer in [1, 40]");
      lim.enum_bits = static_cast<unsigned>(v);
      lim.oracle_bits = static_cast<unsigned>(v);
    }
    return lim;
  }
};

inline void require_budget(std::size_t bits, unsigned budget, const char* what) {
  if (bits > budget)
    throw CapacityError(std::string(what) + ": needs " + std::to_string(bits) +
                        " bits, budget is " + std::to_string(budget) + " bits");
}

}  // namespace cantorperm
