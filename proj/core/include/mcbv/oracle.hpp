#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mcbv/term_store.hpp"

namespace mcbv {

/// The search space of a brute-force query exceeds its budget.
class TooLarge : public std::runtime_error {
public:
  explicit TooLarge(unsigned bits);
  unsigned bits() const { return bits_; }

private:
  unsigned bits_;
};

struct OracleResult {
  bool sat = false;
  /// A satisfying assignment of the free variables when sat.
  Assignment model;
  std::uint64_t checked = 0;
};

/// Exhaustive enumeration of the free variables of `assertions`. Throws
/// TooLarge when the product of their domain sizes exceeds 2^max_bits.
OracleResult brute_force(const TermStore &store, const std::vector<TermId> &assertions, unsigned max_bits = 24);

} // namespace mcbv
