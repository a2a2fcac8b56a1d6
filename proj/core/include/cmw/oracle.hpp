/// \file oracle.hpp
/// Independent brute-force ground truth: exact circuit complexity via
/// breadth-first closure over truth tables, exhaustive enumeration of optimal
/// circuits, and the definitional simple-extension decider.
///
/// The two code paths here are deliberately independent: exact_cc computes
/// sizes without ever building circuit structure, while
/// enumerate_optimal_circuits performs a separate exhaustive DAG search.
/// Each cross-checks the other.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cmw/circuit.hpp"
#include "cmw/truth_table.hpp"

namespace cmw {

/// Maximum arity supported by the exhaustive complexity tables.
inline constexpr unsigned kMaxOracleVars = 4;

/// Complete circuit-complexity table for all functions on a fixed number of
/// variables, indexed by the truth-table word (bit r = value on row r).
struct CcTable {
  unsigned num_vars = 0;
  Measure measure = Measure::D;
  /// cc[w] = exact complexity of the function with word w; total for n ≤ 4.
  std::vector<std::uint8_t> cc;
};

/// Path of the binary cache file for the (n, measure) table.
///
/// Layout (little-endian, byte-granular): magic "CCTB", u8 num_vars,
/// u8 measure (0 = D, 1 = R), then 2^(2^n) size bytes indexed by table word.
/// Directory comes from CMW_CACHE_DIR, defaulting to ./.cmw-cache.
std::string cc_cache_path(unsigned num_vars, Measure measure);

/// Returns the complete table for n variables, building (and persisting) it on
/// first use. Caches with mismatching headers are discarded and rebuilt.
/// Throws std::invalid_argument for n > kMaxOracleVars.
const CcTable& cc_table(unsigned num_vars, Measure measure);

/// Exact minimum circuit size of tt under the measure, or nullopt if > cap.
std::optional<unsigned> exact_cc(const TruthTable& tt, Measure measure,
                                 unsigned cap = 255);

/// Enumerates every normalized optimal circuit computing tt, deduplicated by
/// canonical form with input labels kept. "Normalized" here is the strong
/// sense used for optimality: rule-free, no double negations, and every
/// non-NOT node feeds at most one NOT gate.
/// Throws std::runtime_error when the optimal size exceeds the budget.
std::vector<Circuit> enumerate_optimal_circuits(const TruthTable& tt,
                                                Measure measure,
                                                unsigned budget = 7);

/// Definitional simple-extension test: g is a simple extension of f iff
/// g = f, or g is non-degenerate, CC(g) = CC(f) + m, and g has a key for f.
/// f must be non-degenerate; arities must be within oracle range.
bool is_simple_extension_bruteforce(const TruthTable& f, const TruthTable& g,
                                    Measure measure);

}  // namespace cmw
