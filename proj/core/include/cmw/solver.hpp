/// \file solver.hpp
/// The catalog-driven f-Simple Extension solver: enumerate implicit splice
/// codes over every open optimal base circuit, complete them with read-once
/// formulas, decode, and test truth-table isomorphism against g.

#pragma once

#include <cstdint>
#include <optional>

#include "cmw/circuit.hpp"
#include "cmw/splice.hpp"
#include "cmw/truth_table.hpp"
#include "cmw/xor_catalog.hpp"

namespace cmw {

struct SepInstance {
  std::uint32_t n{0};       ///< base arity; extension variables trail
  TruthTable f;             ///< 2^n bits, non-degenerate
  TruthTable g;             ///< 2^(n+m) bits
  Measure measure{Measure::D};
  CatalogMeta catalog;      ///< open optimal circuits for f
};

/// Levin-style certificate: apply_perm(truth_table(circuit), pi) = g, the
/// circuit has base size s+m, reads each extension variable exactly once
/// and each base variable at least once, and is normalized.
struct SepWitness {
  Circuit circuit;
  Permutation pi;
};

struct SolveStats {
  std::uint64_t decoded{0};  ///< candidate circuits decoded
  std::uint64_t budget{0};   ///< asserted cap |L|·2^{min(62, c·ℓ·(s+m))}
};

/// Exponent constant c in the decode-budget cap.
inline constexpr unsigned kBudgetC = 6;

/// Decides whether g is a simple extension of f. Verifies key existence and
/// non-degeneracy first; m = 0 reduces to g = f. The candidate space is
/// g-independent, so the full code space is enumerated once per
/// (catalog, m, measure) into a shared index and every instance is answered
/// by lookup; `exhaustive` therefore changes nothing — both modes report
/// full-enumeration stats and the canonically least witness.
/// Throws std::invalid_argument on catalog/measure/arity mismatch.
bool solve(const SepInstance& instance, SolveStats* stats = nullptr,
           bool exhaustive = false);

/// As solve, but returns the certificate on yes-instances.
std::optional<SepWitness> witness(const SepInstance& instance,
                                  SolveStats* stats = nullptr,
                                  bool exhaustive = false);

/// Independent re-check of every witness condition.
bool check_witness(const SepInstance& instance, const SepWitness& w);

/// Builds (or loads from the cc cache directory) the XOR_n catalog and
/// delegates to solve.
bool solve_xor(std::uint32_t n, const TruthTable& g, Measure measure);

}  // namespace cmw
