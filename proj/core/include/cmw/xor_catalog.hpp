/// \file xor_catalog.hpp
/// Open isomorphism classes of optimal (¬)XOR_n circuits and validation of
/// their block-partition structure: every optimal XOR circuit decomposes into
/// n-1 three-binary-gate (¬)XOR_2 blocks arranged as a binary tree.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cmw/circuit.hpp"
#include "cmw/truth_table.hpp"

namespace cmw {

/// Truth table of x_1 ⊕ ... ⊕ x_n.
TruthTable xor_tt(std::uint32_t n);

/// One block of a partitioned XOR circuit: three binary gates plus the
/// interior negations, with the wires classified by role.
struct Block {
  std::vector<GateId> gates;  ///< the three binary gates, then interior NOTs
  /// Wires as (source, reader) pairs.
  std::vector<std::pair<GateId, GateId>> input_wires;
  std::vector<std::pair<GateId, GateId>> core_wires;
  std::vector<std::pair<GateId, GateId>> output_wires;
  bool negated = false;  ///< computes ¬XOR_2 instead of XOR_2
};

/// A circuit whose INPUT gates carry no variable labels; some labeling of the
/// slots yields an optimal circuit for the target function.
struct OpenCircuit {
  Circuit circuit;
  std::vector<GateId> slots;  ///< the unlabeled input gates, in order
};

/// A catalog: the list L of open optimal classes consumed by the solver.
struct CatalogMeta {
  unsigned base_size = 0;   ///< s = CC(f) under the measure
  unsigned max_fanout = 0;  ///< ℓ, maximum fanout observed over all classes
  Measure measure = Measure::D;
  unsigned num_vars = 0;
  std::vector<OpenCircuit> classes;
};

/// All normalized optimal circuits computing XOR_2 or ¬XOR_2 under the
/// measure, from the synthesis oracle. Every R-optimal block is also a
/// D-optimal block (but not vice versa).
std::vector<Circuit> xor2_blocks(Measure measure);

/// Composes every binary tree shape with n leaves with every assignment of
/// block variants, rejecting boundary double negations, keeping compositions
/// of overall positive parity (¬XOR_n classes behind the flag), deduplicated
/// by canonical form. 2 ≤ n ≤ 8.
CatalogMeta enumerate_open_optimal_xor(unsigned n, Measure measure,
                                       bool negated_target = false);

/// Partition of the circuit's gates into n-1 blocks (greedy bottom-up block
/// matching and contraction), or absent if no partition exists.
std::optional<std::vector<Block>> validate_block_partition(const Circuit& c);

/// Catalog file: header `xor-catalog n=<n> measure=<D|R> ell=<l> s=<s>`, then
/// per class a `class` line, a `slots <ids>` line, and the open-circuit body.
std::string write_catalog(const CatalogMeta& meta);
CatalogMeta parse_catalog(const std::string& text);

}  // namespace cmw
