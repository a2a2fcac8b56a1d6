/// \file ytree.hpp
/// All-stops restrictions and Y-tree decompositions of optimal
/// simple-extension circuits: every extension variable sits inside an
/// isolated read-once formula (a Y-tree) whose root feeds a single binary
/// combiner gate.

#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "cmw/circuit.hpp"
#include "cmw/rewrite.hpp"
#include "cmw/truth_table.hpp"

namespace cmw {

/// Assignment to the extension variables y_1..y_m, as produced by find_keys.
using Key = std::vector<bool>;

enum class YSide : std::uint8_t { Left = 0, Right = 1 };

inline char yside_char(YSide s) { return s == YSide::Left ? 'L' : 'R'; }

struct YTreeTriple {
  GateId combiner{0};    ///< binary gate δ reading the tree root
  YSide side{YSide::Left};  ///< which input of δ is the tree
  GateId tree_root{0};   ///< root of the read-once formula T
};

struct YTreeDecomposition {
  std::vector<YTreeTriple> triples;
  unsigned weight{0};  ///< number of extension variables read in some tree

  bool total(unsigned m) const { return weight == m; }
};

/// A terminal, layered restriction substituting every extension variable of
/// G such that each prefix leaves an optimal intermediate simple-extension
/// circuit (exactly one binary gate eliminated per substitution, and each
/// simplification segment is simple: optional constant negation, one passing
/// rule, optional double negation).
///
/// Construction: repeatedly pick the depth-maximal extension variable; if
/// some key eliminates its connective by a passing rule, substitute that
/// bit; otherwise the sibling is another extension variable (a layer tie)
/// and the sibling is passed first, then the chosen variable is set so that
/// the connective's readers see the fixed constant.
///
/// Throws std::invalid_argument when `keys` is empty and std::runtime_error
/// when a precondition violation is detected (G was not an optimal
/// simple-extension circuit).
Restriction find_all_stops_restriction(const Circuit& G, const TruthTable& f,
                                       const std::vector<Key>& keys);

/// Total Y-tree decomposition of normalize(G).first, built by replaying the
/// all-stops restriction in reverse (adding or modifying one triple per
/// substitution). Gate ids refer to G (normalization never renumbers).
/// Throws std::runtime_error on extraction failure, which certifies that G
/// violated the preconditions.
YTreeDecomposition extract_ytree_decomposition(const Circuit& G,
                                               std::uint32_t n,
                                               std::uint32_t m,
                                               const TruthTable& f,
                                               const std::vector<Key>& keys);

/// Purely structural check of all three admissibility conditions per triple
/// (read-once over extension variables only; isolation; base variable under
/// the other child), non-intersection, and the recorded weight.
bool validate_decomposition(const Circuit& G, const YTreeDecomposition& D,
                            std::uint32_t n, std::uint32_t m);

/// The unique origin of combiner δ: the depth-maximal original gate under
/// δ's non-tree child, found by walking through negations and compounded
/// combiners. `original` marks the gates surviving the all-stops
/// restriction. Throws std::runtime_error if the walk leaves the circuit.
GateId origin_of(const Circuit& G, const YTreeDecomposition& D, GateId delta,
                 const std::set<GateId>& original);

/// Dump format: one line per triple,
/// `combiner=<id> side=<L|R> tree=<read-once formula over y_i, ! = NOT>`.
std::string write_decomposition(const Circuit& G, const YTreeDecomposition& D);

}  // namespace cmw
