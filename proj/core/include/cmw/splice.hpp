/// \file splice.hpp
/// Widgets, fanout-relative coding, splice-code encoding of an optimal
/// simple-extension circuit relative to a base circuit, and the decoding
/// procedure that reverses gate elimination.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cmw/circuit.hpp"
#include "cmw/rewrite.hpp"
#include "cmw/ytree.hpp"

namespace cmw {

/// One way of grafting a combiner above a target gate: the shape of an
/// inverted simple simplification. The other two negation placements (on the
/// Y-tree root and above the combiner) live in the Y-tree's root edge and in
/// the wire moves respectively, so they are not widget flags.
struct Widget {
  std::uint8_t id{0};
  GateKind kind{GateKind::And};  ///< the combiner's gate kind
  YSide y_side{YSide::Left};     ///< which input of the combiner is the tree
  bool neg_in{false};            ///< NOT between the target and the combiner
  std::uint8_t sym_class{0};     ///< left/right symmetry class, 0..3
};

/// All 8 widget shapes obtained by inverting the possible simple
/// simplification sequences; exactly 4 symmetry classes.
const std::vector<Widget>& derive_widgets();

/// A read-once formula over extension variables. Leaves with var == 0 are
/// open (unlabeled); `neg` negates the incoming edge (on the root: the
/// output edge).
struct RoFormula {
  enum class Kind : std::uint8_t { Leaf, And, Or };
  Kind kind{Kind::Leaf};
  bool neg{false};
  std::uint32_t var{0};  ///< 1-based y index; 0 = open leaf
  std::vector<RoFormula> kids;

  unsigned leaves() const;
};

/// Text form: `y3`, `?`, `!F`, `(F&F)`, `(F|F)`.
std::string write_formula(const RoFormula& f);
RoFormula parse_formula(const std::string& text);

/// One splice: graft one combiner widget plus its Y-tree above a target
/// gate, moving a nonempty subset of the origin's wires onto the combiner.
/// All bit vectors have length ℓ and are indexed by the origin's wire list:
/// wires reading the origin in F ordered by (reader id, input slot), then
/// wires reading the origin's unique NOT, then a virtual output wire when
/// the origin (or its NOT) is the circuit output.
struct Splice {
  std::vector<bool> target;    ///< origin-relative fanout code of the target
  std::vector<bool> selected;  ///< wires taken; subset of target's set bits
  std::uint8_t widget{0};
  std::vector<bool> moves;  ///< per selected wire: 0 = combiner, 1 = its NOT
  std::optional<RoFormula> ytree;  ///< absent in implicit codes
};

struct SpliceCode {
  std::vector<bool> origins;  ///< indicator over F's gates, ascending id
  std::vector<std::vector<Splice>> splices;  ///< one sequence per set bit

  unsigned num_combiners() const;
};

enum class DecodeStatus : std::uint8_t {
  Ok = 0,
  BadShape,        ///< indicator/sequence lengths disagree with F
  BadTarget,       ///< target code names no unique current gate
  SubsetViolation, ///< selected wires not a subset of the target's code
  BadWidget,       ///< widget id out of range
  BadMoves,        ///< move list length mismatch or no wire selected
  BadYTree,        ///< missing/duplicate extension labels
};

/// Applies each splice in order: materialize the widget above the target,
/// move exactly the selected wires onto the combiner (or its NOT), attach
/// the Y-tree. Returns nullopt (with `status`) on malformed codes.
std::optional<Circuit> decode(const Circuit& F, const SpliceCode& E,
                              DecodeStatus* status = nullptr);

/// Splice code for G relative to F = ρ(G), derived from the Y-tree
/// decomposition by simulating decode state with combiners grafted
/// deepest-first per origin. Throws std::runtime_error when D or ρ is
/// inconsistent with G; the result is self-validated by round trip.
SpliceCode encode(const Circuit& G, const Circuit& F,
                  const YTreeDecomposition& D, const Restriction& rho);

/// Visits every implicit splice code (ytree fields absent) adding exactly
/// d ∈ 1..m combiners (plus the empty code when m = 0), in deterministic
/// lexicographic order, pruning invalid prefixes by incremental decoding.
/// `measure` R forbids negation-bearing widgets and negated moves. Stops
/// early when the visitor returns false; returns the number of codes
/// visited.
std::uint64_t enumerate_implicit_codes(
    const Circuit& F, unsigned m, unsigned ell, Measure measure,
    const std::function<bool(const SpliceCode&)>& visit);

/// All open read-once formulas with `a` leaves: every rooted binary tree
/// shape, internal nodes labeled AND/OR, and (unless monotone) every edge
/// including the output edge independently negated.
std::vector<RoFormula> enumerate_read_once_formulas(unsigned a, bool monotone);

/// All C(m-1, d-1) positive d-tuples summing to m, lexicographic.
std::vector<std::vector<unsigned>> compositions(unsigned m, unsigned d);

/// Text format: `origins <bitstring>`, then per origin one line per splice:
/// `splice target=<bits> wires=<bits> widget=<id> moves=<bits> ytree=<formula>`.
std::string write_splice_code(const SpliceCode& E);
SpliceCode parse_splice_code(const std::string& text);

}  // namespace cmw
