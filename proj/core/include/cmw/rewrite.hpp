#pragma once

/// \file rewrite.hpp
/// Gate elimination, garbage collection, substitution and normalization.
///
/// The 17 rules and their record names (L/R = side carrying the constant for
/// fixing/passing, the negation for resolving):
///
///   FIX_AND_L      0 ∧ γ → 0        FIX_AND_R      γ ∧ 0 → 0
///   FIX_OR_L       1 ∨ γ → 1        FIX_OR_R       γ ∨ 1 → 1
///   FIX_NOT_0      ¬0 → 1           FIX_NOT_1      ¬1 → 0
///   PASS_AND_L     1 ∧ γ → γ        PASS_AND_R     γ ∧ 1 → γ
///   PASS_OR_L      0 ∨ γ → γ        PASS_OR_R      γ ∨ 0 → γ
///   RESOLVE_AND_L  ¬γ ∧ γ → 0       RESOLVE_AND_R  γ ∧ ¬γ → 0
///   RESOLVE_OR_L   ¬γ ∨ γ → 1       RESOLVE_OR_R   γ ∨ ¬γ → 1
///   PRUNE_AND      γ ∧ γ → γ        PRUNE_OR       γ ∨ γ → γ
///   PRUNE_NOT      ¬¬γ → γ
///
/// Rules with a constant right-hand side delete the main connective α's
/// incoming wires and retype α to that constant in place; matched-node rules
/// redirect every wire reading α to read γ instead. The identifier of α
/// never changes.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cmw/circuit.hpp"

namespace cmw {

enum class RuleId : std::uint8_t {
  FixAndL = 0, FixAndR, FixOrL, FixOrR, FixNot0, FixNot1,
  PassAndL, PassAndR, PassOrL, PassOrR,
  ResolveAndL, ResolveAndR, ResolveOrL, ResolveOrR,
  PruneAnd, PruneOr, PruneNot,
};
inline constexpr int kNumRules = 17;

enum class RuleCategory : std::uint8_t { Fixing, Passing, Resolving, Pruning };
RuleCategory rule_category(RuleId r);
const char* rule_name(RuleId r);
std::optional<RuleId> rule_from_name(const std::string& name);

/// Pattern slots of a rule binding. The full codomain has 7 slots
/// {α, γ, κ, ν_α, ν_γ, ν_κ, out}; only α, γ, κ and ν_γ (written `nu`)
/// ever occur in the 17 left-hand sides.
struct Binding {
  GateId alpha{0};                 ///< main connective
  std::optional<GateId> gamma{};   ///< matched node
  std::optional<GateId> kappa{};   ///< constant
  std::optional<GateId> nu{};      ///< NOT gate in resolving/pruning patterns
};

struct GcStep { GateId id; };
struct GeStep { RuleId rule; Binding b; };
struct SubStep { VarClass cls; std::uint32_t index; bool value; };
using Step = std::variant<GcStep, GeStep, SubStep>;

struct Restriction {
  std::vector<Step> steps;
  bool is_simplification() const;  ///< no Sub steps
};

/// One step per line: `GC <id>` | `GE <rule> alpha=<id> [gamma=..] [kappa=..]
/// [nu=..]` | `SUB <x|y> <i> <0|1>`.
std::string write_restriction(const Restriction& r);
Restriction parse_restriction(const std::string& text);

/// Applies one step; invalid steps are idempotent (returned unchanged with
/// applied=false).
std::pair<Circuit, bool> apply_step(const Circuit& c, const Step& step);

/// All left-hand-side occurrences, ordered by main-connective depth
/// (descending), then GateId, then RuleId.
std::vector<std::pair<RuleId, Binding>> match_rules(const Circuit& c);

/// Constant-free (or a lone constant), all gates reach the output, and no
/// rule left-hand side matches.
bool is_normalized(const Circuit& c);

/// Applies rules depth-maximal-first with recursive garbage collection after
/// each application (and an initial GC pass), until no rule matches.
std::pair<Circuit, Restriction> normalize(const Circuit& c);

/// Sub steps in ascending variable order interleaved with normalize.
std::pair<Circuit, Restriction> substitute_and_normalize(
    const Circuit& c, const std::map<VarRef, bool>& partial_assignment);

struct RecordCheck {
  bool replay_ok{false};
  bool terminal{false};
  bool layered{false};
};

/// Replays `record` on `c`. Terminal: no one-step Ge/Gc extension changes the
/// final circuit. Layered: the depths (at application time) of binary main
/// connectives are non-increasing across the record.
RecordCheck check_record(const Circuit& c, const Restriction& record);

}  // namespace cmw
