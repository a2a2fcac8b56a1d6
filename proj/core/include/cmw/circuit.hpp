#pragma once

/// \file circuit.hpp
/// Circuit representation over the basis {AND, OR, NOT, CONST, INPUT},
/// evaluation, size measures, depth ordering and induced subcircuits.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cmw {

/// Gate identifier. Stable for the lifetime of a gate: manipulations recycle
/// or discard identifiers, but never renumber surviving gates.
using GateId = std::uint32_t;

enum class GateKind : std::uint8_t { Input, Const, Not, And, Or };

enum class VarClass : std::uint8_t { Base, Extension };  // x_i vs y_j

/// Reference to a named input variable; index is 1-based.
struct VarRef {
  VarClass cls{VarClass::Base};
  std::uint32_t index{1};

  friend bool operator<(const VarRef& a, const VarRef& b) {
    if (a.cls != b.cls) return a.cls < b.cls;
    return a.index < b.index;
  }
  friend bool operator==(const VarRef& a, const VarRef& b) {
    return a.cls == b.cls && a.index == b.index;
  }
};

/// Variable name as used in `.bcir` files: x<k> or y<k>.
std::string var_name(const VarRef& v);
/// Parses "x3"/"y1"; returns nullopt for the open-slot token "?".
std::optional<VarRef> parse_var_name(const std::string& tok);

struct Gate {
  GateKind kind{GateKind::Const};
  std::optional<VarRef> var{};   ///< Input gates only; nullopt = open slot.
  bool cval{false};              ///< Const gates only.
  std::vector<GateId> ins{};     ///< 2 for And/Or, 1 for Not, 0 otherwise.
};

enum class Measure : std::uint8_t { D, R };

inline char measure_char(Measure m) { return m == Measure::D ? 'D' : 'R'; }

/// Single-sink multi-source DAG of identified gates.
///
/// The gate map is the authoritative storage; `output` designates the sink.
/// Gates may be temporarily disconnected mid-manipulation only.
class Circuit {
 public:
  std::map<GateId, Gate> gates;
  GateId output{0};

  /// Adds a gate under a fresh id (one past the current maximum) and
  /// returns that id.
  GateId add(Gate g);
  /// Adds a gate under an explicit id; throws if the id is taken.
  void add_with_id(GateId id, Gate g);

  const Gate& at(GateId id) const;
  Gate& at(GateId id);
  bool has(GateId id) const { return gates.count(id) != 0; }
  std::size_t num_gates() const { return gates.size(); }

  /// Throws std::runtime_error on dangling references, arity mismatches,
  /// cycles, or a missing output gate.
  void validate() const;
};

/// Evaluates the circuit under a total assignment of its input variables.
bool evaluate(const Circuit& c, const std::map<VarRef, bool>& assignment);

/// Gate count under the chosen measure (D: AND/OR; R: AND/OR/NOT).
std::size_t size(const Circuit& c, Measure measure);

/// Number of wires leaving `gate`, counted with multiplicity.
std::size_t fanout(const Circuit& c, GateId gate);

/// Fanout of every gate, counted with multiplicity.
std::map<GateId, std::size_t> fanout_map(const Circuit& c);

/// Depth of every gate: the maximum number of binary gates on any directed
/// path from the gate to the output (the gate itself counts when binary).
/// Computed as a shortest path on the reversed DAG with edge weight -1 out
/// of binary gates and 0 out of NOT gates. Gates with no path to the output
/// get the depth of their deepest reader-free position, i.e. 0 standalone.
std::map<GateId, int> depth_map(const Circuit& c);

/// Gate ids sorted by strictly decreasing depth; ties broken by ascending id.
std::vector<GateId> depth_order(const Circuit& c);

/// A topological order (inputs first, output last).
std::vector<GateId> topo_order(const Circuit& c);

/// Vertex-induced subcircuit on all gates with a path to `root`.
Circuit subcircuit(const Circuit& c, GateId root);

/// Set of variables read by the circuit (reachable INPUT gates with labels).
std::vector<VarRef> variables_read(const Circuit& c);

/// Exact canonical form: two circuits map to equal strings iff they are
/// isomorphic as labeled DAGs (gate kinds, CONST values and INPUT labels
/// preserved; open slots all carry the same null label; ids ignored; the
/// two inputs of a binary gate are an unordered pair).
std::string canonical_form(const Circuit& c);

/// Copy of `c` with gates renumbered 0..k-1 compatibly with depth order
/// (decreasing depth, ties by old id). Returns the new circuit and the
/// old-id -> new-id map. This is an explicit copying operation; it never
/// mutates ids in place.
std::pair<Circuit, std::map<GateId, GateId>> renumber_depth_sorted(const Circuit& c);

// ---------------------------------------------------------------------------
// .bcir text format (bit-exact, line based):
//   inputs x1 x2 y1
//   gate 0 INPUT x1
//   gate 2 AND 0 1
//   gate 3 NOT 2
//   gate 4 CONST 1
//   output 3
// `#` begins a comment. Open input slots are written `gate <id> INPUT ?`.
// ---------------------------------------------------------------------------

Circuit parse_bcir(const std::string& text);
std::string write_bcir(const Circuit& c);

}  // namespace cmw
