/// \file bpis.hpp
/// Bipartite Permutation Independent Set and its reduction to the partial
/// simple-extension problem: partial-truth-table construction, brute-force
/// solving, and the two Levin witness maps.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cmw/circuit.hpp"
#include "cmw/truth_table.hpp"

namespace cmw {

/// One forbidden pairing: not both pi(j) = k and pi(j' + n) = k' + n.
struct BpisEdge {
  std::uint32_t j{1}, k{1}, jp{1}, kp{1};
};

struct BpisInstance {
  std::uint32_t n{0};
  std::vector<BpisEdge> edges;
};

/// A permutation of [2n] mapping the first and second blocks to themselves
/// and violating no edge.
struct BpisWitness {
  Permutation pi;
};

bool check_bpis_witness(const BpisInstance& inst, const BpisWitness& w);

/// The partial table over 6n variables (x: 2n, y: 2n, z: 2n) whose
/// simple-extension completions correspond to valid permutations: the four
/// structural cases (x = 0 -> base function of y,z; x = 1 -> OR of z;
/// z = 1 -> OR of x,y; z = 0 -> 0) plus the half-identity OR constraints
/// and one forced-1 row per edge. All other rows are undefined. Asserts
/// that the prescribed regions never conflict.
PartialTruthTable reduce(const BpisInstance& inst);

/// Lexicographically least valid permutation, or nullopt. Exhaustive over
/// (n!)^2 block permutations; n <= 4.
std::optional<BpisWitness> brute_solve_bpis(const BpisInstance& inst);

/// The read-once formula OR_i ((x_{pi(i)} or y_i) and z_i) with a
/// left-leaning OR tree. Variables are numbered x: 1..2n, y: 2n+1..4n,
/// z: 4n+1..6n, all base class.
Circuit witness_to_circuit(const BpisWitness& w, std::uint32_t n);

/// Reads the pairing off a circuit from the formula family above (any
/// OR-tree shape). Throws std::runtime_error on a structure mismatch.
BpisWitness circuit_to_witness(const Circuit& c, std::uint32_t n);

/// Evaluates the circuit on every defined row of the partial table.
bool check_consistency(const Circuit& c, const PartialTruthTable& pt);

/// Instance file: first line `n=<n>`, then one `j k j' k'` line per edge.
std::string write_bpis(const BpisInstance& inst);
BpisInstance parse_bpis(const std::string& text);

}  // namespace cmw
