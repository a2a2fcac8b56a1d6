#pragma once

/// \file truth_table.hpp
/// Truth tables, partial truth tables, dependency tests, key search,
/// restriction and exact truth-table isomorphism.
///
/// Row convention (normative for every module): row index r is the binary
/// expansion b_1..b_N of r with b_1 the most significant bit, and variables
/// ordered x_1..x_n, y_1..y_m (extension variables trailing).

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cmw/circuit.hpp"

namespace cmw {

/// Hard cap on variable counts so tables stay in memory.
inline constexpr std::uint32_t kMaxVars = 24;

struct TruthTable {
  std::uint32_t num_vars{0};
  std::vector<std::uint8_t> bits;  ///< length 2^num_vars, values 0/1

  std::size_t rows() const { return std::size_t(1) << num_vars; }
  friend bool operator==(const TruthTable& a, const TruthTable& b) {
    return a.num_vars == b.num_vars && a.bits == b.bits;
  }
  friend bool operator<(const TruthTable& a, const TruthTable& b) {
    if (a.num_vars != b.num_vars) return a.num_vars < b.num_vars;
    return a.bits < b.bits;
  }
};

/// Entry value for undefined rows of a partial table.
inline constexpr std::uint8_t kStar = 2;

struct PartialTruthTable {
  std::uint32_t num_vars{0};
  std::vector<std::uint8_t> entries;  ///< length 2^num_vars, values 0/1/kStar
};

/// Permutation of variables, 1-based: pi[i-1] = pi(i).
using Permutation = std::vector<std::uint32_t>;

/// Bit of variable i (1-based) in row r of an N-variable table.
inline bool row_bit(std::size_t r, std::uint32_t i, std::uint32_t N) {
  return (r >> (N - i)) & 1;
}

TruthTable make_table(std::uint32_t num_vars, std::uint64_t word);  ///< N <= 6
std::uint64_t as_word(const TruthTable& tt);                        ///< N <= 6

/// Single line over {0,1} / {0,1,⋆} (also accepts '*' for ⋆).
TruthTable parse_tt(const std::string& line);
std::string format_tt(const TruthTable& tt);
PartialTruthTable parse_ptt(const std::string& line);
std::string format_ptt(const PartialTruthTable& pt);

/// Truth table of a circuit. `var_order` must contain every variable read
/// by the circuit (padding variables allowed).
TruthTable truth_table(const Circuit& c, const std::vector<VarRef>& var_order);

/// Standard variable order x_1..x_n, y_1..y_m.
std::vector<VarRef> default_var_order(std::uint32_t n, std::uint32_t m);

/// True iff some row α has tt(α) != tt(α ⊕ e_i); i is 1-based.
bool depends_on(const TruthTable& tt, std::uint32_t i);

/// Depends on every variable.
bool is_nondegenerate(const TruthTable& tt);

/// Restriction: `fixed` maps 1-based variable indices to bits; the result
/// ranges over the remaining variables in their original relative order.
TruthTable restrict_tt(const TruthTable& tt, const std::map<std::uint32_t, bool>& fixed);

/// All keys k in {0,1}^m with restrict_tt(g, y -> k) = f, lexicographic.
/// Extension variables are the trailing m = g.num_vars - f.num_vars.
std::vector<std::vector<bool>> find_keys(const TruthTable& g, const TruthTable& f);

/// out(x) = in(pi(x)) where (pi(x))_i = x_{pi(i)}.
TruthTable apply_perm(const TruthTable& tt, const Permutation& pi);

/// Some pi with b = apply_perm(a, pi), lexicographically least, or nullopt.
/// Exact search with invariant pruning (influence counts, slice profiles).
std::optional<Permutation> tt_isomorphic(const TruthTable& a, const TruthTable& b);

/// Lexicographically least table in the isomorphism class of tt (minimum of
/// apply_perm over all permutations; N <= 8).
TruthTable tt_canonical(const TruthTable& tt);

}  // namespace cmw
