#include "cmw/truth_table.hpp"

#include <algorithm>
#include <stdexcept>

namespace cmw {

TruthTable make_table(std::uint32_t num_vars, std::uint64_t word) {
  if (num_vars > 6) throw std::runtime_error("make_table: num_vars > 6");
  TruthTable tt;
  tt.num_vars = num_vars;
  tt.bits.resize(tt.rows());
  for (std::size_t r = 0; r < tt.rows(); ++r) tt.bits[r] = (word >> r) & 1;
  return tt;
}

std::uint64_t as_word(const TruthTable& tt) {
  if (tt.num_vars > 6) throw std::runtime_error("as_word: num_vars > 6");
  std::uint64_t w = 0;
  for (std::size_t r = 0; r < tt.rows(); ++r) {
    if (tt.bits[r]) w |= std::uint64_t(1) << r;
  }
  return w;
}

static std::uint32_t log2_exact(std::size_t len) {
  std::uint32_t n = 0;
  while ((std::size_t(1) << n) < len && n <= kMaxVars) ++n;
  if ((std::size_t(1) << n) != len) throw std::runtime_error("table length is not a power of two");
  return n;
}

TruthTable parse_tt(const std::string& line) {
  TruthTable tt;
  for (char ch : line) {
    if (ch == '0') tt.bits.push_back(0);
    else if (ch == '1') tt.bits.push_back(1);
    else if (ch == '\n' || ch == '\r' || ch == ' ') continue;
    else throw std::runtime_error("bad truth-table character");
  }
  tt.num_vars = log2_exact(tt.bits.size());
  return tt;
}

std::string format_tt(const TruthTable& tt) {
  std::string s;
  s.reserve(tt.bits.size());
  for (auto b : tt.bits) s.push_back(b ? '1' : '0');
  return s;
}

PartialTruthTable parse_ptt(const std::string& line) {
  PartialTruthTable pt;
  for (unsigned char ch : line) {
    if (ch == '0') pt.entries.push_back(0);
    else if (ch == '1') pt.entries.push_back(1);
    else if (ch == '*') pt.entries.push_back(kStar);
    else if (ch == 0xE2) continue;  // first byte of UTF-8 star; handled below
    else if (ch == 0x8B || ch == 0x86) continue;  // continuation bytes of "⋆"
    else if (ch == '\n' || ch == '\r' || ch == ' ') continue;
    else throw std::runtime_error("bad partial-table character");
  }
  pt.num_vars = log2_exact(pt.entries.size());
  return pt;
}

std::string format_ptt(const PartialTruthTable& pt) {
  std::string s;
  for (auto e : pt.entries) s.push_back(e == kStar ? '*' : (e ? '1' : '0'));
  return s;
}

std::vector<VarRef> default_var_order(std::uint32_t n, std::uint32_t m) {
  std::vector<VarRef> order;
  for (std::uint32_t i = 1; i <= n; ++i) order.push_back({VarClass::Base, i});
  for (std::uint32_t j = 1; j <= m; ++j) order.push_back({VarClass::Extension, j});
  return order;
}

TruthTable truth_table(const Circuit& c, const std::vector<VarRef>& var_order) {
  const std::uint32_t N = static_cast<std::uint32_t>(var_order.size());
  if (N > kMaxVars) throw std::runtime_error("too many variables");
  for (const VarRef& v : variables_read(c)) {
    if (std::find(var_order.begin(), var_order.end(), v) == var_order.end()) {
      throw std::runtime_error("circuit reads " + var_name(v) + " absent from var order");
    }
  }
  TruthTable tt;
  tt.num_vars = N;
  tt.bits.resize(tt.rows());
  // Evaluate once per row over a topological order, keeping the order fixed.
  std::vector<GateId> order = topo_order(c);
  std::map<GateId, std::size_t> pos;
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
  std::vector<std::uint8_t> val(order.size());
  // Variable positions resolved once.
  std::vector<int> var_pos(order.size(), -1);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Gate& g = c.at(order[i]);
    if (g.kind == GateKind::Input) {
      if (!g.var) throw std::runtime_error("cannot evaluate open input slot");
      auto it = std::find(var_order.begin(), var_order.end(), *g.var);
      var_pos[i] = static_cast<int>(it - var_order.begin());
    }
  }
  for (std::size_t r = 0; r < tt.rows(); ++r) {
    for (std::size_t i = 0; i < order.size(); ++i) {
      const Gate& g = c.at(order[i]);
      switch (g.kind) {
        case GateKind::Input:
          val[i] = row_bit(r, static_cast<std::uint32_t>(var_pos[i]) + 1, N);
          break;
        case GateKind::Const: val[i] = g.cval; break;
        case GateKind::Not: val[i] = !val[pos[g.ins[0]]]; break;
        case GateKind::And: val[i] = val[pos[g.ins[0]]] && val[pos[g.ins[1]]]; break;
        case GateKind::Or: val[i] = val[pos[g.ins[0]]] || val[pos[g.ins[1]]]; break;
      }
    }
    tt.bits[r] = val[pos[c.output]];
  }
  return tt;
}

bool depends_on(const TruthTable& tt, std::uint32_t i) {
  if (i < 1 || i > tt.num_vars) throw std::runtime_error("depends_on: index out of range");
  const std::size_t flip = std::size_t(1) << (tt.num_vars - i);
  for (std::size_t r = 0; r < tt.rows(); ++r) {
    if (tt.bits[r] != tt.bits[r ^ flip]) return true;
  }
  return false;
}

bool is_nondegenerate(const TruthTable& tt) {
  for (std::uint32_t i = 1; i <= tt.num_vars; ++i) {
    if (!depends_on(tt, i)) return false;
  }
  return true;
}

TruthTable restrict_tt(const TruthTable& tt, const std::map<std::uint32_t, bool>& fixed) {
  for (const auto& [i, b] : fixed) {
    if (i < 1 || i > tt.num_vars) throw std::runtime_error("restrict_tt: index out of range");
  }
  std::vector<std::uint32_t> remaining;
  for (std::uint32_t i = 1; i <= tt.num_vars; ++i) {
    if (!fixed.count(i)) remaining.push_back(i);
  }
  TruthTable out;
  out.num_vars = static_cast<std::uint32_t>(remaining.size());
  out.bits.resize(out.rows());
  for (std::size_t r = 0; r < out.rows(); ++r) {
    std::size_t full = 0;
    for (std::uint32_t k = 0; k < remaining.size(); ++k) {
      if (row_bit(r, k + 1, out.num_vars)) {
        full |= std::size_t(1) << (tt.num_vars - remaining[k]);
      }
    }
    for (const auto& [i, b] : fixed) {
      if (b) full |= std::size_t(1) << (tt.num_vars - i);
    }
    out.bits[r] = tt.bits[full];
  }
  return out;
}

std::vector<std::vector<bool>> find_keys(const TruthTable& g, const TruthTable& f) {
  if (g.num_vars < f.num_vars) throw std::runtime_error("find_keys: g has fewer variables than f");
  const std::uint32_t n = f.num_vars;
  const std::uint32_t m = g.num_vars - n;
  std::vector<std::vector<bool>> keys;
  for (std::size_t k = 0; k < (std::size_t(1) << m); ++k) {
    std::map<std::uint32_t, bool> fixed;
    std::vector<bool> key(m);
    for (std::uint32_t j = 0; j < m; ++j) {
      bool bit = row_bit(k, j + 1, m);
      key[j] = bit;
      fixed[n + j + 1] = bit;
    }
    if (restrict_tt(g, fixed) == f) keys.push_back(std::move(key));
  }
  return keys;
}

TruthTable apply_perm(const TruthTable& tt, const Permutation& pi) {
  const std::uint32_t N = tt.num_vars;
  if (pi.size() != N) throw std::runtime_error("apply_perm: arity mismatch");
  TruthTable out;
  out.num_vars = N;
  out.bits.resize(out.rows());
  for (std::size_t r = 0; r < out.rows(); ++r) {
    // out(x) = in(pi(x)): variable i of the looked-up row is x_{pi(i)}.
    std::size_t src = 0;
    for (std::uint32_t i = 1; i <= N; ++i) {
      if (row_bit(r, pi[i - 1], N)) src |= std::size_t(1) << (N - i);
    }
    out.bits[r] = tt.bits[src];
  }
  return out;
}

namespace {

/// Per-variable invariants preserved by isomorphism: (influence count,
/// ones-count of the i=0 slice, ones-count of the i=1 slice).
struct VarSig {
  std::size_t influence;
  std::size_t ones0;
  std::size_t ones1;
  friend bool operator==(const VarSig& a, const VarSig& b) {
    return a.influence == b.influence && a.ones0 == b.ones0 && a.ones1 == b.ones1;
  }
};

VarSig var_sig(const TruthTable& tt, std::uint32_t i) {
  VarSig s{0, 0, 0};
  const std::size_t flip = std::size_t(1) << (tt.num_vars - i);
  for (std::size_t r = 0; r < tt.rows(); ++r) {
    if (tt.bits[r] != tt.bits[r ^ flip]) ++s.influence;
    if (tt.bits[r]) (row_bit(r, i, tt.num_vars) ? s.ones1 : s.ones0)++;
  }
  return s;
}

bool search_perm(const TruthTable& a, const TruthTable& b,
                 const std::vector<std::vector<std::uint32_t>>& cand, std::uint32_t i,
                 std::vector<std::uint32_t>& pi, std::vector<bool>& used) {
  const std::uint32_t N = a.num_vars;
  if (i > N) return apply_perm(a, pi) == b;
  for (std::uint32_t c : cand[i - 1]) {
    if (used[c]) continue;
    pi[i - 1] = c;
    used[c] = true;
    if (search_perm(a, b, cand, i + 1, pi, used)) return true;
    used[c] = false;
  }
  return false;
}

}  // namespace

std::optional<Permutation> tt_isomorphic(const TruthTable& a, const TruthTable& b) {
  if (a.num_vars != b.num_vars) throw std::runtime_error("tt_isomorphic: arity mismatch");
  const std::uint32_t N = a.num_vars;
  std::size_t ones_a = std::count(a.bits.begin(), a.bits.end(), 1);
  std::size_t ones_b = std::count(b.bits.begin(), b.bits.end(), 1);
  if (ones_a != ones_b) return std::nullopt;
  // b(x) = a(x_{pi(1)}, ..., x_{pi(N)}): variable j of a is fed x_{pi(j)},
  // so variable pi(j) of b inherits variable j's invariants:
  // sig_b(pi(j)) == sig_a(j).
  std::vector<VarSig> sa, sb;
  for (std::uint32_t i = 1; i <= N; ++i) {
    sa.push_back(var_sig(a, i));
    sb.push_back(var_sig(b, i));
  }
  std::vector<std::vector<std::uint32_t>> cand(N);
  for (std::uint32_t j = 1; j <= N; ++j) {
    for (std::uint32_t i = 1; i <= N; ++i) {
      if (sb[i - 1] == sa[j - 1]) cand[j - 1].push_back(i);  // ascending => lex least first
    }
    if (cand[j - 1].empty()) return std::nullopt;
  }
  Permutation pi(N);
  std::vector<bool> used(N + 1, false);
  if (search_perm(a, b, cand, 1, pi, used)) return pi;
  return std::nullopt;
}

TruthTable tt_canonical(const TruthTable& tt) {
  const std::uint32_t N = tt.num_vars;
  if (N > 8) throw std::runtime_error("tt_canonical: too many variables");
  Permutation pi(N);
  for (std::uint32_t i = 0; i < N; ++i) pi[i] = i + 1;
  TruthTable best = tt;
  do {
    TruthTable cur = apply_perm(tt, pi);
    if (cur.bits < best.bits) best = cur;
  } while (std::next_permutation(pi.begin(), pi.end()));
  return best;
}

}  // namespace cmw
