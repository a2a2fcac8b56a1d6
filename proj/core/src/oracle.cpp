#include "cmw/oracle.hpp"

#include <algorithm>
#include <cassert>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <cstring>
#include <mutex>
#include <set>
#include <stdexcept>

#include "cmw/rewrite.hpp"

namespace cmw {

namespace {

constexpr std::uint8_t kUnreached = 0xFF;

std::uint64_t literal_word(unsigned n, unsigned i) {  // i is 1-based
  std::uint64_t w = 0;
  for (std::size_t r = 0; r < (1u << n); ++r) {
    if (row_bit(r, i, n)) w |= std::uint64_t{1} << r;
  }
  return w;
}

// --- Exact circuit complexity via iterative-deepening DAG search -----------
//
// Minimum circuit size is a DAG (shared-subcircuit) measure, so it is computed
// by exhaustive search over boolean chains: sequences of AND/OR gates whose
// operands are optionally negated references to variables or earlier gates.
// For each symmetry class of functions we deepen k until a k-gate chain
// computing the target exists; exhausting k-1 certifies the lower bound.
//
// Soundness-preserving prunes:
//  * semantic distinctness (duplicate / constant / literal gates never occur
//    in a minimal chain; in D, complements merge too since NOTs are free);
//  * connectivity: unused gates + unread needed variables must fit into the
//    remaining operand slots;
//  * adjacent-independent-gate ordering: at least one topological order of
//    every DAG survives;
//  * D only: per-gate De Morgan polarity canonicalization — a gate and its
//    dual (complemented word) are interchangeable at equal cost, so only the
//    lexicographically smaller word of each pair is generated;
//  * D only: the first gate's word must be minimal within its orbit under the
//    symmetry group of the target (variable permutations and input
//    complementations fixing the target up to complement).

/// Row-gather transform: output bit r = input bit rmap[r]. One per
/// (variable permutation, input complementation mask) pair.
struct VarTransform {
  std::array<std::uint8_t, 16> rmap{};
};

std::uint64_t apply_tf(const VarTransform& t, std::uint64_t w, unsigned rows) {
  std::uint64_t o = 0;
  for (unsigned r = 0; r < rows; ++r) o |= ((w >> t.rmap[r]) & 1u) << r;
  return o;
}

/// All 2^n * n! transforms (permute variables, complement a subset).
std::vector<VarTransform> var_transforms(unsigned n) {
  std::vector<VarTransform> out;
  unsigned rows = 1u << n;
  std::vector<unsigned> perm(n);
  for (unsigned i = 0; i < n; ++i) perm[i] = i;
  do {
    for (unsigned cm = 0; cm < (1u << n); ++cm) {
      VarTransform t;
      for (unsigned r = 0; r < rows; ++r) {
        unsigned rr = 0;
        for (unsigned i = 0; i < n; ++i) {
          unsigned b = (r >> (n - 1 - perm[i])) & 1u;
          b ^= (cm >> i) & 1u;
          rr |= b << (n - 1 - i);
        }
        t.rmap[r] = static_cast<std::uint8_t>(rr);
      }
      out.push_back(t);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

struct CcSearch {
  unsigned n = 0, rows = 0, k = 0;
  std::uint64_t full = 0, target = 0;
  Measure measure = Measure::D;
  unsigned neg_budget = 0;  // R only: exact NOT count (incl. output NOT)

  std::vector<std::uint64_t> w;      // literal words, then gate words
  std::vector<unsigned> fo;          // fanout within the chain
  std::vector<std::uint64_t> encs;   // gate encodings for the ordering break
  std::vector<unsigned> neg_count;   // R: per-source negated-use count
  unsigned distinct_negs = 0;
  std::uint32_t read_mask = 0, dep_mask = 0;
  std::vector<std::uint8_t> used;    // per canonical word: present in chain
  std::vector<std::uint64_t> allowed_first;  // D: sorted, empty = any
  bool found = false;

  std::uint64_t canon(std::uint64_t x) const { return std::min(x, ~x & full); }

  bool exists() {
    rows = 1u << n;
    full = (std::uint64_t{1} << rows) - 1;
    w.assign(n + k, 0);
    fo.assign(n + k, 0);
    encs.assign(k, 0);
    neg_count.assign(n + k, 0);
    for (unsigned i = 0; i < n; ++i) w[i] = literal_word(n, i + 1);
    dep_mask = 0;
    TruthTable tt = make_table(n, target);
    for (unsigned i = 1; i <= n; ++i) {
      if (depends_on(tt, i)) dep_mask |= 1u << (i - 1);
    }
    used.assign(std::size_t{1} << rows, 0);
    used[0] = used[full] = 1;
    for (unsigned i = 0; i < n; ++i) used[canon(w[i])] = 1;
    rec(0);
    return found;
  }

  static std::uint64_t enc_gate(unsigned a, int na, unsigned b, int nb, int op) {
    return ((std::uint64_t(a * 2 + na) * 1024 + (b * 2 + nb)) << 1) | unsigned(op);
  }

  void rec(unsigned t) {
    unsigned unused_gates = 0;
    for (unsigned j = 0; j < t; ++j) {
      if (fo[n + j] == 0) ++unused_gates;
    }
    unsigned unread = 0;
    for (unsigned i = 0; i < n; ++i) {
      if ((dep_mask >> i & 1) && !(read_mask >> i & 1)) ++unread;
    }
    unsigned r = k - t;
    if (unused_gates + unread > r + 1) return;

    unsigned nsrc = n + t;
    std::uint64_t target_canon = canon(target);
    for (unsigned a = 0; a < nsrc && !found; ++a) {
      for (unsigned b = a + 1; b < nsrc && !found; ++b) {
        for (int na = 0; na < 2; ++na) {
          for (int nb = 0; nb < 2; ++nb) {
            std::uint64_t wa = na ? ~w[a] & full : w[a];
            std::uint64_t wb = nb ? ~w[b] & full : w[b];
            for (int op = 0; op < 2 && !found; ++op) {
              std::uint64_t nw = op ? (wa | wb) : (wa & wb);
              std::uint64_t cn = canon(nw);
              if (measure == Measure::D) {
                if (nw != cn) continue;  // De Morgan polarity canonicalization
                if (used[cn]) continue;
                if (t == k - 1) {
                  if (cn != target_canon) continue;
                } else if (cn == target_canon) {
                  continue;  // shorter chain would exist
                }
                if (t == 0 && !allowed_first.empty() &&
                    !std::binary_search(allowed_first.begin(), allowed_first.end(), cn)) {
                  continue;
                }
              } else {
                if (nw == 0 || nw == full) continue;
                bool dup = false;
                for (unsigned i = 0; i < nsrc; ++i) {
                  if (nw == w[i]) {
                    dup = true;
                    break;
                  }
                }
                if (dup) continue;
                unsigned new_negs = distinct_negs;
                if (na && neg_count[a] == 0) ++new_negs;
                if (nb && neg_count[b] == 0) ++new_negs;
                if (t == k - 1) {
                  unsigned outneg = nw == target ? 0 : 1;
                  if (nw != target && (~nw & full) != target) continue;
                  if (new_negs + outneg != neg_budget) continue;
                } else if (new_negs > neg_budget) {
                  continue;
                }
              }
              std::uint64_t enc = enc_gate(a, na, b, nb, op);
              // Ordering break; with the orbit-restricted first gate (D) the
              // first position is exempt, since an arbitrary bottom gate must
              // be placeable there.
              unsigned first_cmp = measure == Measure::D ? 2 : 1;
              if (t >= first_cmp && a != n + t - 1 && b != n + t - 1 &&
                  enc < encs[t - 1]) {
                continue;
              }
              push(t, a, na, b, nb, nw, enc, cn);
              if (t == k - 1) {
                check_complete();
              } else {
                rec(t + 1);
              }
              pop(t, a, na, b, nb, cn);
            }
          }
        }
      }
    }
  }

  void push(unsigned t, unsigned a, int na, unsigned b, int nb, std::uint64_t nw,
            std::uint64_t enc, std::uint64_t cn) {
    w[n + t] = nw;
    encs[t] = enc;
    ++fo[a];
    ++fo[b];
    if (a < n) read_mask |= 1u << a;
    if (b < n) read_mask |= 1u << b;
    used[cn] = 1;
    if (measure == Measure::R) {
      if (na && neg_count[a]++ == 0) ++distinct_negs;
      if (nb && neg_count[b]++ == 0) ++distinct_negs;
    }
  }

  void pop(unsigned t, unsigned a, int na, unsigned b, int nb, std::uint64_t cn) {
    used[cn] = 0;
    if (measure == Measure::R) {
      if (na && --neg_count[a] == 0) --distinct_negs;
      if (nb && --neg_count[b] == 0) --distinct_negs;
    }
    --fo[a];
    --fo[b];
    if (a < n && fo[a] == 0) read_mask &= ~(1u << a);
    if (b < n && fo[b] == 0) read_mask &= ~(1u << b);
    (void)t;
  }

  void check_complete() {
    for (unsigned j = 0; j + 1 < k; ++j) {
      if (fo[n + j] == 0) return;
    }
    if ((read_mask & dep_mask) != dep_mask) return;
    found = true;
  }
};

// --- D only: global chain enumeration --------------------------------------
//
// For the full table the per-target search repeats the same lower-bound
// exhaustions once per class, which is prohibitive at n = 4 (levels grow
// ~45x). Instead one DFS over all chains of length <= K marks, for every
// word, the smallest complete chain (all gates used, root last) that
// computes it — amortizing the exhaustion across all 2^(2^n) targets. The
// same soundness prunes apply: semantic distinctness via De Morgan
// canonical words, the adjacent-independent-gate ordering break, and the
// connectivity margin (a prefix whose unused gates exceed the remaining
// slots can never complete within depth K).
struct GlobalReach {
  unsigned n = 0, rows = 0, K = 0;
  std::uint64_t full = 0;
  std::vector<std::uint64_t> w;
  std::vector<unsigned> fo;
  std::vector<std::uint64_t> encs;
  std::vector<std::uint8_t> used;
  std::vector<std::uint8_t> mark;  // per canonical word: min complete size
  unsigned nzero = 0;              // pushed gates with fanout 0

  std::uint64_t canon(std::uint64_t x) const { return std::min(x, ~x & full); }

  void run() {
    rows = 1u << n;
    full = (std::uint64_t{1} << rows) - 1;
    w.assign(n + K, 0);
    fo.assign(n + K, 0);
    encs.assign(K, 0);
    for (unsigned i = 0; i < n; ++i) w[i] = literal_word(n, i + 1);
    used.assign(std::size_t{1} << rows, 0);
    used[0] = 1;
    for (unsigned i = 0; i < n; ++i) used[canon(w[i])] = 1;
    mark.assign(std::size_t{1} << rows, kUnreached);
    rec(0);
  }

  void rec(unsigned t) {
    unsigned r = K - t;
    if (nzero > r + 1) return;
    unsigned nsrc = n + t;
    for (unsigned a = 0; a < nsrc; ++a) {
      for (unsigned b = a + 1; b < nsrc; ++b) {
        for (int na = 0; na < 2; ++na) {
          std::uint64_t wa = na ? ~w[a] & full : w[a];
          for (int nb = 0; nb < 2; ++nb) {
            std::uint64_t wb = nb ? ~w[b] & full : w[b];
            for (int op = 0; op < 2; ++op) {
              std::uint64_t nw = op ? (wa | wb) : (wa & wb);
              if (nw != canon(nw)) continue;
              if (used[nw]) continue;
              std::uint64_t enc = CcSearch::enc_gate(a, na, b, nb, op);
              if (t >= 1 && a != n + t - 1 && b != n + t - 1 &&
                  enc < encs[t - 1]) {
                continue;
              }
              // push
              w[n + t] = nw;
              encs[t] = enc;
              if (a >= n && fo[a] == 0) --nzero;
              if (b >= n && fo[b] == 0) --nzero;
              ++fo[a];
              ++fo[b];
              ++nzero;  // the new gate
              used[nw] = 1;
              if (nzero == 1 && mark[nw] > t + 1) {
                mark[nw] = static_cast<std::uint8_t>(t + 1);
              }
              if (t + 1 < K) rec(t + 1);
              // pop
              used[nw] = 0;
              --nzero;
              --fo[a];
              --fo[b];
              if (a >= n && fo[a] == 0) ++nzero;
              if (b >= n && fo[b] == 0) ++nzero;
            }
          }
        }
      }
    }
  }
};

/// D only: canonical words of bottom gates (both operands literals) that are
/// lexicographically minimal within their orbit under the target's symmetry
/// group. Some optimal chain starts with one of these.
std::vector<std::uint64_t> allowed_first_words(unsigned n, std::uint64_t target) {
  unsigned rows = 1u << n;
  std::uint64_t full = (std::uint64_t{1} << rows) - 1;
  auto canon = [&](std::uint64_t x) { return std::min(x, ~x & full); };
  std::vector<VarTransform> stab;
  for (const VarTransform& t : var_transforms(n)) {
    if (canon(apply_tf(t, target, rows)) == canon(target)) stab.push_back(t);
  }
  std::set<std::uint64_t> bottoms;
  for (unsigned i = 1; i <= n; ++i) {
    for (unsigned j = i + 1; j <= n; ++j) {
      std::uint64_t li = literal_word(n, i), lj = literal_word(n, j);
      for (int ni = 0; ni < 2; ++ni) {
        for (int nj = 0; nj < 2; ++nj) {
          std::uint64_t a = ni ? ~li & full : li;
          std::uint64_t b = nj ? ~lj & full : lj;
          bottoms.insert(canon(a & b));
          bottoms.insert(canon(a | b));
        }
      }
    }
  }
  std::vector<std::uint64_t> allowed;
  for (std::uint64_t wv : bottoms) {
    bool minimal = true;
    for (const VarTransform& t : stab) {
      if (canon(apply_tf(t, wv, rows)) < wv) {
        minimal = false;
        break;
      }
    }
    if (minimal) allowed.push_back(wv);
  }
  return allowed;  // std::set iteration: already sorted
}

/// Minimum formula (tree) size for every function: breadth-first closure over
/// truth tables where level L combines tables of cost i and j with i+j = L-1.
/// Sharing is impossible in a tree, so this is an upper bound on circuit
/// complexity and caps the iterative deepening.
std::vector<std::uint8_t> formula_upper_bounds(unsigned n, Measure measure) {
  const std::size_t entries = std::size_t{1} << (1u << n);
  const std::uint64_t full = entries - 1;
  std::vector<std::uint8_t> cost(entries, kUnreached);
  std::vector<std::vector<std::uint64_t>> level(1);
  auto reach = [&](std::uint64_t wv, unsigned c) {
    if (cost[wv] != kUnreached) return;
    cost[wv] = static_cast<std::uint8_t>(c);
    level.resize(std::max<std::size_t>(level.size(), c + 1));
    level[c].push_back(wv);
    if (measure == Measure::D) {
      std::uint64_t cw = ~wv & full;
      if (cost[cw] == kUnreached) {
        cost[cw] = static_cast<std::uint8_t>(c);
        level[c].push_back(cw);
      }
    }
  };
  reach(0, 0);
  reach(full, 0);
  for (unsigned i = 1; i <= n; ++i) reach(literal_word(n, i), 0);
  std::size_t done = level[0].size();
  for (unsigned L = 1; done < entries && L + 1 < kUnreached; ++L) {
    level.resize(std::max<std::size_t>(level.size(), L + 1));
    std::size_t before = done;
    if (measure == Measure::R) {
      for (std::size_t x = 0; x < level[L - 1].size(); ++x) {
        reach(~level[L - 1][x] & full, L);
      }
    }
    for (unsigned i = 0; i + i <= L - 1; ++i) {
      unsigned j = L - 1 - i;
      for (std::size_t x = 0; x < level[i].size(); ++x) {
        std::uint64_t a = level[i][x];
        for (std::size_t y = 0; y < level[j].size(); ++y) {
          std::uint64_t b = level[j][y];
          reach(a & b, L);
          reach(a | b, L);
        }
      }
    }
    done = 0;
    for (const auto& lv : level) done += lv.size();
    if (done == before) break;
  }
  return cost;
}

/// Exactness horizon per table: entries above it are stored as the sentinel.
unsigned cc_horizon(unsigned n, Measure measure) {
  if (measure == Measure::D) return n <= 3 ? 12 : 12;
  return n <= 3 ? 10 : 5;
}

/// Exact complexity of one representative by iterative deepening between the
/// dependency lower bound and the formula upper bound.
std::uint8_t cc_of_word(unsigned n, Measure measure, std::uint64_t target,
                        unsigned cap, unsigned formula_ub, const CcTable* d_table) {
  unsigned rows = 1u << n;
  std::uint64_t full = (std::uint64_t{1} << rows) - 1;
  if (target == 0 || target == full) return 0;
  for (unsigned i = 1; i <= n; ++i) {
    std::uint64_t li = literal_word(n, i);
    if (target == li) return 0;
    if (target == (~li & full)) return measure == Measure::D ? 0 : 1;
  }
  TruthTable tt = make_table(n, target);
  unsigned deps = 0;
  for (unsigned i = 1; i <= n; ++i) deps += depends_on(tt, i) ? 1 : 0;
  unsigned lb = deps >= 2 ? deps - 1 : 1;
  if (measure == Measure::R && d_table && d_table->cc[target] != kUnreached) {
    lb = std::max<unsigned>(lb, d_table->cc[target]);
  }
  std::vector<std::uint64_t> first;
  if (measure == Measure::D) first = allowed_first_words(n, target);
  // Deepen only below the formula upper bound: exhausting size ub-1 already
  // certifies cc = ub without another search.
  unsigned last = std::min(cap, formula_ub >= 1 ? formula_ub - 1 : 0);
  for (unsigned c = std::max(1u, lb); c <= last; ++c) {
    if (measure == Measure::D) {
      CcSearch s;
      s.n = n;
      s.k = c;
      s.measure = measure;
      s.target = target;
      s.allowed_first = first;
      if (s.exists()) return static_cast<std::uint8_t>(c);
    } else {
      for (unsigned k = std::max(1u, deps >= 2 ? deps - 1 : 1); k <= c; ++k) {
        CcSearch s;
        s.n = n;
        s.k = k;
        s.measure = measure;
        s.target = target;
        s.neg_budget = c - k;
        if (s.exists()) return static_cast<std::uint8_t>(c);
      }
    }
  }
  if (formula_ub <= cap) return static_cast<std::uint8_t>(formula_ub);
  return kUnreached;
}

/// D only: disjoint-composition upper bounds. U[w] = min cost[g] + cost[h] + 1
/// over w = (±g) op (±h) with both parts of known exact cost; polarities are
/// covered because cost is complement-invariant and g, h range over all
/// words. Any composition is realizable by disjoint optimal circuits, so U is
/// a true upper bound; and a word whose every circuit shares subcircuits
/// across such a top split has U strictly above its complexity.
std::vector<std::uint8_t> composition_ub(unsigned n,
                                         const std::vector<std::uint8_t>& cost) {
  const std::size_t entries = std::size_t{1} << (1u << n);
  const std::uint64_t full = entries - 1;
  std::vector<std::uint8_t> U(entries, kUnreached);
  for (std::size_t a = 0; a < entries; ++a) {
    if (cost[a] == kUnreached) continue;
    for (std::size_t b = a; b < entries; ++b) {
      if (cost[b] == kUnreached) continue;
      unsigned c = cost[a] + cost[b] + 1u;
      if (c >= kUnreached) continue;
      std::uint64_t x = a & b;
      std::uint64_t y = a | b;
      std::uint8_t c8 = static_cast<std::uint8_t>(c);
      if (c8 < U[x]) U[x] = c8;
      if (c8 < U[y]) U[y] = c8;
    }
  }
  // Output negation is free: fold complements.
  for (std::size_t v = 0; v < entries; ++v) {
    std::uint64_t cv = ~v & full;
    if (U[cv] < U[v]) U[v] = U[cv];
  }
  return U;
}

/// D table via one global chain enumeration to depth K (covers every word of
/// complexity <= K), then per level: certify stragglers whose composition
/// upper bound meets the lower bound, and search the rest per class.
CcTable build_cc_table_d(unsigned n) {
  const std::size_t entries = std::size_t{1} << (1u << n);
  const std::uint64_t full = entries - 1;
  const unsigned rows = 1u << n;
  CcTable t;
  t.num_vars = n;
  t.measure = Measure::D;
  t.cc.assign(entries, kUnreached);

  const unsigned K = 7;
  GlobalReach gr;
  gr.n = n;
  gr.K = K;
  gr.run();
  auto canon = [&](std::uint64_t x) { return std::min(x, ~x & full); };
  for (std::size_t v = 0; v < entries; ++v) t.cc[v] = gr.mark[canon(v)];
  t.cc[0] = t.cc[full] = 0;  // trivial words never appear as gates
  for (unsigned i = 1; i <= n; ++i) {
    std::uint64_t li = literal_word(n, i);
    t.cc[li] = t.cc[~li & full] = 0;
  }

  std::vector<VarTransform> group = var_transforms(n);
  const unsigned horizon = cc_horizon(n, Measure::D);
  for (unsigned level = K + 1; level <= horizon; ++level) {
    bool any_unknown = false;
    for (std::size_t v = 0; v < entries; ++v) any_unknown |= t.cc[v] == kUnreached;
    if (!any_unknown) break;
    std::vector<std::uint8_t> U = composition_ub(n, t.cc);
    for (std::size_t v = 0; v < entries; ++v) {
      if (t.cc[v] == kUnreached && U[v] == level) {
        t.cc[v] = static_cast<std::uint8_t>(level);  // lower bound level met
      }
    }
    // Remaining words need sharing across every top split; settle one
    // representative per symmetry class by direct search at exactly `level`.
    std::vector<std::uint8_t> done(entries, 0);
    for (std::size_t v = 0; v < entries; ++v) {
      if (t.cc[v] != kUnreached || done[v]) continue;
      CcSearch s;
      s.n = n;
      s.k = level;
      s.measure = Measure::D;
      s.target = v;
      s.allowed_first = allowed_first_words(n, v);
      std::uint8_t val = s.exists() ? static_cast<std::uint8_t>(level) : kUnreached;
      for (const VarTransform& g : group) {
        std::uint64_t img = apply_tf(g, v, rows);
        done[img] = done[~img & full] = 1;
        if (val != kUnreached) t.cc[img] = t.cc[~img & full] = val;
      }
    }
  }
  return t;
}

/// Builds the complete table: group functions into symmetry classes (for D,
/// variable permutations plus input and output complementations — all free;
/// for R, variable permutations only), solve one representative per class by
/// iterative deepening, then paint the class.
CcTable build_cc_table(unsigned n, Measure measure, const CcTable* d_table) {
  if (measure == Measure::D) return build_cc_table_d(n);
  const std::size_t entries = std::size_t{1} << (1u << n);
  const std::uint64_t full = entries - 1;
  const unsigned rows = 1u << n;
  CcTable t;
  t.num_vars = n;
  t.measure = measure;
  t.cc.assign(entries, kUnreached);

  std::vector<VarTransform> group = var_transforms(n);
  if (measure == Measure::R) {
    // Permutations only: keep transforms with an all-zero complement mask.
    std::vector<VarTransform> perms;
    for (const VarTransform& g : group) {
      std::uint64_t l1 = literal_word(n, 1);
      bool pure = true;
      for (unsigned i = 1; i <= n && pure; ++i) {
        std::uint64_t img = apply_tf(g, literal_word(n, i), rows);
        bool is_lit = false;
        for (unsigned j = 1; j <= n; ++j) is_lit |= img == literal_word(n, j);
        pure = is_lit;
      }
      (void)l1;
      if (pure) perms.push_back(g);
    }
    group = std::move(perms);
  }

  const unsigned cap = cc_horizon(n, measure);
  std::vector<std::uint8_t> ub = formula_upper_bounds(n, measure);
  std::vector<std::uint8_t> painted(entries, 0);
  for (std::uint64_t wv = 0; wv < entries; ++wv) {
    if (painted[wv]) continue;
    std::uint8_t v = cc_of_word(n, measure, wv, cap, ub[wv], d_table);
    // Paint the whole orbit (including output complements in D).
    for (const VarTransform& g : group) {
      std::uint64_t img = apply_tf(g, wv, rows);
      if (!painted[img]) {
        painted[img] = 1;
        t.cc[img] = v;
      }
      if (measure == Measure::D) {
        std::uint64_t imgc = ~img & full;
        if (!painted[imgc]) {
          painted[imgc] = 1;
          t.cc[imgc] = v;
        }
      }
    }
  }
  return t;
}

constexpr char kMagic[4] = {'C', 'C', 'T', 'B'};

bool load_cc_table(const std::string& path, unsigned n, Measure measure, CcTable& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  char magic[4];
  std::uint8_t hn = 0, hm = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&hn), 1);
  in.read(reinterpret_cast<char*>(&hm), 1);
  if (!in || std::memcmp(magic, kMagic, 4) != 0 || hn != n ||
      hm != static_cast<std::uint8_t>(measure == Measure::R ? 1 : 0)) {
    return false;
  }
  const std::size_t entries = std::size_t{1} << (1u << n);
  out.num_vars = n;
  out.measure = measure;
  out.cc.resize(entries);
  in.read(reinterpret_cast<char*>(out.cc.data()), static_cast<std::streamsize>(entries));
  return static_cast<bool>(in) && in.peek() == EOF;
}

void store_cc_table(const std::string& path, const CcTable& t) {
  std::error_code ec;
  std::filesystem::create_directories(std::filesystem::path(path).parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return;  // cache write failure is non-fatal
  out.write(kMagic, 4);
  std::uint8_t hn = static_cast<std::uint8_t>(t.num_vars);
  std::uint8_t hm = t.measure == Measure::R ? 1 : 0;
  out.write(reinterpret_cast<const char*>(&hn), 1);
  out.write(reinterpret_cast<const char*>(&hm), 1);
  out.write(reinterpret_cast<const char*>(t.cc.data()),
            static_cast<std::streamsize>(t.cc.size()));
}

}  // namespace

std::string cc_cache_path(unsigned num_vars, Measure measure) {
  const char* env = std::getenv("CMW_CACHE_DIR");
  std::string dir = env && *env ? env : ".cmw-cache";
  return dir + "/cc_n" + std::to_string(num_vars) + "_" +
         (measure == Measure::R ? "R" : "D") + ".bin";
}

const CcTable& cc_table(unsigned num_vars, Measure measure) {
  if (num_vars > kMaxOracleVars) {
    throw std::invalid_argument("cc_table: arity above oracle maximum");
  }
  // The D table seeds lower bounds for the R build; resolve it before taking
  // the (non-reentrant) cache lock.
  const CcTable* d_table = nullptr;
  if (measure == Measure::R) d_table = &cc_table(num_vars, Measure::D);
  static std::recursive_mutex mu;
  static std::map<std::pair<unsigned, int>, CcTable> cache;
  std::scoped_lock lock(mu);
  auto key = std::make_pair(num_vars, measure == Measure::R ? 1 : 0);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  CcTable t;
  std::string path = cc_cache_path(num_vars, measure);
  if (!load_cc_table(path, num_vars, measure, t)) {
    t = build_cc_table(num_vars, measure, d_table);
    store_cc_table(path, t);
  }
  return cache.emplace(key, std::move(t)).first->second;
}

std::optional<unsigned> exact_cc(const TruthTable& tt, Measure measure, unsigned cap) {
  if (tt.num_vars > kMaxOracleVars) {
    throw std::invalid_argument("exact_cc: arity above oracle maximum");
  }
  unsigned v = cc_table(tt.num_vars, measure).cc[as_word(tt)];
  if (v == kUnreached || v > cap) return std::nullopt;
  return v;
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration of optimal circuits
// ---------------------------------------------------------------------------

namespace {

/// Search over "boolean chains": a sequence of binary gates whose operands are
/// optionally negated references to variables or earlier gates. Negations are
/// materialized afterwards as NOT gates shared per negated source, which is
/// exactly the shape of a normalized optimal circuit (no double negations,
/// every node feeds at most one NOT).
struct ChainSearch {
  unsigned n = 0;          // variables
  unsigned k = 0;          // binary gates in the chain
  Measure measure = Measure::D;
  unsigned not_budget = 0;  // R only: exact number of NOT gates required
  std::uint64_t target = 0;
  std::uint64_t full = 0;

  struct ChainGate {
    GateKind kind;             // And or Or
    unsigned src[2];           // 0..n-1 variables, then n+j for gate j
    bool neg[2];
    std::uint64_t word;
  };
  std::vector<ChainGate> gates;
  std::vector<std::uint64_t> src_word;  // word of each source, positive phase
  std::vector<unsigned> fanout;         // per source, within the chain
  std::uint64_t dep_mask = 0;           // dependent variables of the target
  std::uint64_t read_mask = 0;          // variables read so far

  std::set<std::string> seen;
  std::vector<Circuit> out;

  void run() {
    full = (std::uint64_t{1} << (1u << n)) - 1;
    src_word.resize(n + k);
    fanout.assign(n + k, 0);
    for (unsigned i = 0; i < n; ++i) src_word[i] = literal_word(n, i + 1);
    for (unsigned i = 1; i <= n; ++i) {
      TruthTable tt = make_table(n, target);
      if (depends_on(tt, i)) dep_mask |= std::uint64_t{1} << (i - 1);
    }
    extend(0);
  }

  // Encoding used for the adjacent-independent-gate symmetry break.
  static std::uint64_t enc_operand(unsigned src, bool neg) { return src * 2 + (neg ? 1 : 0); }
  static std::uint64_t enc_gate(const ChainGate& g) {
    return ((enc_operand(g.src[0], g.neg[0]) * 1000 + enc_operand(g.src[1], g.neg[1])) * 2) +
           (g.kind == GateKind::Or ? 1 : 0);
  }

  unsigned distinct_negated_sources() const {
    std::set<unsigned> negs;
    for (const ChainGate& g : gates) {
      for (int s = 0; s < 2; ++s) {
        if (g.neg[s]) negs.insert(g.src[s]);
      }
    }
    return static_cast<unsigned>(negs.size());
  }

  void extend(unsigned t) {
    if (t == k) {
      finish();
      return;
    }
    // Connectivity prune: every unused gate/variable still has to be wired
    // through the 2(k-t) remaining operand slots, of which k-t-1 are consumed
    // by intermediate outputs.
    unsigned unused_gates = 0;
    for (unsigned j = 0; j < t; ++j) {
      if (fanout[n + j] == 0) ++unused_gates;
    }
    unsigned unread_vars = 0;
    for (unsigned i = 0; i < n; ++i) {
      if ((dep_mask >> i & 1) && !(read_mask >> i & 1)) ++unread_vars;
    }
    unsigned r = k - t;
    if (unused_gates + unread_vars > r + 1) return;

    unsigned nsrc = n + t;
    for (unsigned a = 0; a < nsrc; ++a) {
      for (unsigned b = a + 1; b < nsrc; ++b) {
        for (int na = 0; na < 2; ++na) {
          for (int nb = 0; nb < 2; ++nb) {
            std::uint64_t wa = na ? ~src_word[a] & full : src_word[a];
            std::uint64_t wb = nb ? ~src_word[b] & full : src_word[b];
            for (GateKind kind : {GateKind::And, GateKind::Or}) {
              ChainGate g;
              g.kind = kind;
              g.src[0] = a;
              g.src[1] = b;
              g.neg[0] = na != 0;
              g.neg[1] = nb != 0;
              g.word = kind == GateKind::And ? (wa & wb) : (wa | wb);
              if (!admissible(t, g)) continue;
              push_gate(t, g);
              extend(t + 1);
              pop_gate(t, g);
            }
          }
        }
      }
    }
  }

  bool admissible(unsigned t, const ChainGate& g) {
    // Semantic pruning justified by optimality: a gate computing a constant or
    // a literal could be replaced at zero binary cost; in D a gate agreeing
    // with (or complementing) an earlier gate could be merged (negation is
    // free); in R only exact duplicates merge for free.
    if (g.word == 0 || g.word == full) return false;
    for (unsigned i = 0; i < n; ++i) {
      if (g.word == src_word[i]) return false;
      if (measure == Measure::D && g.word == (~src_word[i] & full)) return false;
    }
    for (unsigned j = 0; j < t; ++j) {
      if (g.word == src_word[n + j]) return false;
      if (measure == Measure::D && g.word == (~src_word[n + j] & full)) return false;
    }
    // The chain's root is its last gate.
    if (t == k - 1 && g.word != target && (~g.word & full) != target) return false;
    if (measure == Measure::R) {
      // Exact NOT budget: count distinct negated sources so far.
      std::set<unsigned> negs;
      for (unsigned j = 0; j < t; ++j) {
        for (int s = 0; s < 2; ++s) {
          if (gates[j].neg[s]) negs.insert(gates[j].src[s]);
        }
      }
      for (int s = 0; s < 2; ++s) {
        if (g.neg[s]) negs.insert(g.src[s]);
      }
      unsigned outneg = (t == k - 1 && g.word != target) ? 1 : 0;
      if (negs.size() + outneg > not_budget) return false;
      if (t == k - 1 && negs.size() + outneg != not_budget) return false;
    }
    // Symmetry break: adjacent gates not reading each other appear in
    // non-decreasing encoding order (each DAG keeps one chain ordering).
    if (t > 0 && g.src[0] != n + t - 1 && g.src[1] != n + t - 1 &&
        enc_gate(g) < enc_gate(gates[t - 1])) {
      return false;
    }
    return true;
  }

  void push_gate(unsigned t, const ChainGate& g) {
    gates.push_back(g);
    src_word[n + t] = g.word;
    for (int s = 0; s < 2; ++s) {
      ++fanout[g.src[s]];
      if (g.src[s] < n) read_mask |= std::uint64_t{1} << g.src[s];
    }
  }

  void pop_gate(unsigned t, const ChainGate& g) {
    (void)t;
    gates.pop_back();
    for (int s = 0; s < 2; ++s) {
      --fanout[g.src[s]];
      if (g.src[s] < n && fanout[g.src[s]] == 0) {
        read_mask &= ~(std::uint64_t{1} << g.src[s]);
      }
    }
  }

  void finish() {
    // Every gate except the root must be read; every dependent variable too.
    for (unsigned j = 0; j + 1 < k; ++j) {
      if (fanout[n + j] == 0) return;
    }
    if ((read_mask & dep_mask) != dep_mask) return;
    bool outneg = gates.back().word != target;
    Circuit c = materialize(outneg);
    std::string canon = canonical_form(c);
    if (seen.insert(canon).second) out.push_back(std::move(c));
  }

  Circuit materialize(bool outneg) const {
    Circuit c;
    GateId next = 1;
    std::vector<GateId> src_id(n + k, 0);
    std::map<unsigned, GateId> not_of;  // shared NOT gate per source
    for (unsigned i = 0; i < n; ++i) {
      if (fanout[i] > 0) {
        Gate g;
        g.kind = GateKind::Input;
        g.var = VarRef{VarClass::Base, i + 1};
        src_id[i] = next;
        c.add_with_id(next++, g);
      }
    }
    auto operand = [&](unsigned src, bool neg) -> GateId {
      if (!neg) return src_id[src];
      auto it = not_of.find(src);
      if (it != not_of.end()) return it->second;
      Gate g;
      g.kind = GateKind::Not;
      g.ins = {src_id[src]};
      GateId id = next++;
      c.add_with_id(id, g);
      not_of.emplace(src, id);
      return id;
    };
    for (unsigned t = 0; t < k; ++t) {
      Gate g;
      g.kind = gates[t].kind;
      g.ins = {operand(gates[t].src[0], gates[t].neg[0]),
               operand(gates[t].src[1], gates[t].neg[1])};
      src_id[n + t] = next;
      c.add_with_id(next++, g);
    }
    c.output = src_id[n + k - 1];
    if (outneg) {
      Gate g;
      g.kind = GateKind::Not;
      g.ins = {c.output};
      GateId id = next++;
      c.add_with_id(id, g);
      c.output = id;
    }
    return c;
  }
};

/// Emits the zero-binary-gate optimal circuits (constants and literals; for
/// negated literals, a lone NOT — size 0 in D, size 1 in R).
void trivial_circuits(const TruthTable& tt, Measure measure, unsigned s,
                      std::vector<Circuit>& out) {
  unsigned n = tt.num_vars;
  std::uint64_t w = as_word(tt);
  std::uint64_t full = (std::uint64_t{1} << (1u << n)) - 1;
  if (w == 0 || w == full) {
    if (s != 0) return;
    Circuit c;
    Gate g;
    g.kind = GateKind::Const;
    g.cval = w != 0;
    c.add_with_id(1, g);
    c.output = 1;
    out.push_back(std::move(c));
    return;
  }
  for (unsigned i = 1; i <= n; ++i) {
    std::uint64_t lit = literal_word(n, i);
    if (w == lit && s == 0) {
      Circuit c;
      Gate g;
      g.kind = GateKind::Input;
      g.var = VarRef{VarClass::Base, i};
      c.add_with_id(1, g);
      c.output = 1;
      out.push_back(std::move(c));
    }
    unsigned neg_cost = measure == Measure::R ? 1 : 0;
    if (w == (~lit & full) && s == neg_cost) {
      Circuit c;
      Gate g;
      g.kind = GateKind::Input;
      g.var = VarRef{VarClass::Base, i};
      c.add_with_id(1, g);
      Gate ng;
      ng.kind = GateKind::Not;
      ng.ins = {1};
      c.add_with_id(2, ng);
      c.output = 2;
      out.push_back(std::move(c));
    }
  }
}

}  // namespace

std::vector<Circuit> enumerate_optimal_circuits(const TruthTable& tt, Measure measure,
                                                unsigned budget) {
  auto cc = exact_cc(tt, measure);
  if (!cc) throw std::runtime_error("enumerate_optimal_circuits: complexity unknown");
  unsigned s = *cc;
  if (s > budget) throw std::runtime_error("enumerate_optimal_circuits: budget exceeded");

  std::vector<Circuit> out;
  trivial_circuits(tt, measure, s, out);

  // In D every binary gate costs 1 and NOTs are free, so chains have exactly
  // s binary gates; in R a chain with k binary gates must spend exactly s-k
  // on NOT gates (distinct negated sources plus an optional output NOT).
  unsigned kmin = measure == Measure::D ? s : 1;
  for (unsigned k = kmin; k >= 1 && k <= s; ++k) {
    ChainSearch search;
    search.n = tt.num_vars;
    search.k = k;
    search.measure = measure;
    search.not_budget = s - k;
    search.target = as_word(tt);
    search.run();
    for (Circuit& c : search.out) out.push_back(std::move(c));
    if (measure == Measure::D) break;
  }

  // Cross-checks: every result computes tt, is normalized, and has size s.
  for (const Circuit& c : out) {
    assert(as_word(truth_table(c, default_var_order(tt.num_vars, 0))) == as_word(tt));
    assert(size(c, measure) == s);
    assert(is_normalized(c));
  }
  return out;
}

bool is_simple_extension_bruteforce(const TruthTable& f, const TruthTable& g,
                                    Measure measure) {
  if (!is_nondegenerate(f)) {
    throw std::invalid_argument("is_simple_extension_bruteforce: f degenerate");
  }
  if (g.num_vars < f.num_vars) return false;
  if (g.num_vars == f.num_vars && g == f) return true;
  unsigned m = g.num_vars - f.num_vars;
  if (!is_nondegenerate(g)) return false;
  auto ccf = exact_cc(f, measure);
  auto ccg = exact_cc(g, measure);
  if (!ccf || !ccg || *ccg != *ccf + m) return false;
  return !find_keys(g, f).empty();
}

}  // namespace cmw
