#include "cmw/solver.hpp"

#include <algorithm>
#include <cassert>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "cmw/oracle.hpp"
#include "cmw/rewrite.hpp"

namespace cmw {
namespace {

/// The catalog circuit with slots labeled x_1..x_n (identity labeling; the
/// final truth-table-isomorphism test absorbs the arbitrary choice).
Circuit label_identity(const OpenCircuit& oc) {
  Circuit c = oc.circuit;
  for (std::size_t i = 0; i < oc.slots.size(); ++i)
    c.at(oc.slots[i]).var =
        VarRef{VarClass::Base, static_cast<std::uint32_t>(i + 1)};
  return c;
}

/// Assigns y_1, y_2, ... to the open leaves in depth-first order,
/// continuing from `next`.
void label_leaves(RoFormula& f, std::uint32_t& next) {
  if (f.kind == RoFormula::Kind::Leaf) {
    f.var = next++;
    return;
  }
  for (RoFormula& k : f.kids) label_leaves(k, next);
}

struct WitnessConditions {
  bool ok{false};
  TruthTable tt;
};

/// Structural witness conditions, cheap to test before the isomorphism.
WitnessConditions structural_check(const Circuit& c, std::uint32_t n,
                                   std::uint32_t m, unsigned s,
                                   Measure measure) {
  WitnessConditions w;
  if (size(c, measure) != s + m) return w;
  if (!is_normalized(c)) return w;
  std::map<VarRef, unsigned> reads;
  for (const auto& [id, g] : c.gates)
    if (g.kind == GateKind::Input) {
      if (!g.var) return w;  // open slot
      reads[*g.var] += fanout(c, id) + (c.output == id ? 1 : 0);
    }
  for (std::uint32_t i = 1; i <= n; ++i)
    if (!reads.count(VarRef{VarClass::Base, i})) return w;
  for (std::uint32_t j = 1; j <= m; ++j) {
    auto it = reads.find(VarRef{VarClass::Extension, j});
    if (it == reads.end() || it->second != 1) return w;
  }
  if (reads.size() != n + m) return w;
  w.tt = truth_table(c, default_var_order(n, m));
  w.ok = true;
  return w;
}

/// Lexicographically least truth-table word over all variable permutations;
/// two tables are isomorphic exactly when their canonical words agree.
std::uint64_t perm_canon_word(const TruthTable& tt) {
  Permutation pi(tt.num_vars);
  for (std::uint32_t i = 0; i < tt.num_vars; ++i) pi[i] = i + 1;
  std::uint64_t best = ~std::uint64_t{0};
  do {
    best = std::min(best, as_word(apply_perm(tt, pi)));
  } while (std::next_permutation(pi.begin(), pi.end()));
  return best;
}

}  // namespace

bool check_witness(const SepInstance& inst, const SepWitness& w) {
  const std::uint32_t m = inst.g.num_vars - inst.n;
  WitnessConditions c = structural_check(w.circuit, inst.n, m,
                                         inst.catalog.base_size, inst.measure);
  if (!c.ok) return false;
  if (w.pi.size() != inst.n + m) return false;
  return apply_perm(c.tt, w.pi) == inst.g;
}

namespace {

/// The enumerated candidate set — all decodes over all classes, codes,
/// compositions and formula tuples — depends only on the catalog, m and the
/// measure, never on g. Sweeps over many g (like the exhaustive
/// cross-validation against the brute-force oracle) therefore share one
/// index: candidate → permutation-canonical truth-table word, keeping the
/// lexicographically least canonical circuit per word as the witness.
struct CandidateIndex {
  std::uint64_t decoded = 0;  // decode attempts while building
  std::map<std::uint64_t, std::pair<std::string, Circuit>> by_word;
};

CandidateIndex build_index(const CatalogMeta& cat, std::uint32_t n,
                           std::uint32_t m, Measure measure,
                           std::uint64_t budget) {
  const unsigned s = cat.base_size;
  const unsigned ell = cat.max_fanout;
  const bool monotone = measure == Measure::R;
  CandidateIndex idx;
  std::set<std::string> memo;  // canonical forms of decoded circuits

  for (const OpenCircuit& oc : cat.classes) {
    const Circuit F = label_identity(oc);
    enumerate_implicit_codes(
        F, m, ell, measure, [&](const SpliceCode& code) {
          const unsigned d = code.num_combiners();
          if (d == 0 || d > m) return true;
          for (const std::vector<unsigned>& comp : compositions(m, d)) {
            std::vector<std::vector<RoFormula>> lists(d);
            for (unsigned j = 0; j < d; ++j)
              lists[j] = enumerate_read_once_formulas(comp[j], monotone);
            std::vector<std::size_t> idxs(d, 0);
            for (;;) {
              SpliceCode full = code;
              std::uint32_t next = 1;
              std::size_t k = 0;
              for (auto& seq : full.splices)
                for (Splice& sp : seq) {
                  RoFormula fm = lists[k][idxs[k]];
                  label_leaves(fm, next);
                  sp.ytree = std::move(fm);
                  ++k;
                }
              ++idx.decoded;
              if (idx.decoded > budget)
                throw std::runtime_error("solve: decode budget exceeded");
              auto C = decode(F, full);
              if (C) {
                std::string canon = canonical_form(*C);
                if (memo.insert(canon).second) {
                  WitnessConditions wc = structural_check(*C, n, m, s, measure);
                  if (wc.ok) {
                    std::uint64_t w = perm_canon_word(wc.tt);
                    auto it = idx.by_word.find(w);
                    if (it == idx.by_word.end() || canon < it->second.first)
                      idx.by_word[w] = {std::move(canon), std::move(*C)};
                  }
                }
              }
              // odometer over formula tuples
              std::size_t p = d;
              while (p > 0) {
                --p;
                if (++idxs[p] < lists[p].size()) break;
                idxs[p] = 0;
                if (p == 0) goto comp_done;
              }
            }
          comp_done:;
          }
          return true;
        });
  }
  return idx;
}

/// Index cache keyed by the catalog's semantic identity plus (m, measure).
const CandidateIndex& shared_index(const CatalogMeta& cat, std::uint32_t n,
                                   std::uint32_t m, Measure measure,
                                   std::uint64_t budget) {
  using Key = std::tuple<std::uint32_t, std::uint32_t, int, unsigned, unsigned,
                         std::size_t, std::string>;
  static std::mutex mu;
  static std::map<Key, CandidateIndex> cache;
  Key key{n,
          m,
          measure == Measure::R ? 1 : 0,
          cat.base_size,
          cat.max_fanout,
          cat.classes.size(),
          canonical_form(cat.classes.front().circuit)};
  std::scoped_lock lock(mu);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, build_index(cat, n, m, measure, budget)).first;
  return it->second;
}

std::optional<SepWitness> run(const SepInstance& inst, SolveStats* stats,
                              bool exhaustive) {
  if (!is_nondegenerate(inst.f))
    throw std::invalid_argument("solve: f is degenerate");
  if (inst.f.num_vars != inst.n || inst.g.num_vars < inst.n)
    throw std::invalid_argument("solve: arity mismatch");
  if (inst.catalog.measure != inst.measure ||
      inst.catalog.num_vars != inst.n || inst.catalog.classes.empty())
    throw std::invalid_argument("solve: catalog mismatch");
  const std::uint32_t n = inst.n, m = inst.g.num_vars - n;
  const unsigned s = inst.catalog.base_size;
  const unsigned ell = inst.catalog.max_fanout;

  SolveStats local;
  SolveStats& st = stats ? *stats : local;
  const unsigned exp =
      std::min<unsigned>(62, kBudgetC * ell * (s + m));
  st.budget = static_cast<std::uint64_t>(inst.catalog.classes.size())
              << exp;
  st.decoded = 0;

  // Step 1: some restriction of the extension variables yields f exactly.
  if (find_keys(inst.g, inst.f).empty()) return std::nullopt;
  // Step 2: g depends on every variable (vacuous at m = 0, where the key
  // check already forces g = f).
  if (m == 0) {
    const Circuit base = label_identity(inst.catalog.classes.front());
    TruthTable tt = truth_table(base, default_var_order(n, 0));
    auto pi = tt_isomorphic(tt, inst.g);
    if (!pi) throw std::runtime_error("solve: catalog does not compute f");
    return SepWitness{base, *pi};
  }
  if (!is_nondegenerate(inst.g)) return std::nullopt;

  // The candidate set is g-independent, so both modes consult the shared
  // index; `exhaustive` is absorbed by the index always keeping the
  // lexicographically least canonical circuit per isomorphism class.
  (void)exhaustive;
  const CandidateIndex& idx = shared_index(inst.catalog, n, m, inst.measure,
                                           st.budget);
  st.decoded = idx.decoded;
  auto it = idx.by_word.find(perm_canon_word(inst.g));
  if (it == idx.by_word.end()) return std::nullopt;
  const Circuit& C = it->second.second;
  TruthTable tt = truth_table(C, default_var_order(n, m));
  auto pi = tt_isomorphic(tt, inst.g);
  assert(pi);
  return SepWitness{C, *pi};
}

}  // namespace

bool solve(const SepInstance& inst, SolveStats* stats, bool exhaustive) {
  return run(inst, stats, exhaustive).has_value();
}

std::optional<SepWitness> witness(const SepInstance& inst, SolveStats* stats,
                                  bool exhaustive) {
  auto w = run(inst, stats, exhaustive);
  if (w) assert(check_witness(inst, *w));
  return w;
}

bool solve_xor(std::uint32_t n, const TruthTable& g, Measure measure) {
  if (n < 2 || n > 8) throw std::invalid_argument("solve_xor: n out of range");
  namespace fs = std::filesystem;
  const char* env = std::getenv("CMW_CACHE_DIR");
  fs::path dir = env && *env ? fs::path(env) : fs::path(".cmw-cache");
  fs::path file = dir / ("xor_catalog_n" + std::to_string(n) + "_" +
                         std::string(1, measure_char(measure)) + ".txt");
  CatalogMeta cat;
  bool loaded = false;
  if (fs::exists(file)) {
    std::ifstream in(file);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      cat = parse_catalog(ss.str());
      loaded = cat.num_vars == n && cat.measure == measure;
    } catch (const std::exception&) {
      loaded = false;  // corrupt cache: rebuild below
    }
  }
  if (!loaded) {
    cat = enumerate_open_optimal_xor(n, measure);
    std::error_code ec;
    fs::create_directories(dir, ec);
    std::ofstream out(file);
    out << write_catalog(cat);
  }
  SepInstance inst{n, xor_tt(n), g, measure, std::move(cat)};
  return solve(inst);
}

}  // namespace cmw
