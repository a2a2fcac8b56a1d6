#include "cmw/ytree.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace cmw {
namespace {

std::map<GateId, std::vector<GateId>> reader_map(const Circuit& c) {
  std::map<GateId, std::vector<GateId>> readers;
  for (const auto& [id, g] : c.gates)
    for (GateId in : g.ins) readers[in].push_back(id);
  return readers;
}

/// Extension variables still read by the circuit, ascending by index.
std::vector<std::uint32_t> remaining_extension_vars(const Circuit& c) {
  std::vector<std::uint32_t> out;
  for (const VarRef& v : variables_read(c))
    if (v.cls == VarClass::Extension) out.push_back(v.index);
  std::sort(out.begin(), out.end());
  return out;
}

/// The GE steps of one substitution segment must be: optional constant
/// negation, exactly one passing rule, optional double negation.
bool segment_is_simple(const std::vector<Step>& steps, std::size_t from) {
  std::vector<RuleId> ge;
  for (std::size_t i = from; i < steps.size(); ++i)
    if (const auto* s = std::get_if<GeStep>(&steps[i])) ge.push_back(s->rule);
  std::size_t k = 0;
  if (k < ge.size() && (ge[k] == RuleId::FixNot0 || ge[k] == RuleId::FixNot1))
    ++k;
  if (k >= ge.size() || rule_category(ge[k]) != RuleCategory::Passing)
    return false;
  ++k;
  if (k < ge.size() && ge[k] == RuleId::PruneNot) ++k;
  return k == ge.size();
}

/// Gates of the subformula rooted at `root`, descending through all inputs
/// and stopping at INPUT gates (inclusive).
std::set<GateId> tree_gates(const Circuit& c, GateId root) {
  std::set<GateId> out;
  std::vector<GateId> stack{root};
  while (!stack.empty()) {
    GateId id = stack.back();
    stack.pop_back();
    if (!out.insert(id).second) continue;
    for (GateId in : c.at(id).ins) stack.push_back(in);
  }
  return out;
}

bool subcircuit_reads_base(const Circuit& c, GateId root) {
  std::set<GateId> seen;
  std::vector<GateId> stack{root};
  while (!stack.empty()) {
    GateId id = stack.back();
    stack.pop_back();
    if (!seen.insert(id).second) continue;
    const Gate& g = c.at(id);
    if (g.kind == GateKind::Input && g.var && g.var->cls == VarClass::Base)
      return true;
    for (GateId in : g.ins) stack.push_back(in);
  }
  return false;
}

GateId side_child(const Circuit& c, GateId delta, YSide side) {
  return c.at(delta).ins[side == YSide::Left ? 0 : 1];
}

std::string format_tree(const Circuit& c, GateId root) {
  const Gate& g = c.at(root);
  switch (g.kind) {
    case GateKind::Input:
      if (!g.var) return "?";
      return var_name(*g.var);
    case GateKind::Not: return "!" + format_tree(c, g.ins[0]);
    case GateKind::And:
      return "(" + format_tree(c, g.ins[0]) + "&" + format_tree(c, g.ins[1]) + ")";
    case GateKind::Or:
      return "(" + format_tree(c, g.ins[0]) + "|" + format_tree(c, g.ins[1]) + ")";
    case GateKind::Const: return g.cval ? "1" : "0";
  }
  return "?";
}

}  // namespace

Restriction find_all_stops_restriction(const Circuit& G, const TruthTable& f,
                                       const std::vector<Key>& keys) {
  const std::uint32_t n = f.num_vars;
  if (keys.empty() && !remaining_extension_vars(G).empty())
    throw std::invalid_argument("all-stops: no key provided");

  auto [C, rec] = normalize(G);
  for (;;) {
    std::vector<std::uint32_t> rem = remaining_extension_vars(C);
    if (rem.empty()) break;

    // Keys of the current intermediate extension (recomputed each round so
    // layer-tie substitutions need no key bookkeeping).
    std::vector<VarRef> order;
    for (std::uint32_t i = 1; i <= n; ++i)
      order.push_back({VarClass::Base, i});
    for (std::uint32_t j : rem) order.push_back({VarClass::Extension, j});
    std::vector<Key> K = find_keys(truth_table(C, order), f);
    if (K.empty())
      throw std::runtime_error("all-stops: intermediate circuit has no key");

    // Depth-maximal extension variable (ties by ascending index).
    std::map<GateId, int> depth = depth_map(C);
    GateId ygate = 0;
    std::uint32_t yindex = 0;
    bool found = false;
    for (const auto& [id, g] : C.gates) {
      if (g.kind != GateKind::Input || !g.var ||
          g.var->cls != VarClass::Extension)
        continue;
      if (!found || depth[id] > depth[ygate] ||
          (depth[id] == depth[ygate] && g.var->index < yindex)) {
        ygate = id;
        yindex = g.var->index;
        found = true;
      }
    }

    std::map<GateId, std::vector<GateId>> readers = reader_map(C);
    // (¬)y_i must have fanout exactly one into a binary main connective.
    auto sole_reader = [&](GateId id) -> GateId {
      auto it = readers.find(id);
      if (it == readers.end() || it->second.size() != 1)
        throw std::runtime_error("all-stops: extension fanout is not one");
      return it->second.front();
    };
    bool neg = false;
    GateId alpha = sole_reader(ygate);
    if (C.at(alpha).kind == GateKind::Not) {
      neg = true;
      alpha = sole_reader(alpha);
    }
    const Gate& ag = C.at(alpha);
    if (ag.kind != GateKind::And && ag.kind != GateKind::Or)
      throw std::runtime_error("all-stops: main connective is not binary");
    const GateId yside_in = neg ? readers[ygate].front() : ygate;
    GateId gamma = ag.ins[0] == yside_in ? ag.ins[1] : ag.ins[0];

    // The bit making (¬)y_i the identity element of α (a passing rule).
    const bool identity = ag.kind == GateKind::And;
    const bool pass_bit = identity ^ neg;
    std::size_t pos =
        std::find(rem.begin(), rem.end(), yindex) - rem.begin();
    bool have_pass_key = false;
    for (const Key& k : K) have_pass_key |= k[pos] == pass_bit;

    auto do_sub = [&](std::uint32_t index, bool value) {
      std::size_t drop_from = rec.steps.size();
      auto [next, seg] = substitute_and_normalize(
          C, {{VarRef{VarClass::Extension, index}, value}});
      if (size(C, Measure::D) != size(next, Measure::D) + 1)
        throw std::runtime_error(
            "all-stops: substitution eliminated != 1 binary gate");
      rec.steps.insert(rec.steps.end(), seg.steps.begin(), seg.steps.end());
      if (!segment_is_simple(rec.steps, drop_from))
        throw std::runtime_error("all-stops: simplification is not simple");
      C = std::move(next);
    };

    if (have_pass_key) {
      do_sub(yindex, pass_bit);
      continue;
    }

    // Layer tie: the sibling must be (¬)y_j. Pass y_j first, then set y_i so
    // that α's readers see the constant a fixing rule would have produced.
    bool neg_j = false;
    GateId jgate = gamma;
    if (C.at(jgate).kind == GateKind::Not) {
      neg_j = true;
      jgate = C.at(jgate).ins[0];
    }
    const Gate& jg = C.at(jgate);
    if (jg.kind != GateKind::Input || !jg.var ||
        jg.var->cls != VarClass::Extension)
      throw std::runtime_error("all-stops: no passing key and no layer tie");
    const bool s_j = identity ^ neg_j;
    const bool c_i = ag.kind == GateKind::Or;  // the absorbing constant of α
    const bool s_i = c_i ^ neg;
    do_sub(jg.var->index, s_j);
    do_sub(yindex, s_i);
  }
  return rec;
}

YTreeDecomposition extract_ytree_decomposition(const Circuit& G,
                                               std::uint32_t n,
                                               std::uint32_t m,
                                               const TruthTable& f,
                                               const std::vector<Key>& keys) {
  YTreeDecomposition out;
  if (m == 0) return out;
  Restriction rho = find_all_stops_restriction(G, f, keys);

  // Replay, snapshotting the circuit before each substitution and recording
  // that segment's passing rule.
  struct Segment {
    Circuit pre;
    bool have_pass = false;
    RuleId rule{};
    Binding binding{};
  };
  std::vector<Segment> segs;
  Circuit cur = G;
  for (const Step& step : rho.steps) {
    if (std::holds_alternative<SubStep>(step))
      segs.push_back(Segment{cur});
    auto [next, applied] = apply_step(cur, step);
    if (!applied) throw std::runtime_error("ytree: replay step did not apply");
    cur = std::move(next);
    if (const auto* ge = std::get_if<GeStep>(&step)) {
      if (rule_category(ge->rule) == RuleCategory::Passing && !segs.empty() &&
          !segs.back().have_pass) {
        segs.back().have_pass = true;
        segs.back().rule = ge->rule;
        segs.back().binding = ge->b;
      }
    }
  }
  if (segs.size() != m)
    throw std::runtime_error("ytree: restriction has wrong substitution count");

  // Reverse induction: per substitution, either the matched gate β lies in an
  // existing tree (the triple's root moves but (δ, side) stays) or a fresh
  // triple ⟨α, side of (¬)y⟩ is added.
  std::vector<std::pair<GateId, YSide>> triples;
  for (std::size_t k = segs.size(); k-- > 0;) {
    const Segment& seg = segs[k];
    if (!seg.have_pass)
      throw std::runtime_error("ytree: segment without passing rule");
    const Circuit& pre = seg.pre;
    const Circuit& after = k + 1 < segs.size() ? segs[k + 1].pre : cur;
    GateId gamma = *seg.binding.gamma;
    GateId beta =
        pre.at(gamma).kind == GateKind::Not ? pre.at(gamma).ins[0] : gamma;
    bool beta_in_tree = false;
    for (const auto& [delta, side] : triples) {
      if (tree_gates(after, side_child(after, delta, side)).count(beta)) {
        beta_in_tree = true;
        break;
      }
    }
    if (!beta_in_tree) {
      YSide side = (seg.rule == RuleId::PassAndL || seg.rule == RuleId::PassOrL)
                       ? YSide::Left
                       : YSide::Right;
      triples.emplace_back(seg.binding.alpha, side);
    }
  }

  const Circuit& full = segs.front().pre;
  std::set<std::uint32_t> ys;
  for (const auto& [delta, side] : triples) {
    YTreeTriple t;
    t.combiner = delta;
    t.side = side;
    t.tree_root = side_child(full, delta, side);
    for (GateId id : tree_gates(full, t.tree_root)) {
      const Gate& g = full.at(id);
      if (g.kind == GateKind::Input && g.var &&
          g.var->cls == VarClass::Extension)
        ys.insert(g.var->index);
    }
    out.triples.push_back(t);
  }
  out.weight = static_cast<unsigned>(ys.size());
  if (!out.total(m)) throw std::runtime_error("ytree: decomposition not total");
  return out;
}

bool validate_decomposition(const Circuit& G, const YTreeDecomposition& D,
                            std::uint32_t /*n*/, std::uint32_t m) {
  std::map<GateId, std::vector<GateId>> readers = reader_map(G);
  std::set<std::uint32_t> ys;      // extension variables across all trees
  std::set<GateId> all_tree_gates;
  for (const YTreeTriple& t : D.triples) {
    if (!G.has(t.combiner)) return false;
    const Gate& dg = G.at(t.combiner);
    if (dg.kind != GateKind::And && dg.kind != GateKind::Or) return false;
    if (side_child(G, t.combiner, t.side) != t.tree_root) return false;

    // Condition 1 + read-once: the subformula is a tree over NOT/AND/OR with
    // extension-variable leaves, each variable fresh.
    std::set<GateId> tree;
    bool ok = true;
    std::vector<GateId> stack{t.tree_root};
    while (!stack.empty() && ok) {
      GateId id = stack.back();
      stack.pop_back();
      if (!tree.insert(id).second) {
        ok = false;  // shared node: not read-once
        break;
      }
      const Gate& g = G.at(id);
      switch (g.kind) {
        case GateKind::Input:
          if (!g.var || g.var->cls != VarClass::Extension) ok = false;
          else if (!ys.insert(g.var->index).second) ok = false;
          break;
        case GateKind::Const: ok = false; break;
        default:
          for (GateId in : g.ins) stack.push_back(in);
      }
    }
    if (!ok) return false;

    // Condition 2 (isolation): the combiner is the unique reader of the
    // root, and interior gates are read only inside the tree.
    for (GateId id : tree) {
      const auto& rd = readers[id];
      if (id == t.tree_root) {
        if (rd.size() != 1 || rd.front() != t.combiner) return false;
      } else {
        std::size_t inside = 0;
        for (GateId r : rd)
          if (tree.count(r)) ++inside;
        if (inside != rd.size() || rd.size() != 1) return false;
      }
    }
    for (GateId id : tree)
      if (!all_tree_gates.insert(id).second) return false;  // intersecting

    // Condition 3: a base variable under the other child.
    GateId other = side_child(
        G, t.combiner, t.side == YSide::Left ? YSide::Right : YSide::Left);
    if (!subcircuit_reads_base(G, other)) return false;
  }
  (void)m;
  return ys.size() == D.weight;
}

GateId origin_of(const Circuit& G, const YTreeDecomposition& D, GateId delta,
                 const std::set<GateId>& original) {
  std::map<GateId, YSide> combiners;
  for (const YTreeTriple& t : D.triples) combiners[t.combiner] = t.side;
  if (!combiners.count(delta))
    throw std::runtime_error("origin_of: gate is not a combiner");
  GateId cur = side_child(
      G, delta, combiners.at(delta) == YSide::Left ? YSide::Right : YSide::Left);
  for (std::size_t guard = 0; guard <= G.num_gates(); ++guard) {
    if (G.at(cur).kind == GateKind::Not) {
      cur = G.at(cur).ins[0];
      continue;
    }
    if (original.count(cur) && subcircuit_reads_base(G, cur)) return cur;
    auto it = combiners.find(cur);
    if (it == combiners.end())
      throw std::runtime_error("origin_of: walk left the circuit");
    cur = side_child(G, cur,
                     it->second == YSide::Left ? YSide::Right : YSide::Left);
  }
  throw std::runtime_error("origin_of: walk did not terminate");
}

std::string write_decomposition(const Circuit& G,
                                const YTreeDecomposition& D) {
  std::ostringstream os;
  for (const YTreeTriple& t : D.triples)
    os << "combiner=" << t.combiner << " side=" << yside_char(t.side)
       << " tree=" << format_tree(G, t.tree_root) << '\n';
  return os.str();
}

}  // namespace cmw
