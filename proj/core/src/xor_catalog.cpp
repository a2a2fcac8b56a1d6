#include "cmw/xor_catalog.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "cmw/oracle.hpp"
#include "cmw/rewrite.hpp"

namespace cmw {
namespace {

/// One (¬)XOR_2 block prepared for composition: inputs opened into slots.
struct BlockVariant {
  Circuit open;
  GateId slot[2];        ///< slot gates in x1, x2 order of the source circuit
  bool slot_not[2];      ///< some NOT gate reads the slot directly
  bool negated;          ///< computes ¬XOR_2
};

/// A (¬)XOR_k subtree under construction; slots in leftmost-leaf-first order.
struct Subtree {
  Circuit c;
  std::vector<GateId> slots;
  bool negated;
};

/// Copies every gate of `src` into `dst` under fresh ids, except gates listed
/// in `subst`, whose readers are rewired to the given existing dst gates.
/// Returns the id of src's output in dst.
GateId append_circuit(Circuit& dst, const Circuit& src,
                      const std::map<GateId, GateId>& subst) {
  std::map<GateId, GateId> remap(subst);
  for (GateId id : topo_order(src)) {
    if (remap.count(id)) continue;
    Gate g = src.at(id);
    for (GateId& in : g.ins) in = remap.at(in);
    remap[id] = dst.add(std::move(g));
  }
  return remap.at(src.output);
}

BlockVariant make_variant(const Circuit& block, bool negated) {
  BlockVariant v;
  v.open = block;
  std::map<std::uint32_t, GateId> by_index;
  for (auto& [id, g] : v.open.gates) {
    if (g.kind == GateKind::Input) {
      by_index[g.var->index] = id;
      g.var.reset();  // open the slot
    }
  }
  if (by_index.size() != 2) throw std::logic_error("block must read x1 and x2");
  v.slot[0] = by_index.at(1);
  v.slot[1] = by_index.at(2);
  for (int s = 0; s < 2; ++s) {
    v.slot_not[s] = false;
    for (const auto& [id, g] : v.open.gates) {
      if (g.kind == GateKind::Not && g.ins[0] == v.slot[s]) v.slot_not[s] = true;
    }
  }
  v.negated = negated;
  return v;
}

/// Labels the slots x_1..x_k leftmost-first and returns the truth table.
TruthTable labeled_tt(const Subtree& t) {
  Circuit c = t.c;
  std::vector<VarRef> order;
  for (std::size_t i = 0; i < t.slots.size(); ++i) {
    VarRef v{VarClass::Base, static_cast<std::uint32_t>(i + 1)};
    c.at(t.slots[i]).var = v;
    order.push_back(v);
  }
  return truth_table(c, order);
}

/// Composes left and right under a top block; absent when the composition
/// would create a double negation across a block boundary.
std::optional<Subtree> compose(const Subtree& left, const Subtree& right,
                               const BlockVariant& v) {
  const bool left_not = left.c.at(left.c.output).kind == GateKind::Not;
  const bool right_not = right.c.at(right.c.output).kind == GateKind::Not;
  if ((v.slot_not[0] && left_not) || (v.slot_not[1] && right_not))
    return std::nullopt;
  Subtree out;
  out.c = left.c;
  std::map<GateId, GateId> lmap;  // keep left ids; append right then block
  GateId rroot = append_circuit(out.c, right.c, {});
  // Right slots got fresh ids; recover them as the unlabeled inputs that are
  // not left slots.
  std::set<GateId> left_slots(left.slots.begin(), left.slots.end());
  std::vector<GateId> rslots;
  for (const auto& [id, g] : out.c.gates) {
    if (g.kind == GateKind::Input && !left_slots.count(id)) rslots.push_back(id);
  }
  // append_circuit walks topo order, which is deterministic, but re-derive
  // the leftmost-first order from the right subtree's own slot order: fresh
  // ids are assigned in ascending order of the source topo walk, so sort the
  // new ids by the rank of their originals.
  {
    std::map<GateId, std::size_t> rank;
    for (std::size_t i = 0; i < right.slots.size(); ++i) rank[right.slots[i]] = i;
    std::vector<GateId> originals;
    for (GateId id : topo_order(right.c))
      if (right.c.at(id).kind == GateKind::Input) originals.push_back(id);
    // fresh ids were assigned ascending along the same walk
    std::sort(rslots.begin(), rslots.end());
    std::vector<GateId> ordered(right.slots.size());
    for (std::size_t i = 0; i < originals.size(); ++i)
      ordered[rank.at(originals[i])] = rslots[i];
    rslots = ordered;
  }
  GateId top = append_circuit(out.c, v.open,
                              {{v.slot[0], out.c.output}, {v.slot[1], rroot}});
  out.c.output = top;
  out.slots = left.slots;
  out.slots.insert(out.slots.end(), rslots.begin(), rslots.end());
  out.negated = left.negated ^ right.negated ^ v.negated;
  return out;
}

}  // namespace

TruthTable xor_tt(std::uint32_t n) {
  TruthTable tt;
  tt.num_vars = n;
  tt.bits.resize(std::size_t(1) << n);
  for (std::size_t r = 0; r < tt.rows(); ++r)
    tt.bits[r] = static_cast<std::uint8_t>(std::popcount(r) & 1);
  return tt;
}

std::vector<Circuit> xor2_blocks(Measure measure) {
  TruthTable pos = xor_tt(2);
  TruthTable neg = pos;
  for (auto& b : neg.bits) b ^= 1;
  std::vector<Circuit> blocks = enumerate_optimal_circuits(pos, measure);
  std::vector<Circuit> nblocks = enumerate_optimal_circuits(neg, measure);
  blocks.insert(blocks.end(), nblocks.begin(), nblocks.end());
#ifndef NDEBUG
  if (measure == Measure::R) {
    std::set<std::string> dforms;
    for (const Circuit& c : xor2_blocks(Measure::D)) {
      Circuit open = c;  // compare as open circuits: NOT gates aside, the
      for (auto& [id, g] : open.gates)  // R blocks must reappear among D blocks
        if (g.kind == GateKind::Input) g.var.reset();
      dforms.insert(canonical_form(open));
    }
    for (const Circuit& c : blocks) {
      Circuit open = c;
      for (auto& [id, g] : open.gates)
        if (g.kind == GateKind::Input) g.var.reset();
      assert(dforms.count(canonical_form(open)));
    }
  }
#endif
  return blocks;
}

CatalogMeta enumerate_open_optimal_xor(unsigned n, Measure measure,
                                       bool negated_target) {
  if (n < 2 || n > 8) throw std::invalid_argument("catalog arity must be 2..8");

  std::vector<BlockVariant> variants;
  {
    TruthTable pos = xor_tt(2);
    TruthTable neg = pos;
    for (auto& b : neg.bits) b ^= 1;
    for (const Circuit& c : enumerate_optimal_circuits(pos, measure))
      variants.push_back(make_variant(c, false));
    for (const Circuit& c : enumerate_optimal_circuits(neg, measure))
      variants.push_back(make_variant(c, true));
  }

  // Bottom-up over subtree sizes: classes[k] holds one representative per
  // isomorphism class of open (¬)XOR_k subtrees built from the variants.
  // Replacing a subtree by an isomorphic one yields an isomorphic whole, so
  // deduplicating at every level loses no class of full compositions.
  std::vector<std::vector<Subtree>> classes(n + 1);
  {
    Subtree leaf;
    GateId s = leaf.c.add(Gate{GateKind::Input, std::nullopt, false, {}});
    leaf.c.output = s;
    leaf.slots = {s};
    leaf.negated = false;
    classes[1] = {leaf};
  }
  for (unsigned k = 2; k <= n; ++k) {
    std::set<std::string> seen;
    for (unsigned l = 1; l < k; ++l) {
      for (const Subtree& left : classes[l]) {
        for (const Subtree& right : classes[k - l]) {
          for (const BlockVariant& v : variants) {
            std::optional<Subtree> t = compose(left, right, v);
            if (!t) continue;
            if (!seen.insert(canonical_form(t->c)).second) continue;
            classes[k].push_back(std::move(*t));
          }
        }
      }
    }
  }

  CatalogMeta meta;
  meta.measure = measure;
  meta.num_vars = n;
  TruthTable want = xor_tt(n);
  if (negated_target)
    for (auto& b : want.bits) b ^= 1;
  std::vector<std::pair<std::string, OpenCircuit>> keyed;
  for (const Subtree& t : classes[n]) {
    if (t.negated != negated_target) continue;
    if (labeled_tt(t) != want)
      throw std::logic_error("composition does not compute XOR");
    assert(is_normalized(t.c));
    unsigned s = static_cast<unsigned>(size(t.c, measure));
    if (meta.base_size == 0)
      meta.base_size = s;
    else if (meta.base_size != s)
      throw std::logic_error("catalog classes disagree on size");
    for (const auto& [id, g] : t.c.gates)
      meta.max_fanout = std::max<unsigned>(
          meta.max_fanout, static_cast<unsigned>(fanout(t.c, id)));
    auto [renum, remap] = renumber_depth_sorted(t.c);
    OpenCircuit oc;
    oc.circuit = std::move(renum);
    for (GateId s0 : t.slots) oc.slots.push_back(remap.at(s0));
    keyed.emplace_back(canonical_form(oc.circuit), std::move(oc));
  }
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [key, oc] : keyed) meta.classes.push_back(std::move(oc));
  return meta;
}

std::optional<std::vector<Block>> validate_block_partition(const Circuit& c) {
  std::map<GateId, int> depth = depth_map(c);
  std::set<GateId> leaves, assigned;
  for (const auto& [id, g] : c.gates) {
    if (g.kind == GateKind::Input) leaves.insert(id);
    if (g.kind == GateKind::Const) return std::nullopt;
  }
  auto is_binary = [&](GateId id) {
    GateKind k = c.at(id).kind;
    return k == GateKind::And || k == GateKind::Or;
  };
  // Strips one interior NOT; records it. Returns the underlying gate.
  auto strip = [&](GateId id, std::vector<GateId>& nots) {
    if (c.at(id).kind != GateKind::Not) return id;
    nots.push_back(id);
    return c.at(id).ins[0];
  };
  std::map<GateId, std::vector<GateId>> readers;
  for (const auto& [id, g] : c.gates)
    for (GateId in : g.ins) readers[in].push_back(id);

  std::vector<Block> blocks;
  for (;;) {
    // Deepest unassigned binary gate whose stripped inputs are two distinct
    // current leaves.
    GateId alpha = 0;
    bool found = false;
    GateId u = 0, w = 0;
    std::vector<GateId> alpha_nots;
    for (const auto& [id, g] : c.gates) {
      if (assigned.count(id) || !is_binary(id)) continue;
      std::vector<GateId> nots;
      GateId a = strip(g.ins[0], nots), b = strip(g.ins[1], nots);
      if (a == b || !leaves.count(a) || !leaves.count(b)) continue;
      if (!found || depth[id] > depth[alpha] ||
          (depth[id] == depth[alpha] && id < alpha)) {
        alpha = id;
        u = a;
        w = b;
        alpha_nots = nots;
        found = true;
      }
    }
    if (!found) break;

    // A sibling beta over the same stripped pair.
    GateId beta = 0;
    bool have_beta = false;
    std::vector<GateId> beta_nots;
    for (const auto& [id, g] : c.gates) {
      if (id == alpha || assigned.count(id) || !is_binary(id)) continue;
      std::vector<GateId> nots;
      GateId a = strip(g.ins[0], nots), b = strip(g.ins[1], nots);
      if ((a == u && b == w) || (a == w && b == u)) {
        beta = id;
        beta_nots = nots;
        have_beta = true;
        break;
      }
    }
    if (!have_beta) return std::nullopt;

    // A combiner nu over {alpha, beta}.
    GateId nu = 0;
    bool have_nu = false;
    std::vector<GateId> nu_nots;
    for (const auto& [id, g] : c.gates) {
      if (assigned.count(id) || !is_binary(id)) continue;
      std::vector<GateId> nots;
      GateId a = strip(g.ins[0], nots), b = strip(g.ins[1], nots);
      if ((a == alpha && b == beta) || (a == beta && b == alpha)) {
        nu = id;
        nu_nots = nots;
        have_nu = true;
        break;
      }
    }
    if (!have_nu) return std::nullopt;

    Block blk;
    blk.gates = {alpha, beta, nu};
    std::set<GateId> members = {alpha, beta, nu};
    std::set<GateId> nots(alpha_nots.begin(), alpha_nots.end());
    nots.insert(beta_nots.begin(), beta_nots.end());
    nots.insert(nu_nots.begin(), nu_nots.end());
    for (GateId nid : nots) {
      // Interior negations may only feed this block.
      for (GateId r : readers[nid])
        if (!members.count(r) && r != nu) return std::nullopt;
      blk.gates.push_back(nid);
      members.insert(nid);
    }

    // The block must compute (¬)XOR_2 of (u, w).
    auto eval_in = [&](GateId id, bool vu, bool vw,
                       const std::map<GateId, bool>& done) -> bool {
      const Gate& g = c.at(id);
      if (id == u) return vu;
      if (id == w) return vw;
      if (g.kind == GateKind::Not) {
        GateId in = g.ins[0];
        bool x = in == u ? vu : in == w ? vw : done.at(in);
        return !x;
      }
      return done.at(id);
    };
    std::uint8_t fn = 0;
    for (int row = 0; row < 4; ++row) {
      bool vu = (row >> 1) & 1, vw = row & 1;
      std::map<GateId, bool> done;
      for (GateId gid : {alpha, beta, nu}) {
        const Gate& g = c.at(gid);
        bool a = eval_in(g.ins[0], vu, vw, done);
        bool b = eval_in(g.ins[1], vu, vw, done);
        done[gid] = g.kind == GateKind::And ? (a && b) : (a || b);
      }
      fn |= static_cast<std::uint8_t>(done.at(nu)) << row;
    }
    if (fn != 0b0110 && fn != 0b1001) return std::nullopt;
    blk.negated = fn == 0b1001;

    for (GateId m : members) {
      const Gate& g = c.at(m);
      for (GateId in : g.ins) {
        if (in == u || in == w)
          blk.input_wires.emplace_back(in, m);
        else if (members.count(in))
          blk.core_wires.emplace_back(in, m);
      }
    }
    for (GateId r : readers[nu])
      if (!members.count(r)) blk.output_wires.emplace_back(nu, r);

    assigned.insert(members.begin(), members.end());
    leaves.erase(u);
    leaves.erase(w);
    leaves.insert(nu);
    blocks.push_back(std::move(blk));
  }

  // Everything must be covered; a trailing output NOT joins the top block.
  GateId top = c.output;
  if (c.at(top).kind == GateKind::Not) {
    if (assigned.count(top) || blocks.empty()) return std::nullopt;
    if (!leaves.count(c.at(top).ins[0])) return std::nullopt;
    blocks.back().gates.push_back(top);
    assigned.insert(top);
    top = c.at(top).ins[0];
  }
  if (!leaves.count(top)) return std::nullopt;
  for (const auto& [id, g] : c.gates) {
    if (g.kind == GateKind::Input) continue;
    if (!assigned.count(id)) return std::nullopt;
  }
  return blocks;
}

std::string write_catalog(const CatalogMeta& meta) {
  std::ostringstream os;
  os << "xor-catalog n=" << meta.num_vars << " measure="
     << measure_char(meta.measure) << " ell=" << meta.max_fanout
     << " s=" << meta.base_size << '\n';
  for (const OpenCircuit& oc : meta.classes) {
    os << "class\n";
    os << "slots";
    for (GateId s : oc.slots) os << ' ' << s;
    os << '\n';
    os << write_bcir(oc.circuit);
  }
  return os.str();
}

CatalogMeta parse_catalog(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("catalog: empty input");
  CatalogMeta meta;
  {
    std::istringstream hs(line);
    std::string tag, kv;
    hs >> tag;
    if (tag != "xor-catalog") throw std::runtime_error("catalog: bad header");
    while (hs >> kv) {
      auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error("catalog: bad header field " + kv);
      std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
      if (key == "n")
        meta.num_vars = static_cast<unsigned>(std::stoul(val));
      else if (key == "measure")
        meta.measure = val == "R" ? Measure::R : Measure::D;
      else if (key == "ell")
        meta.max_fanout = static_cast<unsigned>(std::stoul(val));
      else if (key == "s")
        meta.base_size = static_cast<unsigned>(std::stoul(val));
      else
        throw std::runtime_error("catalog: unknown header field " + key);
    }
  }
  std::vector<std::string> slots_line;
  std::string body;
  auto flush = [&]() {
    if (slots_line.empty() && body.empty()) return;
    OpenCircuit oc;
    oc.circuit = parse_bcir(body);
    for (const std::string& tok : slots_line)
      oc.slots.push_back(static_cast<GateId>(std::stoul(tok)));
    for (GateId s : oc.slots) {
      if (!oc.circuit.has(s) || oc.circuit.at(s).kind != GateKind::Input)
        throw std::runtime_error("catalog: slot is not an input gate");
    }
    meta.classes.push_back(std::move(oc));
    slots_line.clear();
    body.clear();
  };
  bool in_class = false;
  while (std::getline(in, line)) {
    if (line == "class") {
      if (in_class) flush();
      in_class = true;
    } else if (line.rfind("slots", 0) == 0 && in_class && body.empty()) {
      std::istringstream ls(line);
      std::string tok;
      ls >> tok;
      while (ls >> tok) slots_line.push_back(tok);
    } else if (in_class) {
      body += line;
      body += '\n';
    } else if (!line.empty()) {
      throw std::runtime_error("catalog: content before first class");
    }
  }
  if (in_class) flush();
  return meta;
}

}  // namespace cmw
