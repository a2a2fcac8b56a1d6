#include "cmw/splice.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cmw {
namespace {

/// One wire relative to an origin: the reader's input slot, or the virtual
/// output wire.
struct WireRef {
  GateId reader{0};
  int slot{0};
  bool out{false};
};

/// The origin's wire list in F: wires reading the origin directly, ordered
/// by (reader id, slot), then wires reading the origin's unique NOT, then
/// the virtual output wire. The NOT itself is transparent.
std::vector<WireRef> wire_list(const Circuit& F, GateId eta) {
  std::vector<WireRef> out;
  GateId not_gate = 0;
  bool have_not = false;
  for (const auto& [id, g] : F.gates) {
    if (g.kind == GateKind::Not && g.ins[0] == eta && !have_not) {
      not_gate = id;
      have_not = true;
      continue;
    }
    for (int s = 0; s < static_cast<int>(g.ins.size()); ++s)
      if (g.ins[s] == eta) out.push_back({id, s, false});
  }
  if (have_not)
    for (const auto& [id, g] : F.gates)
      for (int s = 0; s < static_cast<int>(g.ins.size()); ++s)
        if (g.ins[s] == not_gate) out.push_back({id, s, false});
  if (F.output == eta || (have_not && F.output == not_gate))
    out.push_back({0, 0, true});
  return out;
}

/// Incremental decode state: the working circuit plus the static wire lists
/// of F. Wire targets are read off the current wiring, NOT-transparently.
class Splicer {
 public:
  explicit Splicer(const Circuit& F) : c_(F) {}

  const Circuit& circuit() const { return c_; }

  /// Drops gates left unread after wire moves (a wire's former pass-through
  /// NOT dangles once every reader moved onto the combiner's own NOT).
  void gc() {
    for (bool changed = true; changed;) {
      changed = false;
      std::set<GateId> read;
      for (const auto& [id, g] : c_.gates)
        for (GateId in : g.ins) read.insert(in);
      std::vector<GateId> dead;
      for (const auto& [id, g] : c_.gates)
        if (id != c_.output && !read.count(id)) dead.push_back(id);
      for (GateId id : dead) {
        c_.gates.erase(id);
        changed = true;
      }
    }
  }

  GateId wire_target(const WireRef& w) const {
    GateId g = w.out ? c_.output : c_.at(w.reader).ins[w.slot];
    return c_.at(g).kind == GateKind::Not ? c_.at(g).ins[0] : g;
  }

  /// Applies one splice for origin wires `ws`. `tree_root` is the id of the
  /// already-materialized Y-tree root (negation included), or 0 to create a
  /// fresh open placeholder leaf. Returns the new combiner id, or nullopt
  /// with `st` set.
  std::optional<GateId> apply(const std::vector<WireRef>& ws, const Splice& sp,
                              GateId tree_root, DecodeStatus* st) {
    auto fail = [&](DecodeStatus s) -> std::optional<GateId> {
      if (st) *st = s;
      return std::nullopt;
    };
    const std::size_t L = ws.size();
    if (sp.target.size() < L || sp.selected.size() < L ||
        sp.selected.size() != sp.target.size())
      return fail(DecodeStatus::BadShape);
    for (std::size_t i = L; i < sp.target.size(); ++i)
      if (sp.target[i] || sp.selected[i]) return fail(DecodeStatus::BadShape);

    // Resolve the target: set bits must be exactly the wires currently
    // reading one gate.
    GateId beta = 0;
    bool have_beta = false;
    for (std::size_t i = 0; i < L; ++i) {
      if (!sp.target[i]) continue;
      GateId t = wire_target(ws[i]);
      if (have_beta && t != beta) return fail(DecodeStatus::BadTarget);
      beta = t;
      have_beta = true;
    }
    if (!have_beta) return fail(DecodeStatus::BadTarget);
    for (std::size_t i = 0; i < L; ++i)
      if (sp.target[i] != (wire_target(ws[i]) == beta))
        return fail(DecodeStatus::BadTarget);

    const auto& widgets = derive_widgets();
    if (sp.widget >= widgets.size()) return fail(DecodeStatus::BadWidget);
    const Widget& w = widgets[sp.widget];

    std::vector<std::size_t> sel;
    for (std::size_t i = 0; i < L; ++i) {
      if (!sp.selected[i]) continue;
      if (!sp.target[i]) return fail(DecodeStatus::SubsetViolation);
      sel.push_back(i);
    }
    if (sel.empty() || sp.moves.size() != sel.size())
      return fail(DecodeStatus::BadMoves);

    if (tree_root == 0)
      tree_root = c_.add(Gate{GateKind::Input, std::nullopt, false, {}});

    // The combiner's non-tree input: the target, through a NOT when the
    // widget requires one (reusing the target's existing NOT, if any).
    GateId in_other = beta;
    if (w.neg_in) {
      GateId not_of_beta = 0;
      bool have = false;
      for (const auto& [id, g] : c_.gates)
        if (g.kind == GateKind::Not && g.ins[0] == beta && !have) {
          not_of_beta = id;
          have = true;
        }
      in_other = have ? not_of_beta
                      : c_.add(Gate{GateKind::Not, std::nullopt, false, {beta}});
    }
    Gate dg;
    dg.kind = w.kind;
    dg.ins = w.y_side == YSide::Left
                 ? std::vector<GateId>{tree_root, in_other}
                 : std::vector<GateId>{in_other, tree_root};
    GateId delta = c_.add(std::move(dg));

    GateId not_delta = 0;
    for (std::size_t k = 0; k < sel.size(); ++k) {
      GateId dst = delta;
      if (sp.moves[k]) {
        if (not_delta == 0)
          not_delta =
              c_.add(Gate{GateKind::Not, std::nullopt, false, {delta}});
        dst = not_delta;
      }
      const WireRef& wr = ws[sel[k]];
      if (wr.out)
        c_.output = dst;
      else
        c_.at(wr.reader).ins[wr.slot] = dst;
    }
    if (st) *st = DecodeStatus::Ok;
    return delta;
  }

  /// Materializes a fully labeled read-once formula; returns its root
  /// (including the root-edge NOT).
  std::optional<GateId> build_tree(const RoFormula& f,
                                   std::set<std::uint32_t>& used) {
    GateId root;
    switch (f.kind) {
      case RoFormula::Kind::Leaf: {
        if (f.var == 0 || !used.insert(f.var).second) return std::nullopt;
        root = c_.add(Gate{GateKind::Input,
                           VarRef{VarClass::Extension, f.var}, false, {}});
        break;
      }
      case RoFormula::Kind::And:
      case RoFormula::Kind::Or: {
        if (f.kids.size() != 2) return std::nullopt;
        auto a = build_tree(f.kids[0], used);
        auto b = build_tree(f.kids[1], used);
        if (!a || !b) return std::nullopt;
        root = c_.add(Gate{f.kind == RoFormula::Kind::And ? GateKind::And
                                                          : GateKind::Or,
                           std::nullopt, false, {*a, *b}});
        break;
      }
    }
    if (f.neg) root = c_.add(Gate{GateKind::Not, std::nullopt, false, {root}});
    return root;
  }

 private:
  Circuit c_;
};

}  // namespace

const std::vector<Widget>& derive_widgets() {
  // Invert every simple simplification: a passing rule on AND or OR with the
  // eliminated constant on either side, with or without a negation on the
  // matched side. The tree-root and above-combiner negations are carried by
  // the Y-tree and the wire moves, not the widget.
  static const std::vector<Widget> all = [] {
    std::vector<Widget> ws;
    for (GateKind kind : {GateKind::And, GateKind::Or})
      for (YSide side : {YSide::Left, YSide::Right})
        for (bool neg_in : {false, true}) {
          Widget w;
          w.id = static_cast<std::uint8_t>(ws.size());
          w.kind = kind;
          w.y_side = side;
          w.neg_in = neg_in;
          w.sym_class = static_cast<std::uint8_t>(
              (kind == GateKind::Or ? 2 : 0) + (neg_in ? 1 : 0));
          ws.push_back(w);
        }
    std::set<std::uint8_t> classes;
    for (const Widget& w : ws) classes.insert(w.sym_class);
    assert(ws.size() == 8 && classes.size() == 4);
    return ws;
  }();
  return all;
}

unsigned RoFormula::leaves() const {
  if (kind == Kind::Leaf) return 1;
  unsigned s = 0;
  for (const RoFormula& k : kids) s += k.leaves();
  return s;
}

std::string write_formula(const RoFormula& f) {
  std::string s = f.neg ? "!" : "";
  switch (f.kind) {
    case RoFormula::Kind::Leaf:
      return s + (f.var ? "y" + std::to_string(f.var) : std::string("?"));
    case RoFormula::Kind::And:
      return s + "(" + write_formula(f.kids[0]) + "&" +
             write_formula(f.kids[1]) + ")";
    case RoFormula::Kind::Or:
      return s + "(" + write_formula(f.kids[0]) + "|" +
             write_formula(f.kids[1]) + ")";
  }
  return s;
}

namespace {
RoFormula parse_formula_at(const std::string& t, std::size_t& i) {
  auto fail = [&]() -> RoFormula {
    throw std::runtime_error("formula: parse error at offset " +
                             std::to_string(i));
  };
  RoFormula f;
  if (i < t.size() && t[i] == '!') {
    f.neg = true;
    ++i;
  }
  if (i >= t.size()) return fail();
  if (t[i] == '(') {
    ++i;
    RoFormula a = parse_formula_at(t, i);
    if (i >= t.size() || (t[i] != '&' && t[i] != '|')) return fail();
    f.kind = t[i] == '&' ? RoFormula::Kind::And : RoFormula::Kind::Or;
    ++i;
    RoFormula b = parse_formula_at(t, i);
    if (i >= t.size() || t[i] != ')') return fail();
    ++i;
    f.kids = {std::move(a), std::move(b)};
  } else if (t[i] == '?') {
    ++i;
  } else if (t[i] == 'y') {
    ++i;
    std::size_t j = i;
    while (j < t.size() && isdigit(static_cast<unsigned char>(t[j]))) ++j;
    if (j == i) return fail();
    f.var = static_cast<std::uint32_t>(std::stoul(t.substr(i, j - i)));
    i = j;
  } else {
    return fail();
  }
  return f;
}
}  // namespace

RoFormula parse_formula(const std::string& text) {
  std::size_t i = 0;
  RoFormula f = parse_formula_at(text, i);
  if (i != text.size())
    throw std::runtime_error("formula: trailing characters");
  return f;
}

unsigned SpliceCode::num_combiners() const {
  unsigned d = 0;
  for (const auto& seq : splices) d += static_cast<unsigned>(seq.size());
  return d;
}

std::optional<Circuit> decode(const Circuit& F, const SpliceCode& E,
                              DecodeStatus* status) {
  if (status) *status = DecodeStatus::Ok;
  auto fail = [&](DecodeStatus s) -> std::optional<Circuit> {
    if (status) *status = s;
    return std::nullopt;
  };
  std::vector<GateId> ids;
  for (const auto& [id, g] : F.gates) ids.push_back(id);
  if (E.origins.size() != ids.size()) return fail(DecodeStatus::BadShape);
  std::size_t nset = 0;
  for (bool b : E.origins) nset += b;
  if (nset != E.splices.size()) return fail(DecodeStatus::BadShape);

  Splicer sp(F);
  std::size_t seq = 0;
  for (std::size_t gi = 0; gi < ids.size(); ++gi) {
    if (!E.origins[gi]) continue;
    std::vector<WireRef> ws = wire_list(F, ids[gi]);
    for (const Splice& s : E.splices[seq]) {
      GateId tree = 0;
      if (s.ytree) {
        std::set<std::uint32_t> used;  // per-splice: leaves must be distinct
        auto r = sp.build_tree(*s.ytree, used);
        if (!r) return fail(DecodeStatus::BadYTree);
        tree = *r;
      }
      DecodeStatus st;
      if (!sp.apply(ws, s, tree, &st)) return fail(st);
    }
    ++seq;
  }
  sp.gc();
  return sp.circuit();
}

namespace {

RoFormula formula_of(const Circuit& G, GateId root) {
  const Gate& g = G.at(root);
  if (g.kind == GateKind::Not) {
    RoFormula f = formula_of(G, g.ins[0]);
    f.neg = !f.neg;
    return f;
  }
  RoFormula f;
  if (g.kind == GateKind::Input) {
    if (!g.var || g.var->cls != VarClass::Extension)
      throw std::runtime_error("encode: Y-tree leaf is not an extension variable");
    f.var = g.var->index;
    return f;
  }
  if (g.kind != GateKind::And && g.kind != GateKind::Or)
    throw std::runtime_error("encode: malformed Y-tree");
  f.kind = g.kind == GateKind::And ? RoFormula::Kind::And : RoFormula::Kind::Or;
  f.kids = {formula_of(G, g.ins[0]), formula_of(G, g.ins[1])};
  return f;
}

}  // namespace

SpliceCode encode(const Circuit& G, const Circuit& F,
                  const YTreeDecomposition& D, const Restriction& rho) {
  (void)rho;  // F = ρ(G) is given materialized; ids are shared with G
  std::set<GateId> original;
  std::vector<GateId> fids;
  for (const auto& [id, g] : F.gates) {
    original.insert(id);
    fids.push_back(id);
  }

  // Group combiners by origin; graft deepest-first within each origin.
  std::map<GateId, YSide> side_of;
  for (const YTreeTriple& t : D.triples) side_of[t.combiner] = t.side;
  std::map<GateId, std::vector<GateId>> by_origin;
  for (const YTreeTriple& t : D.triples)
    by_origin[origin_of(G, D, t.combiner, original)].push_back(t.combiner);
  std::map<GateId, int> depth = depth_map(G);
  for (auto& [eta, ds] : by_origin)
    std::sort(ds.begin(), ds.end(), [&](GateId a, GateId b) {
      if (depth[a] != depth[b]) return depth[a] > depth[b];
      return a < b;
    });

  std::map<GateId, GateId> tree_root_of;
  for (const YTreeTriple& t : D.triples) tree_root_of[t.combiner] = t.tree_root;

  SpliceCode code;
  code.origins.assign(fids.size(), false);
  Splicer sp(F);
  std::map<GateId, GateId> g2c;  // combiner id in G -> id in working circuit

  // Readers of each gate in G, for the selected-wire test.
  auto reads_in_G = [&](GateId reader, int slot, GateId delta) {
    GateId in = G.at(reader).ins[slot];
    if (in == delta) return std::pair<bool, bool>{true, false};
    if (G.at(in).kind == GateKind::Not && G.at(in).ins[0] == delta)
      return std::pair<bool, bool>{true, true};
    return std::pair<bool, bool>{false, false};
  };

  for (std::size_t gi = 0; gi < fids.size(); ++gi) {
    GateId eta = fids[gi];
    auto it = by_origin.find(eta);
    if (it == by_origin.end()) continue;
    code.origins[gi] = true;
    code.splices.emplace_back();
    std::vector<WireRef> ws = wire_list(F, eta);
    for (GateId delta : it->second) {
      Splice s;
      const Widget* w = nullptr;
      YSide yside = side_of.at(delta);
      GateId other = G.at(delta).ins[yside == YSide::Left ? 1 : 0];
      bool neg_in = G.at(other).kind == GateKind::Not;
      GateId beta_g = neg_in ? G.at(other).ins[0] : other;
      for (const Widget& cand : derive_widgets())
        if (cand.kind == G.at(delta).kind && cand.y_side == yside &&
            cand.neg_in == neg_in)
          w = &cand;
      if (!w) throw std::runtime_error("encode: no widget matches combiner");
      s.widget = w->id;

      GateId beta_c;
      if (original.count(beta_g)) {
        beta_c = beta_g;
      } else {
        auto mit = g2c.find(beta_g);
        if (mit == g2c.end())
          throw std::runtime_error("encode: combiner target not yet grafted");
        beta_c = mit->second;
      }
      s.target.assign(ws.size(), false);
      s.selected.assign(ws.size(), false);
      for (std::size_t i = 0; i < ws.size(); ++i)
        s.target[i] = sp.wire_target(ws[i]) == beta_c;
      for (std::size_t i = 0; i < ws.size(); ++i) {
        bool sel, via_not;
        if (ws[i].out) {
          sel = G.output == delta ||
                (G.at(G.output).kind == GateKind::Not &&
                 G.at(G.output).ins[0] == delta);
          via_not = sel && G.output != delta;
        } else {
          std::tie(sel, via_not) = reads_in_G(ws[i].reader, ws[i].slot, delta);
        }
        if (!sel) continue;
        if (!s.target[i])
          throw std::runtime_error("encode: selected wire outside target set");
        s.selected[i] = true;
        s.moves.push_back(via_not);
      }
      s.ytree = formula_of(G, tree_root_of.at(delta));

      std::set<std::uint32_t> used;
      auto tr = sp.build_tree(*s.ytree, used);
      if (!tr) throw std::runtime_error("encode: malformed Y-tree");
      DecodeStatus st;
      auto nd = sp.apply(ws, s, *tr, &st);
      if (!nd) throw std::runtime_error("encode: self-decode failed");
      g2c[delta] = *nd;
      code.splices.back().push_back(std::move(s));
    }
  }
  sp.gc();
  if (canonical_form(sp.circuit()) != canonical_form(G))
    throw std::runtime_error("encode: round trip mismatch\n" +
                             write_bcir(sp.circuit()));
  return code;
}

std::uint64_t enumerate_implicit_codes(
    const Circuit& F, unsigned m, unsigned ell, Measure measure,
    const std::function<bool(const SpliceCode&)>& visit) {
  (void)ell;
  std::vector<GateId> ids;
  for (const auto& [id, g] : F.gates) ids.push_back(id);
  std::uint64_t count = 0;
  bool stop = false;

  if (m == 0) {
    SpliceCode empty;
    empty.origins.assign(ids.size(), false);
    ++count;
    visit(empty);
    return count;
  }

  const auto& widgets = derive_widgets();

  // DFS over per-origin splice sequences, given a fixed assignment of
  // combiner counts to gates. The incremental circuit state keeps wire
  // targets exact so target codes resolve correctly splice over splice.
  std::vector<unsigned> counts(ids.size(), 0);

  // Enumerate one origin's remaining splices, then recurse to next origin.
  std::function<void(Splicer&, SpliceCode&, std::size_t, unsigned)> per_origin =
      [&](Splicer& sp, SpliceCode& code, std::size_t gi, unsigned left) {
        if (stop) return;
        if (left == 0) {
          // next origin
          std::size_t nx = gi + 1;
          while (nx < ids.size() && counts[nx] == 0) ++nx;
          if (nx == ids.size()) {
            ++count;
            if (!visit(code)) stop = true;
            return;
          }
          code.splices.emplace_back();
          per_origin(sp, code, nx, counts[nx]);
          code.splices.pop_back();
          return;
        }
        std::vector<WireRef> ws = wire_list(F, ids[gi]);
        const std::size_t L = ws.size();
        // Distinct current targets, in wire order.
        std::vector<GateId> targets;
        for (const WireRef& w : ws) {
          GateId t = sp.wire_target(w);
          if (std::find(targets.begin(), targets.end(), t) == targets.end())
            targets.push_back(t);
        }
        for (GateId beta : targets) {
          std::vector<std::size_t> members;
          for (std::size_t i = 0; i < L; ++i)
            if (sp.wire_target(ws[i]) == beta) members.push_back(i);
          const std::size_t M = members.size();
          for (std::uint64_t sub = 1; sub < (std::uint64_t(1) << M); ++sub) {
            std::vector<std::size_t> sel;
            for (std::size_t j = 0; j < M; ++j)
              if ((sub >> j) & 1) sel.push_back(members[j]);
            for (const Widget& w : widgets) {
              if (measure == Measure::R && w.neg_in) continue;
              std::uint64_t move_hi =
                  measure == Measure::R ? 1 : (std::uint64_t(1) << sel.size());
              for (std::uint64_t mv = 0; mv < move_hi; ++mv) {
                if (stop) return;
                Splice s;
                s.target.assign(L, false);
                s.selected.assign(L, false);
                for (std::size_t i : members) s.target[i] = true;
                for (std::size_t j = 0; j < sel.size(); ++j) {
                  s.selected[sel[j]] = true;
                  s.moves.push_back((mv >> j) & 1);
                }
                s.widget = w.id;
                Splicer saved = sp;  // apply is destructive; copy state
                DecodeStatus st;
                if (!sp.apply(ws, s, 0, &st)) {
                  sp = saved;
                  continue;
                }
                code.splices.back().push_back(s);
                per_origin(sp, code, gi, left - 1);
                code.splices.back().pop_back();
                sp = saved;
              }
            }
          }
        }
      };

  // All assignments of d = 1..m combiners to gates (lexicographic over the
  // per-gate count vector).
  std::function<void(std::size_t, unsigned)> assign = [&](std::size_t gi,
                                                          unsigned left) {
    if (stop) return;
    if (gi == ids.size()) {
      if (left == m) return;  // at least one combiner
      SpliceCode code;
      code.origins.assign(ids.size(), false);
      for (std::size_t i = 0; i < ids.size(); ++i)
        code.origins[i] = counts[i] > 0;
      std::size_t first = 0;
      while (first < ids.size() && counts[first] == 0) ++first;
      Splicer sp(F);
      code.splices.emplace_back();
      per_origin(sp, code, first, counts[first]);
      return;
    }
    for (unsigned c = 0; c <= left; ++c) {
      counts[gi] = c;
      assign(gi + 1, left - c);
      counts[gi] = 0;
      if (stop) return;
    }
  };
  assign(0, m);
  return count;
}

std::vector<RoFormula> enumerate_read_once_formulas(unsigned a,
                                                    bool monotone) {
  if (a == 0) throw std::invalid_argument("read-once formula needs >= 1 leaf");
  // Shapes with labeled internal nodes and (optionally) negated child edges;
  // the root's output-edge negation is added at top level.
  std::function<std::vector<RoFormula>(unsigned)> shapes =
      [&](unsigned k) -> std::vector<RoFormula> {
    std::vector<RoFormula> out;
    if (k == 1) {
      out.push_back(RoFormula{});
      return out;
    }
    for (unsigned l = 1; l < k; ++l) {
      for (const RoFormula& a0 : shapes(l)) {
        for (const RoFormula& b0 : shapes(k - l)) {
          for (RoFormula::Kind kind :
               {RoFormula::Kind::And, RoFormula::Kind::Or}) {
            for (int na = 0; na < (monotone ? 1 : 2); ++na) {
              for (int nb = 0; nb < (monotone ? 1 : 2); ++nb) {
                RoFormula f;
                f.kind = kind;
                f.kids = {a0, b0};
                f.kids[0].neg = na != 0;
                f.kids[1].neg = nb != 0;
                out.push_back(std::move(f));
              }
            }
          }
        }
      }
    }
    return out;
  };
  std::vector<RoFormula> out;
  for (RoFormula f : shapes(a)) {
    f.neg = false;
    out.push_back(f);
    if (!monotone) {
      f.neg = true;
      out.push_back(f);
    }
  }
  return out;
}

std::vector<std::vector<unsigned>> compositions(unsigned m, unsigned d) {
  if (d < 1 || d > m) throw std::invalid_argument("compositions: d out of range");
  std::vector<std::vector<unsigned>> out;
  std::vector<unsigned> cur(d);
  std::function<void(unsigned, unsigned)> rec = [&](unsigned i, unsigned left) {
    if (i == d - 1) {
      cur[i] = left;
      out.push_back(cur);
      return;
    }
    for (unsigned v = 1; v + (d - i - 1) <= left; ++v) {
      cur[i] = v;
      rec(i + 1, left - v);
    }
  };
  rec(0, m);
  return out;
}

namespace {
std::string bits_to_string(const std::vector<bool>& v) {
  std::string s;
  for (bool b : v) s += b ? '1' : '0';
  return s.empty() ? "-" : s;
}
std::vector<bool> string_to_bits(const std::string& s) {
  std::vector<bool> v;
  if (s == "-") return v;
  for (char c : s) {
    if (c != '0' && c != '1')
      throw std::runtime_error("splice code: bad bitstring " + s);
    v.push_back(c == '1');
  }
  return v;
}
}  // namespace

std::string write_splice_code(const SpliceCode& E) {
  std::ostringstream os;
  os << "origins " << bits_to_string(E.origins) << '\n';
  for (const auto& seq : E.splices) {
    for (const Splice& s : seq) {
      os << "splice target=" << bits_to_string(s.target)
         << " wires=" << bits_to_string(s.selected)
         << " widget=" << unsigned(s.widget)
         << " moves=" << bits_to_string(s.moves);
      if (s.ytree) os << " ytree=" << write_formula(*s.ytree);
      os << '\n';
    }
    os << "end-origin\n";
  }
  return os.str();
}

SpliceCode parse_splice_code(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  SpliceCode E;
  bool have_origins = false;
  std::vector<Splice> cur;
  bool in_seq = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok == "origins") {
      std::string bits;
      ls >> bits;
      E.origins = string_to_bits(bits);
      have_origins = true;
    } else if (tok == "splice") {
      Splice s;
      std::string kv;
      while (ls >> kv) {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
          throw std::runtime_error("splice code: bad field " + kv);
        std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
        if (key == "target") s.target = string_to_bits(val);
        else if (key == "wires") s.selected = string_to_bits(val);
        else if (key == "widget") s.widget = static_cast<std::uint8_t>(std::stoul(val));
        else if (key == "moves") s.moves = string_to_bits(val);
        else if (key == "ytree") s.ytree = parse_formula(val);
        else throw std::runtime_error("splice code: unknown field " + key);
      }
      cur.push_back(std::move(s));
      in_seq = true;
    } else if (tok == "end-origin") {
      E.splices.push_back(std::move(cur));
      cur.clear();
      in_seq = false;
    } else {
      throw std::runtime_error("splice code: unknown directive " + tok);
    }
  }
  if (in_seq) E.splices.push_back(std::move(cur));
  if (!have_origins) throw std::runtime_error("splice code: missing origins");
  return E;
}

}  // namespace cmw
