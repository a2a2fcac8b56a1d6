#include "cmw/circuit.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace cmw {

std::string var_name(const VarRef& v) {
  return (v.cls == VarClass::Base ? "x" : "y") + std::to_string(v.index);
}

std::optional<VarRef> parse_var_name(const std::string& tok) {
  if (tok.size() < 2 || (tok[0] != 'x' && tok[0] != 'y')) {
    throw std::runtime_error("bad variable name: " + tok);
  }
  VarRef v;
  v.cls = tok[0] == 'x' ? VarClass::Base : VarClass::Extension;
  std::size_t pos = 0;
  unsigned long idx = std::stoul(tok.substr(1), &pos);
  if (pos != tok.size() - 1 || idx == 0) {
    throw std::runtime_error("bad variable name: " + tok);
  }
  v.index = static_cast<std::uint32_t>(idx);
  return v;
}

GateId Circuit::add(Gate g) {
  GateId id = gates.empty() ? 0 : gates.rbegin()->first + 1;
  gates.emplace(id, std::move(g));
  return id;
}

void Circuit::add_with_id(GateId id, Gate g) {
  if (!gates.emplace(id, std::move(g)).second) {
    throw std::runtime_error("duplicate gate id " + std::to_string(id));
  }
}

const Gate& Circuit::at(GateId id) const {
  auto it = gates.find(id);
  if (it == gates.end()) throw std::runtime_error("unknown gate id " + std::to_string(id));
  return it->second;
}

Gate& Circuit::at(GateId id) {
  auto it = gates.find(id);
  if (it == gates.end()) throw std::runtime_error("unknown gate id " + std::to_string(id));
  return it->second;
}

static std::size_t expected_arity(GateKind k) {
  switch (k) {
    case GateKind::And:
    case GateKind::Or: return 2;
    case GateKind::Not: return 1;
    default: return 0;
  }
}

void Circuit::validate() const {
  if (!has(output)) throw std::runtime_error("output gate missing");
  for (const auto& [id, g] : gates) {
    if (g.ins.size() != expected_arity(g.kind)) {
      throw std::runtime_error("arity mismatch at gate " + std::to_string(id));
    }
    for (GateId in : g.ins) {
      if (!has(in)) throw std::runtime_error("dangling reference at gate " + std::to_string(id));
    }
  }
  topo_order(*this);  // throws on cycle
}

std::vector<GateId> topo_order(const Circuit& c) {
  std::vector<GateId> order;
  order.reserve(c.gates.size());
  std::map<GateId, int> state;  // 0 unvisited, 1 on stack, 2 done
  // Iterative DFS over every gate so disconnected gates are ordered too.
  std::function<void(GateId)> visit = [&](GateId root) {
    std::vector<std::pair<GateId, std::size_t>> stack{{root, 0}};
    while (!stack.empty()) {
      auto& [id, next] = stack.back();
      const Gate& g = c.at(id);
      if (next == 0) {
        if (state[id] == 1) throw std::runtime_error("cycle detected");
        if (state[id] == 2) {
          stack.pop_back();
          continue;
        }
        state[id] = 1;
      }
      if (next < g.ins.size()) {
        GateId in = g.ins[next++];
        if (state[in] == 1) throw std::runtime_error("cycle detected");
        if (state[in] == 0) stack.push_back({in, 0});
      } else {
        state[id] = 2;
        order.push_back(id);
        stack.pop_back();
      }
    }
  };
  for (const auto& [id, g] : c.gates) {
    if (state[id] == 0) visit(id);
  }
  return order;
}

bool evaluate(const Circuit& c, const std::map<VarRef, bool>& assignment) {
  std::map<GateId, bool> val;
  for (GateId id : topo_order(c)) {
    const Gate& g = c.at(id);
    switch (g.kind) {
      case GateKind::Input: {
        if (!g.var) throw std::runtime_error("cannot evaluate open input slot");
        auto it = assignment.find(*g.var);
        if (it == assignment.end()) {
          throw std::runtime_error("missing variable " + var_name(*g.var));
        }
        val[id] = it->second;
        break;
      }
      case GateKind::Const: val[id] = g.cval; break;
      case GateKind::Not: val[id] = !val.at(g.ins[0]); break;
      case GateKind::And: val[id] = val.at(g.ins[0]) && val.at(g.ins[1]); break;
      case GateKind::Or: val[id] = val.at(g.ins[0]) || val.at(g.ins[1]); break;
    }
  }
  return val.at(c.output);
}

std::size_t size(const Circuit& c, Measure measure) {
  std::size_t n = 0;
  for (const auto& [id, g] : c.gates) {
    if (g.kind == GateKind::And || g.kind == GateKind::Or) ++n;
    else if (g.kind == GateKind::Not && measure == Measure::R) ++n;
  }
  return n;
}

std::map<GateId, std::size_t> fanout_map(const Circuit& c) {
  std::map<GateId, std::size_t> fo;
  for (const auto& [id, g] : c.gates) fo[id];  // ensure presence
  for (const auto& [id, g] : c.gates) {
    for (GateId in : g.ins) ++fo[in];
  }
  return fo;
}

std::size_t fanout(const Circuit& c, GateId gate) {
  c.at(gate);
  std::size_t n = 0;
  for (const auto& [id, g] : c.gates) {
    for (GateId in : g.ins) {
      if (in == gate) ++n;
    }
  }
  return n;
}

std::map<GateId, int> depth_map(const Circuit& c) {
  // Reverse-topological sweep: depth(g) = max over readers r of
  // depth(r) + (1 if r is binary). The output (and disconnected sinks)
  // start at 0; a gate's own kind does not add to its depth -- the weight
  // sits on the out-edge of binary gates, matching the -1/0 edge weights.
  std::map<GateId, int> depth;
  std::vector<GateId> order = topo_order(c);
  std::map<GateId, int> max_reader;  // max depth over readers, 0 if none
  for (GateId id : order) max_reader[id] = 0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const Gate& g = c.at(*it);
    bool binary = g.kind == GateKind::And || g.kind == GateKind::Or;
    depth[*it] = max_reader[*it] + (binary ? 1 : 0);
    for (GateId in : g.ins) max_reader[in] = std::max(max_reader[in], depth[*it]);
  }
  return depth;
}

std::vector<GateId> depth_order(const Circuit& c) {
  auto depth = depth_map(c);
  std::vector<GateId> ids;
  ids.reserve(c.gates.size());
  for (const auto& [id, g] : c.gates) ids.push_back(id);
  std::stable_sort(ids.begin(), ids.end(), [&](GateId a, GateId b) {
    if (depth[a] != depth[b]) return depth[a] > depth[b];
    return a < b;
  });
  return ids;
}

Circuit subcircuit(const Circuit& c, GateId root) {
  c.at(root);
  std::set<GateId> keep;
  std::vector<GateId> stack{root};
  while (!stack.empty()) {
    GateId id = stack.back();
    stack.pop_back();
    if (!keep.insert(id).second) continue;
    for (GateId in : c.at(id).ins) stack.push_back(in);
  }
  Circuit out;
  for (GateId id : keep) out.gates[id] = c.at(id);
  out.output = root;
  return out;
}

std::vector<VarRef> variables_read(const Circuit& c) {
  std::set<VarRef> vars;
  for (const auto& [id, g] : subcircuit(c, c.output).gates) {
    if (g.kind == GateKind::Input && g.var) vars.insert(*g.var);
  }
  return {vars.begin(), vars.end()};
}

// ---------------------------------------------------------------------------
// Canonical form: iterative color refinement over (kind, label, input colors,
// reader colors) with individualization on ties; the minimum encoding over
// all branches is canonical. Exact for the small circuits in scope.
// ---------------------------------------------------------------------------

namespace {

struct CanonCtx {
  const Circuit* c;
  std::vector<GateId> ids;
  std::map<GateId, std::size_t> pos;
  std::vector<std::vector<std::size_t>> readers;  // by position
};

std::string initial_color(const Gate& g) {
  switch (g.kind) {
    case GateKind::Input:
      return g.var ? "I:" + var_name(*g.var) : "I:?";
    case GateKind::Const: return g.cval ? "C1" : "C0";
    case GateKind::Not: return "N";
    case GateKind::And: return "A";
    case GateKind::Or: return "O";
  }
  return "?";
}

// Refines colors to a fixed point; returns color class index per position.
std::vector<std::size_t> refine(const CanonCtx& ctx, std::vector<std::size_t> color) {
  const std::size_t n = ctx.ids.size();
  for (;;) {
    std::vector<std::string> sig(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Gate& g = ctx.c->at(ctx.ids[i]);
      std::vector<std::size_t> in_cols, rd_cols;
      for (GateId in : g.ins) in_cols.push_back(color[ctx.pos.at(in)]);
      std::sort(in_cols.begin(), in_cols.end());
      for (std::size_t r : ctx.readers[i]) rd_cols.push_back(color[r]);
      std::sort(rd_cols.begin(), rd_cols.end());
      std::ostringstream os;
      os << color[i] << '/' << (ctx.ids[i] == ctx.c->output ? 1 : 0) << '/';
      for (auto v : in_cols) os << v << ',';
      os << '/';
      for (auto v : rd_cols) os << v << ',';
      sig[i] = os.str();
    }
    std::vector<std::string> sorted = sig;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<std::size_t> next(n);
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = std::lower_bound(sorted.begin(), sorted.end(), sig[i]) - sorted.begin();
    }
    // Stable fixpoint test: partition unchanged when class count is stable
    // and classes agree.
    std::size_t old_classes = *std::max_element(color.begin(), color.end()) + 1;
    if (sorted.size() == old_classes) {
      // same number of classes: check partitions identical
      std::map<std::size_t, std::size_t> m;
      bool same = true;
      for (std::size_t i = 0; i < n; ++i) {
        auto it = m.find(color[i]);
        if (it == m.end()) m.emplace(color[i], next[i]);
        else if (it->second != next[i]) { same = false; break; }
      }
      if (same) return next;
    }
    color = std::move(next);
    changed = true;
    (void)changed;
  }
}

std::string encode(const CanonCtx& ctx, const std::vector<std::size_t>& color) {
  const std::size_t n = ctx.ids.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return color[a] < color[b];
  });
  std::vector<std::size_t> rank(n);
  for (std::size_t i = 0; i < n; ++i) rank[order[i]] = i;
  std::ostringstream os;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t p = order[i];
    const Gate& g = ctx.c->at(ctx.ids[p]);
    os << initial_color(g);
    std::vector<std::size_t> in_ranks;
    for (GateId in : g.ins) in_ranks.push_back(rank[ctx.pos.at(in)]);
    std::sort(in_ranks.begin(), in_ranks.end());
    os << '(';
    for (auto r : in_ranks) os << r << ',';
    os << ')';
    if (ctx.ids[p] == ctx.c->output) os << '*';
    os << ';';
  }
  return os.str();
}

std::string canon_search(const CanonCtx& ctx, std::vector<std::size_t> color) {
  color = refine(ctx, color);
  const std::size_t n = ctx.ids.size();
  // Find the smallest ambiguous color class.
  std::map<std::size_t, std::vector<std::size_t>> classes;
  for (std::size_t i = 0; i < n; ++i) classes[color[i]].push_back(i);
  const std::vector<std::size_t>* pick = nullptr;
  for (const auto& [col, members] : classes) {
    if (members.size() > 1 && (!pick || members.size() < pick->size())) pick = &members;
  }
  if (!pick) return encode(ctx, color);
  std::string best;
  for (std::size_t member : *pick) {
    std::vector<std::size_t> branched = color;
    // Individualize: give `member` a fresh color strictly above all others.
    branched[member] = n + 1;
    std::string e = canon_search(ctx, std::move(branched));
    if (best.empty() || e < best) best = e;
  }
  return best;
}

}  // namespace

std::string canonical_form(const Circuit& c) {
  CanonCtx ctx;
  ctx.c = &c;
  for (const auto& [id, g] : c.gates) {
    ctx.pos[id] = ctx.ids.size();
    ctx.ids.push_back(id);
  }
  ctx.readers.assign(ctx.ids.size(), {});
  for (const auto& [id, g] : c.gates) {
    for (GateId in : g.ins) ctx.readers[ctx.pos[in]].push_back(ctx.pos[id]);
  }
  // Initial colors from gate kind + label.
  std::vector<std::string> init;
  for (GateId id : ctx.ids) init.push_back(initial_color(c.at(id)));
  std::vector<std::string> sorted = init;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<std::size_t> color(ctx.ids.size());
  for (std::size_t i = 0; i < ctx.ids.size(); ++i) {
    color[i] = std::lower_bound(sorted.begin(), sorted.end(), init[i]) - sorted.begin();
  }
  return canon_search(ctx, std::move(color));
}

std::pair<Circuit, std::map<GateId, GateId>> renumber_depth_sorted(const Circuit& c) {
  std::vector<GateId> order = depth_order(c);
  std::map<GateId, GateId> remap;
  GateId next = 0;
  for (GateId id : order) remap[id] = next++;
  Circuit out;
  for (const auto& [id, g] : c.gates) {
    Gate ng = g;
    for (GateId& in : ng.ins) in = remap.at(in);
    out.gates[remap.at(id)] = std::move(ng);
  }
  out.output = remap.at(c.output);
  return {out, remap};
}

// ---------------------------------------------------------------------------
// .bcir parsing / writing
// ---------------------------------------------------------------------------

Circuit parse_bcir(const std::string& text) {
  Circuit c;
  bool have_output = false;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& msg) -> void {
    throw std::runtime_error("bcir line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok == "inputs") {
      std::string name;
      while (ls >> name) parse_var_name(name);  // declarative; validated only
    } else if (tok == "gate") {
      unsigned long id;
      std::string kind;
      if (!(ls >> id >> kind)) fail("malformed gate line");
      Gate g;
      auto ref = [&](GateId r) {
        if (!c.has(r)) fail("reference to undeclared gate " + std::to_string(r));
        return r;
      };
      if (kind == "AND" || kind == "OR") {
        unsigned long a, b;
        if (!(ls >> a >> b)) fail("binary gate needs two inputs");
        g.kind = kind == "AND" ? GateKind::And : GateKind::Or;
        g.ins = {ref(static_cast<GateId>(a)), ref(static_cast<GateId>(b))};
      } else if (kind == "NOT") {
        unsigned long a;
        if (!(ls >> a)) fail("NOT gate needs one input");
        g.kind = GateKind::Not;
        g.ins = {ref(static_cast<GateId>(a))};
      } else if (kind == "CONST") {
        int v;
        if (!(ls >> v) || (v != 0 && v != 1)) fail("CONST needs 0 or 1");
        g.kind = GateKind::Const;
        g.cval = v == 1;
      } else if (kind == "INPUT") {
        std::string name;
        if (!(ls >> name)) fail("INPUT needs a variable name");
        g.kind = GateKind::Input;
        g.var = name == "?" ? std::nullopt : parse_var_name(name);
      } else {
        fail("unknown gate kind " + kind);
      }
      if (c.has(static_cast<GateId>(id))) fail("duplicate gate id");
      c.add_with_id(static_cast<GateId>(id), std::move(g));
    } else if (tok == "output") {
      unsigned long id;
      if (!(ls >> id)) fail("malformed output line");
      if (!c.has(static_cast<GateId>(id))) fail("output references unknown gate");
      if (have_output) fail("duplicate output line");
      c.output = static_cast<GateId>(id);
      have_output = true;
    } else {
      fail("unknown directive " + tok);
    }
  }
  if (!have_output) throw std::runtime_error("bcir: missing output line");
  c.validate();
  return c;
}

std::string write_bcir(const Circuit& c) {
  std::ostringstream os;
  std::set<VarRef> vars;
  for (const auto& [id, g] : c.gates) {
    if (g.kind == GateKind::Input && g.var) vars.insert(*g.var);
  }
  os << "inputs";
  for (const VarRef& v : vars) os << ' ' << var_name(v);
  os << '\n';
  for (const auto& [id, g] : c.gates) {
    os << "gate " << id << ' ';
    switch (g.kind) {
      case GateKind::Input:
        os << "INPUT " << (g.var ? var_name(*g.var) : std::string("?"));
        break;
      case GateKind::Const: os << "CONST " << (g.cval ? 1 : 0); break;
      case GateKind::Not: os << "NOT " << g.ins[0]; break;
      case GateKind::And: os << "AND " << g.ins[0] << ' ' << g.ins[1]; break;
      case GateKind::Or: os << "OR " << g.ins[0] << ' ' << g.ins[1]; break;
    }
    os << '\n';
  }
  os << "output " << c.output << '\n';
  return os.str();
}

}  // namespace cmw
