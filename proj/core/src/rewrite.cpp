#include "cmw/rewrite.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace cmw {

RuleCategory rule_category(RuleId r) {
  switch (r) {
    case RuleId::FixAndL: case RuleId::FixAndR:
    case RuleId::FixOrL: case RuleId::FixOrR:
    case RuleId::FixNot0: case RuleId::FixNot1:
      return RuleCategory::Fixing;
    case RuleId::PassAndL: case RuleId::PassAndR:
    case RuleId::PassOrL: case RuleId::PassOrR:
      return RuleCategory::Passing;
    case RuleId::ResolveAndL: case RuleId::ResolveAndR:
    case RuleId::ResolveOrL: case RuleId::ResolveOrR:
      return RuleCategory::Resolving;
    case RuleId::PruneAnd: case RuleId::PruneOr: case RuleId::PruneNot:
      return RuleCategory::Pruning;
  }
  return RuleCategory::Fixing;
}

static const char* kRuleNames[kNumRules] = {
    "FIX_AND_L", "FIX_AND_R", "FIX_OR_L", "FIX_OR_R", "FIX_NOT_0", "FIX_NOT_1",
    "PASS_AND_L", "PASS_AND_R", "PASS_OR_L", "PASS_OR_R",
    "RESOLVE_AND_L", "RESOLVE_AND_R", "RESOLVE_OR_L", "RESOLVE_OR_R",
    "PRUNE_AND", "PRUNE_OR", "PRUNE_NOT",
};

const char* rule_name(RuleId r) { return kRuleNames[static_cast<int>(r)]; }

std::optional<RuleId> rule_from_name(const std::string& name) {
  for (int i = 0; i < kNumRules; ++i) {
    if (name == kRuleNames[i]) return static_cast<RuleId>(i);
  }
  return std::nullopt;
}

bool Restriction::is_simplification() const {
  for (const Step& s : steps) {
    if (std::holds_alternative<SubStep>(s)) return false;
  }
  return true;
}

std::string write_restriction(const Restriction& r) {
  std::ostringstream os;
  for (const Step& s : r.steps) {
    if (const auto* gc = std::get_if<GcStep>(&s)) {
      os << "GC " << gc->id << '\n';
    } else if (const auto* ge = std::get_if<GeStep>(&s)) {
      os << "GE " << rule_name(ge->rule) << " alpha=" << ge->b.alpha;
      if (ge->b.gamma) os << " gamma=" << *ge->b.gamma;
      if (ge->b.kappa) os << " kappa=" << *ge->b.kappa;
      if (ge->b.nu) os << " nu=" << *ge->b.nu;
      os << '\n';
    } else {
      const auto& sub = std::get<SubStep>(s);
      os << "SUB " << (sub.cls == VarClass::Base ? 'x' : 'y') << ' ' << sub.index << ' '
         << (sub.value ? 1 : 0) << '\n';
    }
  }
  return os.str();
}

Restriction parse_restriction(const std::string& text) {
  Restriction r;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok == "GC") {
      unsigned long id;
      if (!(ls >> id)) throw std::runtime_error("bad GC line");
      r.steps.push_back(GcStep{static_cast<GateId>(id)});
    } else if (tok == "GE") {
      std::string name;
      if (!(ls >> name)) throw std::runtime_error("bad GE line");
      auto rule = rule_from_name(name);
      if (!rule) throw std::runtime_error("unknown rule " + name);
      Binding b;
      std::string kv;
      bool have_alpha = false;
      while (ls >> kv) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw std::runtime_error("bad GE role " + kv);
        std::string role = kv.substr(0, eq);
        GateId id = static_cast<GateId>(std::stoul(kv.substr(eq + 1)));
        if (role == "alpha") { b.alpha = id; have_alpha = true; }
        else if (role == "gamma") b.gamma = id;
        else if (role == "kappa") b.kappa = id;
        else if (role == "nu") b.nu = id;
        else throw std::runtime_error("unknown role " + role);
      }
      if (!have_alpha) throw std::runtime_error("GE line missing alpha");
      r.steps.push_back(GeStep{*rule, b});
    } else if (tok == "SUB") {
      std::string cls;
      std::uint32_t index;
      int value;
      if (!(ls >> cls >> index >> value) || (cls != "x" && cls != "y") ||
          (value != 0 && value != 1)) {
        throw std::runtime_error("bad SUB line");
      }
      r.steps.push_back(SubStep{cls == "x" ? VarClass::Base : VarClass::Extension,
                                index, value == 1});
    } else {
      throw std::runtime_error("unknown step " + tok);
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Pattern matching
// ---------------------------------------------------------------------------

namespace {

bool is_const(const Circuit& c, GateId id, bool v) {
  const Gate& g = c.at(id);
  return g.kind == GateKind::Const && g.cval == v;
}

/// Matches one rule against main connective `alpha`; fills the binding.
bool match_at(const Circuit& c, RuleId rule, GateId alpha, Binding& b) {
  const Gate& g = c.at(alpha);
  b = Binding{};
  b.alpha = alpha;
  auto bin = [&](GateKind kind) { return g.kind == kind && g.ins.size() == 2; };
  switch (rule) {
    case RuleId::FixAndL:
      if (!bin(GateKind::And) || !is_const(c, g.ins[0], false)) return false;
      b.kappa = g.ins[0]; b.gamma = g.ins[1];
      return true;
    case RuleId::FixAndR:
      if (!bin(GateKind::And) || !is_const(c, g.ins[1], false)) return false;
      b.kappa = g.ins[1]; b.gamma = g.ins[0];
      return true;
    case RuleId::FixOrL:
      if (!bin(GateKind::Or) || !is_const(c, g.ins[0], true)) return false;
      b.kappa = g.ins[0]; b.gamma = g.ins[1];
      return true;
    case RuleId::FixOrR:
      if (!bin(GateKind::Or) || !is_const(c, g.ins[1], true)) return false;
      b.kappa = g.ins[1]; b.gamma = g.ins[0];
      return true;
    case RuleId::FixNot0:
      if (g.kind != GateKind::Not || g.ins.size() != 1 || !is_const(c, g.ins[0], false))
        return false;
      b.kappa = g.ins[0];
      return true;
    case RuleId::FixNot1:
      if (g.kind != GateKind::Not || g.ins.size() != 1 || !is_const(c, g.ins[0], true))
        return false;
      b.kappa = g.ins[0];
      return true;
    case RuleId::PassAndL:
      if (!bin(GateKind::And) || !is_const(c, g.ins[0], true)) return false;
      b.kappa = g.ins[0]; b.gamma = g.ins[1];
      return true;
    case RuleId::PassAndR:
      if (!bin(GateKind::And) || !is_const(c, g.ins[1], true)) return false;
      b.kappa = g.ins[1]; b.gamma = g.ins[0];
      return true;
    case RuleId::PassOrL:
      if (!bin(GateKind::Or) || !is_const(c, g.ins[0], false)) return false;
      b.kappa = g.ins[0]; b.gamma = g.ins[1];
      return true;
    case RuleId::PassOrR:
      if (!bin(GateKind::Or) || !is_const(c, g.ins[1], false)) return false;
      b.kappa = g.ins[1]; b.gamma = g.ins[0];
      return true;
    case RuleId::ResolveAndL:
    case RuleId::ResolveOrL: {
      GateKind k = rule == RuleId::ResolveAndL ? GateKind::And : GateKind::Or;
      if (!bin(k)) return false;
      const Gate& left = c.at(g.ins[0]);
      if (left.kind != GateKind::Not || left.ins.size() != 1 || left.ins[0] != g.ins[1])
        return false;
      b.nu = g.ins[0]; b.gamma = g.ins[1];
      return true;
    }
    case RuleId::ResolveAndR:
    case RuleId::ResolveOrR: {
      GateKind k = rule == RuleId::ResolveAndR ? GateKind::And : GateKind::Or;
      if (!bin(k)) return false;
      const Gate& right = c.at(g.ins[1]);
      if (right.kind != GateKind::Not || right.ins.size() != 1 || right.ins[0] != g.ins[0])
        return false;
      b.nu = g.ins[1]; b.gamma = g.ins[0];
      return true;
    }
    case RuleId::PruneAnd:
      if (!bin(GateKind::And) || g.ins[0] != g.ins[1]) return false;
      b.gamma = g.ins[0];
      return true;
    case RuleId::PruneOr:
      if (!bin(GateKind::Or) || g.ins[0] != g.ins[1]) return false;
      b.gamma = g.ins[0];
      return true;
    case RuleId::PruneNot: {
      if (g.kind != GateKind::Not || g.ins.size() != 1) return false;
      const Gate& in = c.at(g.ins[0]);
      if (in.kind != GateKind::Not || in.ins.size() != 1) return false;
      b.nu = g.ins[0]; b.gamma = in.ins[0];
      return true;
    }
  }
  return false;
}

/// Result of the rule's right-hand side: a constant, or redirect to gamma.
std::optional<bool> rhs_const(RuleId rule) {
  switch (rule) {
    case RuleId::FixAndL: case RuleId::FixAndR: return false;
    case RuleId::FixOrL: case RuleId::FixOrR: return true;
    case RuleId::FixNot0: return true;
    case RuleId::FixNot1: return false;
    case RuleId::ResolveAndL: case RuleId::ResolveAndR: return false;
    case RuleId::ResolveOrL: case RuleId::ResolveOrR: return true;
    default: return std::nullopt;
  }
}

void redirect(Circuit& c, GateId from, GateId to) {
  for (auto& [id, g] : c.gates) {
    for (GateId& in : g.ins) {
      if (in == from) in = to;
    }
  }
  if (c.output == from) c.output = to;
}

#ifndef NDEBUG
void assert_fanout_table(const Circuit& before, const Circuit& after, RuleId rule,
                         const Binding& b) {
  // Skip when slots alias (e.g. AND(CONST1, CONST1) reading one gate twice).
  std::vector<GateId> slots{b.alpha};
  if (b.gamma) slots.push_back(*b.gamma);
  if (b.kappa) slots.push_back(*b.kappa);
  if (b.nu) slots.push_back(*b.nu);
  std::sort(slots.begin(), slots.end());
  if (std::adjacent_find(slots.begin(), slots.end()) != slots.end()) return;
  auto fo = [&](const Circuit& c, GateId id) {
    return static_cast<long>(fanout(c, id));
  };
  long fa = fo(before, b.alpha);
  switch (rule_category(rule)) {
    case RuleCategory::Fixing:
      assert(fo(after, *b.kappa) == fo(before, *b.kappa) - 1);
      if (b.gamma) assert(fo(after, *b.gamma) == fo(before, *b.gamma) - 1);
      assert(fo(after, b.alpha) == fa);
      break;
    case RuleCategory::Passing:
      assert(fo(after, *b.kappa) == fo(before, *b.kappa) - 1);
      assert(fo(after, *b.gamma) == fo(before, *b.gamma) + fa - 1);
      assert(fo(after, b.alpha) == 0);
      break;
    case RuleCategory::Resolving:
      assert(fo(after, b.alpha) == fa);
      assert(fo(after, *b.gamma) == fo(before, *b.gamma) - 1);
      assert(fo(after, *b.nu) == fo(before, *b.nu) - 1);
      break;
    case RuleCategory::Pruning:
      if (rule == RuleId::PruneNot) {
        assert(fo(after, *b.nu) == fo(before, *b.nu) - 1);
        assert(fo(after, *b.gamma) == fo(before, *b.gamma) + fa);
      } else {
        assert(fo(after, *b.gamma) == fo(before, *b.gamma) + fa - 2);
      }
      assert(fo(after, b.alpha) == 0);
      break;
  }
}
#endif

}  // namespace

std::vector<std::pair<RuleId, Binding>> match_rules(const Circuit& c) {
  auto depth = depth_map(c);
  std::vector<std::pair<RuleId, Binding>> out;
  std::vector<GateId> ids;
  for (const auto& [id, g] : c.gates) ids.push_back(id);
  std::stable_sort(ids.begin(), ids.end(), [&](GateId a, GateId b) {
    if (depth[a] != depth[b]) return depth[a] > depth[b];
    return a < b;
  });
  for (GateId alpha : ids) {
    for (int r = 0; r < kNumRules; ++r) {
      Binding b;
      if (match_at(c, static_cast<RuleId>(r), alpha, b)) {
        out.emplace_back(static_cast<RuleId>(r), b);
      }
    }
  }
  return out;
}

std::pair<Circuit, bool> apply_step(const Circuit& c, const Step& step) {
  if (const auto* gc = std::get_if<GcStep>(&step)) {
    if (!c.has(gc->id) || gc->id == c.output || fanout(c, gc->id) != 0) return {c, false};
    Circuit out = c;
    out.gates.erase(gc->id);
    return {out, true};
  }
  if (const auto* ge = std::get_if<GeStep>(&step)) {
    if (!c.has(ge->b.alpha)) return {c, false};
    Binding b;
    if (!match_at(c, ge->rule, ge->b.alpha, b)) return {c, false};
    // The step's own binding must agree with the pattern at alpha.
    if (ge->b.gamma && ge->b.gamma != b.gamma) return {c, false};
    if (ge->b.kappa && ge->b.kappa != b.kappa) return {c, false};
    if (ge->b.nu && ge->b.nu != b.nu) return {c, false};
    Circuit out = c;
    Gate& alpha = out.at(b.alpha);
    if (auto cv = rhs_const(ge->rule)) {
      // Delete alpha's incoming wires, retype alpha to the constant in place.
      alpha.ins.clear();
      alpha.kind = GateKind::Const;
      alpha.cval = *cv;
      alpha.var.reset();
    } else {
      // Matched-node rule: delete alpha's incoming wires, then redirect every
      // wire reading alpha to read gamma. Alpha becomes a fanout-0 tombstone
      // awaiting garbage collection; its identifier never changes.
      alpha.ins.clear();
      redirect(out, b.alpha, *b.gamma);
    }
#ifndef NDEBUG
    assert_fanout_table(c, out, ge->rule, b);
#endif
    return {out, true};
  }
  const auto& sub = std::get<SubStep>(step);
  Circuit out = c;
  bool applied = false;
  for (auto& [id, g] : out.gates) {
    if (g.kind == GateKind::Input && g.var && g.var->cls == sub.cls &&
        g.var->index == sub.index) {
      g.kind = GateKind::Const;
      g.cval = sub.value;
      g.var.reset();
      applied = true;
    }
  }
  return {std::move(out), applied};
}

namespace {

/// Recursively garbage-collects fanout-0 non-output gates, appending steps.
void gc_recursive(Circuit& c, Restriction& rec) {
  for (;;) {
    auto fo = fanout_map(c);
    std::vector<GateId> dead;
    for (const auto& [id, n] : fo) {
      if (n == 0 && id != c.output) dead.push_back(id);
    }
    if (dead.empty()) return;
    for (GateId id : dead) {
      c.gates.erase(id);
      rec.steps.push_back(GcStep{id});
    }
  }
}

}  // namespace

bool is_normalized(const Circuit& c) {
  bool lone_const = c.gates.size() == 1 && c.at(c.output).kind == GateKind::Const;
  if (!lone_const) {
    for (const auto& [id, g] : c.gates) {
      if (g.kind == GateKind::Const) return false;
    }
  }
  if (subcircuit(c, c.output).gates.size() != c.gates.size()) return false;
  return match_rules(c).empty();
}

std::pair<Circuit, Restriction> normalize(const Circuit& c) {
  Circuit cur = c;
  Restriction rec;
  gc_recursive(cur, rec);
  for (;;) {
    auto matches = match_rules(cur);
    if (matches.empty()) break;
    const auto& [rule, b] = matches.front();
    auto [next, applied] = apply_step(cur, Step{GeStep{rule, b}});
    assert(applied);
    (void)applied;
    cur = std::move(next);
    rec.steps.push_back(GeStep{rule, b});
    gc_recursive(cur, rec);
  }
  return {std::move(cur), std::move(rec)};
}

std::pair<Circuit, Restriction> substitute_and_normalize(
    const Circuit& c, const std::map<VarRef, bool>& partial_assignment) {
  Restriction rec;
  auto [cur, rec0] = normalize(c);
  rec.steps = std::move(rec0.steps);
  for (const auto& [var, bit] : partial_assignment) {  // map is ascending
    SubStep sub{var.cls, var.index, bit};
    auto [next, applied] = apply_step(cur, Step{sub});
    if (!applied) continue;  // variable absent: vacuous
    cur = std::move(next);
    rec.steps.push_back(sub);
    auto [norm, nrec] = normalize(cur);
    cur = std::move(norm);
    for (Step& s : nrec.steps) rec.steps.push_back(std::move(s));
  }
  return {std::move(cur), std::move(rec)};
}

RecordCheck check_record(const Circuit& c, const Restriction& record) {
  RecordCheck out;
  Circuit cur = c;
  std::vector<int> binary_alpha_depths;
  for (const Step& s : record.steps) {
    if (const auto* ge = std::get_if<GeStep>(&s)) {
      if (cur.has(ge->b.alpha)) {
        const Gate& g = cur.at(ge->b.alpha);
        if (g.kind == GateKind::And || g.kind == GateKind::Or) {
          binary_alpha_depths.push_back(depth_map(cur).at(ge->b.alpha));
        }
      }
    }
    auto [next, applied] = apply_step(cur, s);
    if (!applied) return out;  // replay failure
    cur = std::move(next);
  }
  out.replay_ok = true;
  bool gc_pending = false;
  auto fo = fanout_map(cur);
  for (const auto& [id, n] : fo) {
    if (n == 0 && id != cur.output) gc_pending = true;
  }
  out.terminal = !gc_pending && match_rules(cur).empty();
  out.layered = true;
  for (std::size_t i = 1; i < binary_alpha_depths.size(); ++i) {
    if (binary_alpha_depths[i] > binary_alpha_depths[i - 1]) out.layered = false;
  }
  return out;
}

}  // namespace cmw
