#include "cmw/bpis.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace cmw {
namespace {

void check_instance(const BpisInstance& inst) {
  if (inst.n < 1) throw std::invalid_argument("bpis: n must be positive");
  for (const BpisEdge& e : inst.edges)
    if (e.j < 1 || e.j > inst.n || e.k < 1 || e.k > inst.n || e.jp < 1 ||
        e.jp > inst.n || e.kp < 1 || e.kp > inst.n)
      throw std::invalid_argument("bpis: edge index out of range");
}

}  // namespace

bool check_bpis_witness(const BpisInstance& inst, const BpisWitness& w) {
  const std::uint32_t n = inst.n;
  if (w.pi.size() != 2 * n) return false;
  std::vector<bool> seen(2 * n, false);
  for (std::uint32_t i = 1; i <= 2 * n; ++i) {
    std::uint32_t v = w.pi[i - 1];
    if (v < 1 || v > 2 * n || seen[v - 1]) return false;
    seen[v - 1] = true;
    if ((i <= n) != (v <= n)) return false;  // block-respecting
  }
  for (const BpisEdge& e : inst.edges)
    if (w.pi[e.j - 1] == e.k && w.pi[n + e.jp - 1] == n + e.kp) return false;
  return true;
}

PartialTruthTable reduce(const BpisInstance& inst) {
  check_instance(inst);
  const std::uint32_t n = inst.n, N = 6 * n;
  if (N > kMaxVars) throw std::invalid_argument("bpis: n too large");
  PartialTruthTable pt;
  pt.num_vars = N;
  pt.entries.assign(std::size_t(1) << N, kStar);

  auto xbit = [&](std::size_t r, std::uint32_t i) { return row_bit(r, i, N); };
  auto ybit = [&](std::size_t r, std::uint32_t i) {
    return row_bit(r, 2 * n + i, N);
  };
  auto zbit = [&](std::size_t r, std::uint32_t i) {
    return row_bit(r, 4 * n + i, N);
  };
  auto prescribe = [&](std::size_t r, bool v) {
    // The prescription cases and the half-identity blocks agree wherever they
    // overlap; a conflict here would mean the reduction is malformed.
    assert(pt.entries[r] == kStar || pt.entries[r] == std::uint8_t(v));
    pt.entries[r] = v ? 1 : 0;
  };

  for (std::size_t r = 0; r < pt.entries.size(); ++r) {
    bool x0 = true, x1 = true, z0 = true, z1 = true, y0 = true;
    bool or_z = false, or_xy = false, fhat = false;
    bool z_hi = true, z_lo = true;  // z = 1^n 0^n and z = 0^n 1^n
    for (std::uint32_t i = 1; i <= 2 * n; ++i) {
      bool x = xbit(r, i), y = ybit(r, i), z = zbit(r, i);
      x0 &= !x;
      x1 &= x;
      z0 &= !z;
      z1 &= z;
      y0 &= !y;
      or_z |= z;
      or_xy |= x || y;
      fhat |= y && z;
      if (i <= n) {
        z_hi &= z;
        z_lo &= !z;
      } else {
        z_hi &= !z;
        z_lo &= z;
      }
    }
    if (x0) prescribe(r, fhat);
    if (x1) prescribe(r, or_z);
    if (z1) prescribe(r, or_xy);
    if (z0) prescribe(r, false);
    if (y0 && z_hi) {
      bool v = false;
      for (std::uint32_t i = 1; i <= n; ++i) v |= xbit(r, i);
      prescribe(r, v);
    }
    if (y0 && z_lo) {
      bool v = false;
      for (std::uint32_t i = n + 1; i <= 2 * n; ++i) v |= xbit(r, i);
      prescribe(r, v);
    }
  }

  // Edge rows are written last: x = complement of e_k || e_k', y = 0,
  // z = e_j || e_j', value 1. (At n = 1 such a row lies inside the x = 0
  // and z = 1 regions; the edge requirement takes precedence, making the
  // table inconsistent with every C_pi exactly when no valid permutation
  // exists.)
  for (const BpisEdge& e : inst.edges) {
    std::size_t r = 0;
    for (std::uint32_t i = 1; i <= 2 * n; ++i) {
      bool x = !(i == e.k || i == n + e.kp);
      bool z = (i == e.j || i == n + e.jp);
      if (x) r |= std::size_t(1) << (N - i);
      if (z) r |= std::size_t(1) << (N - (4 * n + i));
    }
    pt.entries[r] = 1;
  }
  return pt;
}

std::optional<BpisWitness> brute_solve_bpis(const BpisInstance& inst) {
  check_instance(inst);
  const std::uint32_t n = inst.n;
  if (n > 4) throw std::invalid_argument("bpis: brute force limited to n <= 4");
  std::vector<std::uint32_t> s1(n), s2(n);
  std::iota(s1.begin(), s1.end(), 1);
  do {
    std::iota(s2.begin(), s2.end(), 1);
    do {
      BpisWitness w;
      w.pi.resize(2 * n);
      for (std::uint32_t i = 0; i < n; ++i) {
        w.pi[i] = s1[i];
        w.pi[n + i] = n + s2[i];
      }
      if (check_bpis_witness(inst, w)) return w;
    } while (std::next_permutation(s2.begin(), s2.end()));
  } while (std::next_permutation(s1.begin(), s1.end()));
  return std::nullopt;
}

Circuit witness_to_circuit(const BpisWitness& w, std::uint32_t n) {
  if (w.pi.size() != 2 * n)
    throw std::invalid_argument("bpis: witness has wrong length");
  Circuit c;
  GateId acc = 0;
  for (std::uint32_t i = 1; i <= 2 * n; ++i) {
    GateId x = c.add(Gate{GateKind::Input,
                          VarRef{VarClass::Base, w.pi[i - 1]}, false, {}});
    GateId y = c.add(
        Gate{GateKind::Input, VarRef{VarClass::Base, 2 * n + i}, false, {}});
    GateId z = c.add(
        Gate{GateKind::Input, VarRef{VarClass::Base, 4 * n + i}, false, {}});
    GateId o = c.add(Gate{GateKind::Or, std::nullopt, false, {x, y}});
    GateId a = c.add(Gate{GateKind::And, std::nullopt, false, {o, z}});
    acc = i == 1 ? a : c.add(Gate{GateKind::Or, std::nullopt, false, {acc, a}});
  }
  c.output = acc;
  c.validate();
  return c;
}

BpisWitness circuit_to_witness(const Circuit& c, std::uint32_t n) {
  auto mismatch = [](const std::string& why) -> BpisWitness {
    throw std::runtime_error("bpis: circuit structure mismatch: " + why);
  };
  BpisWitness w;
  w.pi.assign(2 * n, 0);
  std::uint32_t ands = 0;
  for (const auto& [id, g] : c.gates) {
    if (g.kind != GateKind::And) continue;
    ++ands;
    std::uint32_t zi = 0, xa = 0, yb = 0;
    for (GateId in : g.ins) {
      const Gate& h = c.at(in);
      if (h.kind == GateKind::Input && h.var && h.var->index > 4 * n) {
        zi = h.var->index - 4 * n;
      } else if (h.kind == GateKind::Or) {
        for (GateId in2 : h.ins) {
          const Gate& l = c.at(in2);
          if (l.kind != GateKind::Input || !l.var)
            return mismatch("pair gate reads a non-input");
          if (l.var->index <= 2 * n) xa = l.var->index;
          else if (l.var->index <= 4 * n) yb = l.var->index - 2 * n;
          else return mismatch("z inside a pair gate");
        }
      } else {
        return mismatch("AND input is neither z nor a pair gate");
      }
    }
    if (!zi || !xa || !yb) return mismatch("incomplete (x,y,z) triple");
    if (yb != zi) return mismatch("y and z indices disagree");
    if (w.pi[zi - 1]) return mismatch("duplicate pairing");
    w.pi[zi - 1] = xa;
  }
  if (ands != 2 * n) return mismatch("wrong number of AND gates");
  return w;
}

bool check_consistency(const Circuit& c, const PartialTruthTable& pt) {
  std::vector<VarRef> order;
  for (std::uint32_t i = 1; i <= pt.num_vars; ++i)
    order.push_back(VarRef{VarClass::Base, i});
  TruthTable tt = truth_table(c, order);
  for (std::size_t r = 0; r < pt.entries.size(); ++r)
    if (pt.entries[r] != kStar && pt.entries[r] != tt.bits[r]) return false;
  return true;
}

std::string write_bpis(const BpisInstance& inst) {
  std::ostringstream os;
  os << "n=" << inst.n << '\n';
  for (const BpisEdge& e : inst.edges)
    os << e.j << ' ' << e.k << ' ' << e.jp << ' ' << e.kp << '\n';
  return os.str();
}

BpisInstance parse_bpis(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  BpisInstance inst;
  bool have_n = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("n=", 0) == 0) {
      inst.n = static_cast<std::uint32_t>(std::stoul(line.substr(2)));
      have_n = true;
      continue;
    }
    std::istringstream ls(line);
    BpisEdge e;
    if (!(ls >> e.j >> e.k >> e.jp >> e.kp))
      throw std::runtime_error("bpis: malformed edge line: " + line);
    inst.edges.push_back(e);
  }
  if (!have_n) throw std::runtime_error("bpis: missing n= line");
  check_instance(inst);
  return inst;
}

}  // namespace cmw
