#include <numeric>
#include <set>

#include "cmw/bpis.hpp"
#include "cmw/oracle.hpp"
#include "cmw/rewrite.hpp"
#include "cmw/solver.hpp"
#include "cmw/splice.hpp"
#include "cmw/truth_table.hpp"
#include "cmw/xor_catalog.hpp"
#include "cmw/ytree.hpp"
#include "doctest.h"

using namespace cmw;

namespace {

TruthTable xor2_or_y1() {
  TruthTable g;
  g.num_vars = 3;
  g.bits.resize(8);
  for (std::size_t r = 0; r < 8; ++r)
    g.bits[r] = (row_bit(r, 1, 3) != row_bit(r, 2, 3)) || row_bit(r, 3, 3);
  return g;
}

/// All optimal circuits for (x1 xor x2) or y1, with the instance's
/// variable split applied.
std::vector<Circuit> positive_population() {
  std::vector<Circuit> out;
  for (Circuit c : enumerate_optimal_circuits(xor2_or_y1(), Measure::D, 4)) {
    for (auto& [id, g] : c.gates)
      if (g.kind == GateKind::Input && g.var && g.var->index == 3)
        g.var = VarRef{VarClass::Extension, 1};
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

TEST_CASE("xor catalog shape") {
  CatalogMeta d2 = enumerate_open_optimal_xor(2, Measure::D);
  CHECK(d2.classes.size() == 14);
  CHECK(d2.base_size == 3);
  CHECK(d2.max_fanout == 2);
  CatalogMeta r2 = enumerate_open_optimal_xor(2, Measure::R);
  CHECK(r2.classes.size() == 1);
  CHECK(r2.base_size == 4);
  CatalogMeta r3 = enumerate_open_optimal_xor(3, Measure::R);
  CHECK(r3.classes.size() == 2);
  CHECK(r3.base_size == 8);
  // file round trip
  CatalogMeta back = parse_catalog(write_catalog(d2));
  CHECK(back.classes.size() == d2.classes.size());
  CHECK(back.base_size == d2.base_size);
  CHECK(back.max_fanout == d2.max_fanout);
  for (std::size_t i = 0; i < back.classes.size(); ++i)
    CHECK(canonical_form(back.classes[i].circuit) ==
          canonical_form(d2.classes[i].circuit));
}

TEST_CASE("block partition accepts optimal and rejects suboptimal") {
  for (const Circuit& c : enumerate_optimal_circuits(xor_tt(2), Measure::D, 3))
    CHECK(validate_block_partition(c));
  // circuits outside the block family are rejected
  Circuit c;
  GateId x1 = c.add(Gate{GateKind::Input, VarRef{VarClass::Base, 1}, false, {}});
  GateId x2 = c.add(Gate{GateKind::Input, VarRef{VarClass::Base, 2}, false, {}});
  c.output = c.add(Gate{GateKind::And, std::nullopt, false, {x1, x2}});
  CHECK_FALSE(validate_block_partition(c));
  Circuit d;
  GateId y1 = d.add(Gate{GateKind::Input, VarRef{VarClass::Base, 1}, false, {}});
  GateId y2 = d.add(Gate{GateKind::Input, VarRef{VarClass::Base, 2}, false, {}});
  GateId y3 = d.add(Gate{GateKind::Input, VarRef{VarClass::Base, 3}, false, {}});
  GateId o1 = d.add(Gate{GateKind::Or, std::nullopt, false, {y1, y2}});
  d.output = d.add(Gate{GateKind::Or, std::nullopt, false, {o1, y3}});
  CHECK_FALSE(validate_block_partition(d));
}

TEST_CASE("ytree extraction on the basic positive instance") {
  TruthTable f = xor_tt(2);
  for (const Circuit& G : positive_population()) {
    auto keys = find_keys(truth_table(G, default_var_order(2, 1)), f);
    REQUIRE_FALSE(keys.empty());
    auto D = extract_ytree_decomposition(G, 2, 1, f, keys);
    CHECK(D.total(1));
    CHECK(D.triples.size() == 1);
    CHECK(validate_decomposition(G, D, 2, 1));
    auto rho = find_all_stops_restriction(G, f, keys);
    CHECK_FALSE(rho.is_simplification());
    RecordCheck chk = check_record(G, rho);
    CHECK(chk.replay_ok);
    CHECK(chk.terminal);
    CHECK(chk.layered);
  }
}

TEST_CASE("splice codes round trip the positive population") {
  TruthTable f = xor_tt(2);
  for (const Circuit& G : positive_population()) {
    auto keys = find_keys(truth_table(G, default_var_order(2, 1)), f);
    auto D = extract_ytree_decomposition(G, 2, 1, f, keys);
    auto rho = find_all_stops_restriction(G, f, keys);
    Circuit F = G;
    for (const auto& st : rho.steps) F = apply_step(F, st).first;
    SpliceCode code = encode(G, F, D, rho);
    auto dec = decode(F, code);
    REQUIRE(dec);
    CHECK(canonical_form(*dec) == canonical_form(G));
    SpliceCode back = parse_splice_code(write_splice_code(code));
    auto dec2 = decode(F, back);
    REQUIRE(dec2);
    CHECK(canonical_form(*dec2) == canonical_form(G));
  }
}

TEST_CASE("widgets and read-once formula counts") {
  const auto& ws = derive_widgets();
  CHECK(ws.size() == 8);
  std::set<std::uint8_t> classes;
  for (const Widget& w : ws) classes.insert(w.sym_class);
  CHECK(classes.size() == 4);

  // t(a) = C_{a-1} * 2^{3a-2} with negations; Catalan shapes only when
  // monotone.
  CHECK(enumerate_read_once_formulas(1, true).size() == 1);
  CHECK(enumerate_read_once_formulas(2, true).size() == 2);
  CHECK(enumerate_read_once_formulas(3, true).size() == 8);
  CHECK(enumerate_read_once_formulas(1, false).size() == 2);
  CHECK(enumerate_read_once_formulas(2, false).size() == 16);   // 1*2^4
  CHECK(enumerate_read_once_formulas(3, false).size() == 256);  // 2*2^7

  CHECK(compositions(3, 1).size() == 1);
  CHECK(compositions(3, 2).size() == 2);
  CHECK(compositions(4, 2).size() == 3);

  RoFormula fm = parse_formula("!(y1&(y2|!y3))");
  CHECK(write_formula(fm) == "!(y1&(y2|!y3))");
  CHECK(fm.leaves() == 3);
}

TEST_CASE("decode rejects malformed codes distinctly") {
  Circuit F;
  GateId x1 = F.add(Gate{GateKind::Input, VarRef{VarClass::Base, 1}, false, {}});
  GateId x2 = F.add(Gate{GateKind::Input, VarRef{VarClass::Base, 2}, false, {}});
  F.output = F.add(Gate{GateKind::Or, std::nullopt, false, {x1, x2}});

  SpliceCode code;
  code.origins = {false, false, true};  // the OR gate is the origin
  Splice s;
  s.target = {true};
  s.selected = {true};
  s.widget = 0;
  s.moves = {false};
  s.ytree = parse_formula("y1");
  code.splices.push_back({s});
  DecodeStatus st;
  auto ok = decode(F, code, &st);
  REQUIRE(ok);
  CHECK(st == DecodeStatus::Ok);

  SpliceCode bad = code;
  bad.splices[0][0].widget = 200;
  CHECK_FALSE(decode(F, bad, &st));
  CHECK(st == DecodeStatus::BadWidget);

  bad = code;
  bad.splices[0][0].selected = {false};
  CHECK_FALSE(decode(F, bad, &st));
  CHECK(st == DecodeStatus::BadMoves);  // nothing selected

  bad = code;
  bad.splices[0][0].ytree = parse_formula("(y1&y1)");  // duplicate label
  CHECK_FALSE(decode(F, bad, &st));
  CHECK(st == DecodeStatus::BadYTree);

  bad = code;
  bad.origins = {true, false, true};  // indicator/sequence mismatch
  CHECK_FALSE(decode(F, bad, &st));
  CHECK(st == DecodeStatus::BadShape);
}

TEST_CASE("solver matches the bundled examples") {
  TruthTable f = xor_tt(2);
  CatalogMeta cat = enumerate_open_optimal_xor(2, Measure::D);
  auto make = [&](const TruthTable& g) {
    return SepInstance{2, f, g, Measure::D, cat};
  };
  CHECK_FALSE(solve(make(xor_tt(3))));
  CHECK(solve(make(xor2_or_y1())));
  CHECK(solve(make(f)));  // m = 0
  auto w = witness(make(xor2_or_y1()));
  REQUIRE(w);
  CHECK(check_witness(make(xor2_or_y1()), *w));
  CHECK(size(w->circuit, Measure::D) == 4);

  // degenerate dummy variable
  TruthTable dg;
  dg.num_vars = 3;
  dg.bits.resize(8);
  for (std::size_t r = 0; r < 8; ++r)
    dg.bits[r] = row_bit(r, 1, 3) != row_bit(r, 2, 3);
  CHECK_FALSE(solve(make(dg)));
  CHECK_FALSE(solve_xor(2, dg, Measure::D));
}

TEST_CASE("solver with a hand-built OR catalog") {
  TruthTable or2 = parse_tt("0111");
  CatalogMeta cat;
  cat.measure = Measure::D;
  cat.num_vars = 2;
  cat.base_size = 1;
  OpenCircuit oc;
  GateId a = oc.circuit.add(Gate{GateKind::Input, std::nullopt, false, {}});
  GateId b = oc.circuit.add(Gate{GateKind::Input, std::nullopt, false, {}});
  oc.circuit.output =
      oc.circuit.add(Gate{GateKind::Or, std::nullopt, false, {a, b}});
  oc.slots = {a, b};
  cat.max_fanout = 1;
  cat.classes.push_back(oc);

  TruthTable or3 = parse_tt("01111111");
  SepInstance inst{2, or2, or3, Measure::D, cat};
  SolveStats st;
  CHECK(solve(inst, &st));
  CHECK(st.decoded <= st.budget);
  CHECK_FALSE(solve(SepInstance{2, or2, xor_tt(3), Measure::D, cat}));
}

TEST_CASE("bpis reduction basics") {
  BpisInstance empty{1, {}};
  auto w = brute_solve_bpis(empty);
  REQUIRE(w);
  CHECK(w->pi == Permutation{1, 2});

  BpisInstance blocked{1, {BpisEdge{1, 1, 1, 1}}};
  CHECK_FALSE(brute_solve_bpis(blocked));

  PartialTruthTable pt = reduce(empty);
  CHECK(pt.num_vars == 6);
  // z = 00 region is identically 0
  for (std::size_t r = 0; r < pt.entries.size(); ++r) {
    bool z1 = row_bit(r, 5, 6), z2 = row_bit(r, 6, 6);
    if (!z1 && !z2) CHECK(pt.entries[r] == 0);
  }
  // x = 11, z = 11, y = 00 row: OR over z = 1
  CHECK(pt.entries[0b110011] == 1);

  Circuit c = witness_to_circuit(*w, 1);
  CHECK(size(c, Measure::D) == 5);  // 6n - 1 binary gates at n = 1
  for (const VarRef& v : variables_read(c)) CHECK(v.cls == VarClass::Base);
  CHECK(check_consistency(c, pt));
  CHECK(circuit_to_witness(c, 1).pi == w->pi);

  PartialTruthTable stars;
  stars.num_vars = 6;
  stars.entries.assign(64, kStar);
  CHECK(check_consistency(c, stars));

  // structure mismatch: AND at the top over inputs
  Circuit badc;
  GateId i1 = badc.add(Gate{GateKind::Input, VarRef{VarClass::Base, 1}, false, {}});
  GateId i2 = badc.add(Gate{GateKind::Input, VarRef{VarClass::Base, 2}, false, {}});
  badc.output = badc.add(Gate{GateKind::And, std::nullopt, false, {i1, i2}});
  CHECK_THROWS_AS(circuit_to_witness(badc, 1), std::runtime_error);

  BpisInstance inst2{2, {BpisEdge{1, 2, 2, 1}}};
  BpisInstance round = parse_bpis(write_bpis(inst2));
  CHECK(write_bpis(round) == write_bpis(inst2));
}
