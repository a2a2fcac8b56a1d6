/// Benchmarks for the hot paths: normalization, the synthesis oracle,
/// canonical forms, splice decoding, and the solver.

#include <benchmark/benchmark.h>

#include <random>

#include "cmw/oracle.hpp"
#include "cmw/rewrite.hpp"
#include "cmw/solver.hpp"
#include "cmw/splice.hpp"
#include "cmw/truth_table.hpp"
#include "cmw/xor_catalog.hpp"

namespace {

using namespace cmw;

Circuit random_circuit(std::mt19937_64& rng) {
  Circuit c;
  std::vector<GateId> pool;
  for (unsigned i = 1; i <= 4; ++i)
    pool.push_back(
        c.add(Gate{GateKind::Input, VarRef{VarClass::Base, i}, false, {}}));
  for (unsigned i = 0; i < 2; ++i)
    pool.push_back(
        c.add(Gate{GateKind::Const, std::nullopt, (rng() & 1) != 0, {}}));
  for (unsigned i = 0; i < 12; ++i) {
    unsigned kind = rng() % 3;
    GateId a = pool[rng() % pool.size()];
    if (kind == 2) {
      pool.push_back(c.add(Gate{GateKind::Not, std::nullopt, false, {a}}));
    } else {
      GateId b = pool[rng() % pool.size()];
      pool.push_back(c.add(Gate{kind ? GateKind::Or : GateKind::And,
                                std::nullopt, false, {a, b}}));
    }
  }
  c.output = pool.back();
  return c;
}

void BM_Normalize(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::vector<Circuit> inputs;
  for (int i = 0; i < 64; ++i) inputs.push_back(random_circuit(rng));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(normalize(inputs[i++ % inputs.size()]));
  }
}
BENCHMARK(BM_Normalize);

void BM_CanonicalForm(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::vector<Circuit> inputs;
  for (int i = 0; i < 64; ++i)
    inputs.push_back(normalize(random_circuit(rng)).first);
  std::size_t i = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(canonical_form(inputs[i++ % inputs.size()]));
}
BENCHMARK(BM_CanonicalForm);

void BM_ExactCcXor3(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(exact_cc(xor_tt(3), Measure::D));
}
BENCHMARK(BM_ExactCcXor3);

void BM_TtIsomorphic4(benchmark::State& state) {
  std::mt19937_64 rng(7);
  TruthTable a = make_table(4, rng());
  Permutation pi{3, 1, 4, 2};
  TruthTable b = apply_perm(a, pi);
  for (auto _ : state) benchmark::DoNotOptimize(tt_isomorphic(a, b));
}
BENCHMARK(BM_TtIsomorphic4);

void BM_SolvePositive(benchmark::State& state) {
  TruthTable f = xor_tt(2);
  CatalogMeta cat = enumerate_open_optimal_xor(2, Measure::D);
  TruthTable g;
  g.num_vars = 3;
  g.bits.resize(8);
  for (std::size_t r = 0; r < 8; ++r)
    g.bits[r] = (row_bit(r, 1, 3) != row_bit(r, 2, 3)) || row_bit(r, 3, 3);
  SepInstance inst{2, f, g, Measure::D, cat};
  for (auto _ : state) benchmark::DoNotOptimize(solve(inst));
}
BENCHMARK(BM_SolvePositive);

void BM_ImplicitCodeStream(benchmark::State& state) {
  CatalogMeta cat = enumerate_open_optimal_xor(2, Measure::D);
  Circuit F = cat.classes.front().circuit;
  for (std::size_t i = 0; i < cat.classes.front().slots.size(); ++i)
    F.at(cat.classes.front().slots[i]).var =
        VarRef{VarClass::Base, static_cast<std::uint32_t>(i + 1)};
  for (auto _ : state) {
    std::uint64_t n = enumerate_implicit_codes(
        F, 2, cat.max_fanout, Measure::D,
        [](const SpliceCode&) { return true; });
    benchmark::DoNotOptimize(n);
  }
}
BENCHMARK(BM_ImplicitCodeStream);

}  // namespace

BENCHMARK_MAIN();
