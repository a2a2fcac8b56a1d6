/// \file cmw.cpp
/// Unified command-line surface over the workbench: circuit evaluation and
/// rewriting, the synthesis oracle, XOR catalogs, Y-tree decomposition,
/// splice codes, the simple-extension solver, the BPIS reduction, and the
/// acceptance selftest. Exit codes: 0 success/yes, 1 no, 2 usage/input
/// error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cmw/bpis.hpp"
#include "cmw/oracle.hpp"
#include "cmw/rewrite.hpp"
#include "cmw/selftest.hpp"
#include "cmw/solver.hpp"
#include "cmw/splice.hpp"
#include "cmw/truth_table.hpp"
#include "cmw/xor_catalog.hpp"
#include "cmw/ytree.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spill(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

cmw::Measure parse_measure(const std::string& s) {
  if (s == "D") return cmw::Measure::D;
  if (s == "R") return cmw::Measure::R;
  throw std::runtime_error("measure must be D or R");
}

cmw::VarRef parse_var(const std::string& tok) {
  if (tok.size() < 2 || (tok[0] != 'x' && tok[0] != 'y'))
    throw std::runtime_error("bad variable name: " + tok);
  return cmw::VarRef{tok[0] == 'x' ? cmw::VarClass::Base
                                   : cmw::VarClass::Extension,
                     static_cast<std::uint32_t>(std::stoul(tok.substr(1)))};
}

/// "x1=1,y2=0" -> assignment map.
std::map<cmw::VarRef, bool> parse_assignment(const std::string& s) {
  std::map<cmw::VarRef, bool> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("bad assignment item: " + item);
    std::string val = item.substr(eq + 1);
    if (val != "0" && val != "1")
      throw std::runtime_error("assignment value must be 0 or 1: " + item);
    out[parse_var(item.substr(0, eq))] = val == "1";
  }
  return out;
}

std::vector<cmw::VarRef> order_for(const cmw::Circuit& c) {
  std::vector<cmw::VarRef> vars = cmw::variables_read(c);
  std::sort(vars.begin(), vars.end());
  return vars;
}

int run(int argc, char** argv) {
  CLI::App app{"cmw: Boolean-circuit workbench"};
  app.require_subcommand(1);
  std::string cache_dir;
  app.add_option("--cache-dir", cache_dir,
                 "override the complexity-table cache directory");

  // --- eval ---
  auto* eval = app.add_subcommand("eval", "evaluate a circuit on one input");
  std::string eval_circuit, eval_assign;
  eval->add_option("circuit", eval_circuit, "*.bcir file")->required();
  eval->add_option("--assign", eval_assign, "x1=1,x2=0,...")->required();

  // --- tt ---
  auto* tt_cmd = app.add_subcommand("tt", "print a circuit's truth table");
  std::string tt_circuit;
  unsigned tt_n = 0, tt_m = 0;
  tt_cmd->add_option("circuit", tt_circuit, "*.bcir file")->required();
  tt_cmd->add_option("--n", tt_n, "base arity (default: variables read)");
  tt_cmd->add_option("--m", tt_m, "extension arity");

  // --- normalize ---
  auto* norm = app.add_subcommand("normalize", "normalize a circuit");
  std::string norm_circuit, norm_out;
  norm->add_option("circuit", norm_circuit)->required();
  norm->add_option("--out", norm_out, "write the result here too");

  // --- restrict ---
  auto* restr = app.add_subcommand("restrict", "substitute and normalize");
  std::string restr_circuit, restr_set;
  restr->add_option("circuit", restr_circuit)->required();
  restr->add_option("--set", restr_set, "x1=0,y2=1,...")->required();

  // --- cc-oracle ---
  auto* cc = app.add_subcommand("cc-oracle", "exact circuit complexity");
  std::string cc_tt, cc_measure = "D";
  cc->add_option("--tt", cc_tt, "truth-table bits")->required();
  cc->add_option("--measure", cc_measure, "D or R");

  // --- enumerate-optimal ---
  auto* enopt = app.add_subcommand("enumerate-optimal",
                                   "all normalized optimal circuits");
  std::string en_tt, en_measure = "D";
  unsigned en_budget = 7;
  enopt->add_option("--tt", en_tt)->required();
  enopt->add_option("--measure", en_measure);
  enopt->add_option("--budget", en_budget);

  // --- xor-catalog ---
  auto* xc = app.add_subcommand("xor-catalog", "open optimal XOR circuits");
  unsigned xc_n = 2;
  std::string xc_measure = "D", xc_out;
  xc->add_option("--n", xc_n)->required();
  xc->add_option("--measure", xc_measure);
  xc->add_option("--out", xc_out, "write the catalog file here");

  // --- validate-xor-structure ---
  auto* vx = app.add_subcommand("validate-xor-structure",
                                "block partition of an optimal XOR circuit");
  std::string vx_circuit;
  vx->add_option("circuit", vx_circuit)->required();

  // --- ytree-decompose ---
  auto* yt = app.add_subcommand("ytree-decompose",
                                "Y-tree decomposition of a simple extension");
  std::string yt_circuit, yt_f;
  yt->add_option("circuit", yt_circuit, "*.bcir over x and y variables")
      ->required();
  yt->add_option("--f", yt_f, "base truth-table bits")->required();

  // --- splice-decode ---
  auto* sd = app.add_subcommand("splice-decode", "apply a splice code");
  std::string sd_base, sd_code;
  sd->add_option("--base", sd_base, "base circuit *.bcir")->required();
  sd->add_option("--code", sd_code, "splice-code file")->required();

  // --- sep-solve ---
  auto* sep = app.add_subcommand("sep-solve", "f-Simple Extension solver");
  std::string sep_f, sep_g, sep_catalog, sep_measure = "D", sep_witness;
  bool sep_exhaustive = false;
  sep->add_option("--f", sep_f, "file with f's truth-table line")->required();
  sep->add_option("--g", sep_g, "file with g's truth-table line")->required();
  sep->add_option("--catalog", sep_catalog, "catalog file")->required();
  sep->add_option("--measure", sep_measure);
  sep->add_option("--witness", sep_witness, "write witness *.bcir here");
  sep->add_flag("--verify-exhaustive", sep_exhaustive,
                "enumerate the full code space (the default already does; "
                "kept for compatibility)");

  // --- bpis ---
  auto* br = app.add_subcommand("bpis-reduce", "BPIS -> partial truth table");
  std::string br_file, br_out;
  br->add_option("instance", br_file)->required();
  br->add_option("--out", br_out);
  auto* bs = app.add_subcommand("bpis-solve", "brute-force BPIS");
  std::string bs_file;
  bs->add_option("instance", bs_file)->required();
  auto* bv = app.add_subcommand("bpis-verify",
                                "reduction soundness on one instance");
  std::string bv_file;
  bv->add_option("instance", bv_file)->required();

  // --- selftest ---
  auto* st = app.add_subcommand("selftest", "run the acceptance suite");
  cmw::SelftestConfig st_cfg;
  st->add_option("--oracle-max-vars", st_cfg.oracle_max_vars);
  st->add_option("--seed", st_cfg.seed);
  st->add_option("--workers", st_cfg.workers);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  }
  if (!cache_dir.empty()) setenv("CMW_CACHE_DIR", cache_dir.c_str(), 1);

  if (*eval) {
    cmw::Circuit c = cmw::parse_bcir(slurp(eval_circuit));
    bool v = cmw::evaluate(c, parse_assignment(eval_assign));
    std::cout << "value=" << (v ? 1 : 0) << '\n';
    return 0;
  }
  if (*tt_cmd) {
    cmw::Circuit c = cmw::parse_bcir(slurp(tt_circuit));
    std::vector<cmw::VarRef> order =
        tt_n ? cmw::default_var_order(tt_n, tt_m) : order_for(c);
    std::cout << "tt=" << cmw::format_tt(cmw::truth_table(c, order)) << '\n';
    return 0;
  }
  if (*norm) {
    cmw::Circuit c = cmw::parse_bcir(slurp(norm_circuit));
    auto [res, record] = cmw::normalize(c);
    std::string body = cmw::write_bcir(res);
    std::cout << "eliminated="
              << cmw::size(c, cmw::Measure::D) - cmw::size(res, cmw::Measure::D)
              << '\n'
              << body;
    if (!norm_out.empty()) spill(norm_out, body);
    return 0;
  }
  if (*restr) {
    cmw::Circuit c = cmw::parse_bcir(slurp(restr_circuit));
    auto [res, record] = cmw::substitute_and_normalize(
        c, parse_assignment(restr_set));
    std::cout << cmw::write_restriction(record) << cmw::write_bcir(res);
    return 0;
  }
  if (*cc) {
    auto v = cmw::exact_cc(cmw::parse_tt(cc_tt), parse_measure(cc_measure));
    if (!v) {
      std::cout << "cc=unknown\n";
      return 1;
    }
    std::cout << "cc=" << *v << '\n';
    return 0;
  }
  if (*enopt) {
    auto all = cmw::enumerate_optimal_circuits(
        cmw::parse_tt(en_tt), parse_measure(en_measure), en_budget);
    std::cout << "count=" << all.size() << '\n';
    for (std::size_t i = 0; i < all.size(); ++i)
      std::cout << "# circuit " << i << '\n' << cmw::write_bcir(all[i]);
    return 0;
  }
  if (*xc) {
    cmw::CatalogMeta cat =
        cmw::enumerate_open_optimal_xor(xc_n, parse_measure(xc_measure));
    std::cout << "classes=" << cat.classes.size() << " ell=" << cat.max_fanout
              << " s=" << cat.base_size << '\n';
    std::string text = cmw::write_catalog(cat);
    if (xc_out.empty())
      std::cout << text;
    else
      spill(xc_out, text);
    return 0;
  }
  if (*vx) {
    cmw::Circuit c = cmw::parse_bcir(slurp(vx_circuit));
    auto blocks = cmw::validate_block_partition(c);
    if (!blocks) {
      std::cout << "invalid\n";
      return 1;
    }
    std::cout << "blocks=" << blocks->size() << '\n';
    return 0;
  }
  if (*yt) {
    cmw::Circuit g = cmw::parse_bcir(slurp(yt_circuit));
    cmw::TruthTable f = cmw::parse_tt(yt_f);
    std::uint32_t n = f.num_vars, m = 0;
    for (const cmw::VarRef& v : cmw::variables_read(g))
      if (v.cls == cmw::VarClass::Extension) m = std::max(m, v.index);
    auto keys =
        cmw::find_keys(cmw::truth_table(g, cmw::default_var_order(n, m)), f);
    auto D = cmw::extract_ytree_decomposition(g, n, m, f, keys);
    std::cout << "weight=" << D.weight << " total=" << (D.total(m) ? 1 : 0)
              << '\n'
              << cmw::write_decomposition(g, D);
    return D.total(m) ? 0 : 1;
  }
  if (*sd) {
    cmw::Circuit base = cmw::parse_bcir(slurp(sd_base));
    cmw::SpliceCode code = cmw::parse_splice_code(slurp(sd_code));
    cmw::DecodeStatus status;
    auto res = cmw::decode(base, code, &status);
    if (!res) {
      std::cout << "decode-error=" << static_cast<int>(status) << '\n';
      return 1;
    }
    std::cout << cmw::write_bcir(*res);
    return 0;
  }
  if (*sep) {
    cmw::SepInstance inst;
    inst.f = cmw::parse_tt(slurp(sep_f));
    inst.g = cmw::parse_tt(slurp(sep_g));
    inst.n = inst.f.num_vars;
    inst.measure = parse_measure(sep_measure);
    inst.catalog = cmw::parse_catalog(slurp(sep_catalog));
    cmw::SolveStats stats;
    auto w = cmw::witness(inst, &stats, sep_exhaustive);
    std::cout << "answer=" << (w ? "yes" : "no") << " decoded=" << stats.decoded
              << " budget=" << stats.budget << '\n';
    if (w && !sep_witness.empty()) spill(sep_witness, cmw::write_bcir(w->circuit));
    return w ? 0 : 1;
  }
  if (*br) {
    cmw::PartialTruthTable pt = cmw::reduce(cmw::parse_bpis(slurp(br_file)));
    std::string text = cmw::format_ptt(pt) + "\n";
    if (br_out.empty())
      std::cout << text;
    else
      spill(br_out, text);
    return 0;
  }
  if (*bs) {
    auto w = cmw::brute_solve_bpis(cmw::parse_bpis(slurp(bs_file)));
    if (!w) {
      std::cout << "no-solution\n";
      return 1;
    }
    std::cout << "pi=";
    for (std::size_t i = 0; i < w->pi.size(); ++i)
      std::cout << (i ? "," : "") << w->pi[i];
    std::cout << '\n';
    return 0;
  }
  if (*bv) {
    cmw::BpisInstance inst = cmw::parse_bpis(slurp(bv_file));
    cmw::PartialTruthTable pt = cmw::reduce(inst);
    bool brute = cmw::brute_solve_bpis(inst).has_value();
    bool consistent = false;
    std::vector<std::uint32_t> s1(inst.n), s2(inst.n);
    std::iota(s1.begin(), s1.end(), 1);
    do {
      std::iota(s2.begin(), s2.end(), 1);
      do {
        cmw::BpisWitness w;
        w.pi.resize(2 * inst.n);
        for (std::uint32_t i = 0; i < inst.n; ++i) {
          w.pi[i] = s1[i];
          w.pi[inst.n + i] = inst.n + s2[i];
        }
        consistent |=
            cmw::check_consistency(cmw::witness_to_circuit(w, inst.n), pt);
      } while (!consistent && std::next_permutation(s2.begin(), s2.end()));
    } while (!consistent && std::next_permutation(s1.begin(), s1.end()));
    std::cout << "brute=" << (brute ? "yes" : "no")
              << " consistent-witness=" << (consistent ? "yes" : "no")
              << " agree=" << (brute == consistent ? "true" : "false") << '\n';
    return brute == consistent ? 0 : 1;
  }
  if (*st) {
    std::cout << "seed=" << st_cfg.seed << '\n';
    auto results = cmw::run_acceptance(st_cfg, &std::cerr);
    std::cout << cmw::format_results(results);
    return cmw::all_passed(results) ? 0 : 1;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::ParseError&) {
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
