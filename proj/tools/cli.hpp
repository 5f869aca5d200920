#pragma once

// gtmc command-line front end. run() is separate from main() so the tests
// can drive the pipeline in-process.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gtmc/gtmc.hpp"

namespace gtmc::cli {

using nlohmann::json;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write '" + path + "'");
  out << text;
}

inline FillPolicy parse_fill(const std::string& name, double p) {
  if (name == "greedy") return FillPolicy::greedy_cover(p);
  if (name == "greedy-zero") return FillPolicy::greedy_cover(p, FillRule::Zero);
  if (name == "zero") return FillPolicy::zero();
  if (name == "one") return FillPolicy::one();
  if (name == "bernoulli") return FillPolicy::bernoulli(p);
  throw DomainError("unknown fill policy '" + name + "'");
}

inline const char* fill_rule_name(FillRule r) {
  switch (r) {
    case FillRule::Zero:
      return "zero";
    case FillRule::One:
      return "one";
    case FillRule::Bernoulli:
      return "bernoulli";
    case FillRule::GreedyCover:
      return "greedy_cover";
  }
  return "?";
}

inline FillRule parse_fill_rule(const std::string& name) {
  if (name == "zero") return FillRule::Zero;
  if (name == "one") return FillRule::One;
  if (name == "bernoulli") return FillRule::Bernoulli;
  if (name == "greedy_cover") return FillRule::GreedyCover;
  throw DomainError("unknown fill rule '" + name + "'");
}

/// JSON keys follow the ExperimentConfig field names. Missing keys keep
/// their defaults.
inline sim::ExperimentConfig config_from_json(const json& j) {
  sim::ExperimentConfig cfg;
  try {
    if (j.contains("params")) {
      const auto& pj = j.at("params");
      auto& p = cfg.params;
      p.n = pj.value("n", p.n);
      p.d = pj.value("d", p.d);
      p.p = pj.value("p", p.p);
      p.q = pj.value("q", p.q);
      p.s = pj.value("s", p.s);
      p.seed = pj.value("seed", p.seed);
    }
    if (j.contains("t_grid")) cfg.t_grid = j.at("t_grid").get<std::vector<std::size_t>>();
    if (j.contains("algorithms")) {
      cfg.algorithms.clear();
      for (const auto& a : j.at("algorithms")) cfg.algorithms.push_back(sim::parse_algorithm(a.get<std::string>()));
    }
    cfg.trials = j.value("trials", cfg.trials);
    if (j.contains("fill_policy")) {
      const auto& fj = j.at("fill_policy");
      cfg.fill_policy.constrained = parse_fill_rule(fj.value("constrained", std::string("greedy_cover")));
      cfg.fill_policy.unconstrained = parse_fill_rule(fj.value("unconstrained", std::string("bernoulli")));
      cfg.fill_policy.p = fj.value("p", cfg.params.p);
    } else {
      cfg.fill_policy.p = cfg.params.p;
    }
    cfg.enum_limit = j.value("enum_limit", cfg.enum_limit);
    cfg.sss_budget = j.value("sss_budget", cfg.sss_budget);
    cfg.output = j.value("output", cfg.output);
    cfg.threads = j.value("threads", cfg.threads);
    cfg.eval_from_samples = j.value("eval_from_samples", cfg.eval_from_samples);
  } catch (const json::exception& e) {
    throw DomainError(std::string("bad experiment config: ") + e.what());
  }
  return cfg;
}

inline json config_to_json(const sim::ExperimentConfig& cfg) {
  json algs = json::array();
  for (auto a : cfg.algorithms) algs.push_back(sim::to_string(a));
  return {
      {"params",
       {{"n", cfg.params.n}, {"d", cfg.params.d}, {"p", cfg.params.p}, {"q", cfg.params.q},
        {"s", cfg.params.s}, {"seed", cfg.params.seed}}},
      {"t_grid", cfg.t_grid},
      {"algorithms", algs},
      {"trials", cfg.trials},
      {"fill_policy",
       {{"constrained", fill_rule_name(cfg.fill_policy.constrained)},
        {"unconstrained", fill_rule_name(cfg.fill_policy.unconstrained)},
        {"p", cfg.fill_policy.p}}},
      {"enum_limit", cfg.enum_limit},
      {"sss_budget", cfg.sss_budget},
      {"output", cfg.output},
      {"threads", cfg.threads},
      {"eval_from_samples", cfg.eval_from_samples},
  };
}


inline std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  if (out.empty()) throw DomainError("empty list '" + text + "'");
  return out;
}

template <class T>
T parse_number(const std::string& text) {
  std::istringstream in(text);
  T v{};
  in >> v;
  if (!in || !in.eof()) throw DomainError("not a number: '" + text + "'");
  return v;
}

template <class T>
std::vector<T> parse_numbers(const std::string& text) {
  std::vector<T> out;
  for (const auto& s : split_list(text)) out.push_back(parse_number<T>(s));
  return out;
}

/// 1-based item list such as "3,4" to an input vector of length n.
inline InputVector parse_support(const std::string& text, std::size_t n) {
  InputVector x(n);
  if (text.empty()) return x;
  for (auto j : parse_numbers<std::size_t>(text)) {
    if (j < 1 || j > n) throw IndexOutOfRange("item " + std::to_string(j) + " outside 1.." + std::to_string(n));
    x.set(j - 1);
  }
  return x;
}

inline std::string format_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string declared_line(const std::vector<std::size_t>& declared) {
  std::string line;
  for (auto j : declared) {
    if (!line.empty()) line += ' ';
    line += std::to_string(j + 1);
  }
  return line + "\n";
}

inline std::string bounds_csv_line(const RegimeParams& rp, const BoundsResult& b) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%zu,%zu,%.6g,%.6g,%zu,%.12g,%.12g,%s,%d\n", rp.n, rp.d, rp.p, rp.q,
                rp.s, b.lower, b.upper, to_string(b.form), b.vacuous ? 1 : 0);
  return buf;
}

/// Executes one subcommand. Returns the process exit status: 0 on success,
/// 1 on a library error, 2 on a usage error.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Matrix completion for non-adaptive group testing", "gtmc"};
  app.fallthrough();
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::string out_path;
  std::size_t trials = 0;
  std::string config_path;
  app.add_option("--seed", seed, "RNG seed");
  app.add_option("--out", out_path, "output file (default: stdout)");
  app.add_option("--trials", trials, "Monte Carlo trials");
  app.add_option("--config", config_path, "JSON experiment config");

  // Shared numeric options.
  std::size_t n = 0, t = 0, d = 1, s = 1;
  double p = 0.1, q = 0.1;

  auto* gen = app.add_subcommand("gen", "random Bernoulli(p) measurement matrix");
  gen->add_option("-t,--tests", t, "tests")->required();
  gen->add_option("-n,--items", n, "items")->required();
  gen->add_option("-p", p, "one-probability")->required();

  std::string matrix_path, missing_path, samples_path, system_path, outcome_path, psi_path;
  std::vector<std::string> at_cells;
  auto* erase = app.add_subcommand("erase", "erase cells of a matrix");
  erase->add_option("matrix", matrix_path, "matrix file")->required();
  auto* erase_q = erase->add_option("-q", q, "erasure probability");
  erase->add_option("--at", at_cells, "erase cell i,j (1-based); repeatable")->take_all();
  erase->add_option("--psi", psi_path, "write the true psi file here");

  bool iid = false;
  auto* sample = app.add_subcommand("sample", "draw s input/outcome pairs");
  sample->add_option("matrix", matrix_path, "matrix file")->required();
  sample->add_option("-d", d, "defectives per input")->required();
  sample->add_option("-s", s, "sample count")->required();
  sample->add_flag("--iid", iid, "i.i.d. draws instead of distinct vectors");

  auto* construct = app.add_subcommand("construct", "build the erased system");
  construct->add_option("missing", missing_path, "missing-matrix file")->required();
  construct->add_option("samples", samples_path, "samples file")->required();

  std::size_t enum_limit = kDefaultEnumLimit;
  auto* solve = app.add_subcommand("solve", "recover psi from an erased system dump");
  solve->add_option("system", system_path, "erased-system file")->required();
  solve->add_option("--enum-limit", enum_limit, "enumeration limit per component");

  std::string fill_name;
  std::string completed_path;
  auto* recover = app.add_subcommand("recover", "construct + solve, optionally complete the matrix");
  recover->add_option("missing", missing_path, "missing-matrix file")->required();
  recover->add_option("samples", samples_path, "samples file")->required();
  recover->add_option("--enum-limit", enum_limit, "enumeration limit per component");
  recover->add_option("--fill", fill_name, "greedy|greedy-zero|zero|one|bernoulli");
  recover->add_option("-p", p, "Bernoulli fill probability");
  recover->add_option("--completed", completed_path, "write the completed matrix here");

  std::string alg_name = "sss";
  std::uint64_t budget = kDefaultSssBudget;
  auto* decode = app.add_subcommand("decode", "decode an outcome vector");
  decode->add_option("matrix", matrix_path, "matrix file")->required();
  decode->add_option("outcome", outcome_path, "outcome file")->required();
  decode->add_option("--alg", alg_name, "comp|scomp|sss");
  decode->add_option("--budget", budget, "SSS node budget");

  std::string n_list, d_list, p_list, q_list, s_list;
  auto add_regime = [&](CLI::App* sub, bool lists) {
    if (lists) {
      sub->add_option("-n", n_list, "items (comma list with --sweep)")->required();
      sub->add_option("-d", d_list, "defectives")->required();
      sub->add_option("-p", p_list, "one-probability")->required();
      sub->add_option("-q", q_list, "erasure probability")->required();
      sub->add_option("-s", s_list, "samples")->default_val("1");
    } else {
      sub->add_option("-n", n, "items")->required();
      sub->add_option("-d", d, "defectives")->required();
      sub->add_option("-p", p, "one-probability")->required();
      sub->add_option("-q", q, "erasure probability")->required();
      sub->add_option("-s", s, "samples");
    }
  };

  auto* expect = app.add_subcommand("expect", "closed-form quantities");
  add_regime(expect, false);

  std::string form_name = "exact";
  bool sweep = false;
  auto* bounds = app.add_subcommand("bounds", "upper and lower bounds on E[h|s]/t");
  add_regime(bounds, true);
  bounds->add_option("--form", form_name, "exact|simple");
  bounds->add_flag("--sweep", sweep, "CSV over the product of the lists");

  auto* oracle = app.add_subcommand("oracle", "brute-force E[h|s]/t");
  add_regime(oracle, false);

  std::string pattern, support;
  std::size_t patterns = 1000;
  auto* mi = app.add_subcommand("mi-check", "mutual information between erased cells and y_i");
  mi->add_option("--pattern", pattern, "row over {0,1,*}");
  mi->add_option("--support", support, "1-based items of x, e.g. 3,4");
  mi->add_option("-p", p, "one-probability");
  mi->add_option("--patterns", patterns, "random patterns when --pattern is absent");
  mi->add_option("-n", n, "row length for random patterns")->default_val(8);

  unsigned threads = 0;
  auto* simrows = app.add_subcommand("simulate-rows", "Monte Carlo E[h|s]/t");
  add_regime(simrows, false);
  simrows->add_option("-t,--tests", t, "tests")->required();
  simrows->add_option("--threads", threads, "worker threads (0 = all cores)");

  std::string svg_path;
  auto* experiment = app.add_subcommand("simulate-fig2", "decoders on actual vs recovered matrices");
  experiment->add_option("--svg", svg_path, "also write an SVG chart");
  experiment->add_option("--threads", threads, "worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
  }

  auto emit = [&](const std::string& text) {
    if (out_path.empty()) {
      out << text;
    } else {
      write_file(out_path, text);
    }
  };
  const bool seed_given = app.count("--seed") > 0;

  try {
    if (*gen) {
      RngStream rng(seed, "matrix");
      emit(io::write_matrix(generate_matrix(t, n, p, rng)));
    } else if (*erase) {
      const auto m = io::parse_measurement_matrix(read_file(matrix_path));
      Erasure er;
      if (!at_cells.empty()) {
        if (erase_q->count()) throw DomainError("--at and -q are exclusive");
        std::vector<Cell> cells;
        for (const auto& spec : at_cells) {
          const auto ij = parse_numbers<std::size_t>(spec);
          if (ij.size() != 2) throw DomainError("--at expects i,j");
          if (ij[0] < 1 || ij[0] > m.rows() || ij[1] < 1 || ij[1] > m.cols()) {
            throw IndexOutOfRange("cell " + spec + " outside the matrix");
          }
          cells.push_back({ij[0] - 1, ij[1] - 1});
        }
        er = erase_cells(m, std::move(cells));
      } else {
        RngStream rng(seed, "erase");
        er = erase_matrix(m, q, rng);
      }
      emit(io::write_matrix(er.missing));
      if (!psi_path.empty()) write_file(psi_path, io::write_psi(er.map, er.psi));
    } else if (*sample) {
      const auto m = io::parse_measurement_matrix(read_file(matrix_path));
      RngStream rng(seed, "samples");
      const auto set = sample_pairs(m, d, s, rng, iid ? SamplingMode::Iid : SamplingMode::WithoutReplacement);
      emit(io::write_samples(set, m.cols(), m.rows()));
    } else if (*construct) {
      const auto mm = io::parse_missing_matrix(read_file(missing_path));
      const auto set = io::parse_samples(read_file(samples_path));
      emit(io::write_system(build_erased_system(mm, ErasureMap::of(mm), set)));
    } else if (*solve) {
      const auto sys = io::parse_system(read_file(system_path));
      emit(io::write_psi(sys.map, solve_psi(sys, enum_limit).estimate));
    } else if (*recover) {
      const auto mm = io::parse_missing_matrix(read_file(missing_path));
      const auto set = io::parse_samples(read_file(samples_path));
      const auto map = ErasureMap::of(mm);
      const auto sys = build_erased_system(mm, map, set);
      const auto report = solve_psi(sys, enum_limit);
      emit(io::write_psi(map, report.estimate));
      err << "h " << sys.h() << " r " << sys.r() << " zero " << report.forced_zero << " one "
          << report.forced_one << " unknown " << report.unknown << "\n";
      if (!completed_path.empty()) {
        const auto policy = parse_fill(fill_name.empty() ? "greedy" : fill_name, p);
        RngStream rng(seed, "fill");
        const auto filled = resolve_unknowns(report, sys, policy, rng);
        if (!filled.violated_rows.empty()) {
          err << "warning: fill violates " << filled.violated_rows.size() << " erased-system rows\n";
        }
        const auto m = complete_matrix(mm, map, estimate_from(filled.psi), policy, rng);
        write_file(completed_path, io::write_matrix(m));
      } else if (!fill_name.empty()) {
        throw DomainError("--fill needs --completed");
      }
    } else if (*decode) {
      const auto m = io::parse_measurement_matrix(read_file(matrix_path));
      const auto y = io::parse_outcome(read_file(outcome_path));
      DecodeResult res;
      switch (sim::parse_algorithm(alg_name)) {
        case sim::Algorithm::Comp:
          res = comp(m, y);
          break;
        case sim::Algorithm::Scomp:
          res = scomp(m, y);
          break;
        case sim::Algorithm::Sss:
          res = sss(m, y, budget);
          break;
      }
      emit(declared_line(res.declared));
      if (!res.exact) err << "warning: SSS node budget exhausted; result may not be minimum\n";
      if (!res.satisfies) err << "warning: declared set does not explain y\n";
    } else if (*expect) {
      RegimeParams rp{n, d, p, q, s};
      std::ostringstream o;
      o << "a " << format_g(rp.a()) << "\n";
      o << "b " << format_g(rp.b()) << "\n";
      o << "upsilon_d " << format_g(upsilon(d, d, p, q)) << "\n";
      o << "phi " << format_g(phi(n, d, p, q)) << "\n";
      if (upsilon(d, d, p, q) > 0) o << "omega " << format_g(omega_ratio(d, n, p, q)) << "\n";
      o << "upper " << format_g(s * upsilon(d, d, p, q)) << "\n";
      o << "pairwise_term " << format_g(pairwise_term(rp)) << "\n";
      emit(o.str());
    } else if (*bounds) {
      const auto form = form_name == "simple" ? BoundsForm::Simple
                        : form_name == "exact" ? BoundsForm::Exact
                                               : throw DomainError("unknown form '" + form_name + "'");
      const auto ns = parse_numbers<std::size_t>(n_list);
      const auto ds = parse_numbers<std::size_t>(d_list);
      const auto ps = parse_numbers<double>(p_list);
      const auto qs = parse_numbers<double>(q_list);
      const auto ss = parse_numbers<std::size_t>(s_list);
      if (!sweep && (ns.size() | ds.size() | ps.size() | qs.size() | ss.size()) != 1) {
        throw DomainError("lists need --sweep");
      }
      std::string text = sweep ? "n,d,p,q,s,lower,upper,form,vacuous\n" : "";
      for (auto nn : ns)
        for (auto dd : ds)
          for (auto pp : ps)
            for (auto qq : qs)
              for (auto sv : ss) {
                RegimeParams rp{nn, dd, pp, qq, sv};
                if (sweep) {
                  // Rows where the simple form does not apply fall back to the exact form.
                  const auto f = form == BoundsForm::Simple && !rp.simple_bound_applies() ? BoundsForm::Exact : form;
                  text += bounds_csv_line(rp, expectation_bounds(rp, f));
                } else {
                  const auto b = expectation_bounds(rp, form);
                  text += "lower " + format_g(b.lower) + "\nupper " + format_g(b.upper) + "\nform " +
                          to_string(b.form) + "\nvacuous " + (b.vacuous ? "1" : "0") + "\n";
                }
              }
      emit(text);
    } else if (*oracle) {
      RegimeParams rp{n, d, p, q, s};
      const double v = exact_expected_rows_oracle(n, d, p, q, s);
      const auto b = expectation_bounds(rp, BoundsForm::Exact);
      emit("oracle " + format_g(v) + "\nlower " + format_g(b.lower) + "\nupper " + format_g(b.upper) + "\n");
    } else if (*mi) {
      if (p <= 0 || p >= 1) throw DomainError("mi-check needs 0 < p < 1");
      auto informative = [](const InputVector& x, const std::vector<CellState>& row) {
        bool erased = false;
        for (auto j : x.support()) {
          if (row[j] == CellState::Known1) return false;
          erased = erased || row[j] == CellState::Erased;
        }
        return erased;
      };
      if (!pattern.empty()) {
        std::vector<CellState> row;
        for (char c : pattern) {
          if (c == '0') {
            row.push_back(CellState::Known0);
          } else if (c == '1') {
            row.push_back(CellState::Known1);
          } else if (c == '*') {
            row.push_back(CellState::Erased);
          } else {
            throw ParseError(1, row.size() + 1, "pattern characters must be 0, 1 or *");
          }
        }
        const auto x = parse_support(support, row.size());
        emit("mi_bits " + format_g(mutual_information_row(x, row, p)) + "\ninformative " +
             (informative(x, row) ? "1" : "0") + "\n");
      } else {
        RngStream rng(seed, "mi-check");
        double worst = 0;
        std::size_t non_informative = 0;
        for (std::size_t k = 0; k < patterns; ++k) {
          std::vector<CellState> row(n);
          for (auto& c : row) c = static_cast<CellState>(rng.below(3));
          InputVector x(n);
          for (std::size_t j = 0; j < n; ++j) x.set(j, rng.bernoulli(0.4));
          if (informative(x, row)) continue;
          ++non_informative;
          worst = std::max(worst, std::abs(mutual_information_row(x, row, p)));
        }
        emit("patterns " + std::to_string(patterns) + "\nnon_informative " + std::to_string(non_informative) +
             "\nmax_abs_mi_bits " + format_g(worst) + "\n");
      }
    } else if (*simrows) {
      RegimeParams rp{n, d, p, q, s};
      const auto st = sim::estimate_rows(rp, t, trials ? trials : 10000, RngStream(seed, "simulate-rows"), threads);
      const auto b = expectation_bounds(rp, rp.simple_bound_applies() ? BoundsForm::Simple : BoundsForm::Exact);
      emit(sim::row_count_csv_header() + sim::row_count_csv_line(st, b));
      err << "single_row_mean " << format_g(st.mean_omega_single_row) << " stderr "
          << format_g(st.omega_stderr) << "\n";
    } else if (*experiment) {
      sim::ExperimentConfig cfg;
      cfg.fill_policy.p = cfg.params.p;
      if (!config_path.empty()) cfg = config_from_json(json::parse(read_file(config_path)));
      if (trials) cfg.trials = trials;
      if (seed_given) cfg.params.seed = seed;
      if (experiment->count("--threads")) cfg.threads = threads;
      if (!out_path.empty()) cfg.output = out_path;
      const auto result = sim::recovery_experiment(cfg);
      const auto csv = sim::experiment_csv(result.rows);
      if (cfg.output.empty()) {
        out << csv;
      } else {
        write_file(cfg.output, csv);
        json stats = json::array();
        for (const auto& g : result.stats) {
          stats.push_back({{"t", g.t},
                           {"trial_errors", g.trial_errors},
                           {"sss_inexact_actual", g.sss_inexact_actual},
                           {"sss_inexact_recovered", g.sss_inexact_recovered},
                           {"mean_h", g.mean_h},
                           {"mean_unknown_fraction", g.mean_unknown_fraction},
                           {"mean_cell_errors", g.mean_cell_errors}});
        }
        write_file(cfg.output + ".meta.json", json{{"config", config_to_json(cfg)}, {"grid", stats}}.dump(2) + "\n");
      }
      if (!svg_path.empty()) write_file(svg_path, sim::experiment_svg(result.rows));
    }
  } catch (const Error& e) {
    err << e.name() << ": " << e.what() << "\n";
    return 1;
  } catch (const json::exception& e) {
    err << "ParseError: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace gtmc::cli
