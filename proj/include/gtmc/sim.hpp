#pragma once

// Seeded Monte Carlo harness: erased-system row counts and the recovered-
// versus-actual decoder comparison. Every trial draws from its own
// substream, and results are reduced in trial order, so output does not
// depend on the number of worker threads.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "gtmc/analytics.hpp"
#include "gtmc/decoders.hpp"
#include "gtmc/erased_system.hpp"
#include "gtmc/erasure.hpp"
#include "gtmc/gt_core.hpp"
#include "gtmc/psi_solver.hpp"
#include "gtmc/rng.hpp"

namespace gtmc::sim {

/// Runs f(i) for i in [0, count) on `threads` workers (0: hardware
/// concurrency). f must only write to per-index state.
template <class F>
void parallel_for(std::size_t count, unsigned threads, F&& f) {
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) {
        if (failed.load()) return;
        try {
          f(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

struct MeanStd {
  double mean = 0;
  double stderr_ = 0;
};

inline MeanStd mean_and_stderr(const std::vector<double>& xs) {
  CompensatedSum sum;
  for (double x : xs) sum.add(x);
  const auto n = static_cast<double>(xs.size());
  const double mean = sum.value() / n;
  CompensatedSum sq;
  for (double x : xs) sq.add((x - mean) * (x - mean));
  const double var = xs.size() > 1 ? sq.value() / (n - 1) : 0.0;
  return {mean, std::sqrt(var / n)};
}

// ---------------------------------------------------------------------------
// Row counts

struct RowCountStats {
  std::size_t trials = 0;
  std::size_t t = 0;
  double mean_h_over_t = 0;
  double stderr_ = 0;  ///< sample standard deviation of h/t over sqrt(trials)
  double mean_omega_single_row = 0;
  double omega_stderr = 0;
  RegimeParams params;
};

/// Per trial: generate M, erase, draw s samples, build the erased system and
/// record h/t together with the number of distinct signatures of test row 0.
inline RowCountStats estimate_rows(const RegimeParams& rp, std::size_t t, std::size_t trials,
                                   const RngStream& rng, unsigned threads = 0) {
  if (trials < 2) throw DomainError("estimate_rows needs at least two trials");
  if (t == 0) throw DomainError("t must be positive");
  check_capacity(t, rp.n);
  std::vector<double> h_over_t(trials);
  std::vector<double> omega(trials);
  parallel_for(trials, threads, [&](std::size_t k) {
    const RngStream trial = rng.split("rows-trial", k);
    RngStream matrix_rng = trial.split("matrix");
    RngStream erase_rng = trial.split("erase");
    RngStream sample_rng = trial.split("samples");
    const auto m = generate_matrix(t, rp.n, rp.p, matrix_rng);
    const auto er = erase_matrix(m, rp.q, erase_rng);
    const auto samples = sample_pairs(m, rp.d, rp.s, sample_rng);
    const auto sys = build_erased_system(er.missing, er.map, samples);
    h_over_t[k] = static_cast<double>(sys.h()) / static_cast<double>(t);
    omega[k] = static_cast<double>(sys.rows_from_test(0));
  });
  RowCountStats out;
  out.trials = trials;
  out.t = t;
  out.params = rp;
  const auto h = mean_and_stderr(h_over_t);
  const auto w = mean_and_stderr(omega);
  out.mean_h_over_t = h.mean;
  out.stderr_ = h.stderr_;
  out.mean_omega_single_row = w.mean;
  out.omega_stderr = w.stderr_;
  return out;
}

inline std::string row_count_csv_header() {
  return "n,d,p,q,s,trials,mean_h_over_t,stderr,lower,upper,form\n";
}

inline std::string row_count_csv_line(const RowCountStats& st, const BoundsResult& b) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%zu,%zu,%.6g,%.6g,%zu,%zu,%.9f,%.9f,%.9f,%.9f,%s\n", st.params.n,
                st.params.d, st.params.p, st.params.q, st.params.s, st.trials, st.mean_h_over_t,
                st.stderr_, b.lower, b.upper, to_string(b.form));
  return buf;
}

// ---------------------------------------------------------------------------
// Recovered-vs-actual decoder comparison

enum class Algorithm { Comp, Scomp, Sss };
enum class MatrixKind { Actual, Recovered };

inline const char* to_string(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::Comp:
      return "comp";
    case Algorithm::Scomp:
      return "scomp";
    case Algorithm::Sss:
      return "sss";
  }
  return "?";
}

inline const char* to_string(MatrixKind k) noexcept {
  return k == MatrixKind::Actual ? "actual" : "recovered";
}

inline Algorithm parse_algorithm(std::string_view name) {
  if (name == "comp") return Algorithm::Comp;
  if (name == "scomp") return Algorithm::Scomp;
  if (name == "sss") return Algorithm::Sss;
  throw DomainError("unknown algorithm '" + std::string(name) + "'");
}

struct ExperimentConfig {
  ModelParams params{500, 0, 10, 0.1, 0.1, 10, 0};  ///< params.t is ignored; t_grid drives t
  std::vector<std::size_t> t_grid{50, 75, 100, 125, 150, 175, 200};
  std::vector<Algorithm> algorithms{Algorithm::Comp, Algorithm::Scomp, Algorithm::Sss};
  std::size_t trials = 1000;
  FillPolicy fill_policy = FillPolicy::greedy_cover(0.1);
  std::size_t enum_limit = kDefaultEnumLimit;
  std::uint64_t sss_budget = kDefaultSssBudget;
  std::string output;
  unsigned threads = 0;
  /// Evaluate decoders on the first recovery sample rather than on an
  /// independently drawn defective set.
  bool eval_from_samples = true;

  /// Throws DomainError on an unusable configuration.
  void validate() const {
    if (t_grid.empty()) throw DomainError("t_grid must not be empty");
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
      if (t_grid[k] == 0) throw DomainError("t_grid entries must be positive");
      if (k > 0 && t_grid[k] <= t_grid[k - 1]) throw DomainError("t_grid must be strictly increasing");
    }
    if (algorithms.empty()) throw DomainError("algorithms must not be empty");
    if (trials == 0) throw DomainError("trials must be positive");
    if (sss_budget == 0) throw DomainError("sss_budget must be positive");
    ModelParams probe = params;
    probe.t = t_grid.front();
    probe.validate();
  }
};

struct ExperimentRow {
  std::size_t t = 0;
  Algorithm algorithm = Algorithm::Comp;
  MatrixKind matrix_kind = MatrixKind::Actual;
  double success_rate = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

/// Per-t diagnostics that do not belong in the CSV.
struct GridPointStats {
  std::size_t t = 0;
  std::size_t trial_errors = 0;
  std::size_t sss_inexact_actual = 0;
  std::size_t sss_inexact_recovered = 0;
  double mean_h = 0;
  double mean_unknown_fraction = 0;  ///< Unknown entries left by solve_psi / r
  double mean_cell_errors = 0;       ///< cells where M-hat differs from M
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;
  std::vector<GridPointStats> stats;
};

struct TrialOutcome {
  // success[algorithm index][kind]
  std::vector<std::array<std::uint8_t, 2>> success;
  std::array<std::uint8_t, 2> sss_inexact{0, 0};
  bool error = false;
  double h = 0;
  double unknown_fraction = 0;
  double cell_errors = 0;
};

/// One trial: M, erasure, s recovery samples, erased system, psi recovery and
/// M-hat; then decode y = M (.) x with M and with M-hat.
inline TrialOutcome run_recovery_trial(const ExperimentConfig& cfg, std::size_t t, std::size_t trial) {
  const auto& prm = cfg.params;
  const RngStream rng = RngStream(prm.seed, "recovery").split("t", t).split("trial", trial);
  RngStream matrix_rng = rng.split("matrix");
  RngStream erase_rng = rng.split("erase");
  RngStream sample_rng = rng.split("samples");
  RngStream fill_rng = rng.split("fill");
  RngStream eval_rng = rng.split("eval");

  TrialOutcome out;
  out.success.assign(cfg.algorithms.size(), {0, 0});
  try {
    const auto m = generate_matrix(t, prm.n, prm.p, matrix_rng);
    const auto er = erase_matrix(m, prm.q, erase_rng);
    const auto samples = sample_pairs(m, prm.d, prm.s, sample_rng);
    const auto sys = build_erased_system(er.missing, er.map, samples);
    const auto report = solve_psi(sys, cfg.enum_limit);
    const auto filled = resolve_unknowns(report, sys, cfg.fill_policy, fill_rng);
    const auto recovered = complete_matrix(er.missing, er.map, estimate_from(filled.psi),
                                           cfg.fill_policy, fill_rng);
    out.h = static_cast<double>(sys.h());
    out.unknown_fraction =
        sys.r() ? static_cast<double>(report.unknown) / static_cast<double>(sys.r()) : 0.0;
    for (std::size_t g = 0; g < er.map.size(); ++g) out.cell_errors += filled.psi[g] != er.psi[g];

    const InputVector x = cfg.eval_from_samples ? samples.inputs.front()
                                                : random_weight_vector(prm.n, prm.d, eval_rng);
    const auto truth = x.support();
    const auto y = test_outcome(m, x);
    const BitMatrix* matrices[2] = {&m, &recovered};
    for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
      for (std::size_t kind = 0; kind < 2; ++kind) {
        DecodeResult res;
        switch (cfg.algorithms[a]) {
          case Algorithm::Comp:
            res = comp(*matrices[kind], y);
            break;
          case Algorithm::Scomp:
            res = scomp(*matrices[kind], y);
            break;
          case Algorithm::Sss:
            res = sss(*matrices[kind], y, cfg.sss_budget);
            if (!res.exact) out.sss_inexact[kind] = 1;
            break;
        }
        out.success[a][kind] = res.exact && res.declared == truth;
      }
    }
  } catch (const Error&) {
    out.error = true;
    for (auto& s : out.success) s = {0, 0};
  }
  return out;
}

inline ExperimentResult recovery_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult result;
  for (std::size_t t : cfg.t_grid) {
    std::vector<TrialOutcome> outcomes(cfg.trials);
    parallel_for(cfg.trials, cfg.threads,
                 [&](std::size_t k) { outcomes[k] = run_recovery_trial(cfg, t, k); });

    GridPointStats st;
    st.t = t;
    std::vector<std::array<std::size_t, 2>> wins(cfg.algorithms.size(), {0, 0});
    for (const auto& o : outcomes) {
      st.trial_errors += o.error;
      st.sss_inexact_actual += o.sss_inexact[0];
      st.sss_inexact_recovered += o.sss_inexact[1];
      st.mean_h += o.h;
      st.mean_unknown_fraction += o.unknown_fraction;
      st.mean_cell_errors += o.cell_errors;
      for (std::size_t a = 0; a < wins.size(); ++a) {
        wins[a][0] += o.success[a][0];
        wins[a][1] += o.success[a][1];
      }
    }
    const auto trials = static_cast<double>(cfg.trials);
    st.mean_h /= trials;
    st.mean_unknown_fraction /= trials;
    st.mean_cell_errors /= trials;
    result.stats.push_back(st);

    for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
      for (std::size_t kind = 0; kind < 2; ++kind) {
        result.rows.push_back({t, cfg.algorithms[a], static_cast<MatrixKind>(kind),
                               static_cast<double>(wins[a][kind]) / trials, cfg.trials,
                               cfg.params.seed});
      }
    }
  }
  return result;
}

inline std::string experiment_csv(const std::vector<ExperimentRow>& rows) {
  std::string out = "t,algorithm,matrix_kind,success_rate,trials,seed\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%zu,%s,%s,%.6f,%zu,%llu\n", r.t, to_string(r.algorithm),
                  to_string(r.matrix_kind), r.success_rate, r.trials,
                  static_cast<unsigned long long>(r.seed));
    out += buf;
  }
  return out;
}

/// Line chart of success rate against t, one series per algorithm and
/// matrix kind.
inline std::string experiment_svg(const std::vector<ExperimentRow>& rows) {
  constexpr double width = 720, height = 480, left = 60, right = 170, top = 30, bottom = 50;
  std::size_t t_min = SIZE_MAX, t_max = 0;
  for (const auto& r : rows) {
    t_min = std::min(t_min, r.t);
    t_max = std::max(t_max, r.t);
  }
  if (rows.empty()) t_min = t_max = 0;
  const double span = t_max > t_min ? static_cast<double>(t_max - t_min) : 1.0;
  auto px = [&](std::size_t t) {
    return left + (static_cast<double>(t - t_min) / span) * (width - left - right);
  };
  auto py = [&](double rate) { return top + (1 - rate) * (height - top - bottom); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << py(0) << "\" x2=\"" << width - right << "\" y2=\""
      << py(0) << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << py(0) << "\" x2=\"" << left << "\" y2=\"" << py(1)
      << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double rate = k / 4.0;
    svg << "<text x=\"" << left - 8 << "\" y=\"" << py(rate) + 4 << "\" text-anchor=\"end\">" << rate
        << "</text>\n";
  }
  std::vector<std::size_t> ts;
  for (const auto& r : rows) ts.push_back(r.t);
  std::ranges::sort(ts);
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  for (auto t : ts) {
    svg << "<text x=\"" << px(t) << "\" y=\"" << py(0) + 18 << "\" text-anchor=\"middle\">" << t
        << "</text>\n";
  }
  svg << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 10
      << "\" text-anchor=\"middle\">tests t</text>\n";
  svg << "<text x=\"15\" y=\"" << (top + height - bottom) / 2
      << "\" transform=\"rotate(-90 15 " << (top + height - bottom) / 2
      << ")\" text-anchor=\"middle\">success rate</text>\n";

  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c"};
  int legend = 0;
  for (Algorithm alg : {Algorithm::Comp, Algorithm::Scomp, Algorithm::Sss}) {
    for (MatrixKind kind : {MatrixKind::Actual, MatrixKind::Recovered}) {
      std::ostringstream pts;
      for (const auto& r : rows) {
        if (r.algorithm == alg && r.matrix_kind == kind) pts << px(r.t) << ',' << py(r.success_rate) << ' ';
      }
      if (pts.str().empty()) continue;
      const char* color = colors[static_cast<int>(alg)];
      const char* dash = kind == MatrixKind::Recovered ? " stroke-dasharray=\"6 4\"" : "";
      svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\"" << dash
          << " points=\"" << pts.str() << "\"/>\n";
      const double ly = top + 16.0 * legend++;
      svg << "<line x1=\"" << width - right + 10 << "\" y1=\"" << ly << "\" x2=\"" << width - right + 40
          << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"" << dash << "/>\n";
      svg << "<text x=\"" << width - right + 46 << "\" y=\"" << ly + 4 << "\">" << to_string(alg) << " ("
          << to_string(kind) << ")</text>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace gtmc::sim
