// Experiment harness: prior-distribution sweeps, imbalance sweeps, the
// excess-risk trend study, and min-max vs pairwise equivalence runs on the
// synthetic Gaussian pool (whose Bayes AUC is known in closed form).
// Reports carry per-cell mean/std AUC plus everything needed to regenerate
// a cell: config digest, seeds, and per-run logs.
#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "umauc/bagdata.hpp"
#include "umauc/baseline.hpp"
#include "umauc/trainer.hpp"

namespace umauc {

struct ExperimentSpec {
  GaussianPoolSpec pool;
  std::vector<PriorKind> prior_kinds{PriorKind::uniform};
  std::vector<double> explicit_priors;  // used by PriorKind::explicit_list
  std::vector<int> m_values{10};
  ImbalanceSpec imbalance;
  int repeats = 3;
  TrainConfig train;
  PairwiseConfig pairwise;
  std::vector<std::string> solvers{"minmax"};
  std::string model_kind = "linear";
  std::vector<int> hidden{64, 64};
  std::uint64_t seed = 1;

  void validate() const;
  // Fixed-key-order JSON rendering; the digest is fnv1a64 over this text.
  std::string canonical_json() const;
};

struct CellResult {
  std::string dataset;
  std::string priors;
  int m = 0;
  std::string solver;
  std::string imbalance;  // "none", "tau=0.8", "random"
  std::int64_t n_train = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<double> aucs;  // successful repeats only
  std::vector<std::vector<std::int64_t>> rep_sizes;  // bag sizes per repeat
  double mean_auc = 0.0;
  double std_auc = 0.0;  // sample std, 0 for a single repeat
  double gap = std::numeric_limits<double>::quiet_NaN();  // Bayes - mean
  double mean_seconds = 0.0;
  std::string diagnostic;             // first failure, empty when clean
  std::vector<std::string> run_logs;  // CSV text per repeat
};

struct ExperimentReport {
  std::string suite;
  std::string config_digest;  // 16 hex digits
  std::string machine_info;
  double bayes_auc = std::numeric_limits<double>::quiet_NaN();
  std::vector<CellResult> cells;

  // Timing can be excluded to make report bodies byte-comparable.
  std::string to_csv(bool include_timing = true) const;
  std::string to_markdown() const;  // rows = priors/imbalance, cols = m x solver
};

std::string fnv1a64_hex(std::string_view text);

// One cell per prior kind x m x solver, `repeats` seeded runs each. A failed
// run records a diagnostic on its cell; other cells continue.
ExperimentReport run_experiment(const ExperimentSpec& spec);

// Size-reduction cells for each tau plus one random-size cell.
ExperimentReport run_imbalance_sweep(const ExperimentSpec& base,
                                     const std::vector<double>& taus = {0.8, 0.6,
                                                                        0.4, 0.2},
                                     bool include_random = true);

// gap(n) = Bayes AUC - mean test AUC for each n, trained on bags drawn from
// one shared pool per repeat. Throws when the gap sequence increases or
// gap(n_last) >= gap(n_first) / 2.
ExperimentReport run_excess_risk_trend(
    const ExperimentSpec& base,
    const std::vector<std::int64_t>& n_list = {100, 400, 1600, 6400});

// Canned specs behind `umauc reproduce`.
ExperimentSpec default_suite_spec(const std::string& suite);
ExperimentReport run_suite(const std::string& suite, const ExperimentSpec& spec);

// report.csv, report.md, runs/cell<i>_rep<j>.csv under dir.
void write_report(const ExperimentReport& report, const std::string& dir);

}  // namespace umauc
