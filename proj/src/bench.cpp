#include "umauc/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "umauc/jsonconf.hpp"
#include "umauc/rng.hpp"
#include "umauc/textfmt.hpp"

namespace umauc {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::uint64_t kPoolStream = 0x706f6f6c;
constexpr std::uint64_t kPriorStream = 0x7072696f;
constexpr std::uint64_t kSizeStream = 0x73697a65;
constexpr std::uint64_t kBagStream = 0x62616773;
constexpr std::uint64_t kModelStream = 0x6d6f646c;
constexpr std::uint64_t kTrainStream = 0x7472616e;

std::string dataset_label(const GaussianPoolSpec& pool) {
  return "gauss_d" + std::to_string(pool.d);
}

std::string imbalance_label(const ImbalanceSpec& spec) {
  switch (spec.mode) {
    case ImbalanceMode::none:
      return "none";
    case ImbalanceMode::size_reduction: {
      std::ostringstream out;
      out << "tau=" << spec.tau;
      return out.str();
    }
    case ImbalanceMode::random:
      return "random";
  }
  return "none";
}

void finalize_cell(CellResult& cell) {
  if (cell.aucs.empty()) return;
  double sum = 0.0;
  for (double a : cell.aucs) sum += a;
  cell.mean_auc = sum / static_cast<double>(cell.aucs.size());
  if (cell.aucs.size() >= 2) {
    double sq = 0.0;
    for (double a : cell.aucs) sq += (a - cell.mean_auc) * (a - cell.mean_auc);
    cell.std_auc = std::sqrt(sq / static_cast<double>(cell.aucs.size() - 1));
  }
}

struct RunOutput {
  double auc = 0.0;
  double seconds = 0.0;
  std::vector<std::int64_t> sizes;
  std::string log_csv;
};

// One seeded repeat of one cell; throws on failure.
RunOutput run_once(const ExperimentSpec& spec, PriorKind kind, int m,
                   const std::string& solver, const ImbalanceSpec& imbalance,
                   std::int64_t n_train, std::uint64_t rep_seed) {
  RunOutput out;
  GaussianPoolSpec pool_spec = spec.pool;
  const LabeledPool pool =
      generate_gaussian_pool(pool_spec, derive_seed(rep_seed, kPoolStream));

  PriorSpec prior_spec;
  prior_spec.kind = kind;
  prior_spec.m = m;
  prior_spec.values = spec.explicit_priors;
  const std::vector<double> priors =
      sample_priors(prior_spec, derive_seed(rep_seed, kPriorStream));

  const std::vector<std::int64_t> sizes = apply_imbalance(
      imbalance, m, n_train, derive_seed(rep_seed, kSizeStream));
  out.sizes = sizes;

  const BagCollection bags =
      synthesize_bags(pool.train, priors, sizes,
                      derive_seed(derive_seed(rep_seed, kBagStream),
                                  static_cast<std::uint64_t>(n_train)));

  const auto start = std::chrono::steady_clock::now();
  if (solver == "minmax") {
    auto model = make_scorer(spec.model_kind, pool_spec.d, m - 1,
                             derive_seed(rep_seed, kModelStream), spec.hidden);
    TrainConfig cfg = spec.train;
    cfg.seed = derive_seed(rep_seed, kTrainStream);
    cfg.batch_size = static_cast<int>(std::min<std::int64_t>(
        cfg.batch_size, bags.total_instances()));
    const TrainResult result = train(bags, *model, cfg, &pool.test);
    out.auc = result.log.rows.back().test_auc;
    // Per-run CSVs stay timing-free so identical runs produce identical
    // artifacts; wall time is aggregated into mean_seconds instead.
    out.log_csv = result.log.to_csv(false);
  } else if (solver == "pairwise") {
    auto model = make_scorer(spec.model_kind, pool_spec.d, 1,
                             derive_seed(rep_seed, kModelStream), spec.hidden);
    PairwiseConfig cfg = spec.pairwise;
    cfg.seed = derive_seed(rep_seed, kTrainStream);
    const PairwiseResult result = train_pairwise(bags, *model, cfg);
    out.auc = labeled_auc(*model, pool.test);
    out.log_csv = result.to_csv();
  } else {
    throw std::invalid_argument("experiment: unknown solver '" + solver + "'");
  }
  out.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return out;
}

CellResult run_cell(const ExperimentSpec& spec, PriorKind kind, int m,
                    const std::string& solver, const ImbalanceSpec& imbalance,
                    std::int64_t n_train) {
  CellResult cell;
  cell.dataset = dataset_label(spec.pool);
  cell.priors = kind == PriorKind::explicit_list ? "explicit" : prior_kind_name(kind);
  cell.m = m;
  cell.solver = solver;
  cell.imbalance = imbalance_label(imbalance);
  cell.n_train = n_train;
  double seconds = 0.0;
  for (int rep = 0; rep < spec.repeats; ++rep) {
    const std::uint64_t rep_seed =
        derive_seed(spec.seed, static_cast<std::uint64_t>(rep));
    cell.seeds.push_back(rep_seed);
    try {
      RunOutput out =
          run_once(spec, kind, m, solver, imbalance, n_train, rep_seed);
      cell.aucs.push_back(out.auc);
      cell.rep_sizes.push_back(std::move(out.sizes));
      cell.run_logs.push_back(std::move(out.log_csv));
      seconds += out.seconds;
    } catch (const std::exception& ex) {
      if (cell.diagnostic.empty()) cell.diagnostic = ex.what();
    }
  }
  if (!cell.aucs.empty())
    cell.mean_seconds = seconds / static_cast<double>(cell.aucs.size());
  finalize_cell(cell);
  return cell;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ';';
    out += format_double(v[i]);
  }
  return out;
}

std::string join_seeds(const std::vector<std::uint64_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ';';
    out += std::to_string(v[i]);
  }
  return out;
}

std::string join_sizes(const std::vector<std::vector<std::int64_t>>& reps) {
  std::string out;
  for (std::size_t r = 0; r < reps.size(); ++r) {
    if (r > 0) out += ';';
    for (std::size_t i = 0; i < reps[r].size(); ++i) {
      if (i > 0) out += '|';
      out += std::to_string(reps[r][i]);
    }
  }
  return out;
}

std::string machine_info_string() {
  std::ostringstream out;
  out << "threads=" << std::thread::hardware_concurrency()
      << ";pointer_bits=" << 8 * sizeof(void*);
  return out.str();
}

}  // namespace

void ExperimentSpec::validate() const {
  if (repeats < 1) throw std::invalid_argument("experiment: repeats must be >= 1");
  if (m_values.empty()) throw std::invalid_argument("experiment: no m values");
  for (int m : m_values)
    if (m < 2) throw std::invalid_argument("experiment: m must be >= 2");
  if (prior_kinds.empty()) throw std::invalid_argument("experiment: no prior kinds");
  if (solvers.empty()) throw std::invalid_argument("experiment: no solvers");
  for (const std::string& s : solvers)
    if (s != "minmax" && s != "pairwise")
      throw std::invalid_argument("experiment: unknown solver '" + s + "'");
  if (model_kind != "linear" && model_kind != "mlp")
    throw std::invalid_argument("experiment: unknown model kind '" + model_kind + "'");
}

std::string ExperimentSpec::canonical_json() const {
  json j;
  j["pool"] = pool_spec_to_json(pool);
  json kinds = json::array();
  for (PriorKind kind : prior_kinds)
    kinds.push_back(kind == PriorKind::explicit_list ? "explicit"
                                                     : prior_kind_name(kind));
  j["prior-kinds"] = kinds;
  j["explicit-priors"] = explicit_priors;
  j["m-values"] = m_values;
  j["imbalance"] = imbalance_label(imbalance);
  j["repeats"] = repeats;
  j["train"] = train_config_to_json(train);
  j["pairwise"] = pairwise_config_to_json(pairwise);
  j["solvers"] = solvers;
  j["model"] = model_kind;
  j["hidden"] = hidden;
  j["seed"] = seed;
  return j.dump();
}

std::string fnv1a64_hex(std::string_view text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string ExperimentReport::to_csv(bool include_timing) const {
  std::ostringstream out;
  out << "dataset,priors,m,solver,imbalance,n_train,repeats,mean_auc,std_auc,"
         "gap,aucs,seeds,sizes";
  if (include_timing) out << ",mean_seconds";
  out << ",diagnostic\n";
  for (const CellResult& cell : cells) {
    out << cell.dataset << ',' << cell.priors << ',' << cell.m << ','
        << cell.solver << ',' << cell.imbalance << ',' << cell.n_train << ','
        << cell.seeds.size() << ',' << format_double(cell.mean_auc) << ','
        << format_double(cell.std_auc) << ',' << format_double(cell.gap) << ','
        << join_doubles(cell.aucs) << ',' << join_seeds(cell.seeds) << ','
        << join_sizes(cell.rep_sizes);
    if (include_timing) out << ',' << format_double(cell.mean_seconds);
    out << ',' << cell.diagnostic << '\n';
  }
  return out.str();
}

std::string ExperimentReport::to_markdown() const {
  // Pivot: one row per (priors, imbalance, n_train), one column per (m, solver).
  std::vector<std::string> row_keys, col_keys;
  std::map<std::pair<std::string, std::string>, const CellResult*> grid;
  for (const CellResult& cell : cells) {
    std::string row = cell.priors + " / " + cell.imbalance;
    if (cells.size() > 1 && cell.n_train != cells.front().n_train)
      row += " / n=" + std::to_string(cell.n_train);
    const std::string col =
        "m=" + std::to_string(cell.m) + " " + cell.solver;
    if (std::find(row_keys.begin(), row_keys.end(), row) == row_keys.end())
      row_keys.push_back(row);
    if (std::find(col_keys.begin(), col_keys.end(), col) == col_keys.end())
      col_keys.push_back(col);
    grid[{row, col}] = &cell;
  }

  std::ostringstream out;
  out << "# " << suite << "\n\n";
  out << "- config digest: `" << config_digest << "`\n";
  if (!std::isnan(bayes_auc))
    out << "- Bayes AUC of the pool: " << format_double(bayes_auc) << "\n";
  out << "- machine: " << machine_info << "\n\n";
  out << "| setting |";
  for (const std::string& col : col_keys) out << ' ' << col << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < col_keys.size(); ++i) out << "---|";
  out << '\n';
  for (const std::string& row : row_keys) {
    out << "| " << row << " |";
    for (const std::string& col : col_keys) {
      const auto it = grid.find({row, col});
      if (it == grid.end()) {
        out << " |";
        continue;
      }
      const CellResult& cell = *it->second;
      if (!cell.diagnostic.empty() && cell.aucs.empty()) {
        out << " failed |";
        continue;
      }
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.4f ± %.4f", cell.mean_auc,
                    cell.std_auc);
      out << ' ' << buf << " |";
    }
    out << '\n';
  }
  return out.str();
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentReport report;
  report.suite = "experiment";
  report.config_digest = fnv1a64_hex(spec.canonical_json());
  report.machine_info = machine_info_string();
  report.bayes_auc = bayes_auc(spec.pool);
  for (PriorKind kind : spec.prior_kinds)
    for (int m : spec.m_values)
      for (const std::string& solver : spec.solvers)
        report.cells.push_back(run_cell(spec, kind, m, solver, spec.imbalance,
                                        spec.pool.n_train));
  return report;
}

ExperimentReport run_imbalance_sweep(const ExperimentSpec& base,
                                     const std::vector<double>& taus,
                                     bool include_random) {
  base.validate();
  ExperimentReport report;
  report.suite = "imbalance";
  report.config_digest =
      fnv1a64_hex(base.canonical_json() + "|taus=" + join_doubles(taus) +
                  (include_random ? "|random" : ""));
  report.machine_info = machine_info_string();
  report.bayes_auc = bayes_auc(base.pool);
  for (PriorKind kind : base.prior_kinds)
    for (int m : base.m_values) {
      for (double tau : taus) {
        ImbalanceSpec imb{ImbalanceMode::size_reduction, tau};
        for (const std::string& solver : base.solvers)
          report.cells.push_back(
              run_cell(base, kind, m, solver, imb, base.pool.n_train));
      }
      if (include_random) {
        ImbalanceSpec imb{ImbalanceMode::random, 1.0};
        for (const std::string& solver : base.solvers)
          report.cells.push_back(
              run_cell(base, kind, m, solver, imb, base.pool.n_train));
      }
    }
  return report;
}

ExperimentReport run_excess_risk_trend(const ExperimentSpec& base,
                                       const std::vector<std::int64_t>& n_list) {
  base.validate();
  if (n_list.empty()) throw std::invalid_argument("excess-risk: empty n list");
  const std::int64_t n_max = *std::max_element(n_list.begin(), n_list.end());
  if (base.pool.n_train < n_max)
    throw std::invalid_argument("excess-risk: pool smaller than the largest n");

  ExperimentReport report;
  report.suite = "excess-risk";
  report.config_digest =
      fnv1a64_hex(base.canonical_json() + "|n=" +
                  join_sizes({std::vector<std::int64_t>(n_list.begin(), n_list.end())}));
  report.machine_info = machine_info_string();
  report.bayes_auc = bayes_auc(base.pool);

  const PriorKind kind = base.prior_kinds.front();
  const int m = base.m_values.front();
  for (std::int64_t n : n_list) {
    CellResult cell = run_cell(base, kind, m, "minmax",
                               ImbalanceSpec{ImbalanceMode::none, 1.0}, n);
    if (!cell.diagnostic.empty() && cell.aucs.empty())
      throw std::runtime_error("excess-risk: cell n=" + std::to_string(n) +
                               " failed: " + cell.diagnostic);
    cell.gap = report.bayes_auc - cell.mean_auc;
    report.cells.push_back(std::move(cell));
  }

  for (std::size_t t = 1; t < report.cells.size(); ++t) {
    if (report.cells[t].gap > report.cells[t - 1].gap)
      throw std::runtime_error(
          "excess-risk: gap increased from n=" +
          std::to_string(report.cells[t - 1].n_train) + " (" +
          format_double(report.cells[t - 1].gap) + ") to n=" +
          std::to_string(report.cells[t].n_train) + " (" +
          format_double(report.cells[t].gap) + ")");
  }
  if (report.cells.size() >= 2 &&
      !(report.cells.back().gap < report.cells.front().gap / 2.0))
    throw std::runtime_error("excess-risk: gap(" +
                             std::to_string(report.cells.back().n_train) +
                             ") = " + format_double(report.cells.back().gap) +
                             " is not below half of gap(" +
                             std::to_string(report.cells.front().n_train) +
                             ") = " + format_double(report.cells.front().gap));
  return report;
}

ExperimentSpec default_suite_spec(const std::string& suite) {
  ExperimentSpec spec;
  spec.train.eval_every = 50;
  if (suite == "priors") {
    spec.prior_kinds = {PriorKind::uniform, PriorKind::biased,
                        PriorKind::concentrated, PriorKind::biased_concentrated};
    spec.m_values = {2, 4, 10};
  } else if (suite == "imbalance") {
    spec.prior_kinds = {PriorKind::uniform};
    spec.m_values = {10};
  } else if (suite == "excess-risk") {
    spec.prior_kinds = {PriorKind::uniform};
    spec.m_values = {4};
    spec.repeats = 5;
    spec.pool.n_train = 6400;
    spec.pool.n_test = 20000;
  } else if (suite == "equivalence") {
    spec.prior_kinds = {PriorKind::uniform};
    spec.m_values = {3};
    spec.pool.n_train = 600;
    spec.solvers = {"minmax", "pairwise"};
  } else {
    throw std::invalid_argument("unknown suite '" + suite + "'");
  }
  return spec;
}

ExperimentReport run_suite(const std::string& suite, const ExperimentSpec& spec) {
  if (suite == "priors" || suite == "equivalence") {
    ExperimentReport report = run_experiment(spec);
    report.suite = suite;
    return report;
  }
  if (suite == "imbalance") return run_imbalance_sweep(spec);
  if (suite == "excess-risk") return run_excess_risk_trend(spec);
  throw std::invalid_argument("unknown suite '" + suite + "'");
}

void write_report(const ExperimentReport& report, const std::string& dir) {
  fs::create_directories(fs::path(dir) / "runs");
  {
    std::ofstream out(fs::path(dir) / "report.csv");
    out << report.to_csv();
    if (!out) throw std::runtime_error("report: cannot write report.csv");
  }
  {
    std::ofstream out(fs::path(dir) / "report.md");
    out << report.to_markdown();
    if (!out) throw std::runtime_error("report: cannot write report.md");
  }
  for (std::size_t c = 0; c < report.cells.size(); ++c) {
    const CellResult& cell = report.cells[c];
    for (std::size_t r = 0; r < cell.run_logs.size(); ++r) {
      std::ofstream out(fs::path(dir) / "runs" /
                        ("cell" + std::to_string(c) + "_rep" +
                         std::to_string(r) + ".csv"));
      out << cell.run_logs[r];
      if (!out) throw std::runtime_error("report: cannot write a run log");
    }
  }
}

}  // namespace umauc
