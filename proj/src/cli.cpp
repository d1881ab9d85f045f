#include "umauc/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "umauc/aucmetrics.hpp"
#include "umauc/bench.hpp"
#include "umauc/jsonconf.hpp"
#include "umauc/reduction.hpp"
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

// Bad invocations exit 2; everything else that throws exits 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

json read_json_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw UsageError(std::string("unreadable ") + what + " '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& ex) {
    throw std::runtime_error(std::string("malformed ") + what + " '" + path +
                             "': " + ex.what());
  }
}

void write_text(const fs::path& path, const std::string& content) {
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  out << content;
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
}

void write_effective_config(const std::string& dir, const json& config) {
  write_text(fs::path(dir) / "effective_config.json", config.dump(2) + "\n");
}

void emit_result(std::ostream& out, const json& result) {
  out << "RESULT " << result.dump() << "\n";
}

// "gauss", "gauss:d=4,n-train=2000", or a JSON file of pool-spec keys.
GaussianPoolSpec parse_pool(const std::string& text) {
  GaussianPoolSpec spec;
  if (fs::exists(text)) {
    pool_spec_from_json(read_json_file(text, "pool spec"), spec);
    return spec;
  }
  if (text == "gauss") return spec;
  const std::string prefix = "gauss:";
  if (text.rfind(prefix, 0) != 0)
    throw UsageError("bad --pool '" + text +
                     "': expected 'gauss', 'gauss:key=value,...', or a JSON file");
  for (const std::string& kv : split(text.substr(prefix.size()), ',')) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos)
      throw UsageError("bad --pool entry '" + kv + "': expected key=value");
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    if (key == "d")
      spec.d = static_cast<int>(parse_double(value, "--pool d"));
    else if (key == "n-train")
      spec.n_train = static_cast<std::int64_t>(parse_double(value, "--pool n-train"));
    else if (key == "n-test")
      spec.n_test = static_cast<std::int64_t>(parse_double(value, "--pool n-test"));
    else if (key == "sigma")
      spec.sigma = parse_double(value, "--pool sigma");
    else if (key == "pos-fraction")
      spec.pos_fraction = parse_double(value, "--pool pos-fraction");
    else
      throw UsageError("bad --pool key '" + key + "'");
  }
  return spec;
}

// A prior kind name, or an explicit comma-separated descending list.
PriorSpec parse_priors(const std::string& text, int m_flag) {
  PriorSpec spec;
  try {
    spec.kind = prior_kind_from_name(text);
    spec.m = m_flag;
    return spec;
  } catch (const std::exception&) {
    // fall through to the explicit-list form
  }
  spec.kind = PriorKind::explicit_list;
  try {
    for (const std::string& field : split(text, ','))
      spec.values.push_back(parse_double(field, "--priors"));
  } catch (const std::exception&) {
    throw UsageError("bad --priors '" + text +
                     "': expected a prior kind name or a decimal list");
  }
  spec.m = static_cast<int>(spec.values.size());
  if (m_flag != 0 && m_flag != spec.m)
    throw UsageError("--m disagrees with the --priors list length");
  return spec;
}

ImbalanceSpec parse_imbalance(const std::string& text) {
  if (text == "none") return {ImbalanceMode::none, 1.0};
  if (text == "random") return {ImbalanceMode::random, 1.0};
  const std::string prefix = "tau=";
  if (text.rfind(prefix, 0) == 0) {
    const double tau = parse_double(text.substr(prefix.size()), "--imbalance");
    return {ImbalanceMode::size_reduction, tau};
  }
  throw UsageError("bad --imbalance '" + text +
                   "': expected none, tau=<x>, or random");
}

std::vector<int> parse_hidden(const std::string& text) {
  std::vector<int> widths;
  for (const std::string& field : split(text, ','))
    widths.push_back(static_cast<int>(parse_double(field, "--hidden")));
  return widths;
}

// --- synth -----------------------------------------------------------------

struct SynthArgs {
  std::string pool = "gauss";
  std::string priors = "uniform";
  int m = 10;
  std::string imbalance = "none";
  std::uint64_t seed = 1;
  std::string out;
};

int run_synth(const SynthArgs& args, std::ostream& out) {
  if (args.out.empty()) throw UsageError("missing --out");
  const GaussianPoolSpec pool_spec = parse_pool(args.pool);
  const PriorSpec prior_spec = parse_priors(args.priors, args.m);
  const ImbalanceSpec imbalance = parse_imbalance(args.imbalance);

  const LabeledPool pool =
      generate_gaussian_pool(pool_spec, derive_seed(args.seed, kPoolStream));
  const std::vector<double> priors =
      sample_priors(prior_spec, derive_seed(args.seed, kPriorStream));
  const std::vector<std::int64_t> sizes =
      apply_imbalance(imbalance, prior_spec.m, pool_spec.n_train,
                      derive_seed(args.seed, kSizeStream));
  const BagCollection bags = synthesize_bags(
      pool.train, priors, sizes, derive_seed(args.seed, kBagStream));

  fs::create_directories(args.out);
  write_bags(bags, args.out);
  write_labeled_csv(pool.test, (fs::path(args.out) / "test.csv").string());

  json config{{"command", "synth"},
              {"pool", pool_spec_to_json(pool_spec)},
              {"priors", args.priors},
              {"m", prior_spec.m},
              {"imbalance", args.imbalance},
              {"seed", args.seed},
              {"out", args.out}};
  write_effective_config(args.out, config);

  emit_result(out, json{{"out", args.out},
                        {"m", bags.m()},
                        {"d", bags.d()},
                        {"n_train", bags.total_instances()},
                        {"n_test", pool.test.size()},
                        {"bayes_auc", bayes_auc(pool_spec)}});
  return 0;
}

// --- train -----------------------------------------------------------------

struct TrainArgs {
  std::string bags;
  std::string model = "linear";
  std::string hidden = "64,64";
  std::string config;
  std::string test;
  std::string out;
  TrainConfig cfg;
};

// Applies config-file values, then the explicitly passed flags on top.
void resolve_train_config(const json& file, TrainArgs& args,
                          const TrainConfig& flag_values,
                          const std::vector<std::string>& passed) {
  const auto passed_has = [&](const char* name) {
    return std::find(passed.begin(), passed.end(), name) != passed.end();
  };
  json rest = file;
  if (rest.contains("model")) {
    if (!passed_has("model")) args.model = rest["model"].get<std::string>();
    rest.erase("model");
  }
  if (rest.contains("hidden")) {
    if (!passed_has("hidden")) {
      const auto widths = rest["hidden"].get<std::vector<int>>();
      args.hidden.clear();
      for (std::size_t i = 0; i < widths.size(); ++i)
        args.hidden += (i ? "," : "") + std::to_string(widths[i]);
    }
    rest.erase("hidden");
  }
  if (rest.contains("test")) {
    if (!passed_has("test")) args.test = rest["test"].get<std::string>();
    rest.erase("test");
  }
  train_config_from_json(rest, args.cfg);
  if (passed_has("epochs")) args.cfg.epochs = flag_values.epochs;
  if (passed_has("batch-size")) args.cfg.batch_size = flag_values.batch_size;
  if (passed_has("lr-primal")) args.cfg.lr_primal = flag_values.lr_primal;
  if (passed_has("lr-dual")) args.cfg.lr_dual = flag_values.lr_dual;
  if (passed_has("momentum")) args.cfg.momentum = flag_values.momentum;
  if (passed_has("weight-decay")) args.cfg.weight_decay = flag_values.weight_decay;
  if (passed_has("margin")) args.cfg.margin = flag_values.margin;
  if (passed_has("constrained-alpha"))
    args.cfg.constrained_alpha = flag_values.constrained_alpha;
  if (passed_has("seed")) args.cfg.seed = flag_values.seed;
  if (passed_has("eval-every")) args.cfg.eval_every = flag_values.eval_every;
  if (passed_has("lr-decay-every"))
    args.cfg.lr_decay_every = flag_values.lr_decay_every;
  if (passed_has("batch-exact")) args.cfg.batch_exact = flag_values.batch_exact;
  if (passed_has("per-label-sampling"))
    args.cfg.per_label_sampling = flag_values.per_label_sampling;
}

int run_train(TrainArgs& args, const std::vector<std::string>& passed,
              std::ostream& out) {
  if (args.bags.empty()) throw UsageError("missing --bags");
  if (args.out.empty()) throw UsageError("missing --out");
  if (!fs::exists(args.bags)) throw UsageError("unreadable bag directory '" + args.bags + "'");

  TrainConfig flag_values = args.cfg;
  args.cfg = TrainConfig{};
  json file_config = json::object();
  if (!args.config.empty()) file_config = read_json_file(args.config, "config file");
  resolve_train_config(file_config, args, flag_values, passed);

  const BagCollection bags = read_bags(args.bags);
  std::optional<std::vector<Instance>> test;
  std::string test_path = args.test;
  if (test_path.empty()) {
    const fs::path implied = fs::path(args.bags) / "test.csv";
    if (fs::exists(implied)) test_path = implied.string();
  }
  if (!test_path.empty()) {
    if (!fs::exists(test_path))
      throw UsageError("unreadable test file '" + test_path + "'");
    test = read_labeled_csv(test_path);
  }

  const std::vector<int> hidden = parse_hidden(args.hidden);
  auto model = make_scorer(args.model, bags.d(), bags.m() - 1,
                           derive_seed(args.cfg.seed, kModelStream), hidden);
  fs::create_directories(args.out);
  args.cfg.abort_checkpoint_path = (fs::path(args.out) / "abort.ckpt").string();

  const TrainResult result =
      train(bags, *model, args.cfg, test ? &*test : nullptr);

  save_checkpoint((fs::path(args.out) / "model.ckpt").string(), *model,
                  &result.state);
  write_text(fs::path(args.out) / "trainlog.csv", result.log.to_csv());
  write_text(fs::path(args.out) / "plan.json",
             ReductionPlan(bags.sizes()).to_json() + "\n");

  json config{{"command", "train"},
              {"bags", args.bags},
              {"model", args.model},
              {"hidden", parse_hidden(args.hidden)},
              {"test", test_path.empty() ? json() : json(test_path)},
              {"out", args.out},
              {"train", train_config_to_json(args.cfg)}};
  write_effective_config(args.out, config);

  const TrainLogRow& final_row = result.log.rows.back();
  emit_result(out,
              json{{"out", args.out},
                   {"checkpoint", "model.ckpt"},
                   {"epochs", args.cfg.epochs},
                   {"final_train_macro_auc", final_row.train_macro_auc},
                   {"final_test_auc", std::isnan(final_row.test_auc)
                                          ? json()
                                          : json(final_row.test_auc)}});
  return 0;
}

// --- train-baseline ----------------------------------------------------------

struct BaselineArgs {
  std::string bags;
  std::string model = "linear";
  std::string hidden = "64,64";
  std::string config;
  std::string test;
  std::string out;
  PairwiseConfig cfg;
};

int run_train_baseline(BaselineArgs& args, const std::vector<std::string>& passed,
                       std::ostream& out) {
  if (args.bags.empty()) throw UsageError("missing --bags");
  if (args.out.empty()) throw UsageError("missing --out");
  if (!fs::exists(args.bags)) throw UsageError("unreadable bag directory '" + args.bags + "'");

  PairwiseConfig flag_values = args.cfg;
  args.cfg = PairwiseConfig{};
  if (!args.config.empty())
    pairwise_config_from_json(read_json_file(args.config, "config file"), args.cfg);
  const auto passed_has = [&](const char* name) {
    return std::find(passed.begin(), passed.end(), name) != passed.end();
  };
  if (passed_has("epochs")) args.cfg.epochs = flag_values.epochs;
  if (passed_has("lr")) args.cfg.lr = flag_values.lr;
  if (passed_has("full-batch")) args.cfg.full_batch = flag_values.full_batch;
  if (passed_has("batch-pairs")) args.cfg.batch_pairs = flag_values.batch_pairs;
  if (passed_has("pair-cap")) args.cfg.pair_cap = flag_values.pair_cap;
  if (passed_has("seed")) args.cfg.seed = flag_values.seed;

  const BagCollection bags = read_bags(args.bags);
  std::optional<std::vector<Instance>> test;
  std::string test_path = args.test;
  if (test_path.empty()) {
    const fs::path implied = fs::path(args.bags) / "test.csv";
    if (fs::exists(implied)) test_path = implied.string();
  }
  if (!test_path.empty()) {
    if (!fs::exists(test_path))
      throw UsageError("unreadable test file '" + test_path + "'");
    test = read_labeled_csv(test_path);
  }

  auto model = make_scorer(args.model, bags.d(), 1,
                           derive_seed(args.cfg.seed, kModelStream),
                           parse_hidden(args.hidden));
  const PairwiseResult result = train_pairwise(bags, *model, args.cfg);

  fs::create_directories(args.out);
  save_checkpoint((fs::path(args.out) / "model.ckpt").string(), *model, nullptr);
  write_text(fs::path(args.out) / "risk.csv", result.to_csv());

  json config{{"command", "train-baseline"},
              {"bags", args.bags},
              {"model", args.model},
              {"hidden", parse_hidden(args.hidden)},
              {"test", test_path.empty() ? json() : json(test_path)},
              {"out", args.out},
              {"pairwise", pairwise_config_to_json(args.cfg)}};
  write_effective_config(args.out, config);

  json result_json{{"out", args.out},
                   {"checkpoint", "model.ckpt"},
                   {"epochs", args.cfg.epochs},
                   {"final_risk", result.epoch_risk.back()}};
  result_json["test_auc"] = test ? json(labeled_auc(*model, *test)) : json();
  emit_result(out, result_json);
  return 0;
}

// --- eval --------------------------------------------------------------------

struct EvalArgs {
  std::string scores;
  std::string labels;
  std::string ckpt;
  std::string data;
};

std::vector<std::string> read_lines(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw UsageError(std::string("unreadable ") + what + " '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

int run_eval(const EvalArgs& args, std::ostream& out) {
  double auc = 0.0;
  if (!args.scores.empty() || !args.labels.empty()) {
    if (args.scores.empty() || args.labels.empty())
      throw UsageError("eval needs both --scores and --labels");
    const std::vector<std::string> score_lines = read_lines(args.scores, "scores file");
    const std::vector<std::string> label_lines = read_lines(args.labels, "labels file");
    if (score_lines.size() != label_lines.size())
      throw std::runtime_error("eval: scores and labels differ in length");
    std::vector<ScoredSample> samples;
    samples.reserve(score_lines.size());
    for (std::size_t i = 0; i < score_lines.size(); ++i) {
      const std::string& lab = label_lines[i];
      int label = 0;
      if (lab == "+1" || lab == "1")
        label = 1;
      else if (lab == "-1")
        label = -1;
      else
        throw std::runtime_error("eval: bad label '" + lab + "'");
      samples.push_back({parse_double(score_lines[i], "eval scores"), label});
    }
    auc = auc_exact(samples);
  } else if (!args.ckpt.empty() || !args.data.empty()) {
    if (args.ckpt.empty() || args.data.empty())
      throw UsageError("eval needs both --ckpt and --data");
    if (!fs::exists(args.ckpt))
      throw UsageError("unreadable checkpoint '" + args.ckpt + "'");
    if (!fs::exists(args.data))
      throw UsageError("unreadable data file '" + args.data + "'");
    const Checkpoint ckpt = load_checkpoint(args.ckpt);
    auc = labeled_auc(*ckpt.model, read_labeled_csv(args.data));
  } else {
    throw UsageError("eval needs --scores/--labels or --ckpt/--data");
  }
  out << format_double(auc) << "\n";
  emit_result(out, json{{"auc", auc}});
  return 0;
}

// --- reproduce -----------------------------------------------------------------

struct ReproduceArgs {
  std::string suite;
  std::string out;
  std::uint64_t seed = 1;
  int repeats = 0;  // 0 keeps the suite default
  int epochs = 0;
};

int run_reproduce(const ReproduceArgs& args, std::ostream& out) {
  if (args.suite.empty()) throw UsageError("missing --suite");
  if (args.out.empty()) throw UsageError("missing --out");
  ExperimentSpec spec;
  try {
    spec = default_suite_spec(args.suite);
  } catch (const std::exception& ex) {
    throw UsageError(ex.what());
  }
  spec.seed = args.seed;
  if (args.repeats > 0) spec.repeats = args.repeats;
  if (args.epochs > 0) {
    spec.train.epochs = args.epochs;
    spec.pairwise.epochs = args.epochs;
  }

  const ExperimentReport report = run_suite(args.suite, spec);
  write_report(report, args.out);
  json config{{"command", "reproduce"},
              {"suite", args.suite},
              {"out", args.out},
              {"spec", json::parse(spec.canonical_json())}};
  write_effective_config(args.out, config);

  emit_result(out, json{{"suite", args.suite},
                        {"out", args.out},
                        {"digest", report.config_digest},
                        {"cells", report.cells.size()}});
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"umauc: train bipartite rankers from unlabeled bags ordered by class prior"};
  app.require_subcommand(1);

  SynthArgs synth;
  CLI::App* synth_cmd = app.add_subcommand(
      "synth", "Synthesize a bag collection from a Gaussian pool");
  synth_cmd->add_option("--pool", synth.pool,
                        "'gauss', 'gauss:key=value,...', or a JSON pool-spec file");
  synth_cmd->add_option("--priors", synth.priors,
                        "prior kind (uniform/biased/concentrated/biased_concentrated)"
                        " or an explicit descending list like 0.9,0.6,0.3");
  synth_cmd->add_option("--m", synth.m, "number of bags");
  synth_cmd->add_option("--imbalance", synth.imbalance, "none, tau=<x>, or random");
  synth_cmd->add_option("--seed", synth.seed, "RNG seed");
  synth_cmd->add_option("--out", synth.out, "output directory");

  TrainArgs train_args;
  CLI::App* train_cmd =
      app.add_subcommand("train", "Train the min-max scorer on a bag directory");
  train_cmd->add_option("--bags", train_args.bags, "bag directory from synth");
  train_cmd->add_option("--model", train_args.model, "linear or mlp")
      ->check(CLI::IsMember({"linear", "mlp"}));
  train_cmd->add_option("--hidden", train_args.hidden, "mlp trunk widths, e.g. 64,64");
  train_cmd->add_option("--config", train_args.config, "JSON config file");
  train_cmd->add_option("--test", train_args.test,
                        "labeled CSV for test AUC (default: <bags>/test.csv)");
  train_cmd->add_option("--out", train_args.out, "output directory");
  train_cmd->add_option("--epochs", train_args.cfg.epochs, "training epochs");
  train_cmd->add_option("--batch-size", train_args.cfg.batch_size, "minibatch size");
  train_cmd->add_option("--lr-primal", train_args.cfg.lr_primal, "model learning rate");
  train_cmd->add_option("--lr-dual", train_args.cfg.lr_dual, "a/b/alpha learning rate");
  train_cmd->add_option("--momentum", train_args.cfg.momentum, "SGD momentum");
  train_cmd->add_option("--weight-decay", train_args.cfg.weight_decay, "L2 coefficient");
  train_cmd->add_option("--margin", train_args.cfg.margin,
                        "pair margin (requires --constrained-alpha when != 1)");
  train_cmd->add_flag("--constrained-alpha", train_args.cfg.constrained_alpha,
                      "clamp the dual variables at zero");
  train_cmd->add_option("--seed", train_args.cfg.seed, "RNG seed");
  train_cmd->add_option("--eval-every", train_args.cfg.eval_every,
                        "epochs between log rows");
  train_cmd->add_option("--lr-decay-every", train_args.cfg.lr_decay_every,
                        "epochs between halvings of both learning rates");
  train_cmd->add_flag("--batch-exact", train_args.cfg.batch_exact,
                      "recompute a/b/alpha exactly at each epoch start");
  train_cmd->add_flag("--per-label-sampling", train_args.cfg.per_label_sampling,
                      "sample one surrogate label per instance");

  BaselineArgs baseline_args;
  CLI::App* baseline_cmd = app.add_subcommand(
      "train-baseline", "Train the exact pairwise baseline on a bag directory");
  baseline_cmd->add_option("--bags", baseline_args.bags, "bag directory from synth");
  baseline_cmd->add_option("--model", baseline_args.model, "linear or mlp")
      ->check(CLI::IsMember({"linear", "mlp"}));
  baseline_cmd->add_option("--hidden", baseline_args.hidden, "mlp trunk widths");
  baseline_cmd->add_option("--config", baseline_args.config, "JSON config file");
  baseline_cmd->add_option("--test", baseline_args.test,
                           "labeled CSV for test AUC (default: <bags>/test.csv)");
  baseline_cmd->add_option("--out", baseline_args.out, "output directory");
  baseline_cmd->add_option("--epochs", baseline_args.cfg.epochs, "descent epochs");
  baseline_cmd->add_option("--lr", baseline_args.cfg.lr, "learning rate");
  baseline_cmd->add_flag("--full-batch,!--no-full-batch", baseline_args.cfg.full_batch,
                         "use the exact full pair gradient each epoch");
  baseline_cmd->add_option("--batch-pairs", baseline_args.cfg.batch_pairs,
                           "sampled pairs per step in minibatch mode");
  baseline_cmd->add_option("--pair-cap", baseline_args.cfg.pair_cap,
                           "maximum admissible cross-bag pair count");
  baseline_cmd->add_option("--seed", baseline_args.cfg.seed, "RNG seed");

  EvalArgs eval_args;
  CLI::App* eval_cmd =
      app.add_subcommand("eval", "Compute AUC from scores/labels or a checkpoint");
  eval_cmd->add_option("--scores", eval_args.scores, "one score per line");
  eval_cmd->add_option("--labels", eval_args.labels, "one +1/-1 label per line");
  eval_cmd->add_option("--ckpt", eval_args.ckpt, "model checkpoint");
  eval_cmd->add_option("--data", eval_args.data, "labeled CSV");

  ReproduceArgs repro_args;
  CLI::App* repro_cmd = app.add_subcommand(
      "reproduce", "Run a canned experiment suite and write its report");
  repro_cmd->add_option("--suite", repro_args.suite,
                        "priors, imbalance, excess-risk, or equivalence");
  repro_cmd->add_option("--out", repro_args.out, "output directory");
  repro_cmd->add_option("--seed", repro_args.seed, "base RNG seed");
  repro_cmd->add_option("--repeats", repro_args.repeats, "override suite repeats");
  repro_cmd->add_option("--epochs", repro_args.epochs, "override training epochs");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("umauc");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  // Names of train/baseline flags the user actually passed, for override
  // precedence over config-file values.
  const auto passed_names = [](const CLI::App* cmd) {
    std::vector<std::string> names;
    for (const CLI::Option* opt : cmd->get_options())
      if (opt->count() > 0 && opt->get_name().rfind("--", 0) == 0)
        names.push_back(opt->get_name().substr(2));
    return names;
  };

  try {
    if (synth_cmd->parsed()) return run_synth(synth, out);
    if (train_cmd->parsed())
      return run_train(train_args, passed_names(train_cmd), out);
    if (baseline_cmd->parsed())
      return run_train_baseline(baseline_args, passed_names(baseline_cmd), out);
    if (eval_cmd->parsed()) return run_eval(eval_args, out);
    if (repro_cmd->parsed()) return run_reproduce(repro_args, out);
    err << "no subcommand given\n";
    return 2;
  } catch (const UsageError& ex) {
    err << ex.what() << "\n";
    return 2;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return 1;
  }
}

}  // namespace umauc
