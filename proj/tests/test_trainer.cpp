#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "umauc/bagdata.hpp"
#include "umauc/rng.hpp"
#include "umauc/scorer.hpp"
#include "umauc/trainer.hpp"

using namespace umauc;
namespace fs = std::filesystem;

namespace {

struct Synth {
  BagCollection bags;
  std::vector<Instance> test;
};

Synth make_two_bag_problem(std::int64_t n_per_bag, std::uint64_t seed,
                           double sigma = 1.0, double mean_shift = 1.0,
                           std::vector<double> priors = {0.9, 0.1}) {
  GaussianPoolSpec spec;
  spec.d = 2;
  spec.sigma = sigma;
  spec.mean_pos = {mean_shift, mean_shift};
  spec.mean_neg = {-mean_shift, -mean_shift};
  spec.n_train = 4 * n_per_bag;
  spec.n_test = 1000;
  const LabeledPool pool = generate_gaussian_pool(spec, seed);
  const std::vector<std::int64_t> sizes{n_per_bag, n_per_bag};
  return {synthesize_bags(pool.train, priors, sizes, derive_seed(seed, 1)),
          pool.test};
}

std::vector<double> params_of(const Scorer& model) {
  return std::vector<double>(model.params_view().begin(),
                             model.params_view().end());
}

}  // namespace

TEST_CASE("minibatches split a 10-element pool into 4,4,2") {
  const auto batches = minibatch_iter(10, 4, 7, 1);
  REQUIRE(batches.size() == 3);
  CHECK(batches[0].size() == 4);
  CHECK(batches[1].size() == 4);
  CHECK(batches[2].size() == 2);
}

TEST_CASE("minibatches cover the pool exactly once") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto pool_size = static_cast<std::size_t>(rng.uniform_int(1, 500));
    const int batch = static_cast<int>(
        rng.uniform_int(1, static_cast<std::int64_t>(pool_size)));
    const auto batches = minibatch_iter(pool_size, batch,
                                        static_cast<std::uint64_t>(trial), 3);
    std::set<std::size_t> seen;
    std::size_t total = 0;
    for (const auto& b : batches) {
      total += b.size();
      seen.insert(b.begin(), b.end());
    }
    CHECK(total == pool_size);
    CHECK(seen.size() == pool_size);
    CHECK(*seen.rbegin() == pool_size - 1);
  }
}

TEST_CASE("minibatch order depends on seed and epoch but not on calls") {
  CHECK(minibatch_iter(50, 8, 11, 2) == minibatch_iter(50, 8, 11, 2));
  CHECK(minibatch_iter(50, 8, 11, 2) != minibatch_iter(50, 8, 11, 3));
  CHECK(minibatch_iter(50, 8, 11, 2) != minibatch_iter(50, 8, 12, 2));
}

TEST_CASE("config validation rejects unusable settings") {
  TrainConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.epochs = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = TrainConfig{};
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = TrainConfig{};
  cfg.lr_primal = -0.1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = TrainConfig{};
  cfg.margin = 0.5;  // margin only makes sense with the clamp on
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.constrained_alpha = true;
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("train rejects mismatched shapes") {
  const Synth synth = make_two_bag_problem(100, 5);
  TrainConfig cfg;
  cfg.epochs = 1;

  LinearScorer wrong_dim(3, 1, 1);
  CHECK_THROWS_AS(train(synth.bags, wrong_dim, cfg), std::invalid_argument);

  LinearScorer wrong_heads(2, 4, 1);
  CHECK_THROWS_AS(train(synth.bags, wrong_heads, cfg), std::invalid_argument);

  LinearScorer ok(2, 1, 1);
  cfg.batch_size = 1000;  // larger than the 200-instance pool
  CHECK_THROWS_AS(train(synth.bags, ok, cfg), std::invalid_argument);
}

TEST_CASE("training is deterministic for a fixed seed") {
  const Synth synth = make_two_bag_problem(150, 9);
  TrainConfig cfg;
  cfg.epochs = 8;
  cfg.batch_size = 64;
  cfg.eval_every = 2;
  cfg.seed = 3;

  LinearScorer m1(2, 1, 7), m2(2, 1, 7);
  const TrainResult r1 = train(synth.bags, m1, cfg, &synth.test);
  const TrainResult r2 = train(synth.bags, m2, cfg, &synth.test);
  CHECK(r1.log.to_csv(false) == r2.log.to_csv(false));
  CHECK(params_of(m1) == params_of(m2));
  CHECK(r1.state.steps == r2.state.steps);

  cfg.seed = 4;
  LinearScorer m3(2, 1, 7);
  const TrainResult r3 = train(synth.bags, m3, cfg, &synth.test);
  CHECK(params_of(m1) != params_of(m3));
}

TEST_CASE("prior metadata rewrites cannot change training") {
  const Synth synth = make_two_bag_problem(120, 13);

  // Same features and order, different stored prior values / labels.
  std::vector<Bag> rewritten = synth.bags.bags();
  rewritten[0].true_prior = 0.77;
  rewritten[1].true_prior = 0.33;
  for (Bag& bag : rewritten)
    for (Instance& ins : bag.instances) ins.hidden_label.reset();
  const BagCollection renamed(rewritten, synth.bags.d(), synth.bags.seed());

  TrainConfig cfg;
  cfg.epochs = 6;
  cfg.batch_size = 48;
  cfg.eval_every = 3;

  LinearScorer m1(2, 1, 21), m2(2, 1, 21);
  const TrainResult r1 = train(synth.bags, m1, cfg, &synth.test);
  const TrainResult r2 = train(renamed, m2, cfg, &synth.test);
  CHECK(r1.log.to_csv(false) == r2.log.to_csv(false));
  CHECK(params_of(m1) == params_of(m2));
}

TEST_CASE("log rows appear on the eval grid plus the final epoch") {
  const Synth synth = make_two_bag_problem(60, 17);
  TrainConfig cfg;
  cfg.epochs = 7;
  cfg.eval_every = 3;
  cfg.batch_size = 32;
  LinearScorer model(2, 1, 2);
  const TrainResult r = train(synth.bags, model, cfg, &synth.test);
  REQUIRE(r.log.rows.size() == 3);
  CHECK(r.log.rows[0].epoch == 3);
  CHECK(r.log.rows[1].epoch == 6);
  CHECK(r.log.rows[2].epoch == 7);
  for (const TrainLogRow& row : r.log.rows) {
    CHECK(std::isfinite(row.train_macro_auc));
    CHECK(std::isfinite(row.test_auc));
    REQUIRE(row.label_losses.size() == 1);
    CHECK(std::isfinite(row.label_losses[0]));
  }
  CHECK(r.state.steps > 0);

  // Without a test set the column is NaN.
  LinearScorer m2(2, 1, 2);
  const TrainResult r2 = train(synth.bags, m2, cfg);
  CHECK(std::isnan(r2.log.rows.back().test_auc));
}

TEST_CASE("csv log has the promised header and row count") {
  const Synth synth = make_two_bag_problem(60, 19);
  TrainConfig cfg;
  cfg.epochs = 4;
  cfg.eval_every = 2;
  cfg.batch_size = 30;
  LinearScorer model(2, 1, 3);
  const TrainResult r = train(synth.bags, model, cfg, &synth.test);

  const std::string with_time = r.log.to_csv(true);
  const std::string no_time = r.log.to_csv(false);
  CHECK(with_time.rfind("epoch,train_macro_auc,test_auc,loss_k1,seconds\n", 0) == 0);
  CHECK(no_time.rfind("epoch,train_macro_auc,test_auc,loss_k1\n", 0) == 0);
  const auto lines = [](const std::string& s) {
    return std::count(s.begin(), s.end(), '\n');
  };
  CHECK(lines(with_time) == 3);  // header + two rows
  CHECK(lines(no_time) == 3);
}

TEST_CASE("full-batch exact descent decreases the loss monotonically") {
  const Synth synth = make_two_bag_problem(100, 23);
  TrainConfig cfg;
  cfg.epochs = 20;
  cfg.batch_size = 200;  // the whole pool in one batch
  cfg.batch_exact = true;
  cfg.eval_every = 1;
  cfg.lr_primal = 0.05;
  cfg.lr_decay_every = 1000;
  LinearScorer model(2, 1, 5);
  const TrainResult r = train(synth.bags, model, cfg);
  REQUIRE(r.log.rows.size() == 20);
  for (std::size_t i = 1; i < r.log.rows.size(); ++i)
    CHECK(r.log.rows[i].label_losses[0] <=
          r.log.rows[i - 1].label_losses[0] + 1e-12);
}

TEST_CASE("two bags with a strong prior gap train to high AUC") {
  const Synth synth = make_two_bag_problem(1000, 29);
  TrainConfig cfg;
  cfg.epochs = 50;
  cfg.batch_size = 256;
  cfg.eval_every = 25;
  LinearScorer model(2, 1, 11);
  const TrainResult r = train(synth.bags, model, cfg, &synth.test);
  CHECK(r.log.rows.back().test_auc >= 0.95);
  CHECK(labeled_auc(model, synth.test) ==
        doctest::Approx(r.log.rows.back().test_auc).epsilon(1e-12));
}

TEST_CASE("many weak bags track the two-bag result") {
  GaussianPoolSpec spec;
  spec.n_train = 2000;
  spec.n_test = 1000;
  const LabeledPool pool = generate_gaussian_pool(spec, 31);

  PriorSpec prior_spec;
  prior_spec.kind = PriorKind::uniform;

  const auto train_with_m = [&](int m) {
    prior_spec.m = m;
    const auto priors = sample_priors(prior_spec, 5);
    const std::vector<std::int64_t> sizes(
        static_cast<std::size_t>(m), 2000 / m);
    const BagCollection bags = synthesize_bags(pool.train, priors, sizes, 41);
    TrainConfig cfg;
    cfg.epochs = 40;
    cfg.batch_size = 200;
    cfg.eval_every = 40;
    LinearScorer model(2, m - 1, 17);
    return train(bags, model, cfg, &pool.test).log.rows.back().test_auc;
  };

  const double auc2 = train_with_m(2);
  const double auc10 = train_with_m(10);
  CHECK(auc2 >= 0.9);
  CHECK(std::abs(auc10 - auc2) <= 0.03);
}

TEST_CASE("per-label sampling still learns the ranking") {
  const Synth synth = make_two_bag_problem(400, 37);
  TrainConfig cfg;
  cfg.epochs = 40;
  cfg.batch_size = 128;
  cfg.eval_every = 40;
  cfg.per_label_sampling = true;
  LinearScorer model(2, 1, 19);
  const TrainResult r = train(synth.bags, model, cfg, &synth.test);
  CHECK(r.log.rows.back().test_auc >= 0.93);
}

TEST_CASE("separable pools with pure bags push the heads above 0.99") {
  const Synth synth = make_two_bag_problem(300, 43, 0.5, 3.0, {1.0, 0.0});
  TrainConfig cfg;
  cfg.epochs = 50;
  cfg.batch_size = 120;
  cfg.eval_every = 50;
  LinearScorer model(2, 1, 23);
  const TrainResult r = train(synth.bags, model, cfg, &synth.test);
  CHECK(r.log.rows.back().train_macro_auc > 0.99);
}

TEST_CASE("a diverging run aborts and leaves a checkpoint behind") {
  const Synth synth = make_two_bag_problem(100, 47);
  TrainConfig cfg;
  cfg.epochs = 50;
  cfg.batch_size = 50;
  cfg.lr_primal = 1e12;
  cfg.lr_dual = 1e12;
  const fs::path ckpt = fs::temp_directory_path() / "umauc_trainer_abort.ckpt";
  fs::remove(ckpt);
  cfg.abort_checkpoint_path = ckpt.string();
  LinearScorer model(2, 1, 29);
  CHECK_THROWS_AS(train(synth.bags, model, cfg), std::runtime_error);
  CHECK(fs::exists(ckpt));
  const Checkpoint back = load_checkpoint(ckpt.string());
  CHECK(back.model->kind() == "linear");
  CHECK(back.state.has_value());
  fs::remove(ckpt);
}

TEST_CASE("aggregate_score averages the heads") {
  LinearScorer model(2, 3, 0);
  for (int h = 0; h < 3; ++h) {
    model.set_weight(h, 0, h + 1.0);
    model.set_weight(h, 1, 0.0);
    model.set_bias(h, 0.0);
  }
  // Heads at x=(1,0): 1, 2, 3; mean 2.
  CHECK(aggregate_score(model, std::vector<double>{1.0, 0.0}) ==
        doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("labeled_auc demands labels") {
  LinearScorer model(2, 1, 1);
  std::vector<Instance> data{{{0.1, 0.2}, +1}, {{0.3, 0.4}, std::nullopt}};
  CHECK_THROWS_AS(labeled_auc(model, data), std::invalid_argument);
}
