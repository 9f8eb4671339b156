#include "hybowave/checkpoint.hpp"
#include "hybowave/config.hpp"
#include "hybowave/errors.hpp"
#include "hybowave/metrics.hpp"
#include "hybowave/optim.hpp"
#include "hybowave/synthetic.hpp"
#include "hybowave/trainer.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <limits>

using namespace hwn;

namespace {

TrainConfig quick_config(int epochs = 25) {
  TrainConfig cfg;
  cfg.max_epochs = epochs;
  cfg.model.encoder.input_dim = 16;
  cfg.model.encoder.hidden_dim = 8;
  return cfg;
}

struct Fixture {
  Graph graph = hierarchical_benchmark(0);
  EdgeSplit split = split_edges(graph, {}, 0);
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

}  // namespace

TEST(Adam, ZeroGradientIsAFixedPoint) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Random(3, 2);
  const Eigen::MatrixXd before = p;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(3, 2);
  const std::vector<TensorView> params{{"w", p.data(), 3, 2}};
  const std::vector<ConstTensorView> grads{{"w", g.data(), 3, 2}};
  AdamState state;
  for (int i = 0; i < 5; ++i) adam_step(params, grads, state, {});
  EXPECT_EQ(p, before);
  EXPECT_EQ(state.step, 5);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  double x = 2.0;
  const double g = 1.0;
  AdamState state;
  adam_step(std::vector<TensorView>{{"x", &x, 1, 1}}, std::vector<ConstTensorView>{{"x", &g, 1, 1}}, state,
            AdamConfig{0.1});
  EXPECT_NEAR(x, 1.9, 2e-9);  // eps shortens the step by lr*eps
}

TEST(Adam, DeterministicAndRejectsNonFinite) {
  auto run = [] {
    Eigen::VectorXd p = Eigen::VectorXd::LinSpaced(4, -1, 1);
    AdamState state;
    for (int i = 0; i < 20; ++i) {
      const Eigen::VectorXd g = p.array().sin();
      adam_step(std::vector<TensorView>{{"p", p.data(), 4, 1}}, std::vector<ConstTensorView>{{"p", g.data(), 4, 1}},
                state, {});
    }
    return p;
  };
  EXPECT_EQ(run(), run());

  Eigen::VectorXd p = Eigen::VectorXd::Ones(2);
  const Eigen::VectorXd before = p;
  Eigen::VectorXd g(2);
  g << 1.0, std::numeric_limits<double>::quiet_NaN();
  AdamState state;
  try {
    adam_step(std::vector<TensorView>{{"layer0.weight", p.data(), 2, 1}},
              std::vector<ConstTensorView>{{"layer0.weight", g.data(), 2, 1}}, state, {});
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("layer0.weight"), std::string::npos);
  }
  EXPECT_EQ(p, before);
}

TEST(Metrics, SpecExamples) {
  EXPECT_EQ(compute_auc(std::vector<double>{0.9, 0.8}, std::vector<double>{0.1}), 1.0);
  EXPECT_EQ(compute_auc(std::vector<double>{0.5}, std::vector<double>{0.5}), 0.5);
  EXPECT_EQ(compute_auc(std::vector<double>{0.9, 0.2}, std::vector<double>{0.5}), 0.5);
  EXPECT_EQ(compute_aupr(std::vector<double>{0.9, 0.8}, std::vector<double>{0.1}), 1.0);
  EXPECT_EQ(compute_aupr(std::vector<double>{0.4}, std::vector<double>{0.6}), 0.5);
  EXPECT_THROW(compute_auc(std::vector<double>{}, std::vector<double>{0.1}), ContractViolation);
  EXPECT_THROW(compute_aupr(std::vector<double>{0.1}, std::vector<double>{}), ContractViolation);
}

TEST(Metrics, MatchBruteForceWithTies) {
  Rng rng(44);
  for (int trial = 0; trial < 200; ++trial) {
    const auto np = 1 + rng.below(50);
    const auto nn = 1 + rng.below(50);
    // Coarse grid forces ties.
    std::vector<double> pos(np);
    std::vector<double> neg(nn);
    for (double& v : pos) v = static_cast<double>(rng.below(8)) / 4.0;
    for (double& v : neg) v = static_cast<double>(rng.below(8)) / 4.0 - 0.25;
    EXPECT_NEAR(compute_auc(pos, neg), oracle::brute_auc(pos, neg), 1e-12);
    EXPECT_NEAR(compute_aupr(pos, neg), oracle::brute_aupr(pos, neg), 1e-12);
  }
}

TEST(Metrics, RandomScoresGiveBaselineAupr) {
  Rng rng(3);
  std::vector<double> pos(5000);
  std::vector<double> neg(5000);
  for (double& v : pos) v = rng.uniform();
  for (double& v : neg) v = rng.uniform();
  EXPECT_NEAR(compute_aupr(pos, neg), 0.5, 0.05);
  EXPECT_NEAR(compute_auc(pos, neg), 0.5, 0.05);
}

TEST(Train, FrozenRunStopsAtEpochTwo) {
  TrainConfig cfg = quick_config(50);
  cfg.learning_rate = 0.0;
  cfg.patience = 1;
  const Metrics m = train(fixture().graph, fixture().split, cfg).metrics;
  EXPECT_EQ(m.epochs_run, 2);
  EXPECT_EQ(m.best_epoch, 1);
  EXPECT_EQ(m.val_aucs[0], m.val_aucs[1]);
}

TEST(Train, DeterministicMetricsJson) {
  const TrainConfig cfg = quick_config();
  const std::string a = metrics_to_json(train(fixture().graph, fixture().split, cfg).metrics, cfg);
  const std::string b = metrics_to_json(train(fixture().graph, fixture().split, cfg).metrics, cfg);
  EXPECT_EQ(a, b);
  TrainConfig other = cfg;
  other.seed = 1;
  EXPECT_NE(a, metrics_to_json(train(fixture().graph, fixture().split, other).metrics, other));
}

TEST(Train, BestEpochIsFirstMaximumOfValidationAuc) {
  TrainConfig cfg = quick_config(60);
  cfg.patience = 10;
  const Metrics m = train(fixture().graph, fixture().split, cfg).metrics;
  ASSERT_EQ(static_cast<int>(m.val_aucs.size()), m.epochs_run);
  const auto best = std::max_element(m.val_aucs.begin(), m.val_aucs.end());
  EXPECT_EQ(m.best_epoch, static_cast<int>(best - m.val_aucs.begin()) + 1);
  EXPECT_EQ(m.val_auc, *best);
  if (m.epochs_run < cfg.max_epochs) EXPECT_EQ(m.epochs_run - m.best_epoch, cfg.patience);
  EXPECT_GE(m.auc, 0.0);
  EXPECT_LE(m.aupr, 1.0);
}

TEST(Train, CheckpointRoundTripReproducesMetrics) {
  const TrainConfig cfg = quick_config();
  const TrainResult r = train(fixture().graph, fixture().split, cfg);
  const auto path = std::filesystem::temp_directory_path() / "hybowave_test_checkpoint.json";
  save_checkpoint(r.checkpoint, path);
  const Checkpoint back = load_checkpoint(path);
  std::filesystem::remove(path);
  const EvalMetrics test = evaluate_checkpoint(back, fixture().split.test_pos, fixture().split.test_neg);
  EXPECT_EQ(test.auc, r.metrics.auc);
  EXPECT_EQ(test.aupr, r.metrics.aupr);
  EXPECT_EQ(checkpoint_to_json(back), checkpoint_to_json(r.checkpoint));
  EXPECT_EQ(back.best_epoch, r.metrics.best_epoch);
  EXPECT_THROW(checkpoint_from_json("{\"format_version\": \"other/9\"}"), InputError);
}

TEST(Train, DivergenceIsReported) {
  TrainConfig cfg = quick_config(5);
  cfg.learning_rate = 1e300;
  EXPECT_THROW(train(fixture().graph, fixture().split, cfg), NumericalError);
}

TEST(GradientCheck, PassesOnAllVariantsAndCatchesCorruption) {
  TrainConfig cfg;
  cfg.model.lambda = 0.0;
  cfg.model.use_contrastive = false;
  cfg.model.use_wavelet = false;
  EXPECT_TRUE(verify_gradients(cfg).passed);
  cfg.model.use_wavelet = true;
  EXPECT_TRUE(verify_gradients(cfg).passed);
  cfg.model.use_contrastive = true;
  cfg.model.lambda = 1.0;
  const GradientReport full = verify_gradients(cfg);
  EXPECT_TRUE(full.passed);
  EXPECT_GT(full.kink_clearance, 0.0);
  EXPECT_GE(full.attempts, 1);
  for (const auto& t : full.tensors) EXPECT_LE(t.max_rel_error, 1e-4) << t.name;

  GradCheckOptions corrupt;
  corrupt.corrupt_factor = 1.1;
  EXPECT_FALSE(verify_gradients(cfg, 6, corrupt).passed);
  EXPECT_THROW(verify_gradients(cfg, 11), ContractViolation);
}

TEST(Ablation, SixRowsAndFullRowMatchesTrain) {
  const TrainConfig cfg = quick_config(10);
  const auto rows = ablate(fixture().graph, fixture().split, cfg, 1);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0].encoder, EncoderKind::LorentzGnn);
  EXPECT_TRUE(rows[0].wavelet_contrastive);
  EXPECT_EQ(rows[5].encoder, EncoderKind::LorentzShallow);
  EXPECT_FALSE(rows[5].wavelet_contrastive);
  const Metrics m = train(fixture().graph, fixture().split, cfg).metrics;
  EXPECT_EQ(rows[0].auc, m.auc);
  EXPECT_EQ(rows[0].aupr, m.aupr);
  EXPECT_EQ(rows[0].auc_std, 0.0);
}

TEST(ScaleSweep, DefaultSweepContainsReference) {
  const auto sweep = default_scale_sweep();
  EXPECT_NE(std::find(sweep.begin(), sweep.end(), ScaleSet()), sweep.end());
  for (const auto& s : sweep) {
    EXPECT_GE(s.size(), 2);
    EXPECT_LE(s.size(), 4);
    EXPECT_LE(s.max_scale(), 7);
  }
  const auto rows = scale_sweep(fixture().graph, fixture().split, quick_config(5), {ScaleSet({1, 2})}, 2);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_GE(rows[0].auc_std, 0.0);
}

TEST(Config, JsonRoundTripAndOverrides) {
  TrainConfig cfg;
  cfg.seed = 9;
  cfg.model.scales = ScaleSet({1, 3});
  cfg.model.encoder.kind = EncoderKind::EuclideanGnn;
  const TrainConfig back = config_from_json(nlohmann::json::parse(config_to_json(cfg).dump()));
  EXPECT_EQ(config_to_json(back).dump(), config_to_json(cfg).dump());

  const auto defaults = config_to_json(TrainConfig{});
  EXPECT_EQ(defaults["learning_rate"], 1e-3);
  EXPECT_EQ(defaults["temperature"], 0.2);
  EXPECT_EQ(defaults["dropout"], 0.2);
  EXPECT_EQ(defaults["scales"], nlohmann::ordered_json::parse("[1,2,3,4]"));
  EXPECT_EQ(defaults["patience"], 100);
  EXPECT_EQ(defaults["max_epochs"], 2000);

  EXPECT_THROW(config_from_json(nlohmann::json::parse("{\"learning_rte\": 1}")), InputError);
  EXPECT_THROW(config_from_json(nlohmann::json::parse("{\"patience\": \"x\"}")), InputError);
  EXPECT_THROW(config_from_json(nlohmann::json::parse("{\"patience\": 0}")), InputError);

  TrainConfig o;
  apply_override(o, "use_wavelet=false");
  apply_override(o, "scales=2,4");
  apply_override(o, "activation=tanh");
  apply_override(o, "learning_rate=0.01");
  EXPECT_FALSE(o.model.use_wavelet);
  EXPECT_EQ(o.model.scales, ScaleSet({2, 4}));
  EXPECT_EQ(o.model.encoder.activation, Activation::Tanh);
  EXPECT_EQ(o.learning_rate, 0.01);
  EXPECT_THROW(apply_override(o, "novalue"), InputError);
  EXPECT_THROW(apply_override(o, "scales=0,1"), InputError);
}

TEST(Synthetic, BenchmarkShape) {
  const Graph g = hierarchical_benchmark(0);
  EXPECT_EQ(g.num_nodes(), 93);
  EXPECT_EQ(g.num_edges(), 220u);
  EXPECT_EQ(checkpoint_to_json(Checkpoint{}).empty(), false);
  const Graph again = hierarchical_benchmark(0);
  EXPECT_EQ(again.edges(), g.edges());
  EXPECT_NE(hierarchical_benchmark(1).edges(), g.edges());
}
