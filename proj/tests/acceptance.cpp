// Acceptance gate: one PASS/FAIL line per criterion 2-8. Exit status is nonzero
// when any criterion fails.
#include "hybowave/checkpoint.hpp"
#include "hybowave/graph.hpp"
#include "hybowave/manifold.hpp"
#include "hybowave/metrics.hpp"
#include "hybowave/objective.hpp"
#include "hybowave/synthetic.hpp"
#include "hybowave/trainer.hpp"
#include "hybowave/wavelet.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

using namespace hwn;

namespace {

// Tolerances and budgets.
constexpr double kRoundTripTol = 1e-8;
constexpr double kConstraintTol = 1e-9;
constexpr double kManifoldSeconds = 1.0;
constexpr double kDiffusionTol = 1e-10;
constexpr double kRowSumTol = 1e-12;
constexpr double kDiffusionSeconds = 5.0;
constexpr double kInfoNceTol = 1e-10;
constexpr double kGradientTol = 1e-4;
constexpr double kGradientStep = 1e-5;
constexpr double kGradientSeconds = 30.0;
constexpr double kBenchmarkThreshold = 0.80;
constexpr double kRunSeconds = 60.0;
constexpr int kSeeds = 5;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::printf("criterion %d %-22s %s  %s\n", id, name, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

void criterion2() {
  const auto start = Clock::now();
  Rng rng(2002);
  double worst_round_trip = 0.0;
  double worst_constraint = 0.0;
  const double curvatures[] = {0.5, 1.0, 2.0};
  for (int i = 0; i < 1000; ++i) {
    const int dim = 2 + static_cast<int>(rng.below(15));
    const Curvature c(curvatures[rng.below(3)]);
    Eigen::RowVectorXd u(dim);
    for (int k = 0; k < dim; ++k) u(k) = rng.normal();
    u *= rng.uniform(0.0, 5.0) / u.norm();
    const Eigen::MatrixXd x = lorentz::exp_origin_spatial(u, c);
    const LorentzPoints pts(x, c, LorentzPoints::Trusted{});
    worst_constraint = std::max(worst_constraint, pts.max_constraint_residual());
    const Eigen::MatrixXd back = lorentz::log_origin_spatial(x, c);
    worst_round_trip = std::max(worst_round_trip, (back - u).cwiseAbs().maxCoeff());
  }
  const double elapsed = seconds_since(start);
  report(2, "manifold-suite",
         worst_round_trip <= kRoundTripTol && worst_constraint <= kConstraintTol && elapsed < kManifoldSeconds,
         "round_trip=" + fmt("%.3g", worst_round_trip) + " constraint=" + fmt("%.3g", worst_constraint) +
             " time=" + fmt("%.3fs", elapsed));
}

void criterion3() {
  const auto start = Clock::now();
  Rng rng(3003);
  double worst = 0.0;
  double worst_row = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(50));
    const EdgeList edges = oracle::random_edges(rng, n, rng.uniform(0.02, 0.3));
    const RandomWalkMatrix p(Graph(n, edges));
    const Eigen::MatrixXd dense = oracle::dense_walk(n, edges);
    worst_row = std::max(worst_row, (p.dense().rowwise().sum().array() - 1.0).abs().maxCoeff());
    Eigen::MatrixXd x(n, 1 + static_cast<int>(rng.below(6)));
    for (Eigen::Index k = 0; k < x.size(); ++k) x.data()[k] = rng.normal();
    std::vector<int> scales;
    for (int s = 1; s <= 8; ++s) {
      if (rng.bernoulli(0.5)) scales.push_back(s);
    }
    if (scales.empty()) scales.push_back(1 + static_cast<int>(rng.below(8)));
    const Eigen::MatrixXd z = multiscale_transform(p, x, ScaleSet(scales));
    worst = std::max(worst, (z - oracle::dense_multiscale(dense, x, scales)).cwiseAbs().maxCoeff());
  }
  const double elapsed = seconds_since(start);
  report(3, "diffusion-oracle", worst <= kDiffusionTol && worst_row <= kRowSumTol && elapsed < kDiffusionSeconds,
         "max_err=" + fmt("%.3g", worst) + " row_sum_err=" + fmt("%.3g", worst_row) + " time=" + fmt("%.3fs", elapsed));
}

void criterion4() {
  Rng rng(4004);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(8));
    const int d = 1 + static_cast<int>(rng.below(4));
    Eigen::MatrixXd z1(n, d);
    Eigen::MatrixXd z2(n, d);
    for (Eigen::Index k = 0; k < z1.size(); ++k) {
      z1.data()[k] = rng.normal();
      z2.data()[k] = rng.normal();
    }
    const double tau = rng.uniform(0.05, 2.0);
    worst = std::max(worst, std::abs(info_nce_loss(z1, z2, tau) - oracle::naive_info_nce(z1, z2, tau)));
  }
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
  const double analytic = -std::log(std::exp(1.0) / (std::exp(1.0) + 1.0));
  const double analytic_err = std::abs(info_nce_loss(id, id, 1.0) - analytic);

  int metric_mismatches = 0;
  int metric_cases = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const auto total = 2 + rng.below(99);
    const auto np = 1 + rng.below(total - 1);
    std::vector<double> pos(np);
    std::vector<double> neg(total - np);
    const double grid = static_cast<double>(1 + rng.below(20));  // coarse grids force ties
    for (double& v : pos) v = std::floor(rng.uniform() * grid) / grid;
    for (double& v : neg) v = std::floor(rng.uniform() * grid) / grid;
    ++metric_cases;
    if (compute_auc(pos, neg) != oracle::brute_auc(pos, neg)) ++metric_mismatches;
    if (compute_aupr(pos, neg) != oracle::brute_aupr(pos, neg)) ++metric_mismatches;
  }
  report(4, "loss-oracles", worst <= kInfoNceTol && analytic_err <= kInfoNceTol && metric_mismatches == 0,
         "info_nce_err=" + fmt("%.3g", worst) + " n2_identity_err=" + fmt("%.3g", analytic_err) +
             " metric_cases=" + std::to_string(metric_cases) + " mismatches=" + std::to_string(metric_mismatches));
}

void criterion5() {
  const auto start = Clock::now();
  GradCheckOptions options;
  options.step = kGradientStep;
  options.tolerance = kGradientTol;
  bool pass = true;
  double worst = 0.0;
  for (bool wavelet : {true, false}) {
    for (bool contrastive : {true, false}) {
      TrainConfig cfg;
      cfg.model.use_wavelet = wavelet;
      cfg.model.use_contrastive = contrastive;
      const GradientReport r = verify_gradients(cfg, 6, options);
      pass = pass && r.passed;
      for (const auto& t : r.tensors) worst = std::max(worst, t.max_rel_error);
    }
  }
  const double elapsed = seconds_since(start);
  report(5, "gradient-gate", pass && elapsed < kGradientSeconds,
         "configs=4 max_rel_error=" + fmt("%.3g", worst) + " time=" + fmt("%.2fs", elapsed));
}

struct SeedRun {
  Metrics metrics;
  double seconds = 0.0;
};

SeedRun run_seed(std::uint64_t seed, const std::function<void(TrainConfig&)>& variant) {
  const Graph g = hierarchical_benchmark(seed);
  const EdgeSplit split = split_edges(g, {}, seed);
  TrainConfig cfg;
  cfg.seed = seed;
  variant(cfg);
  const auto start = Clock::now();
  SeedRun r{train(g, split, cfg).metrics, 0.0};
  r.seconds = seconds_since(start);
  return r;
}

struct VariantSummary {
  double auc = 0.0;
  double aupr = 0.0;
  double slowest = 0.0;
};

VariantSummary run_variant(const std::function<void(TrainConfig&)>& variant) {
  VariantSummary s;
  for (int seed = 0; seed < kSeeds; ++seed) {
    const SeedRun r = run_seed(static_cast<std::uint64_t>(seed), variant);
    s.auc += r.metrics.auc / kSeeds;
    s.aupr += r.metrics.aupr / kSeeds;
    s.slowest = std::max(s.slowest, r.seconds);
  }
  return s;
}

void criteria6and7() {
  const VariantSummary full = run_variant([](TrainConfig&) {});
  report(6, "synthetic-benchmark",
         full.auc >= kBenchmarkThreshold && full.aupr >= kBenchmarkThreshold && full.slowest <= kRunSeconds,
         "auc=" + fmt("%.4f", full.auc) + " aupr=" + fmt("%.4f", full.aupr) + " threshold=" +
             fmt("%.2f", kBenchmarkThreshold) + " slowest_run=" + fmt("%.2fs", full.slowest));

  const VariantSummary plain = run_variant([](TrainConfig& c) {
    c.model.use_wavelet = false;
    c.model.use_contrastive = false;
  });
  const VariantSummary euclid = run_variant([](TrainConfig& c) { c.model.encoder.kind = EncoderKind::EuclideanGnn; });
  report(7, "ablation-direction", full.auc >= plain.auc && full.auc >= euclid.auc,
         "full=" + fmt("%.4f", full.auc) + " no_wavelet_no_contrastive=" + fmt("%.4f", plain.auc) +
             " euclidean_gnn=" + fmt("%.4f", euclid.auc));
}

void criterion8() {
  const Graph g = hierarchical_benchmark(8);
  const EdgeSplit split = split_edges(g, {}, 8);
  TrainConfig cfg;
  cfg.seed = 8;
  const TrainResult a = train(g, split, cfg);
  const TrainResult b = train(g, split, cfg);
  const bool same_json = metrics_to_json(a.metrics, cfg) == metrics_to_json(b.metrics, cfg);

  const auto path = std::filesystem::temp_directory_path() / "hybowave_acceptance_checkpoint.json";
  save_checkpoint(a.checkpoint, path);
  const Checkpoint loaded = load_checkpoint(path);
  std::filesystem::remove(path);
  const EvalMetrics again = evaluate_checkpoint(loaded, split.test_pos, split.test_neg);
  const bool same_eval = again.auc == a.metrics.auc && again.aupr == a.metrics.aupr;
  report(8, "determinism", same_json && same_eval,
         std::string("metrics_json_identical=") + (same_json ? "yes" : "no") +
             " checkpoint_metrics_identical=" + (same_eval ? "yes" : "no"));
}

}  // namespace

int main() {
  const auto start = Clock::now();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criteria6and7();
  criterion8();
  std::printf("acceptance: %d failing criteria, total %.1fs\n", failures, seconds_since(start));
  return failures == 0 ? 0 : 1;
}
