#include "hybowave/trainer.hpp"

#include "hybowave/errors.hpp"
#include "hybowave/metrics.hpp"
#include "hybowave/optim.hpp"
#include "hybowave/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

namespace hwn {

namespace {

constexpr std::uint64_t kMaskStream = 0xD50F;
constexpr std::uint64_t kProbeStream = 0x9B0B;
constexpr int kMaxProbeAttempts = 32;
constexpr const char* kRngDescription =
    "std::mt19937_64 streams seeded by splitmix64(splitmix64(seed) ^ stream_id); "
    "negatives: stream (epoch << 12) ^ 0x7e9; dropout masks: stream 0xd50f + epoch";

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

EvalMetrics evaluate_pairs(const Model& model, const ModelParams& params, const EdgeList& positives,
                           const EdgeList& negatives) {
  const Eigen::MatrixXd emb = model.embed(params);
  const auto pos = to_vector(model.scores(emb, positives));
  const auto neg = to_vector(model.scores(emb, negatives));
  return {compute_auc(pos, neg), compute_aupr(pos, neg)};
}

EvalMetrics evaluate_checkpoint(const Checkpoint& checkpoint, const EdgeList& positives, const EdgeList& negatives) {
  const Model model(checkpoint.graph(), checkpoint.config.model_config());
  return evaluate_pairs(model, checkpoint.params, positives, negatives);
}

TrainResult train(const Graph& g, const EdgeSplit& split, const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  if (split.num_nodes != g.num_nodes()) throw ContractViolation("split does not belong to this graph");
  if (split.train_pos.empty() || split.val_pos.empty() || split.val_neg.empty() || split.test_pos.empty() ||
      split.test_neg.empty()) {
    throw ContractViolation("split partitions must be nonempty");
  }

  const Graph train_graph = subgraph_with_edges(g, split.train_pos);
  const ModelConfig model_config = config.model_config();
  const Model model(train_graph, model_config);
  ModelParams params = init_model_params(g.num_nodes(), model_config);
  ModelParams grad = params.zeros_like();
  AdamState adam;
  const AdamConfig adam_config{config.learning_rate};

  TrainResult result;
  Metrics& metrics = result.metrics;
  ModelParams best = params;
  double best_val = -1.0;
  int since_improvement = 0;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    EdgeList negatives =
        sample_training_negatives(g, split.train_pos.size(), config.seed, static_cast<std::uint64_t>(epoch));
    Rng mask_rng = Rng::stream(config.seed, kMaskStream + static_cast<std::uint64_t>(epoch));
    const Batch batch = model.make_batch(split.train_pos, std::move(negatives), mask_rng);

    const LossBreakdown loss = model.loss_and_gradient(params, batch, grad);
    if (!std::isfinite(loss.total)) {
      throw NumericalError("training diverged at epoch " + std::to_string(epoch) + " (non-finite loss)");
    }
    try {
      adam_step(params, grad, adam, adam_config);
    } catch (const NumericalError& e) {
      throw NumericalError("epoch " + std::to_string(epoch) + ": " + e.what());
    }

    const EvalMetrics val = evaluate_pairs(model, params, split.val_pos, split.val_neg);
    metrics.losses.push_back(loss.total);
    metrics.bce_losses.push_back(loss.bce);
    metrics.contrastive_losses.push_back(loss.contrastive);
    metrics.val_aucs.push_back(val.auc);
    metrics.epochs_run = epoch;

    const bool improved = val.auc > best_val;
    if (improved) {
      best_val = val.auc;
      best = params;
      metrics.best_epoch = epoch;
      metrics.val_auc = val.auc;
      metrics.val_aupr = val.aupr;
      since_improvement = 0;
    } else {
      ++since_improvement;
    }
    if (on_epoch) on_epoch({epoch, loss, val.auc, improved});
    if (since_improvement >= config.patience) break;
  }

  const EvalMetrics test = evaluate_pairs(model, best, split.test_pos, split.test_neg);
  metrics.auc = test.auc;
  metrics.aupr = test.aupr;

  Checkpoint& ck = result.checkpoint;
  ck.config = config;
  ck.params = std::move(best);
  ck.labels = g.index().labels();
  if (ck.labels.empty()) {
    for (NodeId i = 0; i < g.num_nodes(); ++i) ck.labels.push_back(std::to_string(i));
  }
  ck.train_edges = train_graph.edges();
  ck.validation = {metrics.val_auc, metrics.val_aupr};
  ck.best_epoch = metrics.best_epoch;
  ck.rng = kRngDescription;
  return result;
}

std::string metrics_to_json(const Metrics& m, const TrainConfig& config) {
  nlohmann::ordered_json j;
  j["auc"] = m.auc;
  j["aupr"] = m.aupr;
  j["val_auc"] = m.val_auc;
  j["val_aupr"] = m.val_aupr;
  j["best_epoch"] = m.best_epoch;
  j["epochs_run"] = m.epochs_run;
  j["losses"] = m.losses;
  j["bce_losses"] = m.bce_losses;
  j["contrastive_losses"] = m.contrastive_losses;
  j["val_aucs"] = m.val_aucs;
  j["provenance"] = config_to_json(config);
  return j.dump(1) + "\n";
}

GradientReport verify_gradients(const TrainConfig& config, int probe_size, const GradCheckOptions& options) {
  if (probe_size < 3 || probe_size > 10) throw ContractViolation("probe_size must lie in [3, 10]");
  TrainConfig probe = config;
  probe.model.encoder.input_dim = std::min(probe.model.encoder.input_dim, 4);
  probe.model.encoder.hidden_dim = std::min(probe.model.encoder.hidden_dim, 4);
  probe.seed = options.seed;
  const ModelConfig model_config = probe.model_config();

  const auto n = static_cast<NodeId>(probe_size);
  EdgeList edges;
  for (NodeId i = 0; i < n; ++i) edges.push_back(Edge::canonical(i, (i + 1) % n));
  edges.push_back(Edge::canonical(0, n / 2));
  const Graph graph(n, edges);
  const Model model(graph, model_config);

  GradientReport report;
  report.tolerance = options.tolerance;
  report.passed = true;
  Rng rng = Rng::stream(options.seed, kProbeStream);
  ModelParams params;
  Batch batch;
  // Central differences are meaningless across a ReLU kink, so redraw the probe
  // until every pre-activation of both views clears the step by a wide margin.
  const double margin = 100.0 * options.step;
  for (int attempt = 1;; ++attempt) {
    params = init_model_params(n, model_config);
    for (auto& t : params.tensors()) {
      if (t.name == "feature_gate" || t.name.ends_with(".bias") || t.name == "layer_query") {
        auto m = t.map();
        for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] += rng.uniform(-0.3, 0.3);
      }
    }
    const std::size_t num_neg = std::min<std::size_t>(graph.num_edges(), graph.num_non_edges());
    batch = model.make_batch(graph.edges(), sample_non_edges(graph, num_neg, rng), rng);

    double clearance = std::numeric_limits<double>::infinity();
    if (model_config.encoder.activation == Activation::ReLU) {
      for (const Eigen::MatrixXd* mask : {&batch.mask1, &batch.mask2}) {
        if (mask != &batch.mask1 && mask->size() == 0) continue;
        const EncoderTape tape = encode_forward(params.encoder, model.walk(), model_config.encoder, mask);
        for (const auto& layer : tape.layers) clearance = std::min(clearance, layer.pre_activation.cwiseAbs().minCoeff());
      }
    }
    report.kink_clearance = clearance;
    report.attempts = attempt;
    if (clearance > margin || attempt == kMaxProbeAttempts) break;
  }

  ModelParams analytic;
  model.loss_and_gradient(params, batch, analytic);

  auto param_views = params.tensors();
  const auto grad_views = std::as_const(analytic).tensors();
  for (std::size_t i = 0; i < param_views.size(); ++i) {
    auto p = param_views[i].map();
    const auto a = grad_views[i].cmap();
    double max_diff = 0.0;
    double max_a = 0.0;
    double max_n = 0.0;
    for (Eigen::Index k = 0; k < p.size(); ++k) {
      const double saved = p.data()[k];
      p.data()[k] = saved + options.step;
      const double up = model.loss(params, batch).total;
      p.data()[k] = saved - options.step;
      const double down = model.loss(params, batch).total;
      p.data()[k] = saved;
      const double numeric = (up - down) / (2.0 * options.step);
      const double ana = a.data()[k] * options.corrupt_factor;
      max_diff = std::max(max_diff, std::abs(ana - numeric));
      max_a = std::max(max_a, std::abs(ana));
      max_n = std::max(max_n, std::abs(numeric));
    }
    TensorCheck check;
    check.name = param_views[i].name;
    check.entries = p.size();
    check.max_abs_error = max_diff;
    check.max_rel_error = max_diff / std::max({max_a, max_n, 1e-6});
    if (!(check.max_rel_error <= options.tolerance)) report.passed = false;
    report.tensors.push_back(std::move(check));
  }
  return report;
}

std::vector<AblationRow> ablate(const Graph& g, const EdgeSplit& split, const TrainConfig& base, int repeats) {
  if (repeats < 1) throw ContractViolation("repeats must be >= 1");
  std::vector<AblationRow> rows;
  for (EncoderKind kind : {EncoderKind::LorentzGnn, EncoderKind::EuclideanGnn, EncoderKind::LorentzShallow}) {
    for (bool on : {true, false}) {
      TrainConfig cfg = base;
      cfg.model.encoder.kind = kind;
      cfg.model.use_wavelet = on;
      cfg.model.use_contrastive = on;
      std::vector<double> aucs;
      std::vector<double> auprs;
      for (int r = 0; r < repeats; ++r) {
        cfg.seed = base.seed + static_cast<std::uint64_t>(r);
        const Metrics m = train(g, split, cfg).metrics;
        aucs.push_back(m.auc);
        auprs.push_back(m.aupr);
      }
      rows.push_back({kind, on, mean(aucs), mean(auprs), sample_std(aucs), sample_std(auprs)});
    }
  }
  return rows;
}

std::vector<ScaleSet> default_scale_sweep() {
  return {ScaleSet({1, 2}),    ScaleSet({1, 3}),    ScaleSet({2, 5}),       ScaleSet({1, 2, 3}),
          ScaleSet({1, 3, 5}), ScaleSet({2, 4, 7}), ScaleSet({1, 2, 3, 4}), ScaleSet({1, 3, 5, 7}),
          ScaleSet({4, 5, 6, 7})};
}

std::vector<SweepRow> scale_sweep(const Graph& g, const EdgeSplit& split, const TrainConfig& base,
                                  const std::vector<ScaleSet>& sweep, int repeats) {
  if (repeats < 1) throw ContractViolation("repeats must be >= 1");
  std::vector<SweepRow> rows;
  for (const ScaleSet& scales : sweep) {
    TrainConfig cfg = base;
    cfg.model.scales = scales;
    cfg.model.use_wavelet = true;
    std::vector<double> aucs;
    std::vector<double> auprs;
    for (int r = 0; r < repeats; ++r) {
      cfg.seed = base.seed + static_cast<std::uint64_t>(r);
      const Metrics m = train(g, split, cfg).metrics;
      aucs.push_back(m.auc);
      auprs.push_back(m.aupr);
    }
    rows.push_back({scales, mean(aucs), mean(auprs), sample_std(aucs), sample_std(auprs)});
  }
  return rows;
}

}  // namespace hwn
