#ifndef HYBOWAVE_TRAINER_HPP
#define HYBOWAVE_TRAINER_HPP

#include "hybowave/checkpoint.hpp"
#include "hybowave/config.hpp"
#include "hybowave/graph.hpp"
#include "hybowave/model.hpp"

#include <functional>
#include <string>
#include <vector>

namespace hwn {

struct Metrics {
  double auc = 0.0;   // test
  double aupr = 0.0;  // test
  double val_auc = 0.0;
  double val_aupr = 0.0;
  int best_epoch = 0;  // 1-based
  int epochs_run = 0;
  std::vector<double> losses;
  std::vector<double> bce_losses;
  std::vector<double> contrastive_losses;
  std::vector<double> val_aucs;
};

struct TrainResult {
  Checkpoint checkpoint;
  Metrics metrics;
};

struct EpochLog {
  int epoch = 0;
  LossBreakdown loss;
  double val_auc = 0.0;
  bool improved = false;
};

using EpochCallback = std::function<void(const EpochLog&)>;

/// Scores pairs with -sqdist on dropout-free embeddings and reports AUC/AUPR.
EvalMetrics evaluate_pairs(const Model& model, const ModelParams& params, const EdgeList& positives,
                           const EdgeList& negatives);
EvalMetrics evaluate_checkpoint(const Checkpoint& checkpoint, const EdgeList& positives, const EdgeList& negatives);

/// Full-batch training on the training subgraph. Each epoch draws fresh negatives
/// (as many as training positives) and two dropout views, takes one Adam step and
/// scores the validation pairs. The parameters with the best validation AUC are
/// kept; training stops after `patience` epochs without strict improvement.
/// Throws NumericalError on a non-finite loss.
TrainResult train(const Graph& g, const EdgeSplit& split, const TrainConfig& config, const EpochCallback& on_epoch = {});

/// JSON {auc, aupr, val_auc, val_aupr, best_epoch, epochs_run, losses, ...,
/// provenance: config}.
std::string metrics_to_json(const Metrics& metrics, const TrainConfig& config);

struct TensorCheck {
  std::string name;
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  Eigen::Index entries = 0;
};

struct GradientReport {
  std::vector<TensorCheck> tensors;
  double tolerance = 1e-4;
  bool passed = false;
  /// Smallest |ReLU input| on the accepted probe (infinity for smooth activations).
  double kink_clearance = 0.0;
  int attempts = 0;
};

struct GradCheckOptions {
  double step = 1e-5;
  double tolerance = 1e-4;
  /// Multiplies analytic gradients before comparison; used to check the harness.
  double corrupt_factor = 1.0;
  std::uint64_t seed = 7;
};

/// Compares the analytic gradient of the total loss with central differences for
/// every parameter tensor on a small probe graph (probe_size <= 10 nodes, input
/// and hidden dimension capped at 4). Relative error per tensor is
/// max|analytic - numeric| / max(max|analytic|, max|numeric|, 1e-6).
/// Probes whose ReLU inputs come within 100 steps of zero are redrawn.
GradientReport verify_gradients(const TrainConfig& config, int probe_size = 6, const GradCheckOptions& options = {});

struct AblationRow {
  EncoderKind encoder = EncoderKind::LorentzGnn;
  bool wavelet_contrastive = true;
  double auc = 0.0;
  double aupr = 0.0;
  double auc_std = 0.0;
  double aupr_std = 0.0;
};

/// {lorentz_gnn, euclidean_gnn, lorentz_shallow} x {wavelet+contrastive on, off}.
/// Each cell averages `repeats` runs with seeds base_seed, base_seed+1, ...
std::vector<AblationRow> ablate(const Graph& g, const EdgeSplit& split, const TrainConfig& base, int repeats = 1);

struct SweepRow {
  ScaleSet scales;
  double auc = 0.0;
  double aupr = 0.0;
  double auc_std = 0.0;
  double aupr_std = 0.0;
};

/// Scale lists with K in {2, 3, 4} and values <= 7, including (1,2,3,4).
std::vector<ScaleSet> default_scale_sweep();

std::vector<SweepRow> scale_sweep(const Graph& g, const EdgeSplit& split, const TrainConfig& base,
                                  const std::vector<ScaleSet>& sweep, int repeats = 1);

}  // namespace hwn

#endif  // HYBOWAVE_TRAINER_HPP
