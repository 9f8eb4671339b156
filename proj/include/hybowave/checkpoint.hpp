#ifndef HYBOWAVE_CHECKPOINT_HPP
#define HYBOWAVE_CHECKPOINT_HPP

#include "hybowave/config.hpp"
#include "hybowave/graph.hpp"
#include "hybowave/model.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace hwn {

inline constexpr const char* kCheckpointFormat = "hybowave-checkpoint/1";

struct EvalMetrics {
  double auc = 0.0;
  double aupr = 0.0;
};

/// Everything needed to rebuild the trained model: configuration, parameters, the
/// message-passing graph (node labels + training edges) and best validation scores.
struct Checkpoint {
  TrainConfig config;
  ModelParams params;
  std::vector<std::string> labels;
  EdgeList train_edges;
  EvalMetrics validation;
  int best_epoch = 0;
  std::string rng;  // description of the generator and streams used

  Graph graph() const;
};

/// JSON: {format_version, config, graph: {labels, train_edges}, tensors: {name:
/// {shape, values}}, metrics, rng}. Values are written with shortest round-trip
/// decimal representation, so load(save(x)) restores every double exactly.
std::string checkpoint_to_json(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_json(const std::string& text);

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace hwn

#endif  // HYBOWAVE_CHECKPOINT_HPP
