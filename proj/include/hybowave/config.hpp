#ifndef HYBOWAVE_CONFIG_HPP
#define HYBOWAVE_CONFIG_HPP

#include "hybowave/model.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>

namespace hwn {

struct TrainConfig {
  double learning_rate = 1e-3;
  int max_epochs = 2000;
  int patience = 100;
  std::uint64_t seed = 0;
  ModelConfig model;

  void validate() const;
  /// Model configuration with the run seed applied to parameter initialization.
  ModelConfig model_config() const;
};

/// Flat JSON view of a TrainConfig. Keys: learning_rate, max_epochs, patience,
/// seed, scales, temperature, dropout, curvature, input_dim, hidden_dim,
/// num_layers, activation, lambda, use_wavelet, use_contrastive, encoder_kind,
/// decoder_r, decoder_t.
nlohmann::ordered_json config_to_json(const TrainConfig& config);

/// Starts from `base` and applies every key of `j`. Unknown keys and wrong value
/// types throw InputError.
TrainConfig config_from_json(const nlohmann::json& j, const TrainConfig& base = {});

/// `key=value` override; the value is parsed as JSON when possible (numbers,
/// booleans, arrays), otherwise taken as a string. Scales also accept "1,2,3".
void apply_override(TrainConfig& config, const std::string& assignment);

}  // namespace hwn

#endif  // HYBOWAVE_CONFIG_HPP
