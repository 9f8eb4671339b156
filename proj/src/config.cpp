#include "hybowave/config.hpp"

#include "hybowave/errors.hpp"

#include <string>

namespace hwn {

void TrainConfig::validate() const {
  // lr = 0 is accepted for frozen evaluation runs.
  if (!(learning_rate >= 0.0)) throw ContractViolation("learning_rate must be nonnegative");
  if (max_epochs < 1) throw ContractViolation("max_epochs must be >= 1");
  if (patience < 1) throw ContractViolation("patience must be >= 1");
  model.validate();
}

ModelConfig TrainConfig::model_config() const {
  ModelConfig m = model;
  m.encoder.seed = seed;
  return m;
}

nlohmann::ordered_json config_to_json(const TrainConfig& c) {
  nlohmann::ordered_json j;
  j["learning_rate"] = c.learning_rate;
  j["max_epochs"] = c.max_epochs;
  j["patience"] = c.patience;
  j["seed"] = c.seed;
  j["scales"] = c.model.scales.values();
  j["temperature"] = c.model.temperature;
  j["dropout"] = c.model.encoder.dropout;
  j["curvature"] = c.model.encoder.curvature;
  j["input_dim"] = c.model.encoder.input_dim;
  j["hidden_dim"] = c.model.encoder.hidden_dim;
  j["num_layers"] = c.model.encoder.num_layers;
  j["activation"] = to_string(c.model.encoder.activation);
  j["lambda"] = c.model.lambda;
  j["use_wavelet"] = c.model.use_wavelet;
  j["use_contrastive"] = c.model.use_contrastive;
  j["encoder_kind"] = to_string(c.model.encoder.kind);
  j["decoder_r"] = c.model.decoder_r;
  j["decoder_t"] = c.model.decoder_t;
  return j;
}

namespace {

void apply_key(TrainConfig& c, const std::string& key, const nlohmann::json& v) {
  if (key == "learning_rate") c.learning_rate = v.get<double>();
  else if (key == "max_epochs") c.max_epochs = v.get<int>();
  else if (key == "patience") c.patience = v.get<int>();
  else if (key == "seed") c.seed = v.get<std::uint64_t>();
  else if (key == "scales") {
    if (v.is_string()) c.model.scales = ScaleSet::parse(v.get<std::string>());
    else c.model.scales = ScaleSet(v.get<std::vector<int>>());
  }
  else if (key == "temperature") c.model.temperature = v.get<double>();
  else if (key == "dropout") c.model.encoder.dropout = v.get<double>();
  else if (key == "curvature") c.model.encoder.curvature = v.get<double>();
  else if (key == "input_dim") c.model.encoder.input_dim = v.get<int>();
  else if (key == "hidden_dim") c.model.encoder.hidden_dim = v.get<int>();
  else if (key == "num_layers") c.model.encoder.num_layers = v.get<int>();
  else if (key == "activation") c.model.encoder.activation = parse_activation(v.get<std::string>());
  else if (key == "lambda") c.model.lambda = v.get<double>();
  else if (key == "use_wavelet") c.model.use_wavelet = v.get<bool>();
  else if (key == "use_contrastive") c.model.use_contrastive = v.get<bool>();
  else if (key == "encoder_kind") c.model.encoder.kind = parse_encoder_kind(v.get<std::string>());
  else if (key == "decoder_r") c.model.decoder_r = v.get<double>();
  else if (key == "decoder_t") c.model.decoder_t = v.get<double>();
  else throw InputError("unknown config key '" + key + "'");
}

}  // namespace

TrainConfig config_from_json(const nlohmann::json& j, const TrainConfig& base) {
  if (!j.is_object()) throw InputError("config must be a JSON object");
  TrainConfig c = base;
  for (const auto& [key, value] : j.items()) {
    try {
      apply_key(c, key, value);
    } catch (const nlohmann::json::exception& e) {
      throw InputError("config key '" + key + "': " + e.what());
    } catch (const std::invalid_argument& e) {
      throw InputError("config key '" + key + "': " + e.what());
    }
  }
  try {
    c.validate();
  } catch (const ContractViolation& e) {
    throw InputError(std::string("invalid config: ") + e.what());
  }
  return c;
}

void apply_override(TrainConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw InputError("override must look like key=value: '" + assignment + "'");
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  nlohmann::json value = nlohmann::json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  nlohmann::json obj;
  obj[key] = value;
  config = config_from_json(obj, config);
}

}  // namespace hwn
