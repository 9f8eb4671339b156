#include "hybowave/checkpoint.hpp"

#include "hybowave/errors.hpp"

#include <fstream>
#include <sstream>

namespace hwn {

Graph Checkpoint::graph() const {
  return Graph(static_cast<NodeId>(labels.size()), train_edges, NodeIndex(labels));
}

std::string checkpoint_to_json(const Checkpoint& ck) {
  nlohmann::ordered_json j;
  j["format_version"] = kCheckpointFormat;
  j["config"] = config_to_json(ck.config);
  j["graph"]["labels"] = ck.labels;
  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (const Edge& e : ck.train_edges) edges.push_back({e.u, e.v});
  j["graph"]["train_edges"] = std::move(edges);

  nlohmann::ordered_json tensors = nlohmann::ordered_json::object();
  for (const auto& t : ck.params.tensors()) {
    const auto m = t.cmap();
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) values.push_back(m(r, c));
    }
    tensors[t.name] = {{"shape", {t.rows, t.cols}}, {"values", std::move(values)}};
  }
  j["tensors"] = std::move(tensors);
  j["metrics"] = {{"val_auc", ck.validation.auc}, {"val_aupr", ck.validation.aupr}, {"best_epoch", ck.best_epoch}};
  j["rng"] = ck.rng;
  return j.dump(1) + "\n";
}

Checkpoint checkpoint_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw InputError("checkpoint is not valid JSON");
  try {
    if (j.at("format_version").get<std::string>() != kCheckpointFormat) {
      throw InputError("unsupported checkpoint format '" + j.at("format_version").get<std::string>() + "'");
    }
    Checkpoint ck;
    ck.config = config_from_json(j.at("config"));
    ck.labels = j.at("graph").at("labels").get<std::vector<std::string>>();
    const auto n = static_cast<NodeId>(ck.labels.size());
    for (const auto& p : j.at("graph").at("train_edges")) {
      const auto u = p.at(0).get<NodeId>();
      const auto v = p.at(1).get<NodeId>();
      if (u < 0 || v < 0 || u >= n || v >= n || u == v) throw InputError("checkpoint: invalid training edge");
      ck.train_edges.push_back(Edge::canonical(u, v));
    }

    ck.params = init_model_params(n, ck.config.model_config());
    const auto& tensors = j.at("tensors");
    auto views = ck.params.tensors();
    if (tensors.size() != views.size()) throw InputError("checkpoint: tensor set does not match config");
    for (auto& t : views) {
      const auto& entry = tensors.at(t.name);
      const auto shape = entry.at("shape").get<std::vector<Eigen::Index>>();
      if (shape.size() != 2 || shape[0] != t.rows || shape[1] != t.cols) {
        throw InputError("checkpoint: shape mismatch for tensor '" + t.name + "'");
      }
      const auto values = entry.at("values").get<std::vector<double>>();
      if (static_cast<Eigen::Index>(values.size()) != t.size()) {
        throw InputError("checkpoint: value count mismatch for tensor '" + t.name + "'");
      }
      auto m = t.map();
      std::size_t k = 0;
      for (Eigen::Index r = 0; r < t.rows; ++r) {
        for (Eigen::Index c = 0; c < t.cols; ++c) m(r, c) = values[k++];
      }
    }
    const auto& metrics = j.at("metrics");
    ck.validation = {metrics.at("val_auc").get<double>(), metrics.at("val_aupr").get<double>()};
    ck.best_epoch = metrics.at("best_epoch").get<int>();
    ck.rng = j.value("rng", "");
    return ck;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("checkpoint: ") + e.what());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  write_text_file(path, checkpoint_to_json(checkpoint));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return checkpoint_from_json(read_text_file(path)); }

}  // namespace hwn
