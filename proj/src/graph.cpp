#include "hybowave/graph.hpp"

#include "hybowave/errors.hpp"
#include "hybowave/random.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <unordered_set>
#include <utility>

namespace hwn {

namespace {

constexpr std::uint64_t kSplitShuffleStream = 0x5101;
constexpr std::uint64_t kSplitNegativeStream = 0x5102;
constexpr std::uint64_t kTrainNegativeTag = 0x7e9;

std::string_view trim_eol(std::string_view line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.remove_suffix(1);
  return line;
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char ch) { return ch == ' ' || ch == '\t'; });
}

}  // namespace

NodeIndex::NodeIndex(std::vector<std::string> labels) : labels_(std::move(labels)) {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (!lookup_.emplace(labels_[i], static_cast<NodeId>(i)).second) {
      throw ContractViolation("duplicate node label '" + labels_[i] + "'");
    }
  }
}

NodeId NodeIndex::intern(const std::string& label) {
  auto [it, inserted] = lookup_.emplace(label, static_cast<NodeId>(labels_.size()));
  if (inserted) labels_.push_back(label);
  return it->second;
}

std::optional<NodeId> NodeIndex::find(const std::string& label) const {
  auto it = lookup_.find(label);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

Graph::Graph(NodeId num_nodes, const EdgeList& edges, NodeIndex index)
    : num_nodes_(num_nodes), index_(std::move(index)) {
  if (num_nodes < 0) throw ContractViolation("negative node count");
  if (index_.size() != 0 && index_.size() != static_cast<std::size_t>(num_nodes)) {
    throw ContractViolation("node index size does not match node count");
  }
  edges_.reserve(edges.size());
  for (const Edge& e : edges) {
    if (e.u == e.v) throw ContractViolation("self-loop on node " + std::to_string(e.u));
    if (e.u < 0 || e.v < 0 || e.u >= num_nodes || e.v >= num_nodes) {
      throw ContractViolation("edge endpoint out of range");
    }
    edges_.push_back(Edge::canonical(e.u, e.v));
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

  std::vector<std::int64_t> degree(static_cast<std::size_t>(num_nodes), 0);
  for (const Edge& e : edges_) {
    ++degree[e.u];
    ++degree[e.v];
  }
  offsets_.assign(static_cast<std::size_t>(num_nodes) + 1, 0);
  for (NodeId i = 0; i < num_nodes; ++i) offsets_[i + 1] = offsets_[i] + degree[i];
  columns_.resize(static_cast<std::size_t>(offsets_.back()));
  std::vector<std::int64_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const Edge& e : edges_) {
    columns_[fill[e.u]++] = e.v;
    columns_[fill[e.v]++] = e.u;
  }
  for (NodeId i = 0; i < num_nodes; ++i) {
    std::sort(columns_.begin() + offsets_[i], columns_.begin() + offsets_[i + 1]);
  }
}

std::span<const NodeId> Graph::neighbors(NodeId v) const {
  return {columns_.data() + offsets_[v], static_cast<std::size_t>(offsets_[v + 1] - offsets_[v])};
}

bool Graph::has_edge(NodeId a, NodeId b) const {
  if (a < 0 || b < 0 || a >= num_nodes_ || b >= num_nodes_ || a == b) return false;
  const auto nb = neighbors(a);
  return std::binary_search(nb.begin(), nb.end(), b);
}

std::uint64_t Graph::num_non_edges() const {
  const auto n = static_cast<std::uint64_t>(num_nodes_);
  return n * (n - (n > 0 ? 1 : 0)) / 2 - edges_.size();
}

LoadedGraph read_edge_list(std::istream& in, const std::string& source_name) {
  NodeIndex index;
  EdgeList raw;
  IngestSummary summary;
  std::string buffer;
  std::size_t line_no = 0;
  while (std::getline(in, buffer)) {
    ++line_no;
    ++summary.lines_read;
    const std::string_view line = trim_eol(buffer);
    if (line.empty() || line.front() == '#' || is_blank(line)) continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos || line.find('\t', tab + 1) != std::string_view::npos) {
      throw ParseError(source_name, line_no, "expected exactly two tab-separated fields");
    }
    const std::string a(line.substr(0, tab));
    const std::string b(line.substr(tab + 1));
    if (a.empty() || b.empty()) throw ParseError(source_name, line_no, "empty node label");
    if (a == b) {
      ++summary.self_loops_skipped;
      continue;
    }
    const NodeId ia = index.intern(a);  // sequenced: ids follow first appearance
    const NodeId ib = index.intern(b);
    raw.push_back(Edge::canonical(ia, ib));
  }
  const auto n = static_cast<NodeId>(index.size());
  Graph g(n, raw, std::move(index));
  summary.duplicates_collapsed = raw.size() - g.num_edges();
  return {std::move(g), summary};
}

LoadedGraph load_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open edge list '" + path.string() + "'");
  return read_edge_list(in, path.string());
}

EdgeList sample_non_edges(const Graph& g, std::size_t count, Rng& rng) {
  const std::uint64_t available = g.num_non_edges();
  if (count > available) {
    throw ContractViolation("requested " + std::to_string(count) + " non-edges but only " +
                            std::to_string(available) + " exist");
  }
  EdgeList out;
  out.reserve(count);
  const auto n = static_cast<std::uint64_t>(g.num_nodes());
  if (count == 0) return out;

  if (2 * static_cast<std::uint64_t>(count) > available) {
    // Dense request: enumerate the complement and take a partial shuffle.
    EdgeList pool;
    pool.reserve(available);
    for (NodeId u = 0; u < g.num_nodes(); ++u) {
      for (NodeId v = u + 1; v < g.num_nodes(); ++v) {
        if (!g.has_edge(u, v)) pool.push_back({u, v});
      }
    }
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
      std::swap(pool[i], pool[j]);
      out.push_back(pool[i]);
    }
    return out;
  }

  std::unordered_set<std::uint64_t> seen;
  seen.reserve(count * 2);
  while (out.size() < count) {
    const auto u = static_cast<NodeId>(rng.below(n));
    auto v = static_cast<NodeId>(rng.below(n - 1));
    if (v >= u) ++v;
    const Edge e = Edge::canonical(u, v);
    if (g.has_edge(e.u, e.v)) continue;
    if (!seen.insert(e.key()).second) continue;
    out.push_back(e);
  }
  return out;
}

EdgeSplit split_edges(const Graph& g, const SplitFractions& fractions, std::uint64_t seed) {
  if (fractions.train < 0 || fractions.val < 0 || fractions.test < 0 ||
      std::abs(fractions.train + fractions.val + fractions.test - 1.0) > 1e-9) {
    throw ContractViolation("split fractions must be nonnegative and sum to 1");
  }
  const std::size_t total = g.num_edges();
  if (total < 20) throw ContractViolation("split_edges needs at least 20 edges, got " + std::to_string(total));

  EdgeList shuffled = g.edges();
  Rng shuffle_rng = Rng::stream(seed, kSplitShuffleStream);
  for (std::size_t i = shuffled.size(); i > 1; --i) {
    std::swap(shuffled[i - 1], shuffled[shuffle_rng.below(i)]);
  }

  // The epsilon absorbs representation error such as 0.85 * 100 = 84.999...
  const auto cut = [&](double f) {
    return std::min(total, static_cast<std::size_t>(std::floor(f * static_cast<double>(total) + 1e-9)));
  };
  const std::size_t train_end = cut(fractions.train);
  const std::size_t val_end = std::max(train_end, cut(fractions.train + fractions.val));

  EdgeSplit split;
  split.seed = seed;
  split.fractions = fractions;
  split.num_nodes = g.num_nodes();
  split.train_pos.assign(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(train_end));
  split.val_pos.assign(shuffled.begin() + static_cast<std::ptrdiff_t>(train_end),
                       shuffled.begin() + static_cast<std::ptrdiff_t>(val_end));
  split.test_pos.assign(shuffled.begin() + static_cast<std::ptrdiff_t>(val_end), shuffled.end());

  Rng neg_rng = Rng::stream(seed, kSplitNegativeStream);
  EdgeList negatives = sample_non_edges(g, split.val_pos.size() + split.test_pos.size(), neg_rng);
  split.val_neg.assign(negatives.begin(), negatives.begin() + static_cast<std::ptrdiff_t>(split.val_pos.size()));
  split.test_neg.assign(negatives.begin() + static_cast<std::ptrdiff_t>(split.val_pos.size()), negatives.end());
  return split;
}

EdgeList sample_training_negatives(const Graph& g, std::size_t count, std::uint64_t seed, std::uint64_t epoch) {
  Rng rng = Rng::stream(seed, (epoch << 12) ^ kTrainNegativeTag);
  return sample_non_edges(g, count, rng);
}

RandomWalkMatrix::RandomWalkMatrix(const Graph& g) {
  const NodeId n = g.num_nodes();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(2 * g.num_edges() + static_cast<std::size_t>(n));
  for (NodeId i = 0; i < n; ++i) {
    const double w = 1.0 / static_cast<double>(g.degree(i) + 1);
    triplets.emplace_back(i, i, w);
    for (NodeId j : g.neighbors(i)) triplets.emplace_back(i, j, w);
  }
  p_.resize(n, n);
  p_.setFromTriplets(triplets.begin(), triplets.end());
  p_.makeCompressed();
  pt_ = Sparse(p_.transpose());
  pt_.makeCompressed();
}

RandomWalkMatrix random_walk_matrix(const Graph& g) { return RandomWalkMatrix(g); }

Graph subgraph_with_edges(const Graph& g, const EdgeList& edges) {
  return Graph(g.num_nodes(), edges, g.index());
}

namespace {

nlohmann::json pairs_to_json(const EdgeList& edges) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Edge& e : edges) arr.push_back({e.u, e.v});
  return arr;
}

EdgeList pairs_from_json(const nlohmann::json& arr, const char* name, NodeId num_nodes) {
  if (!arr.is_array()) throw InputError(std::string("split manifest: '") + name + "' must be an array");
  EdgeList out;
  out.reserve(arr.size());
  for (const auto& p : arr) {
    if (!p.is_array() || p.size() != 2) throw InputError(std::string("split manifest: bad pair in '") + name + "'");
    const auto u = p[0].get<NodeId>();
    const auto v = p[1].get<NodeId>();
    if (u < 0 || v < 0 || u >= num_nodes || v >= num_nodes || u == v) {
      throw InputError(std::string("split manifest: invalid pair in '") + name + "'");
    }
    out.push_back(Edge::canonical(u, v));
  }
  return out;
}

}  // namespace

std::string split_manifest_json(const EdgeSplit& split) {
  nlohmann::ordered_json j;
  j["format"] = "hybowave-split/1";
  j["seed"] = split.seed;
  j["fractions"] = {split.fractions.train, split.fractions.val, split.fractions.test};
  j["num_nodes"] = split.num_nodes;
  j["train_pos"] = pairs_to_json(split.train_pos);
  j["val_pos"] = pairs_to_json(split.val_pos);
  j["test_pos"] = pairs_to_json(split.test_pos);
  j["val_neg"] = pairs_to_json(split.val_neg);
  j["test_neg"] = pairs_to_json(split.test_neg);
  return j.dump(1) + "\n";
}

EdgeSplit parse_split_manifest(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("split manifest is not valid JSON: ") + e.what());
  }
  try {
    if (j.value("format", "") != "hybowave-split/1") throw InputError("unsupported split manifest format");
    EdgeSplit s;
    s.seed = j.at("seed").get<std::uint64_t>();
    const auto& f = j.at("fractions");
    s.fractions = {f.at(0).get<double>(), f.at(1).get<double>(), f.at(2).get<double>()};
    s.num_nodes = j.at("num_nodes").get<NodeId>();
    s.train_pos = pairs_from_json(j.at("train_pos"), "train_pos", s.num_nodes);
    s.val_pos = pairs_from_json(j.at("val_pos"), "val_pos", s.num_nodes);
    s.test_pos = pairs_from_json(j.at("test_pos"), "test_pos", s.num_nodes);
    s.val_neg = pairs_from_json(j.at("val_neg"), "val_neg", s.num_nodes);
    s.test_neg = pairs_from_json(j.at("test_neg"), "test_neg", s.num_nodes);
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("split manifest: ") + e.what());
  }
}

}  // namespace hwn
