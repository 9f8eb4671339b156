#ifndef HYBOWAVE_GRAPH_HPP
#define HYBOWAVE_GRAPH_HPP

#include <Eigen/Sparse>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace hwn {

using NodeId = std::int32_t;

/// Undirected edge stored with u < v.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;

  static Edge canonical(NodeId a, NodeId b) { return a < b ? Edge{a, b} : Edge{b, a}; }
  std::uint64_t key() const { return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint32_t>(v); }
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

using EdgeList = std::vector<Edge>;

/// External label <-> contiguous index table, in first-appearance order.
class NodeIndex {
 public:
  NodeIndex() = default;
  explicit NodeIndex(std::vector<std::string> labels);

  NodeId intern(const std::string& label);
  std::optional<NodeId> find(const std::string& label) const;
  const std::string& label(NodeId id) const { return labels_.at(static_cast<std::size_t>(id)); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, NodeId> lookup_;
};

/// Immutable simple undirected graph with CSR adjacency (sorted neighbor lists).
class Graph {
 public:
  Graph() = default;
  /// Edges may arrive in any orientation; duplicates collapse. Self-loops and
  /// out-of-range endpoints are contract violations. Isolated nodes are allowed
  /// here (training subgraphs), not at ingestion.
  Graph(NodeId num_nodes, const EdgeList& edges, NodeIndex index = {});

  NodeId num_nodes() const { return num_nodes_; }
  std::size_t num_edges() const { return edges_.size(); }
  /// Canonical (u < v) edges in sorted order.
  const EdgeList& edges() const { return edges_; }
  std::span<const NodeId> neighbors(NodeId v) const;
  std::size_t degree(NodeId v) const { return static_cast<std::size_t>(offsets_[v + 1] - offsets_[v]); }
  bool has_edge(NodeId a, NodeId b) const;
  const NodeIndex& index() const { return index_; }
  /// Number of unordered node pairs that are not edges.
  std::uint64_t num_non_edges() const;

 private:
  NodeId num_nodes_ = 0;
  EdgeList edges_;
  std::vector<std::int64_t> offsets_{0};
  std::vector<NodeId> columns_;
  NodeIndex index_;
};

struct IngestSummary {
  std::size_t lines_read = 0;
  std::size_t self_loops_skipped = 0;
  std::size_t duplicates_collapsed = 0;
};

struct LoadedGraph {
  Graph graph;
  IngestSummary summary;
};

/// Parses `label<TAB>label` lines; `#` comments and blank lines are skipped, CRLF
/// accepted. Throws ParseError (with line number) on lines without exactly two fields.
LoadedGraph load_edge_list(const std::filesystem::path& path);
LoadedGraph read_edge_list(std::istream& in, const std::string& source_name = "<stream>");

struct SplitFractions {
  double train = 0.85;
  double val = 0.05;
  double test = 0.10;
};

struct EdgeSplit {
  EdgeList train_pos;
  EdgeList val_pos;
  EdgeList test_pos;
  EdgeList val_neg;
  EdgeList test_neg;
  std::uint64_t seed = 0;
  SplitFractions fractions;
  NodeId num_nodes = 0;
};

/// Shuffles edges (Fisher-Yates on Rng::stream(seed, ...)) and cuts at the
/// cumulative floor boundaries floor(f_train * E) and floor((f_train + f_val) * E).
/// Validation and test negatives are sampled once, jointly, without replacement.
EdgeSplit split_edges(const Graph& g, const SplitFractions& fractions, std::uint64_t seed);

/// `count` distinct non-edges of g, uniform over unordered pairs, no self-pairs.
/// Streams are keyed by (seed, epoch). Results may coincide with validation or
/// test negatives.
EdgeList sample_training_negatives(const Graph& g, std::size_t count, std::uint64_t seed, std::uint64_t epoch);

class Rng;
EdgeList sample_non_edges(const Graph& g, std::size_t count, Rng& rng);

/// P = D^{-1}(A + I): row-stochastic, sorted column indices, deg(i)+1 nonzeros in row i.
class RandomWalkMatrix {
 public:
  using Sparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  explicit RandomWalkMatrix(const Graph& g);

  const Sparse& matrix() const { return p_; }
  /// Row-major copy of P^T for backward passes.
  const Sparse& transpose() const { return pt_; }
  Eigen::Index size() const { return p_.rows(); }
  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(p_); }

 private:
  Sparse p_;
  Sparse pt_;
};

RandomWalkMatrix random_walk_matrix(const Graph& g);

/// Split manifest JSON: {format, seed, fractions, num_nodes, train_pos, val_pos,
/// test_pos, val_neg, test_neg}; pairs are [u, v] node indices.
std::string split_manifest_json(const EdgeSplit& split);
EdgeSplit parse_split_manifest(const std::string& text);

/// Graph over the same nodes that keeps only the given edges.
Graph subgraph_with_edges(const Graph& g, const EdgeList& edges);

}  // namespace hwn

#endif  // HYBOWAVE_GRAPH_HPP
