#ifndef HYBOWAVE_ENCODER_HPP
#define HYBOWAVE_ENCODER_HPP

#include "hybowave/activation.hpp"
#include "hybowave/geometry.hpp"
#include "hybowave/graph.hpp"
#include "hybowave/manifold.hpp"
#include "hybowave/random.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace hwn {

enum class EncoderKind {
  LorentzGnn,      // stacked Lorentz graph convolutions + layer attention
  EuclideanGnn,    // same architecture, identity manifold maps
  LorentzShallow,  // gated feature table lifted to the manifold, no convolutions
};

EncoderKind parse_encoder_kind(std::string_view name);
const char* to_string(EncoderKind kind);

struct EncoderConfig {
  int input_dim = 128;
  int hidden_dim = 16;
  int num_layers = 2;
  double curvature = 1.0;
  Activation activation = Activation::ReLU;
  double dropout = 0.2;
  std::uint64_t seed = 0;
  EncoderKind kind = EncoderKind::LorentzGnn;

  void validate() const;
  int output_dim() const { return kind == EncoderKind::LorentzShallow ? input_dim : hidden_dim; }
  int conv_layers() const { return kind == EncoderKind::LorentzShallow ? 0 : num_layers; }
  Geometry geometry() const {
    return kind == EncoderKind::EuclideanGnn ? Geometry::euclidean() : Geometry::lorentz(Curvature(curvature));
  }
};

struct EncoderParams {
  Eigen::MatrixXd features;              // N x d_in
  Eigen::VectorXd feature_gate;          // d_in
  std::vector<Eigen::MatrixXd> weights;  // d_prev x d per layer
  std::vector<Eigen::VectorXd> biases;   // d per layer
  Eigen::VectorXd layer_query;           // d; empty for the shallow encoder

  EncoderParams zeros_like() const;
};

/// Seeded i.i.d. N(0, 1/d_in) feature table.
Eigen::MatrixXd init_features(Eigen::Index num_nodes, const EncoderConfig& config);

/// Features as above, zero gate and biases, weights uniform in +-1/sqrt(d_prev),
/// layer query uniform in +-1/sqrt(d).
EncoderParams init_encoder_params(Eigen::Index num_nodes, const EncoderConfig& config);

struct FeatureAttention {
  Eigen::MatrixXd output;      // X scaled column-wise by d_in * softmax(g)
  Eigen::VectorXd importance;  // softmax(g), sums to 1
};

FeatureAttention apply_feature_attention(const Eigen::MatrixXd& features, const Eigen::VectorXd& gate);

/// Indices of the k largest importance weights, descending (ties by lower index).
std::vector<std::pair<int, double>> top_features(const Eigen::VectorXd& importance, std::size_t k = 10);

/// Inverted-dropout mask: entries 0 with probability p, 1/(1-p) otherwise.
Eigen::MatrixXd dropout_mask(Eigen::Index rows, Eigen::Index cols, double p, Rng& rng);

/// One Lorentz graph convolution: tangent mean over N(v) + {v} with weight
/// 1/(deg(v)+1), linear map W^T t + b in tangent space, exp map, then hyperbolic
/// activation.
LorentzPoints lorentz_graph_conv(const LorentzPoints& h, const RandomWalkMatrix& p, const Eigen::MatrixXd& weight,
                                 const Eigen::VectorXd& bias, Activation act = Activation::ReLU);
LorentzPoints lorentz_graph_conv(const LorentzPoints& h, const Graph& g, const Eigen::MatrixXd& weight,
                                 const Eigen::VectorXd& bias, Activation act = Activation::ReLU);

struct LayerAttention {
  Eigen::MatrixXd tangent;  // N x d, sum_l alpha_l t^(l)
  Eigen::MatrixXd alpha;    // N x L, rows sum to 1
};

/// Per node: alpha = softmax_l(<q, tanh(t^(l))>), aggregate = sum_l alpha_l t^(l).
LayerAttention layer_attention_tangent(const std::vector<Eigen::MatrixXd>& layer_tangents,
                                       const Eigen::VectorXd& query);
/// As above, lifted to the manifold with exp_origin.
LorentzPoints layer_attention_aggregate(const std::vector<Eigen::MatrixXd>& layer_tangents,
                                        const Eigen::VectorXd& query, const Curvature& c,
                                        Eigen::MatrixXd* alpha_out = nullptr);

/// Intermediate values of one forward pass, kept for the backward pass.
struct EncoderTape {
  struct Layer {
    Eigen::MatrixXd input_tangent;  // log of previous layer points
    Eigen::MatrixXd aggregated;     // P * input_tangent
    Eigen::MatrixXd linear;         // aggregated * W + b
    Eigen::MatrixXd linear_points;  // exp(linear)
    Eigen::MatrixXd pre_activation; // log(linear_points)
    Eigen::MatrixXd points;         // exp(act(pre_activation))
  };

  Eigen::MatrixXd gated;     // feature attention output
  Eigen::VectorXd importance;
  Eigen::MatrixXd mask;      // empty when dropout is off
  Eigen::MatrixXd dropped;   // tangent input to the lift
  Eigen::MatrixXd lifted;    // H^(0)
  std::vector<Layer> layers;
  std::vector<Eigen::MatrixXd> layer_tangents;  // log of every layer's output
  Eigen::MatrixXd alpha;
  Eigen::MatrixXd tangent;     // aggregated tangent (input to the wavelet stage)
  Eigen::MatrixXd embeddings;  // lift(tangent); Lorentz rows, or Euclidean for EuclideanGnn
};

/// Forward pass with an explicit dropout mask (nullptr or empty: dropout off).
EncoderTape encode_forward(const EncoderParams& params, const RandomWalkMatrix& p, const EncoderConfig& config,
                           const Eigen::MatrixXd* mask);

/// Accumulates d(loss)/d(params) into `grads` given d(loss)/d(tape.embeddings).
void encode_backward(const EncoderParams& params, const RandomWalkMatrix& p, const EncoderConfig& config,
                     const EncoderTape& tape, const Eigen::MatrixXd& grad_embeddings, EncoderParams& grads);

struct Encoding {
  Eigen::MatrixXd embeddings;
  std::vector<Eigen::MatrixXd> layer_tangents;
  Eigen::MatrixXd alpha;
  Eigen::VectorXd importance;
};

/// feature attention -> optional dropout -> lift -> L convolutions -> layer attention.
Encoding encode(const EncoderParams& params, const Graph& g, const EncoderConfig& config, bool dropout_on, Rng& rng);

}  // namespace hwn

#endif  // HYBOWAVE_ENCODER_HPP
