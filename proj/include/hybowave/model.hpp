#ifndef HYBOWAVE_MODEL_HPP
#define HYBOWAVE_MODEL_HPP

#include "hybowave/encoder.hpp"
#include "hybowave/geometry.hpp"
#include "hybowave/graph.hpp"
#include "hybowave/objective.hpp"
#include "hybowave/random.hpp"
#include "hybowave/wavelet.hpp"

#include <Eigen/Dense>

#include <string>
#include <type_traits>
#include <vector>

namespace hwn {

struct ModelConfig {
  EncoderConfig encoder;
  ScaleSet scales;
  bool use_wavelet = true;
  bool use_contrastive = true;
  double temperature = 0.2;
  double lambda = 1.0;
  double decoder_r = 2.0;
  double decoder_t = 1.0;

  void validate() const;
  Geometry geometry() const { return encoder.geometry(); }
  int embedding_dim() const { return use_wavelet ? encoder.hidden_dim : encoder.output_dim(); }
};

/// Named, contiguous view of one parameter tensor (column-major).
template <typename T>
struct TensorViewT {
  std::string name;
  T* data;
  Eigen::Index rows;
  Eigen::Index cols;

  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic>> map() const
    requires(!std::is_const_v<T>)
  {
    return {data, rows, cols};
  }
  Eigen::Map<const Eigen::MatrixXd> cmap() const { return {data, rows, cols}; }
  Eigen::Index size() const { return rows * cols; }
};

using TensorView = TensorViewT<double>;
using ConstTensorView = TensorViewT<const double>;

/// Every learnable tensor of the pipeline.
struct ModelParams {
  EncoderParams encoder;
  Eigen::MatrixXd fusion;  // (K d_enc) x d; empty without the wavelet stage
  DecoderParams decoder;

  ModelParams zeros_like() const;
  /// Fixed order: features, feature_gate, layer{l}.weight, layer{l}.bias, layer_query,
  /// fusion, decoder.r, decoder.log_t. Empty tensors are skipped.
  std::vector<TensorView> tensors();
  std::vector<ConstTensorView> tensors() const;
};

ModelParams init_model_params(Eigen::Index num_nodes, const ModelConfig& config);

/// One optimization step's worth of pairs and dropout masks. Empty masks mean
/// dropout is off for that view; mask2 is only used with the contrastive term.
struct Batch {
  EdgeList positives;
  EdgeList negatives;
  Eigen::MatrixXd mask1;
  Eigen::MatrixXd mask2;
};

struct LossBreakdown {
  double total = 0.0;
  double bce = 0.0;
  double contrastive = 0.0;
};

/// Full pipeline on a fixed message-passing graph:
/// encoder -> (wavelet diffusion + fusion) -> Lorentz embeddings -> decoder BCE,
/// plus InfoNCE between the encoder outputs (tangent space) of two dropout views.
class Model {
 public:
  Model(const Graph& graph, ModelConfig config);

  const ModelConfig& config() const { return config_; }
  const RandomWalkMatrix& walk() const { return walk_; }
  const Geometry& geometry() const { return geometry_; }
  Eigen::Index num_nodes() const { return walk_.size(); }

  /// Scored embeddings (dropout off unless a mask is given).
  Eigen::MatrixXd embed(const ModelParams& params, const Eigen::MatrixXd* mask = nullptr) const;
  /// Encoder output before the wavelet stage, dropout off.
  EncoderTape encode(const ModelParams& params) const;

  LossBreakdown loss(const ModelParams& params, const Batch& batch) const;
  /// Loss and its exact gradient; `grad` is overwritten.
  LossBreakdown loss_and_gradient(const ModelParams& params, const Batch& batch, ModelParams& grad) const;

  /// Link scores -sqdist for each pair of the given embeddings.
  Eigen::VectorXd scores(const Eigen::MatrixXd& embeddings, const EdgeList& pairs) const;

  /// Masks drawn from rng for one training step.
  Batch make_batch(EdgeList positives, EdgeList negatives, Rng& rng) const;

 private:
  struct ViewTape;
  ViewTape forward_view(const ModelParams& params, const Eigen::MatrixXd& mask) const;
  // Either gradient may be empty. grad_encoder is w.r.t. the encoder embeddings.
  void backward_view(const ModelParams& params, const ViewTape& tape, const Eigen::MatrixXd& grad_final,
                     const Eigen::MatrixXd& grad_encoder, ModelParams& grad) const;
  LossBreakdown evaluate(const ModelParams& params, const Batch& batch, ModelParams* grad) const;

  ModelConfig config_;
  RandomWalkMatrix walk_;
  Geometry geometry_;
};

}  // namespace hwn

#endif  // HYBOWAVE_MODEL_HPP
