#include "hybowave/model.hpp"

#include "hybowave/errors.hpp"

#include <utility>

namespace hwn {

namespace {

constexpr std::uint64_t kFusionStream = 0xF05E;

template <typename View, typename Params>
std::vector<View> collect_tensors(Params& p) {
  std::vector<View> out;
  const auto add = [&](std::string name, auto& m) {
    if (m.size() > 0) out.push_back({std::move(name), m.data(), m.rows(), m.cols()});
  };
  add("features", p.encoder.features);
  add("feature_gate", p.encoder.feature_gate);
  for (std::size_t l = 0; l < p.encoder.weights.size(); ++l) {
    add("layer" + std::to_string(l) + ".weight", p.encoder.weights[l]);
    add("layer" + std::to_string(l) + ".bias", p.encoder.biases[l]);
  }
  add("layer_query", p.encoder.layer_query);
  add("fusion", p.fusion);
  out.push_back({"decoder.r", &p.decoder.r, 1, 1});
  out.push_back({"decoder.log_t", &p.decoder.log_t, 1, 1});
  return out;
}

}  // namespace

void ModelConfig::validate() const {
  encoder.validate();
  if (!(temperature > 0.0)) throw ContractViolation("temperature must be positive");
  if (!(decoder_t > 0.0)) throw ContractViolation("decoder_t must be positive");
  if (lambda < 0.0) throw ContractViolation("lambda must be nonnegative");
}

ModelParams ModelParams::zeros_like() const {
  ModelParams z;
  z.encoder = encoder.zeros_like();
  z.fusion = Eigen::MatrixXd::Zero(fusion.rows(), fusion.cols());
  z.decoder = {0.0, 0.0};
  return z;
}

std::vector<TensorView> ModelParams::tensors() { return collect_tensors<TensorView>(*this); }
std::vector<ConstTensorView> ModelParams::tensors() const { return collect_tensors<ConstTensorView>(*this); }

ModelParams init_model_params(Eigen::Index num_nodes, const ModelConfig& config) {
  config.validate();
  ModelParams p;
  p.encoder = init_encoder_params(num_nodes, config.encoder);
  if (config.use_wavelet) {
    Rng rng = Rng::stream(config.encoder.seed, kFusionStream);
    p.fusion = init_fusion(config.scales.size(), config.encoder.output_dim(), config.encoder.hidden_dim, rng);
  }
  p.decoder = DecoderParams::from_sharpness(config.decoder_r, config.decoder_t);
  return p;
}

struct Model::ViewTape {
  EncoderTape encoder;
  Eigen::MatrixXd wavelet_input;  // unlift(encoder embeddings)
  Eigen::MatrixXd wavelet;        // Z
  Eigen::MatrixXd fused;          // Z W_f
  Eigen::MatrixXd final_points;
};

Model::Model(const Graph& graph, ModelConfig config)
    : config_(std::move(config)), walk_(graph), geometry_(config_.geometry()) {
  config_.validate();
}

Model::ViewTape Model::forward_view(const ModelParams& params, const Eigen::MatrixXd& mask) const {
  ViewTape tape;
  tape.encoder = encode_forward(params.encoder, walk_, config_.encoder, &mask);
  if (config_.use_wavelet) {
    tape.wavelet_input = geometry_.unlift(tape.encoder.embeddings);
    tape.wavelet = multiscale_transform(walk_, tape.wavelet_input, config_.scales);
    if (params.fusion.rows() != tape.wavelet.cols()) throw ContractViolation("fusion weight shape mismatch");
    tape.fused = tape.wavelet * params.fusion;
    tape.final_points = geometry_.lift(tape.fused);
  } else {
    tape.final_points = tape.encoder.embeddings;
  }
  return tape;
}

void Model::backward_view(const ModelParams& params, const ViewTape& tape, const Eigen::MatrixXd& grad_final,
                          const Eigen::MatrixXd& grad_encoder, ModelParams& grad) const {
  Eigen::MatrixXd grad_embeddings;
  if (config_.use_wavelet && grad_final.size() > 0) {
    const Eigen::MatrixXd grad_fused = geometry_.lift_vjp(tape.fused, grad_final);
    grad.fusion += tape.wavelet.transpose() * grad_fused;
    const Eigen::MatrixXd grad_wavelet = grad_fused * params.fusion.transpose();
    const Eigen::MatrixXd grad_input = multiscale_transform_vjp(walk_, grad_wavelet, config_.scales);
    grad_embeddings = geometry_.unlift_vjp(tape.encoder.embeddings, grad_input);
  } else if (grad_final.size() > 0) {
    grad_embeddings = grad_final;
  }
  if (grad_encoder.size() > 0) {
    if (grad_embeddings.size() > 0) grad_embeddings += grad_encoder;
    else grad_embeddings = grad_encoder;
  }
  if (grad_embeddings.size() == 0) return;
  encode_backward(params.encoder, walk_, config_.encoder, tape.encoder, grad_embeddings, grad.encoder);
}

Eigen::MatrixXd Model::embed(const ModelParams& params, const Eigen::MatrixXd* mask) const {
  static const Eigen::MatrixXd kNoMask;
  return forward_view(params, mask != nullptr ? *mask : kNoMask).final_points;
}

EncoderTape Model::encode(const ModelParams& params) const {
  return encode_forward(params.encoder, walk_, config_.encoder, nullptr);
}

LossBreakdown Model::evaluate(const ModelParams& params, const Batch& batch, ModelParams* grad) const {
  if (batch.positives.empty()) throw ContractViolation("batch has no positive pairs");
  const ViewTape first = forward_view(params, batch.mask1);

  const std::size_t m = batch.positives.size() + batch.negatives.size();
  Eigen::VectorXd sqd(static_cast<Eigen::Index>(m));
  std::vector<bool> labels;
  labels.reserve(m);
  std::vector<const Edge*> pairs;
  pairs.reserve(m);
  for (const Edge& e : batch.positives) {
    pairs.push_back(&e);
    labels.push_back(true);
  }
  for (const Edge& e : batch.negatives) {
    pairs.push_back(&e);
    labels.push_back(false);
  }
  const Eigen::MatrixXd& points = first.final_points;
  for (std::size_t k = 0; k < m; ++k) {
    sqd(static_cast<Eigen::Index>(k)) = geometry_.sqdist(points.row(pairs[k]->u), points.row(pairs[k]->v));
  }
  const BceResult bce = decoder_bce(sqd, labels, params.decoder);

  LossBreakdown out;
  out.bce = bce.loss;

  Eigen::MatrixXd grad_first;
  if (grad != nullptr) {
    *grad = params.zeros_like();
    grad->decoder.r = bce.grad_r;
    grad->decoder.log_t = bce.grad_log_t;
    grad_first = Eigen::MatrixXd::Zero(points.rows(), points.cols());
    for (std::size_t k = 0; k < m; ++k) {
      const double g = bce.grad_sqdist(static_cast<Eigen::Index>(k));
      if (g == 0.0) continue;
      const Edge& e = *pairs[k];
      grad_first.row(e.u) += g * geometry_.sqdist_grad(points.row(e.u), points.row(e.v)).transpose();
      grad_first.row(e.v) += g * geometry_.sqdist_grad(points.row(e.v), points.row(e.u)).transpose();
    }
  }

  // Contrast the encoder outputs of the two views; the wavelet stage comes after.
  Eigen::MatrixXd grad_encoder_first;
  if (config_.use_contrastive) {
    const ViewTape second = forward_view(params, batch.mask2);
    const Eigen::MatrixXd y1 = geometry_.unlift(first.encoder.embeddings);
    const Eigen::MatrixXd y2 = geometry_.unlift(second.encoder.embeddings);
    const ContrastiveGrad nce = info_nce_with_grad(y1, y2, config_.temperature);
    out.contrastive = nce.loss;
    if (grad != nullptr && config_.lambda != 0.0) {
      grad_encoder_first = geometry_.unlift_vjp(first.encoder.embeddings, config_.lambda * nce.grad1);
      const Eigen::MatrixXd grad_encoder_second =
          geometry_.unlift_vjp(second.encoder.embeddings, config_.lambda * nce.grad2);
      backward_view(params, second, Eigen::MatrixXd(), grad_encoder_second, *grad);
    }
  }
  out.total = out.bce + config_.lambda * out.contrastive;
  if (grad != nullptr) backward_view(params, first, grad_first, grad_encoder_first, *grad);
  return out;
}

LossBreakdown Model::loss(const ModelParams& params, const Batch& batch) const {
  return evaluate(params, batch, nullptr);
}

LossBreakdown Model::loss_and_gradient(const ModelParams& params, const Batch& batch, ModelParams& grad) const {
  return evaluate(params, batch, &grad);
}

Eigen::VectorXd Model::scores(const Eigen::MatrixXd& embeddings, const EdgeList& pairs) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    out(static_cast<Eigen::Index>(k)) = -geometry_.sqdist(embeddings.row(pairs[k].u), embeddings.row(pairs[k].v));
  }
  return out;
}

Batch Model::make_batch(EdgeList positives, EdgeList negatives, Rng& rng) const {
  Batch b;
  b.positives = std::move(positives);
  b.negatives = std::move(negatives);
  const double p = config_.encoder.dropout;
  if (p > 0.0) {
    b.mask1 = dropout_mask(num_nodes(), config_.encoder.input_dim, p, rng);
    if (config_.use_contrastive) b.mask2 = dropout_mask(num_nodes(), config_.encoder.input_dim, p, rng);
  }
  return b;
}

}  // namespace hwn
