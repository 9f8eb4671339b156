#include "hybowave/encoder.hpp"

#include "hybowave/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace hwn {

namespace {

constexpr std::uint64_t kFeatureStream = 0xFEA7;
constexpr std::uint64_t kWeightStream = 0x3E16;

Eigen::VectorXd softmax(const Eigen::VectorXd& g) {
  const double m = g.maxCoeff();
  Eigen::VectorXd e = (g.array() - m).exp().matrix();
  return e / e.sum();
}

}  // namespace

EncoderKind parse_encoder_kind(std::string_view name) {
  if (name == "lorentz_gnn") return EncoderKind::LorentzGnn;
  if (name == "euclidean_gnn") return EncoderKind::EuclideanGnn;
  if (name == "lorentz_shallow") return EncoderKind::LorentzShallow;
  throw ContractViolation("unknown encoder kind '" + std::string(name) + "'");
}

const char* to_string(EncoderKind kind) {
  switch (kind) {
    case EncoderKind::LorentzGnn: return "lorentz_gnn";
    case EncoderKind::EuclideanGnn: return "euclidean_gnn";
    case EncoderKind::LorentzShallow: return "lorentz_shallow";
  }
  return "?";
}

void EncoderConfig::validate() const {
  if (input_dim < 1 || hidden_dim < 1) throw ContractViolation("encoder dimensions must be >= 1");
  if (kind != EncoderKind::LorentzShallow && num_layers < 1) throw ContractViolation("num_layers must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ContractViolation("dropout must lie in [0, 1)");
  Curvature c(curvature);
  (void)c;
}

EncoderParams EncoderParams::zeros_like() const {
  EncoderParams z;
  z.features = Eigen::MatrixXd::Zero(features.rows(), features.cols());
  z.feature_gate = Eigen::VectorXd::Zero(feature_gate.size());
  for (const auto& w : weights) z.weights.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  for (const auto& b : biases) z.biases.push_back(Eigen::VectorXd::Zero(b.size()));
  z.layer_query = Eigen::VectorXd::Zero(layer_query.size());
  return z;
}

Eigen::MatrixXd init_features(Eigen::Index num_nodes, const EncoderConfig& config) {
  if (num_nodes < 1) throw ContractViolation("init_features: need at least one node");
  Rng rng = Rng::stream(config.seed, kFeatureStream);
  const double scale = 1.0 / std::sqrt(static_cast<double>(config.input_dim));
  Eigen::MatrixXd x(num_nodes, config.input_dim);
  // Row-major fill so the table does not depend on Eigen's storage order.
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = scale * rng.normal();
  }
  return x;
}

EncoderParams init_encoder_params(Eigen::Index num_nodes, const EncoderConfig& config) {
  config.validate();
  EncoderParams p;
  p.features = init_features(num_nodes, config);
  p.feature_gate = Eigen::VectorXd::Zero(config.input_dim);
  Rng rng = Rng::stream(config.seed, kWeightStream);
  int prev = config.input_dim;
  for (int l = 0; l < config.conv_layers(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(prev));
    Eigen::MatrixXd w(prev, config.hidden_dim);
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = rng.uniform(-bound, bound);
    }
    p.weights.push_back(std::move(w));
    p.biases.push_back(Eigen::VectorXd::Zero(config.hidden_dim));
    prev = config.hidden_dim;
  }
  if (config.conv_layers() > 0) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(config.hidden_dim));
    p.layer_query.resize(config.hidden_dim);
    for (Eigen::Index j = 0; j < p.layer_query.size(); ++j) p.layer_query(j) = rng.uniform(-bound, bound);
  }
  return p;
}

FeatureAttention apply_feature_attention(const Eigen::MatrixXd& features, const Eigen::VectorXd& gate) {
  if (features.cols() != gate.size()) throw ContractViolation("feature gate size does not match feature columns");
  FeatureAttention out;
  out.importance = softmax(gate);
  const Eigen::RowVectorXd scale = static_cast<double>(gate.size()) * out.importance.transpose();
  out.output = features.array().rowwise() * scale.array();
  return out;
}

std::vector<std::pair<int, double>> top_features(const Eigen::VectorXd& importance, std::size_t k) {
  std::vector<int> order(static_cast<std::size_t>(importance.size()));
  std::iota(order.begin(), order.end(), 0);
  k = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](int a, int b) { return importance(a) > importance(b) || (importance(a) == importance(b) && a < b); });
  std::vector<std::pair<int, double>> out;
  for (std::size_t i = 0; i < k; ++i) out.emplace_back(order[i], importance(order[i]));
  return out;
}

Eigen::MatrixXd dropout_mask(Eigen::Index rows, Eigen::Index cols, double p, Rng& rng) {
  const double keep_scale = 1.0 / (1.0 - p);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.bernoulli(p) ? 0.0 : keep_scale;
  }
  return m;
}

LorentzPoints lorentz_graph_conv(const LorentzPoints& h, const RandomWalkMatrix& p, const Eigen::MatrixXd& weight,
                                 const Eigen::VectorXd& bias, Activation act) {
  if (p.size() != h.rows()) throw ContractViolation("graph size does not match number of points");
  if (weight.rows() != h.ambient_dim() - 1 || weight.cols() != bias.size()) {
    throw ContractViolation("convolution weight shape does not match input dimension");
  }
  const Curvature& c = h.curvature();
  const Eigen::MatrixXd aggregated = p.matrix() * lorentz::log_origin_spatial(h.data(), c);
  const Eigen::MatrixXd linear = (aggregated * weight).rowwise() + bias.transpose();
  const LorentzPoints transformed(lorentz::exp_origin_spatial(linear, c), c, LorentzPoints::Trusted{});
  return hyperbolic_activation(transformed, act);
}

LorentzPoints lorentz_graph_conv(const LorentzPoints& h, const Graph& g, const Eigen::MatrixXd& weight,
                                 const Eigen::VectorXd& bias, Activation act) {
  return lorentz_graph_conv(h, RandomWalkMatrix(g), weight, bias, act);
}

LayerAttention layer_attention_tangent(const std::vector<Eigen::MatrixXd>& layer_tangents,
                                       const Eigen::VectorXd& query) {
  if (layer_tangents.empty()) throw ContractViolation("layer attention needs at least one layer");
  const auto layers = static_cast<Eigen::Index>(layer_tangents.size());
  const Eigen::Index n = layer_tangents.front().rows();
  const Eigen::Index d = layer_tangents.front().cols();
  for (const auto& t : layer_tangents) {
    if (t.rows() != n || t.cols() != d) throw ContractViolation("layer tangents must share a shape");
  }
  if (query.size() != d) throw ContractViolation("layer query size does not match hidden dimension");

  LayerAttention out;
  out.alpha.resize(n, layers);
  for (Eigen::Index l = 0; l < layers; ++l) {
    out.alpha.col(l) = layer_tangents[static_cast<std::size_t>(l)].array().tanh().matrix() * query;
  }
  for (Eigen::Index v = 0; v < n; ++v) {
    const double m = out.alpha.row(v).maxCoeff();
    out.alpha.row(v) = (out.alpha.row(v).array() - m).exp().matrix();
    out.alpha.row(v) /= out.alpha.row(v).sum();
  }
  out.tangent = Eigen::MatrixXd::Zero(n, d);
  for (Eigen::Index l = 0; l < layers; ++l) {
    out.tangent += (layer_tangents[static_cast<std::size_t>(l)].array().colwise() * out.alpha.col(l).array()).matrix();
  }
  return out;
}

LorentzPoints layer_attention_aggregate(const std::vector<Eigen::MatrixXd>& layer_tangents,
                                        const Eigen::VectorXd& query, const Curvature& c, Eigen::MatrixXd* alpha_out) {
  LayerAttention att = layer_attention_tangent(layer_tangents, query);
  if (alpha_out != nullptr) *alpha_out = att.alpha;
  return {lorentz::exp_origin_spatial(att.tangent, c), c, LorentzPoints::Trusted{}};
}

EncoderTape encode_forward(const EncoderParams& params, const RandomWalkMatrix& p, const EncoderConfig& config,
                           const Eigen::MatrixXd* mask) {
  const Geometry geom = config.geometry();
  if (params.features.rows() != p.size()) throw ContractViolation("feature table rows do not match graph size");
  if (params.features.cols() != config.input_dim) throw ContractViolation("feature table width != input_dim");
  if (params.weights.size() != static_cast<std::size_t>(config.conv_layers())) {
    throw ContractViolation("parameter layer count does not match config");
  }

  EncoderTape tape;
  FeatureAttention fa = apply_feature_attention(params.features, params.feature_gate);
  tape.gated = std::move(fa.output);
  tape.importance = std::move(fa.importance);
  if (mask != nullptr && mask->size() > 0) {
    if (mask->rows() != tape.gated.rows() || mask->cols() != tape.gated.cols()) {
      throw ContractViolation("dropout mask shape mismatch");
    }
    tape.mask = *mask;
    tape.dropped = tape.gated.cwiseProduct(*mask);
  } else {
    tape.dropped = tape.gated;
  }
  tape.lifted = geom.lift(tape.dropped);

  if (config.conv_layers() == 0) {
    tape.tangent = geom.unlift(tape.lifted);
    tape.embeddings = tape.lifted;
    return tape;
  }

  Eigen::MatrixXd current_tangent = geom.unlift(tape.lifted);
  for (int l = 0; l < config.conv_layers(); ++l) {
    EncoderTape::Layer layer;
    layer.input_tangent = std::move(current_tangent);
    layer.aggregated = p.matrix() * layer.input_tangent;
    layer.linear = (layer.aggregated * params.weights[l]).rowwise() + params.biases[l].transpose();
    layer.linear_points = geom.lift(layer.linear);
    layer.pre_activation = geom.unlift(layer.linear_points);
    layer.points = geom.lift(activate(layer.pre_activation, config.activation));
    current_tangent = geom.unlift(layer.points);
    tape.layer_tangents.push_back(current_tangent);
    tape.layers.push_back(std::move(layer));
  }

  LayerAttention att = layer_attention_tangent(tape.layer_tangents, params.layer_query);
  tape.alpha = std::move(att.alpha);
  tape.tangent = std::move(att.tangent);
  tape.embeddings = geom.lift(tape.tangent);
  return tape;
}

void encode_backward(const EncoderParams& params, const RandomWalkMatrix& p, const EncoderConfig& config,
                     const EncoderTape& tape, const Eigen::MatrixXd& grad_embeddings, EncoderParams& grads) {
  const Geometry geom = config.geometry();
  Eigen::MatrixXd grad_lifted;

  if (config.conv_layers() == 0) {
    grad_lifted = grad_embeddings;
  } else {
    const Eigen::MatrixXd grad_tangent = geom.lift_vjp(tape.tangent, grad_embeddings);
    const auto layers = tape.layer_tangents.size();
    std::vector<Eigen::MatrixXd> grad_layer(layers);
    for (std::size_t l = 0; l < layers; ++l) {
      grad_layer[l] = (grad_tangent.array().colwise() * tape.alpha.col(static_cast<Eigen::Index>(l)).array()).matrix();
    }
    // Softmax over layers, per node.
    const Eigen::Index n = grad_tangent.rows();
    Eigen::MatrixXd grad_alpha(n, static_cast<Eigen::Index>(layers));
    for (std::size_t l = 0; l < layers; ++l) {
      grad_alpha.col(static_cast<Eigen::Index>(l)) = (grad_tangent.cwiseProduct(tape.layer_tangents[l])).rowwise().sum();
    }
    const Eigen::VectorXd weighted = (grad_alpha.cwiseProduct(tape.alpha)).rowwise().sum();
    const Eigen::MatrixXd grad_score = tape.alpha.cwiseProduct(grad_alpha.colwise() - weighted);
    for (std::size_t l = 0; l < layers; ++l) {
      const Eigen::ArrayXXd th = tape.layer_tangents[l].array().tanh();
      const Eigen::VectorXd s = grad_score.col(static_cast<Eigen::Index>(l));
      grads.layer_query += th.matrix().transpose() * s;
      grad_layer[l] += ((1.0 - th.square()).rowwise() * params.layer_query.transpose().array()).matrix().cwiseProduct(
          s.replicate(1, th.cols()));
    }

    Eigen::MatrixXd carry;  // gradient w.r.t. the input tangent of layer l+1
    for (std::size_t li = layers; li-- > 0;) {
      const auto& layer = tape.layers[li];
      Eigen::MatrixXd grad_t = grad_layer[li];
      if (carry.size() > 0) grad_t += carry;
      const Eigen::MatrixXd grad_points = geom.unlift_vjp(layer.points, grad_t);
      const Eigen::MatrixXd activated = activate(layer.pre_activation, config.activation);
      const Eigen::MatrixXd grad_pre =
          geom.lift_vjp(activated, grad_points).cwiseProduct(activate_derivative(layer.pre_activation, config.activation));
      const Eigen::MatrixXd grad_linear = geom.lift_vjp(layer.linear, geom.unlift_vjp(layer.linear_points, grad_pre));
      grads.weights[li] += layer.aggregated.transpose() * grad_linear;
      grads.biases[li] += grad_linear.colwise().sum().transpose();
      carry = p.transpose() * (grad_linear * params.weights[li].transpose());
    }
    grad_lifted = geom.unlift_vjp(tape.lifted, carry);
  }

  Eigen::MatrixXd grad_gated = geom.lift_vjp(tape.dropped, grad_lifted);
  if (tape.mask.size() > 0) grad_gated = grad_gated.cwiseProduct(tape.mask);

  const double d_in = static_cast<double>(params.feature_gate.size());
  const Eigen::RowVectorXd scale = d_in * tape.importance.transpose();
  grads.features += (grad_gated.array().rowwise() * scale.array()).matrix();
  const Eigen::VectorXd grad_importance = d_in * (grad_gated.cwiseProduct(params.features)).colwise().sum().transpose();
  grads.feature_gate += tape.importance.cwiseProduct(
      (grad_importance.array() - tape.importance.dot(grad_importance)).matrix());
}

Encoding encode(const EncoderParams& params, const Graph& g, const EncoderConfig& config, bool dropout_on, Rng& rng) {
  const RandomWalkMatrix p(g);
  Eigen::MatrixXd mask;
  if (dropout_on && config.dropout > 0.0) {
    mask = dropout_mask(params.features.rows(), params.features.cols(), config.dropout, rng);
  }
  EncoderTape tape = encode_forward(params, p, config, &mask);
  Encoding out;
  out.embeddings = std::move(tape.embeddings);
  out.layer_tangents = std::move(tape.layer_tangents);
  out.alpha = std::move(tape.alpha);
  out.importance = std::move(tape.importance);
  return out;
}

}  // namespace hwn
