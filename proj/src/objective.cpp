#include "hybowave/objective.hpp"

#include "hybowave/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hwn {

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void check_views(const Eigen::MatrixXd& z1, const Eigen::MatrixXd& z2) {
  if (z1.rows() != z2.rows() || z1.cols() != z2.cols()) throw ContractViolation("contrastive views differ in shape");
  if (z1.rows() < 1) throw ContractViolation("contrastive loss needs at least one node");
}

}  // namespace

void ContrastiveConfig::validate() const {
  if (!(temperature > 0.0)) throw ContractViolation("temperature must be positive");
  if (!(view_dropout >= 0.0 && view_dropout < 1.0)) throw ContractViolation("view dropout must lie in [0, 1)");
}

DecoderParams DecoderParams::from_sharpness(double r, double t) {
  if (!(t > 0.0)) throw ContractViolation("decoder sharpness t must be positive");
  return {r, std::log(t)};
}

Eigen::MatrixXd l2_normalize_rows(const Eigen::MatrixXd& z) {
  Eigen::MatrixXd out(z.rows(), z.cols());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double n = z.row(i).norm();
    if (!(n > 0.0)) throw ContractViolation("cannot normalize zero row " + std::to_string(i));
    out.row(i) = z.row(i) / n;
  }
  return out;
}

Eigen::MatrixXd similarity_matrix(const Eigen::MatrixXd& z1, const Eigen::MatrixXd& z2, double temperature) {
  if (z1.cols() != z2.cols()) throw ContractViolation("similarity: view widths differ");
  if (!(temperature > 0.0)) throw ContractViolation("temperature must be positive");
  return (z1 * z2.transpose()) / temperature;
}

namespace {

// Loss and dL/dS for a similarity matrix with positives on the diagonal.
double info_nce_from_similarity(const Eigen::MatrixXd& s, Eigen::MatrixXd* grad_s) {
  const Eigen::Index n = s.rows();
  double total = 0.0;
  if (grad_s != nullptr) grad_s->resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = s.row(i).maxCoeff();
    const Eigen::ArrayXd e = (s.row(i).array() - m).exp().transpose();
    const double sum = e.sum();
    total += (m + std::log(sum)) - s(i, i);
    if (grad_s != nullptr) {
      grad_s->row(i) = (e / sum).matrix().transpose() / static_cast<double>(n);
      (*grad_s)(i, i) -= 1.0 / static_cast<double>(n);
    }
  }
  return total / static_cast<double>(n);
}

}  // namespace

double info_nce_loss(const Eigen::MatrixXd& z1, const Eigen::MatrixXd& z2, double temperature) {
  check_views(z1, z2);
  return info_nce_from_similarity(similarity_matrix(l2_normalize_rows(z1), l2_normalize_rows(z2), temperature), nullptr);
}

ContrastiveGrad info_nce_with_grad(const Eigen::MatrixXd& y1, const Eigen::MatrixXd& y2, double temperature) {
  check_views(y1, y2);
  constexpr double kNormFloorSq = 1e-24;
  const Eigen::VectorXd norm1 = (y1.rowwise().squaredNorm().array() + kNormFloorSq).sqrt();
  const Eigen::VectorXd norm2 = (y2.rowwise().squaredNorm().array() + kNormFloorSq).sqrt();
  const Eigen::MatrixXd n1 = y1.array().colwise() / norm1.array();
  const Eigen::MatrixXd n2 = y2.array().colwise() / norm2.array();

  Eigen::MatrixXd grad_s;
  ContrastiveGrad out;
  out.loss = info_nce_from_similarity(similarity_matrix(n1, n2, temperature), &grad_s);
  const Eigen::MatrixXd grad_n1 = grad_s * n2 / temperature;
  const Eigen::MatrixXd grad_n2 = grad_s.transpose() * n1 / temperature;

  // d(y / sqrt(|y|^2 + eps^2)) = (g - n (y . g) / (|y|^2 + eps^2)) / sqrt(|y|^2 + eps^2)
  const auto pull_back = [](const Eigen::MatrixXd& y, const Eigen::VectorXd& norm, const Eigen::MatrixXd& g) {
    Eigen::MatrixXd out(y.rows(), y.cols());
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      const double nn = norm(i);
      out.row(i) = (g.row(i) - y.row(i) * (y.row(i).dot(g.row(i)) / (nn * nn))) / nn;
    }
    return out;
  };
  out.grad1 = pull_back(y1, norm1, grad_n1);
  out.grad2 = pull_back(y2, norm2, grad_n2);
  return out;
}

double link_probability(double sqd, const DecoderParams& decoder) {
  return sigmoid((decoder.r - sqd) / decoder.t());
}

BceResult decoder_bce(const Eigen::VectorXd& sqdists, const std::vector<bool>& labels, const DecoderParams& decoder) {
  if (static_cast<std::size_t>(sqdists.size()) != labels.size()) throw ContractViolation("label count mismatch");
  if (labels.empty()) throw ContractViolation("BCE over an empty pair set");
  const double t = decoder.t();
  const double inv_m = 1.0 / static_cast<double>(labels.size());
  BceResult out;
  out.grad_sqdist = Eigen::VectorXd::Zero(sqdists.size());
  for (Eigen::Index k = 0; k < sqdists.size(); ++k) {
    const double z = (decoder.r - sqdists(k)) / t;
    const bool positive = labels[static_cast<std::size_t>(k)];
    // Probability assigned to the observed label.
    const double q = sigmoid(positive ? z : -z);
    const double clipped = std::clamp(q, kProbabilityClip, 1.0 - kProbabilityClip);
    out.loss -= std::log(clipped) * inv_m;
    if (q > kProbabilityClip && q < 1.0 - kProbabilityClip) {
      const double dz = (positive ? -(1.0 - q) : (1.0 - q)) * inv_m;
      out.grad_r += dz / t;
      out.grad_sqdist(k) = -dz / t;
      out.grad_log_t += -dz * z;
    }
  }
  return out;
}

double total_loss(const EdgeList& positives, const EdgeList& negatives, const Eigen::MatrixXd& embeddings,
                  const Geometry& geometry, const ContrastiveViews* views, const LossConfig& config) {
  if (positives.empty()) throw ContractViolation("total_loss needs at least one positive pair");
  Eigen::VectorXd sqd(static_cast<Eigen::Index>(positives.size() + negatives.size()));
  std::vector<bool> labels;
  labels.reserve(positives.size() + negatives.size());
  Eigen::Index k = 0;
  for (const Edge& e : positives) {
    sqd(k++) = geometry.sqdist(embeddings.row(e.u), embeddings.row(e.v));
    labels.push_back(true);
  }
  for (const Edge& e : negatives) {
    sqd(k++) = geometry.sqdist(embeddings.row(e.u), embeddings.row(e.v));
    labels.push_back(false);
  }
  double loss = decoder_bce(sqd, labels, config.decoder).loss;
  if (config.lambda != 0.0) {
    if (views == nullptr) throw ContractViolation("contrastive weight is nonzero but no views were given");
    loss += config.lambda * info_nce_loss(views->first, views->second, config.temperature);
  }
  return loss;
}

}  // namespace hwn
