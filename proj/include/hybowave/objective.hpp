#ifndef HYBOWAVE_OBJECTIVE_HPP
#define HYBOWAVE_OBJECTIVE_HPP

#include "hybowave/geometry.hpp"
#include "hybowave/graph.hpp"
#include "hybowave/manifold.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace hwn {

struct ContrastiveConfig {
  double temperature = 0.2;
  double view_dropout = 0.2;

  void validate() const;
};

/// Fermi-Dirac decoder p = 1 / (1 + exp((sqdist - r) / t)). t is stored as log t.
struct DecoderParams {
  double r = 2.0;
  double log_t = 0.0;

  static DecoderParams from_sharpness(double r, double t);
  double t() const { return std::exp(log_t); }
};

/// Probabilities are clipped to [kProbabilityClip, 1 - kProbabilityClip] inside the BCE.
inline constexpr double kProbabilityClip = 1e-7;

/// Divides every row by its Euclidean norm; zero rows are an error.
Eigen::MatrixXd l2_normalize_rows(const Eigen::MatrixXd& z);

/// S_ij = <z1_i, z2_j> / tau.
Eigen::MatrixXd similarity_matrix(const Eigen::MatrixXd& z1, const Eigen::MatrixXd& z2, double temperature);

/// One-directional InfoNCE over L2-normalized views; positives on the diagonal.
/// Uses a log-sum-exp per row.
double info_nce_loss(const Eigen::MatrixXd& z1, const Eigen::MatrixXd& z2, double temperature);

struct ContrastiveGrad {
  double loss = 0.0;
  Eigen::MatrixXd grad1;
  Eigen::MatrixXd grad2;
};

/// InfoNCE and its gradient with respect to the unnormalized views. Row norms are
/// floored smoothly at 1e-12 so an all-zero row contributes no gradient blow-up.
ContrastiveGrad info_nce_with_grad(const Eigen::MatrixXd& y1, const Eigen::MatrixXd& y2, double temperature);

/// Higher is more likely to interact.
template <typename DX, typename DY>
double link_score(const Eigen::MatrixBase<DX>& hi, const Eigen::MatrixBase<DY>& hj, const Curvature& c) {
  return -sqdist(hi, hj, c);
}

double link_probability(double sqd, const DecoderParams& decoder);

struct BceResult {
  double loss = 0.0;
  Eigen::VectorXd grad_sqdist;
  double grad_r = 0.0;
  double grad_log_t = 0.0;
};

/// Mean binary cross-entropy of the decoder over pairs with given squared distances.
BceResult decoder_bce(const Eigen::VectorXd& sqdists, const std::vector<bool>& labels, const DecoderParams& decoder);

struct LossConfig {
  DecoderParams decoder;
  double lambda = 1.0;
  double temperature = 0.2;
};

/// Tangent-space views for the contrastive term.
struct ContrastiveViews {
  Eigen::MatrixXd first;
  Eigen::MatrixXd second;
};

/// BCE(decoder over pos + neg) + lambda * InfoNCE(views). Views may be null when
/// lambda is zero.
double total_loss(const EdgeList& positives, const EdgeList& negatives, const Eigen::MatrixXd& embeddings,
                  const Geometry& geometry, const ContrastiveViews* views, const LossConfig& config);

}  // namespace hwn

#endif  // HYBOWAVE_OBJECTIVE_HPP
