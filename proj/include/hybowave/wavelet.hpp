#ifndef HYBOWAVE_WAVELET_HPP
#define HYBOWAVE_WAVELET_HPP

#include "hybowave/graph.hpp"
#include "hybowave/manifold.hpp"
#include "hybowave/random.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace hwn {

/// Strictly increasing diffusion step counts, each in [1, 64].
class ScaleSet {
 public:
  ScaleSet() : scales_{1, 2, 3, 4} {}
  explicit ScaleSet(std::vector<int> scales);

  const std::vector<int>& values() const { return scales_; }
  int size() const { return static_cast<int>(scales_.size()); }
  int max_scale() const { return scales_.back(); }
  std::string to_string() const;  // "1,2,3,4"
  static ScaleSet parse(const std::string& text);

  friend bool operator==(const ScaleSet&, const ScaleSet&) = default;

 private:
  std::vector<int> scales_;
};

/// P^s X by s successive sparse products, applied left to right: P(P(...(P X))).
Eigen::MatrixXd diffuse(const RandomWalkMatrix& p, const Eigen::MatrixXd& x, int steps);

/// Z = [P^{s_1} X | ... | P^{s_K} X] in ScaleSet order, reusing P^{s-1} X so that
/// exactly max(S) sparse products are performed. If `products` is given it
/// receives that count.
Eigen::MatrixXd multiscale_transform(const RandomWalkMatrix& p, const Eigen::MatrixXd& x, const ScaleSet& scales,
                                     int* products = nullptr);

/// Adjoint of multiscale_transform: sum_k (P^T)^{s_k} G_k, evaluated Horner-style.
Eigen::MatrixXd multiscale_transform_vjp(const RandomWalkMatrix& p, const Eigen::MatrixXd& grad_z,
                                         const ScaleSet& scales);

/// Fusion weight W_f of shape (K d) x d_out, uniform in +-1/sqrt(K d).
Eigen::MatrixXd init_fusion(int num_scales, int input_dim, int output_dim, Rng& rng);

/// exp_origin(Z W_f): the scored embeddings.
LorentzPoints fuse_to_manifold(const Eigen::MatrixXd& z, const Eigen::MatrixXd& fusion, const Curvature& c);

}  // namespace hwn

#endif  // HYBOWAVE_WAVELET_HPP
