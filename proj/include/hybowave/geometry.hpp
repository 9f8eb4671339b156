#ifndef HYBOWAVE_GEOMETRY_HPP
#define HYBOWAVE_GEOMETRY_HPP

#include "hybowave/manifold.hpp"

#include <Eigen/Dense>

namespace hwn {

/// Embedding space used by a model. Lorentz embeds through exp/log maps at the
/// origin and scores with squared geodesic distance; Euclidean replaces both maps
/// with the identity and scores with squared Euclidean distance.
class Geometry {
 public:
  enum class Kind { Lorentz, Euclidean };

  static Geometry lorentz(Curvature c) { return Geometry(Kind::Lorentz, c); }
  static Geometry euclidean() { return Geometry(Kind::Euclidean, Curvature(1.0)); }

  Kind kind() const { return kind_; }
  const Curvature& curvature() const { return c_; }
  bool is_lorentz() const { return kind_ == Kind::Lorentz; }

  /// Tangent rows (N x n) to embedding rows (N x (n+1) for Lorentz, N x n otherwise).
  Eigen::MatrixXd lift(const Eigen::MatrixXd& u) const {
    return is_lorentz() ? lorentz::exp_origin_spatial(u, c_) : u;
  }
  Eigen::MatrixXd lift_vjp(const Eigen::MatrixXd& u, const Eigen::MatrixXd& grad) const {
    return is_lorentz() ? lorentz::exp_origin_vjp(u, grad, c_) : grad;
  }
  Eigen::MatrixXd unlift(const Eigen::MatrixXd& x) const {
    return is_lorentz() ? lorentz::log_origin_spatial(x, c_) : x;
  }
  Eigen::MatrixXd unlift_vjp(const Eigen::MatrixXd& x, const Eigen::MatrixXd& grad) const {
    return is_lorentz() ? lorentz::log_origin_vjp(x, grad, c_) : grad;
  }

  template <typename DX, typename DY>
  double sqdist(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y) const {
    return is_lorentz() ? hwn::sqdist(x, y, c_) : (x - y).squaredNorm();
  }
  /// Gradient of sqdist(x, y) with respect to x.
  template <typename DX, typename DY>
  Eigen::VectorXd sqdist_grad(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y) const {
    if (is_lorentz()) return hwn::sqdist_grad(x, y, c_);
    return (2.0 * (x - y)).transpose();
  }

 private:
  Geometry(Kind kind, Curvature c) : kind_(kind), c_(c) {}

  Kind kind_;
  Curvature c_;
};

}  // namespace hwn

#endif  // HYBOWAVE_GEOMETRY_HPP
