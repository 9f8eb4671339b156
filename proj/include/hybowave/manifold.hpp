#ifndef HYBOWAVE_MANIFOLD_HPP
#define HYBOWAVE_MANIFOLD_HPP

// Lorentz (hyperboloid) model of hyperbolic space with curvature magnitude c:
//
//   L = { x in R^{n+1} : <x,x>_L = -1/c, x_0 > 0 },   <x,y>_L = -x_0 y_0 + sum_i x_i y_i
//
// All maps are anchored at the origin o = (1/sqrt(c), 0, ..., 0). Tangent vectors at o
// have a zero time component, so the row kernels below work on the spatial block only.

#include "hybowave/activation.hpp"
#include "hybowave/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

namespace hwn {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar = double>
class CurvatureT {
 public:
  explicit CurvatureT(Scalar c = Scalar(1)) : c_(c) {
    if (!(c > Scalar(0)) || !std::isfinite(c)) {
      throw ContractViolation("curvature must be positive and finite");
    }
  }

  Scalar value() const { return c_; }
  Scalar sqrt() const { return std::sqrt(c_); }
  /// <x,x>_L for every point of the manifold.
  Scalar self_inner() const { return Scalar(-1) / c_; }

 private:
  Scalar c_;
};

using Curvature = CurvatureT<double>;

namespace lorentz {

/// sinh(z)/z
template <typename Scalar>
Scalar sinhc(Scalar z) {
  if (std::abs(z) < Scalar(1e-4)) return Scalar(1) + z * z / Scalar(6);
  return std::sinh(z) / z;
}

/// asinh(z)/z
template <typename Scalar>
Scalar asinhc(Scalar z) {
  if (std::abs(z) < Scalar(1e-4)) return Scalar(1) - z * z / Scalar(6);
  return std::asinh(z) / z;
}

// (z cosh z - sinh z) / z^3, the radial derivative term of the exp map.
template <typename Scalar>
Scalar exp_radial_term(Scalar z) {
  if (std::abs(z) < Scalar(1e-3)) return Scalar(1) / Scalar(3) + z * z / Scalar(30);
  return (z * std::cosh(z) - std::sinh(z)) / (z * z * z);
}

// (z / sqrt(1+z^2) - asinh z) / z^3, the radial derivative term of the log map.
template <typename Scalar>
Scalar log_radial_term(Scalar z) {
  if (std::abs(z) < Scalar(1e-3)) return Scalar(-1) / Scalar(3) + Scalar(3) * z * z / Scalar(10);
  return (z / std::sqrt(Scalar(1) + z * z) - std::asinh(z)) / (z * z * z);
}

/// Maps spatial tangent rows u (N x n) at the origin onto the manifold (N x (n+1)).
template <typename Derived>
MatrixX<typename Derived::Scalar> exp_origin_spatial(const Eigen::MatrixBase<Derived>& u,
                                                     const CurvatureT<typename Derived::Scalar>& c) {
  using Scalar = typename Derived::Scalar;
  const Scalar k = c.sqrt();
  MatrixX<Scalar> x(u.rows(), u.cols() + 1);
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    const Scalar z = k * u.row(i).norm();
    x(i, 0) = std::cosh(z) / k;
    x.row(i).tail(u.cols()) = sinhc(z) * u.row(i);
  }
  return x;
}

/// Inverse of exp_origin_spatial. Uses asinh of the spatial norm, which equals
/// arccosh(sqrt(c) x_0) on the manifold and stays well conditioned near the origin.
template <typename Derived>
MatrixX<typename Derived::Scalar> log_origin_spatial(const Eigen::MatrixBase<Derived>& x,
                                                     const CurvatureT<typename Derived::Scalar>& c) {
  using Scalar = typename Derived::Scalar;
  const Scalar k = c.sqrt();
  const Eigen::Index n = x.cols() - 1;
  MatrixX<Scalar> u(x.rows(), n);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const auto xs = x.row(i).tail(n);
    u.row(i) = asinhc(k * xs.norm()) * xs;
  }
  return u;
}

/// Vector-Jacobian product of exp_origin_spatial: pulls an ambient gradient
/// (N x (n+1)) back to the spatial tangent input (N x n).
template <typename DerivedU, typename DerivedG>
MatrixX<typename DerivedU::Scalar> exp_origin_vjp(const Eigen::MatrixBase<DerivedU>& u,
                                                  const Eigen::MatrixBase<DerivedG>& grad,
                                                  const CurvatureT<typename DerivedU::Scalar>& c) {
  using Scalar = typename DerivedU::Scalar;
  const Scalar k = c.sqrt();
  const Eigen::Index n = u.cols();
  MatrixX<Scalar> out(u.rows(), n);
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    const auto ui = u.row(i);
    const auto gs = grad.row(i).tail(n);
    const Scalar z = k * ui.norm();
    const Scalar s = sinhc(z);
    out.row(i) = (grad(i, 0) * k * s + k * k * exp_radial_term(z) * ui.dot(gs)) * ui + s * gs;
  }
  return out;
}

/// Vector-Jacobian product of log_origin_spatial: pulls a spatial tangent gradient
/// back to ambient coordinates. The time column is always zero.
template <typename DerivedX, typename DerivedG>
MatrixX<typename DerivedX::Scalar> log_origin_vjp(const Eigen::MatrixBase<DerivedX>& x,
                                                  const Eigen::MatrixBase<DerivedG>& grad,
                                                  const CurvatureT<typename DerivedX::Scalar>& c) {
  using Scalar = typename DerivedX::Scalar;
  const Scalar k = c.sqrt();
  const Eigen::Index n = x.cols() - 1;
  MatrixX<Scalar> out = MatrixX<Scalar>::Zero(x.rows(), n + 1);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const auto xs = x.row(i).tail(n);
    const auto g = grad.row(i);
    const Scalar z = k * xs.norm();
    out.row(i).tail(n) = asinhc(z) * g + k * k * log_radial_term(z) * xs.dot(g) * xs;
  }
  return out;
}

}  // namespace lorentz

/// Points on the curvature-c hyperboloid, one per row.
template <typename Scalar = double>
class LorentzPointsT {
 public:
  struct Trusted {};

  /// Validates every row against the manifold constraint.
  LorentzPointsT(MatrixX<Scalar> data, CurvatureT<Scalar> c) : data_(std::move(data)), c_(c) {
    check();
  }
  /// Skips validation; for outputs of the maps in this header.
  LorentzPointsT(MatrixX<Scalar> data, CurvatureT<Scalar> c, Trusted) : data_(std::move(data)), c_(c) {}

  const MatrixX<Scalar>& data() const { return data_; }
  const CurvatureT<Scalar>& curvature() const { return c_; }
  Eigen::Index rows() const { return data_.rows(); }
  Eigen::Index ambient_dim() const { return data_.cols(); }
  auto row(Eigen::Index i) const { return data_.row(i); }
  auto spatial() const { return data_.rightCols(data_.cols() - 1); }

  /// Largest |<x,x>_L + 1/c| over rows.
  Scalar max_constraint_residual() const {
    Scalar worst = 0;
    for (Eigen::Index i = 0; i < data_.rows(); ++i) {
      const auto x = data_.row(i);
      const Scalar r = -x(0) * x(0) + x.tail(x.cols() - 1).squaredNorm() - c_.self_inner();
      worst = std::max(worst, std::abs(r));
    }
    return worst;
  }

 private:
  void check() const {
    if (data_.cols() < 2) throw ContractViolation("Lorentz points need ambient dimension >= 2");
    for (Eigen::Index i = 0; i < data_.rows(); ++i) {
      const auto x = data_.row(i);
      if (!x.allFinite()) throw ContractViolation("non-finite Lorentz point at row " + std::to_string(i));
      const Scalar x0sq = x(0) * x(0);
      const Scalar r = -x0sq + x.tail(x.cols() - 1).squaredNorm() - c_.self_inner();
      // Roundoff in <x,x>_L grows with x_0^2.
      if (!(x(0) > 0) || std::abs(r) > Scalar(1e-7) * (-c_.self_inner() + x0sq)) {
        throw ContractViolation("row " + std::to_string(i) + " is off the Lorentz manifold");
      }
    }
  }

  MatrixX<Scalar> data_;
  CurvatureT<Scalar> c_;
};

/// Tangent vectors at the origin, one per row; column 0 is exactly zero.
template <typename Scalar = double>
class TangentVectorsT {
 public:
  explicit TangentVectorsT(MatrixX<Scalar> data) : data_(std::move(data)) {
    if (data_.cols() < 2) throw ContractViolation("tangent vectors need ambient dimension >= 2");
    if ((data_.col(0).array() != Scalar(0)).any()) {
      throw ContractViolation("tangent vectors at the origin must have zero time component");
    }
  }

  template <typename Derived>
  static TangentVectorsT from_spatial(const Eigen::MatrixBase<Derived>& u) {
    MatrixX<Scalar> data(u.rows(), u.cols() + 1);
    data.col(0).setZero();
    data.rightCols(u.cols()) = u;
    return TangentVectorsT(std::move(data));
  }

  const MatrixX<Scalar>& data() const { return data_; }
  Eigen::Index rows() const { return data_.rows(); }
  auto spatial() const { return data_.rightCols(data_.cols() - 1); }

 private:
  MatrixX<Scalar> data_;
};

using LorentzPoints = LorentzPointsT<double>;
using TangentVectors = TangentVectorsT<double>;

/// Minkowski inner product -x_0 y_0 + sum_{i>=1} x_i y_i.
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar lorentz_inner(const Eigen::MatrixBase<DerivedX>& x,
                                        const Eigen::MatrixBase<DerivedY>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ContractViolation("lorentz_inner: vectors must share a dimension >= 2");
  }
  const Eigen::Index n = x.size() - 1;
  return -x(0) * y(0) + x.tail(n).dot(y.tail(n));
}

/// Keeps the spatial part of each row and recomputes x_0 = sqrt(1/c + |x_s|^2).
template <typename Derived>
LorentzPointsT<typename Derived::Scalar> project_to_manifold(const Eigen::MatrixBase<Derived>& v,
                                                             const CurvatureT<typename Derived::Scalar>& c) {
  using Scalar = typename Derived::Scalar;
  if (v.cols() < 2) throw ContractViolation("project_to_manifold: ambient dimension must be >= 2");
  const Eigen::Index n = v.cols() - 1;
  MatrixX<Scalar> x(v.rows(), v.cols());
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    const auto s = v.row(i).tail(n);
    if (!s.allFinite()) throw ContractViolation("project_to_manifold: non-finite input at row " + std::to_string(i));
    x(i, 0) = std::sqrt(Scalar(1) / c.value() + s.squaredNorm());
    x.row(i).tail(n) = s;
  }
  return {std::move(x), c, typename LorentzPointsT<Scalar>::Trusted{}};
}

template <typename Scalar>
LorentzPointsT<Scalar> exp_origin(const TangentVectorsT<Scalar>& v, const CurvatureT<Scalar>& c) {
  return {lorentz::exp_origin_spatial(v.spatial(), c), c, typename LorentzPointsT<Scalar>::Trusted{}};
}

template <typename Scalar>
TangentVectorsT<Scalar> log_origin(const LorentzPointsT<Scalar>& x) {
  return TangentVectorsT<Scalar>::from_spatial(lorentz::log_origin_spatial(x.data(), x.curvature()));
}

/// Origin o = (1/sqrt(c), 0, ..., 0) in ambient dimension n+1.
template <typename Scalar = double>
VectorX<Scalar> origin(Eigen::Index ambient_dim, const CurvatureT<Scalar>& c) {
  VectorX<Scalar> o = VectorX<Scalar>::Zero(ambient_dim);
  o(0) = Scalar(1) / c.sqrt();
  return o;
}

/// Squared geodesic distance ((1/sqrt c) arccosh(-c <x,y>_L))^2 with the argument
/// clamped to [1, inf).
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar sqdist(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y,
                                 const CurvatureT<typename DerivedX::Scalar>& c) {
  using Scalar = typename DerivedX::Scalar;
  const Scalar a = std::max(Scalar(1), -c.value() * lorentz_inner(x, y));
  const Scalar d = std::acosh(a) / c.sqrt();
  return d * d;
}

/// Ambient gradient of sqdist(x, y) with respect to x. By symmetry the gradient
/// with respect to y is sqdist_grad(y, x, c). At the clamp boundary the one-sided
/// limit 2/c is used for d(sqdist)/da.
template <typename DerivedX, typename DerivedY>
VectorX<typename DerivedX::Scalar> sqdist_grad(const Eigen::MatrixBase<DerivedX>& x,
                                               const Eigen::MatrixBase<DerivedY>& y,
                                               const CurvatureT<typename DerivedX::Scalar>& c) {
  using Scalar = typename DerivedX::Scalar;
  const Scalar a = -c.value() * lorentz_inner(x, y);
  const Scalar delta = a - Scalar(1);
  Scalar ratio;  // arccosh(a) / sqrt(a^2 - 1)
  if (delta < Scalar(1e-8)) {
    ratio = Scalar(1) - std::max(delta, Scalar(0)) / Scalar(3);
  } else {
    ratio = std::acosh(a) / std::sqrt(a * a - Scalar(1));
  }
  const Scalar dsq_da = Scalar(2) * ratio / c.value();
  VectorX<Scalar> g(x.size());
  g(0) = dsq_da * c.value() * y(0);
  g.tail(x.size() - 1) = -dsq_da * c.value() * y.tail(y.size() - 1);
  return g;
}

/// exp_o(act(log_o(x))), applied row-wise in the tangent space at the origin.
template <typename Scalar>
LorentzPointsT<Scalar> hyperbolic_activation(const LorentzPointsT<Scalar>& x, Activation act) {
  const auto& c = x.curvature();
  const MatrixX<Scalar> t = lorentz::log_origin_spatial(x.data(), c);
  return {lorentz::exp_origin_spatial(activate(t, act), c), c, typename LorentzPointsT<Scalar>::Trusted{}};
}

}  // namespace hwn

#endif  // HYBOWAVE_MANIFOLD_HPP
