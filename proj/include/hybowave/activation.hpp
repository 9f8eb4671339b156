#ifndef HYBOWAVE_ACTIVATION_HPP
#define HYBOWAVE_ACTIVATION_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <string_view>

namespace hwn {

/// Euclidean elementwise nonlinearity applied in tangent space.
enum class Activation { ReLU, Identity, Tanh };

inline Activation parse_activation(std::string_view name) {
  if (name == "relu") return Activation::ReLU;
  if (name == "identity" || name == "none") return Activation::Identity;
  if (name == "tanh") return Activation::Tanh;
  throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

inline const char* to_string(Activation act) {
  switch (act) {
    case Activation::ReLU: return "relu";
    case Activation::Identity: return "identity";
    case Activation::Tanh: return "tanh";
  }
  return "?";
}

template <typename Derived>
typename Derived::PlainObject activate(const Eigen::MatrixBase<Derived>& x, Activation act) {
  switch (act) {
    case Activation::ReLU: return x.cwiseMax(typename Derived::Scalar(0));
    case Activation::Tanh: return x.array().tanh().matrix();
    case Activation::Identity: break;
  }
  return x;
}

/// Elementwise derivative evaluated at the pre-activation input.
template <typename Derived>
typename Derived::PlainObject activate_derivative(const Eigen::MatrixBase<Derived>& x, Activation act) {
  using Scalar = typename Derived::Scalar;
  switch (act) {
    case Activation::ReLU:
      return (x.array() > Scalar(0)).template cast<Scalar>().matrix();
    case Activation::Tanh:
      return (Scalar(1) - x.array().tanh().square()).matrix();
    case Activation::Identity: break;
  }
  return Derived::PlainObject::Ones(x.rows(), x.cols());
}

}  // namespace hwn

#endif  // HYBOWAVE_ACTIVATION_HPP
