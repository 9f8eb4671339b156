#include "hybowave/wavelet.hpp"

#include "hybowave/errors.hpp"

#include <cmath>
#include <sstream>

namespace hwn {

ScaleSet::ScaleSet(std::vector<int> scales) : scales_(std::move(scales)) {
  if (scales_.empty()) throw ContractViolation("scale set must not be empty");
  for (std::size_t i = 0; i < scales_.size(); ++i) {
    if (scales_[i] < 1 || scales_[i] > 64) throw ContractViolation("scales must lie in [1, 64]");
    if (i > 0 && scales_[i] <= scales_[i - 1]) throw ContractViolation("scales must be strictly increasing");
  }
}

std::string ScaleSet::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < scales_.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(scales_[i]);
  }
  return out;
}

ScaleSet ScaleSet::parse(const std::string& text) {
  std::vector<int> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ContractViolation("invalid scale '" + item + "'");
    }
  }
  return ScaleSet(std::move(values));
}

Eigen::MatrixXd diffuse(const RandomWalkMatrix& p, const Eigen::MatrixXd& x, int steps) {
  if (steps < 1) throw ContractViolation("diffusion needs at least one step");
  if (x.rows() != p.size()) throw ContractViolation("feature rows do not match graph size");
  Eigen::MatrixXd out = x;
  for (int s = 0; s < steps; ++s) out = p.matrix() * out;
  return out;
}

Eigen::MatrixXd multiscale_transform(const RandomWalkMatrix& p, const Eigen::MatrixXd& x, const ScaleSet& scales,
                                     int* products) {
  if (x.rows() != p.size()) throw ContractViolation("feature rows do not match graph size");
  const Eigen::Index d = x.cols();
  Eigen::MatrixXd z(x.rows(), d * scales.size());
  Eigen::MatrixXd current = x;
  int step = 0;
  Eigen::Index block = 0;
  for (int s : scales.values()) {
    for (; step < s; ++step) current = p.matrix() * current;
    z.middleCols(block * d, d) = current;
    ++block;
  }
  if (products != nullptr) *products = step;
  return z;
}

Eigen::MatrixXd multiscale_transform_vjp(const RandomWalkMatrix& p, const Eigen::MatrixXd& grad_z,
                                         const ScaleSet& scales) {
  const Eigen::Index k = scales.size();
  if (grad_z.cols() % k != 0) throw ContractViolation("gradient width is not a multiple of the scale count");
  const Eigen::Index d = grad_z.cols() / k;
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(grad_z.rows(), d);
  Eigen::Index block = k - 1;
  for (int step = scales.max_scale(); step >= 1; --step) {
    if (block >= 0 && scales.values()[static_cast<std::size_t>(block)] == step) {
      acc += grad_z.middleCols(block * d, d);
      --block;
    }
    acc = p.transpose() * acc;
  }
  return acc;
}

Eigen::MatrixXd init_fusion(int num_scales, int input_dim, int output_dim, Rng& rng) {
  const int fan_in = num_scales * input_dim;
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  Eigen::MatrixXd w(fan_in, output_dim);
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = rng.uniform(-bound, bound);
  }
  return w;
}

LorentzPoints fuse_to_manifold(const Eigen::MatrixXd& z, const Eigen::MatrixXd& fusion, const Curvature& c) {
  if (z.cols() != fusion.rows()) throw ContractViolation("fusion weight rows do not match wavelet feature width");
  return {lorentz::exp_origin_spatial(z * fusion, c), c, LorentzPoints::Trusted{}};
}

}  // namespace hwn
