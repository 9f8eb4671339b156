#ifndef HYBOWAVE_OPTIM_HPP
#define HYBOWAVE_OPTIM_HPP

#include "hybowave/model.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace hwn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// First/second moment estimates per tensor, plus the step counter.
struct AdamState {
  std::int64_t step = 0;
  std::vector<Eigen::VectorXd> first;
  std::vector<Eigen::VectorXd> second;
};

/// One bias-corrected Adam update. Moments are lazily zero-initialized on the
/// first call. Throws NumericalError naming the tensor on a non-finite gradient;
/// in that case no parameter is modified.
void adam_step(std::span<const TensorView> params, std::span<const ConstTensorView> grads, AdamState& state,
               const AdamConfig& config);

/// Convenience wrapper over ModelParams.
void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state, const AdamConfig& config);

}  // namespace hwn

#endif  // HYBOWAVE_OPTIM_HPP
