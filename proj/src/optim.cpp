#include "hybowave/optim.hpp"

#include "hybowave/errors.hpp"

#include <cmath>

namespace hwn {

void adam_step(std::span<const TensorView> params, std::span<const ConstTensorView> grads, AdamState& state,
               const AdamConfig& config) {
  if (params.size() != grads.size()) throw ContractViolation("adam_step: parameter/gradient count mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].rows != grads[i].rows || params[i].cols != grads[i].cols) {
      throw ContractViolation("adam_step: shape mismatch for '" + params[i].name + "'");
    }
    if (!grads[i].cmap().allFinite()) throw NumericalError("non-finite gradient for parameter '" + params[i].name + "'");
  }
  if (state.first.empty()) {
    for (const auto& p : params) {
      state.first.push_back(Eigen::VectorXd::Zero(p.size()));
      state.second.push_back(Eigen::VectorXd::Zero(p.size()));
    }
  }
  if (state.first.size() != params.size()) throw ContractViolation("adam_step: state does not match parameters");

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Eigen::Map<Eigen::VectorXd> p(params[i].data, params[i].size());
    Eigen::Map<const Eigen::VectorXd> g(grads[i].data, grads[i].size());
    Eigen::VectorXd& m = state.first[i];
    Eigen::VectorXd& v = state.second[i];
    m = config.beta1 * m + (1.0 - config.beta1) * g;
    v = config.beta2 * v + (1.0 - config.beta2) * g.cwiseAbs2();
    const Eigen::ArrayXd m_hat = m.array() / correction1;
    const Eigen::ArrayXd v_hat = v.array() / correction2;
    p.array() -= config.learning_rate * m_hat / (v_hat.sqrt() + config.epsilon);
  }
}

void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state, const AdamConfig& config) {
  const auto p = params.tensors();
  const auto g = grads.tensors();
  adam_step(std::span<const TensorView>(p), std::span<const ConstTensorView>(g), state, config);
}

}  // namespace hwn
