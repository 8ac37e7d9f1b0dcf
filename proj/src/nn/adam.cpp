#include "big2/nn/adam.hpp"

#include <cmath>

#include "big2/error.hpp"

namespace big2::nn {

void Adam::step(std::span<float> params, std::span<const float> grads, double lr) {
  require(params.size() == m_.size() && grads.size() == m_.size(), "Adam::step: size mismatch");
  ++steps_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  const float step_size = static_cast<float>(lr / correction1);
  const float inv_sqrt_c2 = static_cast<float>(1.0 / std::sqrt(correction2));
  const float eps = static_cast<float>(config_.eps);
  const float fb1 = static_cast<float>(b1);
  const float fb2 = static_cast<float>(b2);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const float g = grads[i];
    m_[i] = fb1 * m_[i] + (1.0f - fb1) * g;
    v_[i] = fb2 * v_[i] + (1.0f - fb2) * g * g;
    params[i] -= step_size * m_[i] / (std::sqrt(v_[i]) * inv_sqrt_c2 + eps);
  }
}

void Adam::restore(std::int64_t steps, std::vector<float> m, std::vector<float> v) {
  require(m.size() == v.size(), "Adam::restore: moment sizes differ");
  steps_ = steps;
  m_ = std::move(m);
  v_ = std::move(v);
}

double global_norm(std::span<const float> grads) {
  double sum = 0.0;
  for (float g : grads) sum += static_cast<double>(g) * g;
  return std::sqrt(sum);
}

double clip_grad_norm(std::span<float> grads, double max_norm) {
  const double norm = global_norm(grads);
  if (norm > max_norm && norm > 0.0) {
    const auto scale = static_cast<float>(max_norm / norm);
    for (float& g : grads) g *= scale;
  }
  return norm;
}

}  // namespace big2::nn
