#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace big2::nn {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  bool operator==(const AdamConfig&) const = default;
};

// Adaptive-moment optimizer over a flat parameter buffer.
class Adam {
 public:
  Adam() = default;
  Adam(std::size_t size, AdamConfig config = {}) : config_(config), m_(size, 0.0f), v_(size, 0.0f) {}

  void step(std::span<float> params, std::span<const float> grads, double lr);

  std::int64_t steps() const { return steps_; }
  const std::vector<float>& first_moment() const { return m_; }
  const std::vector<float>& second_moment() const { return v_; }
  const AdamConfig& config() const { return config_; }

  void restore(std::int64_t steps, std::vector<float> m, std::vector<float> v);
  bool operator==(const Adam&) const = default;

 private:
  AdamConfig config_;
  std::vector<float> m_;
  std::vector<float> v_;
  std::int64_t steps_ = 0;
};

double global_norm(std::span<const float> grads);

// Rescales grads so their global L2 norm is at most max_norm; returns the
// norm before clipping.
double clip_grad_norm(std::span<float> grads, double max_norm);

}  // namespace big2::nn
