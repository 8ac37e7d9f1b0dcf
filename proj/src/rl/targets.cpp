#include <algorithm>
#include <cmath>
#include <numbers>

#include "big2/error.hpp"
#include "big2/rl/rl.hpp"

namespace big2::rl {

void PPOConfig::validate() const {
  if (!(clip > 0.0 && gamma > 0.0 && gamma <= 1.0 && lambda >= 0.0 && lambda <= 1.0 && lr > 0.0 &&
        epochs > 0 && minibatch > 0 && value_coef >= 0.0 && entropy_coef >= 0.0 && max_grad_norm > 0.0))
    throw ConfigError("invalid PPO configuration");
}

void ValueConfig::validate() const {
  if (!(lr > 0.0 && gamma > 0.0 && gamma <= 1.0 && epsilon_start >= 0.0 && epsilon_start <= 1.0 &&
        target_sync > 0 && max_grad_norm > 0.0 && reward_divisor > 0.0))
    throw ConfigError("invalid value-method configuration");
}

GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values, double gamma,
                      double lambda) {
  require(rewards.size() == values.size(), "compute_gae: rewards and values differ in length");
  const std::size_t n = rewards.size();
  GaeResult out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);
  double running = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const double next_value = i + 1 < n ? values[i + 1] : 0.0;
    const double delta = rewards[i] + gamma * next_value - values[i];
    running = delta + gamma * lambda * running;
    out.advantages[i] = running;
    out.returns[i] = running + values[i];
  }
  return out;
}

std::vector<double> mc_q_target(std::span<const double> rewards, double gamma) {
  std::vector<double> out(rewards.size(), 0.0);
  double running = 0.0;
  for (std::size_t i = rewards.size(); i-- > 0;) {
    running = rewards[i] + gamma * running;
    out[i] = running;
  }
  return out;
}

double sarsa_target(double reward, const double* next_chosen_q, double gamma) {
  return next_chosen_q ? reward + gamma * *next_chosen_q : reward;
}

double q_learning_target(double reward, std::span<const double> next_qs, double gamma) {
  if (next_qs.empty()) return reward;
  return reward + gamma * *std::max_element(next_qs.begin(), next_qs.end());
}

double epsilon_schedule(int batch_index, int total_batches, double start) {
  require(total_batches > 0 && batch_index >= 0, "epsilon_schedule: bad batch index");
  if (total_batches == 1) return start;
  const double t = std::min(1.0, static_cast<double>(batch_index) / (total_batches - 1));
  return start * (1.0 - t);
}

int warmup_batches(int total_batches) {
  const int w = std::max(50, static_cast<int>(std::ceil(0.02 * total_batches)));
  return std::max(1, std::min(w, total_batches / 2));
}

double lr_schedule(int batch_index, int total_batches, double base_lr) {
  require(total_batches > 0 && batch_index >= 0, "lr_schedule: bad batch index");
  const double floor = base_lr / 100.0;
  if (total_batches == 1) return floor;
  const int w = warmup_batches(total_batches);
  if (batch_index < w) return base_lr * batch_index / w;
  const int last = total_batches - 1;
  if (last <= w) return floor;
  const double progress = std::min(1.0, static_cast<double>(batch_index - w) / (last - w));
  return floor + (base_lr - floor) * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

std::string to_string(ValueMethod method) {
  switch (method) {
    case ValueMethod::kMonteCarlo: return "mc_q";
    case ValueMethod::kSarsa: return "sarsa";
    case ValueMethod::kQLearning: return "q_learning";
  }
  return "?";
}

}  // namespace big2::rl
