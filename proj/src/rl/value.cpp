#include <algorithm>
#include <cmath>

#include "big2/error.hpp"
#include "big2/rl/rl.hpp"

namespace big2::rl {
namespace {

constexpr std::size_t kChunk = 512;

std::vector<nn::Sample> chunk_samples(const TrajectoryBatch& batch, std::size_t begin, std::size_t end) {
  std::vector<nn::Sample> samples;
  samples.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) samples.push_back({&batch.records[i].obs, batch.records[i].candidates});
  return samples;
}

}  // namespace

std::vector<std::vector<float>> score_records(const TrajectoryBatch& batch, const nn::Parameters<float>& net) {
  std::vector<std::vector<float>> out(batch.size());
  for (std::size_t begin = 0; begin < batch.size(); begin += kChunk) {
    const std::size_t end = std::min(batch.size(), begin + kChunk);
    const auto samples = chunk_samples(batch, begin, end);
    const auto cache = nn::forward(net, std::span<const nn::Sample>(samples));
    for (std::size_t i = begin; i < end; ++i) {
      const auto s = cache.sample_scores(static_cast<int>(i - begin));
      out[i].assign(s.begin(), s.end());
    }
  }
  return out;
}

std::vector<double> value_targets(const TrajectoryBatch& batch, ValueMethod method, const ValueConfig& cfg,
                                  const nn::Parameters<float>& target_net) {
  std::vector<double> targets(batch.size(), 0.0);
  if (method == ValueMethod::kMonteCarlo) {
    std::vector<double> rewards;
    for (const TrajectorySpan& t : batch.trajectories) {
      rewards.clear();
      for (std::size_t i = t.begin; i < t.end; ++i) rewards.push_back(batch.records[i].reward / cfg.reward_divisor);
      const auto y = mc_q_target(rewards, cfg.gamma);
      std::copy(y.begin(), y.end(), targets.begin() + t.begin);
    }
    return targets;
  }
  const auto q = score_records(batch, target_net);
  std::vector<double> next_qs;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const DecisionRecord& r = batch.records[i];
    const double reward = r.reward / cfg.reward_divisor;
    if (r.next < 0) {
      targets[i] = reward;
      continue;
    }
    const auto& next_scores = q[static_cast<std::size_t>(r.next)];
    if (method == ValueMethod::kSarsa) {
      const double chosen = next_scores[static_cast<std::size_t>(batch.records[r.next].chosen)];
      targets[i] = sarsa_target(reward, &chosen, cfg.gamma);
    } else {
      next_qs.assign(next_scores.begin(), next_scores.end());
      targets[i] = q_learning_target(reward, next_qs, cfg.gamma);
    }
  }
  return targets;
}

double value_loss(const TrajectoryBatch& batch, std::span<const double> targets, const nn::Parameters<float>& qnet,
                  nn::Buffer<float>* grads) {
  require(targets.size() == batch.size(), "value_loss: targets misaligned");
  if (grads) require(grads->size() == qnet.size(), "value_loss: gradient buffer size mismatch");
  if (batch.empty()) return 0.0;
  const double n = static_cast<double>(batch.size());
  double loss = 0.0;
  for (std::size_t begin = 0; begin < batch.size(); begin += kChunk) {
    const std::size_t end = std::min(batch.size(), begin + kChunk);
    const auto samples = chunk_samples(batch, begin, end);
    const auto cache = nn::forward(qnet, std::span<const nn::Sample>(samples));
    std::vector<float> d_scores(cache.scores.size(), 0.0f);
    for (std::size_t i = begin; i < end; ++i) {
      const int b = static_cast<int>(i - begin);
      const int k = cache.cand_offset[b] + batch.records[i].chosen;
      const double err = static_cast<double>(cache.scores[k]) - targets[i];
      loss += err * err;
      d_scores[k] = static_cast<float>(2.0 * err / n);
    }
    if (grads) nn::backward<float>(qnet, cache, d_scores, {}, *grads);
  }
  loss /= n;
  if (!std::isfinite(loss)) throw NumericalFault("value loss is not finite");
  return loss;
}

ValueStats value_update(const TrajectoryBatch& batch, nn::Parameters<float>& qnet,
                        const nn::Parameters<float>& target_net, nn::Adam& optimizer, ValueMethod method,
                        const ValueConfig& cfg, double lr) {
  cfg.validate();
  ValueStats stats;
  if (batch.empty()) return stats;
  const std::vector<double> targets = value_targets(batch, method, cfg, target_net);
  for (double y : targets) stats.mean_target += y;
  stats.mean_target /= static_cast<double>(targets.size());
  nn::Buffer<float> grads(qnet.size(), 0.0f);
  stats.loss = value_loss(batch, targets, qnet, &grads);
  nn::assert_finite(std::span<const float>(grads), "value gradients");
  stats.grad_norm = nn::clip_grad_norm(grads, cfg.max_grad_norm);
  optimizer.step(qnet.values, grads, lr);
  nn::assert_finite(std::span<const float>(qnet.values), "Q-network parameters");
  return stats;
}

}  // namespace big2::rl
