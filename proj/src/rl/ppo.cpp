#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "big2/error.hpp"
#include "big2/nn/categorical.hpp"
#include "big2/rl/rl.hpp"

namespace big2::rl {

PPOTargets ppo_targets(const TrajectoryBatch& batch, const PPOConfig& cfg) {
  PPOTargets out;
  out.advantages.assign(batch.size(), 0.0);
  out.returns.assign(batch.size(), 0.0);
  std::vector<double> rewards, values;
  for (const TrajectorySpan& t : batch.trajectories) {
    rewards.clear();
    values.clear();
    for (std::size_t i = t.begin; i < t.end; ++i) {
      rewards.push_back(batch.records[i].reward);
      values.push_back(batch.records[i].value);
    }
    const GaeResult gae = compute_gae(rewards, values, cfg.gamma, cfg.lambda);
    std::copy(gae.advantages.begin(), gae.advantages.end(), out.advantages.begin() + t.begin);
    std::copy(gae.returns.begin(), gae.returns.end(), out.returns.begin() + t.begin);
  }
  if (out.advantages.empty()) return out;
  const double n = static_cast<double>(out.advantages.size());
  const double mean = std::accumulate(out.advantages.begin(), out.advantages.end(), 0.0) / n;
  double var = 0.0;
  for (double a : out.advantages) var += (a - mean) * (a - mean);
  const double stddev = std::sqrt(var / n);
  for (double& a : out.advantages) a = (a - mean) / (stddev + 1e-8);
  return out;
}

PPOLoss ppo_loss(const TrajectoryBatch& batch, std::span<const std::size_t> indices, const PPOTargets& targets,
                 const nn::Parameters<float>& params, const PPOConfig& cfg, nn::Buffer<float>* grads) {
  require(params.config().value_head, "ppo_loss: policy network needs a value head");
  require(!indices.empty(), "ppo_loss: empty minibatch");
  std::vector<nn::Sample> samples;
  samples.reserve(indices.size());
  for (std::size_t i : indices) samples.push_back({&batch.records[i].obs, batch.records[i].candidates});
  const nn::ForwardCache<float> cache = nn::forward(params, std::span<const nn::Sample>(samples));

  const double n = static_cast<double>(indices.size());
  const double eps = cfg.clip;
  PPOLoss loss;
  std::vector<float> d_scores(cache.scores.size(), 0.0f);
  std::vector<float> d_values(cache.values.size(), 0.0f);
  for (std::size_t b = 0; b < indices.size(); ++b) {
    const DecisionRecord& rec = batch.records[indices[b]];
    const auto logits = cache.sample_scores(static_cast<int>(b));
    const std::vector<double> logp = nn::log_softmax(logits);
    const auto a = static_cast<std::size_t>(rec.chosen);
    const double adv = targets.advantages[indices[b]];
    const double ret = targets.returns[indices[b]];

    const double ratio = std::exp(logp[a] - rec.log_prob);
    const double surr1 = ratio * adv;
    const double surr2 = std::clamp(ratio, 1.0 - eps, 1.0 + eps) * adv;
    loss.policy -= std::min(surr1, surr2);
    if (std::abs(ratio - 1.0) > eps) loss.clip_fraction += 1.0;
    loss.approx_kl += rec.log_prob - logp[a];

    double h = 0.0;
    for (double lp : logp) h -= std::exp(lp) * lp;
    loss.entropy += h;

    const double v = cache.values[b];
    const double v_old = rec.value;
    const double v_clipped = v_old + std::clamp(v - v_old, -eps, eps);
    const double l_plain = (v - ret) * (v - ret);
    const double l_clipped = (v_clipped - ret) * (v_clipped - ret);
    loss.value += std::max(l_plain, l_clipped);

    if (grads) {
      const double d_logp = surr1 <= surr2 ? -adv * ratio : 0.0;
      const int offset = cache.cand_offset[b];
      for (std::size_t j = 0; j < logp.size(); ++j) {
        const double p = std::exp(logp[j]);
        const double d_pol = d_logp * ((j == a ? 1.0 : 0.0) - p);
        const double d_ent = -p * (logp[j] + h);
        d_scores[offset + j] = static_cast<float>((d_pol - cfg.entropy_coef * d_ent) / n);
      }
      double d_v = 0.0;
      if (l_plain >= l_clipped) d_v = 2.0 * (v - ret);
      else if (std::abs(v - v_old) < eps) d_v = 2.0 * (v_clipped - ret);
      d_values[b] = static_cast<float>(cfg.value_coef * d_v / n);
    }
  }
  loss.policy /= n;
  loss.value /= n;
  loss.entropy /= n;
  loss.clip_fraction /= n;
  loss.approx_kl /= n;
  loss.total = loss.policy + cfg.value_coef * loss.value - cfg.entropy_coef * loss.entropy;
  if (!std::isfinite(loss.total)) {
    std::ostringstream msg;
    msg << "PPO loss is not finite (policy " << loss.policy << ", value " << loss.value << ", entropy "
        << loss.entropy << ")";
    throw NumericalFault(msg.str());
  }
  if (grads) {
    require(grads->size() == params.size(), "ppo_loss: gradient buffer size mismatch");
    nn::backward<float>(params, cache, d_scores, d_values, *grads);
  }
  return loss;
}

PPOStats ppo_update(const TrajectoryBatch& batch, nn::Parameters<float>& params, nn::Adam& optimizer,
                    const PPOConfig& cfg, double lr, Rng& rng) {
  cfg.validate();
  PPOStats stats;
  if (batch.empty()) return stats;
  const PPOTargets targets = ppo_targets(batch, cfg);
  std::vector<std::size_t> order(batch.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  nn::Buffer<float> grads(params.size());
  const auto mb = static_cast<std::size_t>(cfg.minibatch);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < order.size(); start += mb) {
      const std::size_t stop = std::min(order.size(), start + mb);
      std::fill(grads.begin(), grads.end(), 0.0f);
      const PPOLoss loss = ppo_loss(batch, std::span<const std::size_t>(order).subspan(start, stop - start),
                                    targets, params, cfg, &grads);
      nn::assert_finite(std::span<const float>(grads), "PPO gradients");
      stats.grad_norm += nn::clip_grad_norm(grads, cfg.max_grad_norm);
      optimizer.step(params.values, grads, lr);
      stats.policy_loss += loss.policy;
      stats.value_loss += loss.value;
      stats.entropy += loss.entropy;
      stats.clip_fraction += loss.clip_fraction;
      stats.approx_kl += loss.approx_kl;
      ++stats.minibatches;
    }
  }
  nn::assert_finite(std::span<const float>(params.values), "policy parameters");
  const double m = stats.minibatches;
  stats.policy_loss /= m;
  stats.value_loss /= m;
  stats.entropy /= m;
  stats.clip_fraction /= m;
  stats.approx_kl /= m;
  stats.grad_norm /= m;
  return stats;
}

}  // namespace big2::rl
