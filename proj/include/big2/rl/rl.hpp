#pragma once

#include <span>
#include <string>
#include <vector>

#include "big2/nn/adam.hpp"
#include "big2/nn/network.hpp"
#include "big2/rl/records.hpp"
#include "big2/rng.hpp"

namespace big2::rl {

inline constexpr double kValueRewardDivisor = 13.0;

struct PPOConfig {
  double clip = 0.2;
  double gamma = 0.99;
  double lambda = 0.95;
  double lr = 3e-5;
  int epochs = 4;
  int minibatch = 256;
  double value_coef = 0.5;
  double entropy_coef = 0.0;
  double max_grad_norm = 0.5;
  void validate() const;
};

struct ValueConfig {
  double lr = 3e-5;
  double gamma = 0.99;
  double epsilon_start = 0.5;
  int target_sync = 10;  // batches
  double max_grad_norm = 1.0;
  double reward_divisor = kValueRewardDivisor;
  void validate() const;
};

enum class ValueMethod { kMonteCarlo, kSarsa, kQLearning };

// --- Targets -------------------------------------------------------------

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// GAE over one seat's decision sequence; the value after the last decision
// is zero. Throws ContractViolation if the lengths differ.
GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values, double gamma,
                      double lambda);

// Discounted return from each step of one trajectory.
std::vector<double> mc_q_target(std::span<const double> rewards, double gamma);

// r + gamma * next_q, or r when there is no next decision.
double sarsa_target(double reward, const double* next_chosen_q, double gamma);
// r + gamma * max(next_qs), or r when next_qs is empty (terminal).
double q_learning_target(double reward, std::span<const double> next_qs, double gamma);

// --- Schedules -----------------------------------------------------------

// Linear from `start` at batch 0 to 0 at the final batch.
double epsilon_schedule(int batch_index, int total_batches, double start = 0.5);
// Warmup length: max(50, 2% of the run), capped at half the run.
int warmup_batches(int total_batches);
// Linear warmup from 0, then cosine decay to base_lr / 100 at the final batch.
double lr_schedule(int batch_index, int total_batches, double base_lr);

// --- Updates -------------------------------------------------------------

struct PPOStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
  double grad_norm = 0.0;  // mean pre-clip norm
  int minibatches = 0;
};

// Advantages and returns for every record of the batch (GAE per trajectory
// on the collected values; advantages normalized over the whole batch).
struct PPOTargets {
  std::vector<double> advantages;
  std::vector<double> returns;
};
PPOTargets ppo_targets(const TrajectoryBatch& batch, const PPOConfig& cfg);

// Pools the records of all seats and episodes, shuffles them each epoch and
// steps the optimizer once per minibatch (the last partial one is kept).
// Throws NumericalFault on a non-finite loss or gradient.
PPOStats ppo_update(const TrajectoryBatch& batch, nn::Parameters<float>& params, nn::Adam& optimizer,
                    const PPOConfig& cfg, double lr, Rng& rng);

// Loss pieces evaluated without touching parameters (for diagnostics and
// tests): the same objective ppo_update minimizes on a given record subset.
struct PPOLoss {
  double total = 0.0;
  double policy = 0.0;
  double value = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
};
PPOLoss ppo_loss(const TrajectoryBatch& batch, std::span<const std::size_t> indices, const PPOTargets& targets,
                 const nn::Parameters<float>& params, const PPOConfig& cfg, nn::Buffer<float>* grads);

struct ValueStats {
  double loss = 0.0;
  double mean_target = 0.0;
  double grad_norm = 0.0;
};

// Regression targets for every record (rewards already divided by the
// configured divisor). The target network is used by SARSA and Q-learning.
std::vector<double> value_targets(const TrajectoryBatch& batch, ValueMethod method, const ValueConfig& cfg,
                                  const nn::Parameters<float>& target_net);

// One optimizer step on the mean squared error of the chosen action's Q.
ValueStats value_update(const TrajectoryBatch& batch, nn::Parameters<float>& qnet,
                        const nn::Parameters<float>& target_net, nn::Adam& optimizer, ValueMethod method,
                        const ValueConfig& cfg, double lr);

// Mean squared error of Q(o, chosen) against `targets`; fills grads (scaled
// for the mean) when non-null.
double value_loss(const TrajectoryBatch& batch, std::span<const double> targets, const nn::Parameters<float>& qnet,
                  nn::Buffer<float>* grads);

// Q values of every candidate of every record, record-major.
std::vector<std::vector<float>> score_records(const TrajectoryBatch& batch, const nn::Parameters<float>& net);

std::string to_string(ValueMethod method);

}  // namespace big2::rl
