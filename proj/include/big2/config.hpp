#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "big2/nn/network.hpp"
#include "big2/orchestrator.hpp"
#include "big2/rl/rl.hpp"

namespace big2 {

enum class Algorithm { kPPO, kMonteCarlo, kSarsa, kQLearning };

std::string to_string(Algorithm a);
// Throws ConfigError for an unknown name.
Algorithm parse_algorithm(const std::string& name);
bool is_value_method(Algorithm a);
rl::ValueMethod value_method(Algorithm a);

struct RunConfig {
  std::string name = "run";
  Algorithm algorithm = Algorithm::kPPO;
  Curriculum curriculum;
  int total_batches = 5000;
  int episodes_per_batch = 64;
  rl::PPOConfig ppo;
  rl::ValueConfig value;
  nn::NetworkConfig network;  // value_head follows the algorithm
  std::uint64_t seed = 0;
  std::string output_dir = "runs/default";
  int workers = 1;
  bool deterministic = true;  // forces a single worker

  int checkpoint_every = 100;  // resumable training state
  int pool_period = 0;         // 0: spread the pool over the run
  int entropy_every = 100;
  int entropy_states = 1000;
  int eval_every = 250;
  int eval_games = 200;
  std::vector<std::string> eval_opponents{"random", "greedy", "smart"};
  bool eval_greedy_policy = false;

  int effective_workers() const { return deterministic ? 1 : workers; }
  int effective_pool_period() const { return pool_period > 0 ? pool_period : checkpoint_period(total_batches); }
  // Network config with the head matching the algorithm.
  nn::NetworkConfig network_config() const;
  // Throws ConfigError on any out-of-range field.
  void validate() const;
};

// JSON text to config. Unknown keys at any level and type mismatches throw
// ConfigError; missing keys keep their defaults.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);
// BIG2_SEED and BIG2_WORKERS replace the corresponding fields when set.
void apply_env_overrides(RunConfig& cfg);
// Fully resolved config as pretty-printed JSON; parse_run_config inverts it.
std::string to_json(const RunConfig& cfg);

}  // namespace big2
