#pragma once

#include <iosfwd>
#include <string>

#include "big2/config.hpp"

namespace big2 {

// Files under RunConfig::output_dir:
//   config.json        resolved configuration
//   metrics.jsonl      one record per batch (deterministic content)
//   timing.jsonl       wall-clock seconds per batch
//   entropy.jsonl      policy entropy probes
//   eval/batch_N.json  tournament snapshots
//   state/             latest resumable state (network, optimizer, target net, pool)
//   final.ckpt         parameters and optimizer after the last batch
struct TrainOptions {
  bool resume = true;           // continue from state/ when it matches the config
  int max_batches = -1;         // stop after this many batches in this call (-1: run to the end)
  std::ostream* progress = nullptr;
};

struct TrainSummary {
  int start_batch = 0;  // batches already done when the call began
  int completed = 0;    // batches done when it returned
  bool finished = false;
  std::string final_checkpoint;
};

// Throws ConfigError for an invalid config or a state directory written by
// a different config, NumericalFault when training diverges. A fault leaves
// the last saved state resumable.
TrainSummary train(const RunConfig& cfg, const TrainOptions& options = {});

// Builds an evaluation agent from a checkpoint: a sampling (or greedy)
// policy agent for PPO networks, a greedy Q agent for value networks.
AgentPtr agent_from_checkpoint(const std::string& path, bool greedy_policy = false);

}  // namespace big2
