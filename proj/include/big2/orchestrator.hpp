#pragma once

#include <array>
#include <deque>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "big2/agents.hpp"
#include "big2/nn/network.hpp"
#include "big2/rl/records.hpp"
#include "big2/transcript.hpp"

namespace big2 {

using ParamsPtr = std::shared_ptr<const nn::Parameters<float>>;

// Samples from the softmax over legal candidates (or takes the argmax when
// greedy). Records the log-probability and value estimate.
class PolicyAgent final : public Agent {
 public:
  PolicyAgent(ParamsPtr params, bool greedy = false, std::string name = "policy");
  std::string name() const override { return name_; }
  bool needs_features() const override { return true; }
  Decision decide(const Observation& obs, std::span<const Combination> legal,
                  std::span<const ActionFeatures> features, Rng& rng) const override;
  const ParamsPtr& params() const { return params_; }
  bool greedy() const { return greedy_; }

 private:
  ParamsPtr params_;
  bool greedy_;
  std::string name_;
};

// Epsilon-greedy over Q values of the legal candidates.
class QAgent final : public Agent {
 public:
  QAgent(ParamsPtr params, double epsilon, std::string name = "q");
  std::string name() const override { return name_; }
  bool needs_features() const override { return true; }
  Decision decide(const Observation& obs, std::span<const Combination> legal,
                  std::span<const ActionFeatures> features, Rng& rng) const override;
  const ParamsPtr& params() const { return params_; }
  double epsilon() const { return epsilon_; }

 private:
  ParamsPtr params_;
  double epsilon_;
  std::string name_;
};

using AgentPtr = std::shared_ptr<const Agent>;

enum class CurriculumKind { kCurrentSelfPlay, kCheckpointSelfPlay, kFixedOpponent };

struct Curriculum {
  CurriculumKind kind = CurriculumKind::kCurrentSelfPlay;
  std::string opponent = "smart";     // fixed-opponent name
  double current_probability = 0.5;   // checkpoint play: chance an opponent seat is the current policy
};

std::string to_string(const Curriculum& c);

struct PoolEntry {
  int batch = 0;
  ParamsPtr params;
};

// Bounded ring of past parameter snapshots; the oldest is evicted first.
class CheckpointPool {
 public:
  static constexpr std::size_t kCapacity = 20;
  explicit CheckpointPool(std::size_t capacity = kCapacity) : capacity_(capacity) {}

  // Deep-copies `params`.
  void add(const nn::Parameters<float>& params, int batch);
  // Snapshots when (batch + 1) is a multiple of `period`; returns whether it did.
  bool maybe_checkpoint(const nn::Parameters<float>& params, int batch, int period);

  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  const PoolEntry& operator[](std::size_t i) const { return entries_[i]; }
  const std::deque<PoolEntry>& entries() const { return entries_; }
  void clear() { entries_.clear(); }

 private:
  std::size_t capacity_;
  std::deque<PoolEntry> entries_;
};

// Snapshot interval that spreads the pool over the whole run.
int checkpoint_period(int total_batches);

struct SeatAssignment {
  std::array<AgentPtr, kNumPlayers> agents;
  std::array<bool, kNumPlayers> learner{};
};

// Builds an opponent agent for a pool snapshot.
using SnapshotAgentFactory = std::function<AgentPtr(const ParamsPtr&)>;

SeatAssignment assign_seats(const Curriculum& curriculum, const AgentPtr& policy, const CheckpointPool& pool,
                            const SnapshotAgentFactory& from_snapshot, Rng& rng);

struct EpisodeResult {
  Transcript transcript;
  std::vector<rl::DecisionRecord> records;  // learner seats only, grouped by seat
  TerminalScores scores{};
};

// Plays deal(seed) to completion. Agent randomness comes from a stream
// derived from the seed. Throws ContractViolation (with the transcript so
// far) when an agent answers with an out-of-range index.
EpisodeResult play_episode(const std::array<AgentPtr, kNumPlayers>& agents,
                           const std::array<bool, kNumPlayers>& learner, std::uint64_t seed,
                           bool record = true);

struct CollectOptions {
  int episodes = 64;
  std::uint64_t run_seed = 0;
  int batch_index = 0;
  int workers = 1;
};

std::uint64_t episode_seed(std::uint64_t run_seed, int batch_index, int episode);

// Plays the batch's episodes (in parallel when workers > 1; the result does
// not depend on the worker count) and aggregates learner records.
rl::TrajectoryBatch collect_batch(const Curriculum& curriculum, const AgentPtr& policy, const CheckpointPool& pool,
                                  const SnapshotAgentFactory& from_snapshot, const CollectOptions& options);

// Runs `n` independent jobs on up to `workers` threads; job i writes only
// its own output slot.
void parallel_for(int n, int workers, const std::function<void(int)>& job);

}  // namespace big2
