#pragma once

#include <cstddef>
#include <vector>

#include "big2/encoders.hpp"
#include "big2/game.hpp"

namespace big2::rl {

// One model-controlled decision point.
struct DecisionRecord {
  Observation obs;
  std::vector<ActionFeatures> candidates;
  int chosen = 0;
  float log_prob = 0.0f;  // policy runs
  float value = 0.0f;     // policy runs
  // Raw terminal score of the seat on its last record, zero elsewhere.
  float reward = 0.0f;
  // Index (within the owning batch) of the same seat's next decision, or -1
  // when this is the seat's last decision of the game.
  int next = -1;
  int seat = 0;
  int episode = 0;
  int step = 0;  // position within the seat's trajectory
};

// A seat's decisions within one episode occupy records[begin, end).
struct TrajectorySpan {
  int episode = 0;
  int seat = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
};

struct TrajectoryBatch {
  std::vector<DecisionRecord> records;
  std::vector<TrajectorySpan> trajectories;
  std::vector<TerminalScores> scores;  // one per episode

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }

  // Appends one episode's records. `records` must already be grouped by seat
  // with steps in order and `next` indices local to the vector.
  void append_episode(std::vector<DecisionRecord> episode_records, const TerminalScores& episode_scores);
};

// Checks the structural invariants (chosen index in range, contiguous seat
// trajectories with increasing steps, consistent next links, terminal-only
// rewards). Returns false on any violation.
bool check_batch(const TrajectoryBatch& batch);

}  // namespace big2::rl
