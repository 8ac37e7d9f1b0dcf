#include "big2/rl/records.hpp"

namespace big2::rl {

void TrajectoryBatch::append_episode(std::vector<DecisionRecord> episode_records,
                                     const TerminalScores& episode_scores) {
  const std::size_t base = records.size();
  const int episode = static_cast<int>(scores.size());
  scores.push_back(episode_scores);
  for (std::size_t i = 0; i < episode_records.size(); ++i) {
    DecisionRecord& r = episode_records[i];
    r.episode = episode;
    if (r.next >= 0) r.next += static_cast<int>(base);
    if (trajectories.empty() || trajectories.back().episode != episode ||
        trajectories.back().seat != r.seat)
      trajectories.push_back({episode, r.seat, base + i, base + i});
    trajectories.back().end = base + i + 1;
    records.push_back(std::move(r));
  }
}

bool check_batch(const TrajectoryBatch& batch) {
  std::size_t covered = 0;
  for (const TrajectorySpan& t : batch.trajectories) {
    if (t.begin != covered || t.end <= t.begin || t.end > batch.records.size()) return false;
    covered = t.end;
    for (std::size_t i = t.begin; i < t.end; ++i) {
      const DecisionRecord& r = batch.records[i];
      if (r.seat != t.seat || r.episode != t.episode) return false;
      if (r.chosen < 0 || static_cast<std::size_t>(r.chosen) >= r.candidates.size()) return false;
      if (r.step != static_cast<int>(i - t.begin)) return false;
      const bool last = i + 1 == t.end;
      if (last != (r.next < 0)) return false;
      if (!last && r.next != static_cast<int>(i + 1)) return false;
      if (!last && r.reward != 0.0f) return false;
    }
  }
  return covered == batch.records.size();
}

}  // namespace big2::rl
