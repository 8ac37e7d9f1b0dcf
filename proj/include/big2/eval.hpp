#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "big2/orchestrator.hpp"

namespace big2 {

struct TournamentResult {
  std::string agent;
  std::string opponent;
  std::uint64_t seed = 0;
  int games = 0;
  int wins = 0;
  double win_rate = 0.0;
  double avg_score = 0.0;
  double win_rate_ci = 0.0;   // 95% normal-approximation half-width
  double avg_score_ci = 0.0;  // 95% half-width from the sample standard deviation
  std::vector<int> seats;      // evaluated seat per game
  std::vector<int> scores;     // evaluated seat's score per game
  std::vector<TerminalScores> all_scores;

  // Beats the 25% chance level with a positive mean score.
  bool success() const { return win_rate > 0.25 && avg_score > 0.0; }
};

// Q agents are evaluated greedily; any other agent is used as given.
AgentPtr evaluation_agent(const AgentPtr& agent);

// `games` four-player games with the agent in one uniformly random seat and
// copies of `opponent` in the other three. Game g uses the deal
// derive_seed(seed, g), so the result does not depend on the worker count.
TournamentResult tournament(const AgentPtr& agent, const AgentPtr& opponent, int games, std::uint64_t seed,
                            int workers = 1);
TournamentResult tournament(const AgentPtr& agent, const std::string& opponent, int games, std::uint64_t seed,
                            int workers = 1);

// counts[k] = number of decision points with exactly k legal actions.
struct Histogram {
  std::vector<std::uint64_t> counts;

  void add(std::size_t k, std::uint64_t n = 1);
  void merge(const Histogram& other);
  std::uint64_t total() const;
  double mean() const;
  // Nearest-rank percentile on the exact histogram, q in (0, 100].
  std::size_t percentile(double q) const;
  std::size_t max() const;
};

struct BranchingStats {
  int games = 0;
  std::uint64_t seed = 0;
  Histogram all;
  Histogram control;   // the acting player leads freely
  Histogram response;  // an active trick must be beaten or passed
};

// Uniform random legal play in every seat; game g is dealt from
// derive_seed(seed, g).
BranchingStats branching_stats(int games, std::uint64_t seed, int workers = 1);

// Mean policy entropy over the first `n_states` decision points of
// self-play games sampled from the policy itself.
double entropy_probe(const ParamsPtr& policy, int n_states, std::uint64_t seed);

}  // namespace big2
