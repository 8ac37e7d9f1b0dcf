#include "big2/eval.hpp"

#include <cmath>

#include "big2/error.hpp"

namespace big2 {
namespace {

constexpr std::uint64_t kSeatStream = 0xE5EA7;
constexpr std::uint64_t kPlayStream = 0xB4A7C;

}  // namespace

AgentPtr evaluation_agent(const AgentPtr& agent) {
  if (const auto* q = dynamic_cast<const QAgent*>(agent.get()); q && q->epsilon() != 0.0)
    return std::make_shared<QAgent>(q->params(), 0.0, q->name());
  return agent;
}

TournamentResult tournament(const AgentPtr& agent, const AgentPtr& opponent, int games, std::uint64_t seed,
                            int workers) {
  require(games > 0, "tournament: need at least one game");
  require(agent != nullptr && opponent != nullptr, "tournament: missing agent");
  const AgentPtr evaluated = evaluation_agent(agent);
  TournamentResult r;
  r.agent = evaluated->name();
  r.opponent = opponent->name();
  r.seed = seed;
  r.games = games;
  r.seats.assign(static_cast<std::size_t>(games), 0);
  r.scores.assign(static_cast<std::size_t>(games), 0);
  r.all_scores.assign(static_cast<std::size_t>(games), TerminalScores{});
  parallel_for(games, workers, [&](int g) {
    const std::uint64_t game_seed = derive_seed(seed, static_cast<std::uint64_t>(g));
    Rng seat_rng(derive_seed(game_seed, kSeatStream));
    const int seat = static_cast<int>(seat_rng.uniform_index(kNumPlayers));
    std::array<AgentPtr, kNumPlayers> agents;
    agents.fill(opponent);
    agents[seat] = evaluated;
    const EpisodeResult e = play_episode(agents, {}, game_seed, false);
    const auto i = static_cast<std::size_t>(g);
    r.seats[i] = seat;
    r.scores[i] = e.scores[seat];
    r.all_scores[i] = e.scores;
  });
  double sum = 0.0;
  for (int s : r.scores) {
    sum += s;
    r.wins += s > 0;
  }
  const double n = games;
  r.win_rate = r.wins / n;
  r.avg_score = sum / n;
  r.win_rate_ci = 1.96 * std::sqrt(r.win_rate * (1.0 - r.win_rate) / n);
  if (games > 1) {
    double var = 0.0;
    for (int s : r.scores) var += (s - r.avg_score) * (s - r.avg_score);
    r.avg_score_ci = 1.96 * std::sqrt(var / (n - 1.0) / n);
  }
  return r;
}

TournamentResult tournament(const AgentPtr& agent, const std::string& opponent, int games, std::uint64_t seed,
                            int workers) {
  return tournament(agent, make_heuristic_agent(opponent), games, seed, workers);
}

void Histogram::add(std::size_t k, std::uint64_t n) {
  if (counts.size() <= k) counts.resize(k + 1, 0);
  counts[k] += n;
}

void Histogram::merge(const Histogram& other) {
  for (std::size_t k = 0; k < other.counts.size(); ++k)
    if (other.counts[k]) add(k, other.counts[k]);
}

std::uint64_t Histogram::total() const {
  std::uint64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

double Histogram::mean() const {
  const std::uint64_t t = total();
  if (t == 0) return 0.0;
  double s = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) s += static_cast<double>(k) * static_cast<double>(counts[k]);
  return s / static_cast<double>(t);
}

std::size_t Histogram::percentile(double q) const {
  require(q > 0.0 && q <= 100.0, "percentile: q outside (0, 100]");
  const std::uint64_t t = total();
  if (t == 0) return 0;
  const auto rank = static_cast<std::uint64_t>(std::ceil(q / 100.0 * static_cast<double>(t)));
  std::uint64_t seen = 0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    seen += counts[k];
    if (seen >= rank) return k;
  }
  return max();
}

std::size_t Histogram::max() const {
  for (std::size_t k = counts.size(); k-- > 0;)
    if (counts[k]) return k;
  return 0;
}

BranchingStats branching_stats(int games, std::uint64_t seed, int workers) {
  require(games > 0, "branching_stats: need at least one game");
  std::vector<BranchingStats> parts(static_cast<std::size_t>(games));
  parallel_for(games, workers, [&](int g) {
    const std::uint64_t game_seed = derive_seed(seed, static_cast<std::uint64_t>(g));
    Rng rng(derive_seed(game_seed, kPlayStream));
    GameState s = deal(game_seed);
    std::vector<Combination> legal;
    BranchingStats& out = parts[static_cast<std::size_t>(g)];
    while (!s.terminal()) {
      legal_actions(s, legal);
      out.all.add(legal.size());
      (s.has_control() ? out.control : out.response).add(legal.size());
      apply_action_in_place(s, legal[rng.uniform_index(legal.size())]);
    }
  });
  BranchingStats total;
  total.games = games;
  total.seed = seed;
  for (const BranchingStats& p : parts) {
    total.all.merge(p.all);
    total.control.merge(p.control);
    total.response.merge(p.response);
  }
  return total;
}

double entropy_probe(const ParamsPtr& policy, int n_states, std::uint64_t seed) {
  require(n_states > 0, "entropy_probe: need at least one state");
  const PolicyAgent agent(policy);
  double sum = 0.0;
  int probed = 0;
  std::vector<Combination> legal;
  for (std::uint64_t g = 0; probed < n_states; ++g) {
    const std::uint64_t game_seed = derive_seed(seed, g);
    Rng rng(derive_seed(game_seed, kPlayStream));
    GameState s = deal(game_seed);
    while (!s.terminal() && probed < n_states) {
      legal_actions(s, legal);
      const auto features = encode_actions(legal);
      const Decision d = agent.decide(encode_observation(s, s.current_player), legal, features, rng);
      sum += d.entropy;
      ++probed;
      apply_action_in_place(s, legal[d.index]);
    }
  }
  return sum / probed;
}

}  // namespace big2
