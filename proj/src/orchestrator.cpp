#include "big2/orchestrator.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "big2/error.hpp"
#include "big2/nn/categorical.hpp"

namespace big2 {
namespace {

constexpr std::uint64_t kAgentStream = 0xA6E7;
constexpr std::uint64_t kSeatStream = 0x5EA7;

nn::ForwardCache<float> evaluate(const nn::Parameters<float>& params, const Observation& obs,
                                 std::span<const ActionFeatures> features) {
  const nn::Sample sample{&obs, features};
  return nn::forward(params, std::span<const nn::Sample>(&sample, 1));
}

}  // namespace

PolicyAgent::PolicyAgent(ParamsPtr params, bool greedy, std::string name)
    : params_(std::move(params)), greedy_(greedy), name_(std::move(name)) {
  require(params_ != nullptr, "PolicyAgent: null parameters");
  require(params_->config().value_head, "PolicyAgent: network has no value head");
}

Decision PolicyAgent::decide(const Observation& obs, std::span<const Combination> legal,
                             std::span<const ActionFeatures> features, Rng& rng) const {
  require(!legal.empty() && features.size() == legal.size(), "PolicyAgent: features do not match legal set");
  const auto cache = evaluate(*params_, obs, features);
  const auto logits = cache.sample_scores(0);
  Decision d;
  d.value = cache.values[0];
  if (greedy_) {
    d.index = nn::argmax(logits);
    const auto logp = nn::log_softmax(logits);
    d.log_prob = logp[d.index];
    d.entropy = nn::entropy(logits);
  } else {
    const auto s = nn::sample_action(logits, rng);
    d.index = s.index;
    d.log_prob = s.log_prob;
    d.entropy = s.entropy;
  }
  return d;
}

QAgent::QAgent(ParamsPtr params, double epsilon, std::string name)
    : params_(std::move(params)), epsilon_(epsilon), name_(std::move(name)) {
  require(params_ != nullptr, "QAgent: null parameters");
  require(epsilon_ >= 0.0 && epsilon_ <= 1.0, "QAgent: epsilon outside [0, 1]");
}

Decision QAgent::decide(const Observation& obs, std::span<const Combination> legal,
                        std::span<const ActionFeatures> features, Rng& rng) const {
  require(!legal.empty() && features.size() == legal.size(), "QAgent: features do not match legal set");
  Decision d;
  if (epsilon_ > 0.0 && rng.bernoulli(epsilon_)) {
    d.index = static_cast<std::size_t>(rng.uniform_index(legal.size()));
    return d;
  }
  const auto cache = evaluate(*params_, obs, features);
  d.index = nn::argmax(cache.sample_scores(0));
  return d;
}

std::string to_string(const Curriculum& c) {
  switch (c.kind) {
    case CurriculumKind::kCurrentSelfPlay: return "current";
    case CurriculumKind::kCheckpointSelfPlay: return "checkpoint";
    case CurriculumKind::kFixedOpponent: return "fixed:" + c.opponent;
  }
  return "?";
}

void CheckpointPool::add(const nn::Parameters<float>& params, int batch) {
  entries_.push_back({batch, std::make_shared<const nn::Parameters<float>>(params)});
  while (entries_.size() > capacity_) entries_.pop_front();
}

bool CheckpointPool::maybe_checkpoint(const nn::Parameters<float>& params, int batch, int period) {
  require(period > 0, "maybe_checkpoint: period must be positive");
  if ((batch + 1) % period != 0) return false;
  add(params, batch);
  return true;
}

int checkpoint_period(int total_batches) {
  return std::max(1, total_batches / static_cast<int>(CheckpointPool::kCapacity));
}

SeatAssignment assign_seats(const Curriculum& curriculum, const AgentPtr& policy, const CheckpointPool& pool,
                            const SnapshotAgentFactory& from_snapshot, Rng& rng) {
  SeatAssignment out;
  if (curriculum.kind == CurriculumKind::kCurrentSelfPlay) {
    out.agents.fill(policy);
    out.learner.fill(true);
    return out;
  }
  const auto learner = static_cast<int>(rng.uniform_index(kNumPlayers));
  out.learner[learner] = true;
  out.agents[learner] = policy;
  if (curriculum.kind == CurriculumKind::kFixedOpponent) {
    const AgentPtr fixed = make_heuristic_agent(curriculum.opponent);
    for (int s = 0; s < kNumPlayers; ++s)
      if (s != learner) out.agents[s] = fixed;
    return out;
  }
  for (int s = 0; s < kNumPlayers; ++s) {
    if (s == learner) continue;
    if (pool.empty() || rng.bernoulli(curriculum.current_probability)) {
      out.agents[s] = policy;
    } else {
      out.agents[s] = from_snapshot(pool[rng.uniform_index(pool.size())].params);
    }
  }
  return out;
}

EpisodeResult play_episode(const std::array<AgentPtr, kNumPlayers>& agents,
                           const std::array<bool, kNumPlayers>& learner, std::uint64_t seed, bool record) {
  EpisodeResult result;
  result.transcript.seed = seed;
  for (int s = 0; s < kNumPlayers; ++s) {
    require(agents[s] != nullptr, "play_episode: missing agent");
    result.transcript.agents[s] = agents[s]->name();
  }
  Rng rng(derive_seed(seed, kAgentStream));
  GameState state = deal(seed);
  std::array<std::vector<rl::DecisionRecord>, kNumPlayers> by_seat;
  std::vector<Combination> legal;
  std::vector<ActionFeatures> features;
  while (!state.terminal()) {
    if (state.ply >= kMaxPlies) throw ContractViolation("play_episode: ply cap exceeded");
    const int seat = state.current_player;
    const Agent& agent = *agents[seat];
    legal_actions(state, legal);
    const Observation obs = encode_observation(state, seat);
    const bool keep = record && learner[seat];
    features.clear();
    if (agent.needs_features() || keep) features = encode_actions(legal);
    const Decision d = agent.decide(obs, legal, features, rng);
    if (d.index >= legal.size()) {
      throw ContractViolation("agent '" + agent.name() + "' chose an illegal action at ply " +
                              std::to_string(state.ply) + "; transcript so far: " +
                              to_json_line(result.transcript));
    }
    if (keep) {
      rl::DecisionRecord r;
      r.obs = obs;
      r.candidates = features;
      r.chosen = static_cast<int>(d.index);
      r.log_prob = static_cast<float>(d.log_prob);
      r.value = static_cast<float>(d.value);
      r.seat = seat;
      r.step = static_cast<int>(by_seat[seat].size());
      by_seat[seat].push_back(std::move(r));
    }
    result.transcript.plies.push_back({seat, legal[d.index]});
    apply_action_in_place(state, legal[d.index]);
  }
  result.scores = terminal_scores(state);
  result.transcript.scores = result.scores;
  for (int s = 0; s < kNumPlayers; ++s) {
    auto& seat_records = by_seat[s];
    if (seat_records.empty()) continue;
    seat_records.back().reward = static_cast<float>(result.scores[s]);
    for (auto& r : seat_records) {
      const bool last = &r == &seat_records.back();
      r.next = last ? -1 : static_cast<int>(result.records.size()) + 1;
      result.records.push_back(std::move(r));
    }
  }
  return result;
}

std::uint64_t episode_seed(std::uint64_t run_seed, int batch_index, int episode) {
  return derive_seed(run_seed, static_cast<std::uint64_t>(batch_index), static_cast<std::uint64_t>(episode));
}

void parallel_for(int n, int workers, const std::function<void(int)>& job) {
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        job(i);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> threads;
  const int count = std::min(n, workers);
  for (int t = 0; t < count; ++t) threads.emplace_back(run);
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

rl::TrajectoryBatch collect_batch(const Curriculum& curriculum, const AgentPtr& policy, const CheckpointPool& pool,
                                  const SnapshotAgentFactory& from_snapshot, const CollectOptions& options) {
  require(options.episodes > 0, "collect_batch: need at least one episode");
  std::vector<EpisodeResult> results(static_cast<std::size_t>(options.episodes));
  parallel_for(options.episodes, options.workers, [&](int e) {
    const std::uint64_t seed = episode_seed(options.run_seed, options.batch_index, e);
    Rng seat_rng(derive_seed(seed, kSeatStream));
    const SeatAssignment seats = assign_seats(curriculum, policy, pool, from_snapshot, seat_rng);
    results[static_cast<std::size_t>(e)] = play_episode(seats.agents, seats.learner, seed);
  });
  rl::TrajectoryBatch batch;
  for (auto& r : results) batch.append_episode(std::move(r.records), r.scores);
  return batch;
}

}  // namespace big2
