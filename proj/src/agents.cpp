#include "big2/agents.hpp"

#include <array>

#include "big2/error.hpp"

namespace big2 {
namespace {

constexpr int kNumStraightWindows = 8;

int suit_count(CardSet hand, int suit) {
  int n = 0;
  for (int r = 0; r < kNumRanks; ++r) n += hand.contains(make_card(r, suit));
  return n;
}

CardSet suit_cards(CardSet hand, int suit) {
  CardSet s;
  for (int r = 0; r < kNumRanks; ++r)
    if (hand.contains(make_card(r, suit))) s.insert(make_card(r, suit));
  return s;
}

CardSet rank_cards(CardSet hand, int rank) {
  return CardSet(static_cast<std::uint64_t>(hand.rank_suits(rank)) << (rank * kNumSuits));
}

bool window_complete(CardSet hand, int start) {
  for (int r = start; r < start + 5; ++r)
    if (hand.rank_count(r) == 0) return false;
  return true;
}

bool full_house_possible(CardSet hand) {
  for (int t = 0; t < kNumRanks; ++t) {
    if (hand.rank_count(t) < 3) continue;
    for (int p = 0; p < kNumRanks; ++p)
      if (p != t && hand.rank_count(p) >= 2) return true;
  }
  return false;
}

int count_twos(CardSet cards) { return cards.rank_count(kRankTwo); }

// Exact score in fifths so that ties compare exactly.
int smart_score_fifths(const Combination& action, CardSet hand,
                       const std::optional<Combination>& trick) {
  if (action.size() == hand.size()) return -1000 * 5;
  const Phase phase = phase_of(hand.size());
  int rank_sum = 0;
  action.cards.for_each([&](Card c) { rank_sum += rank_index(c); });
  int score = 4 * rank_sum;
  const int twos = count_twos(action.cards);
  if (phase == Phase::kEarly) score += 5 * 10 * twos;
  if (phase == Phase::kMid) score += 5 * 5 * twos;
  score += static_cast<int>(5 * break_penalty(action, hand));
  score += 5 * 6 * low_orphans(hand - action.cards);
  score -= 5 * 4 * action.size();
  if (phase == Phase::kLate) score -= 5 * 10;
  if (trick && is_very_strong_trick(*trick) && phase == Phase::kLate) score -= 5 * 10;
  if (trick && (trick->type == ComboType::kFourOfAKind ||
                trick->type == ComboType::kStraightFlush))
    score += 5 * 25;
  return score;
}

void require_non_empty(std::span<const Combination> legal) {
  require(!legal.empty(), "agent called with an empty legal action set");
}

}  // namespace

CardSet structure_cards(CardSet hand) {
  CardSet out;
  for (int r = 0; r < kNumRanks; ++r)
    if (hand.rank_count(r) == 4) out |= rank_cards(hand, r);
  if (full_house_possible(hand)) {
    for (int r = 0; r < kNumRanks; ++r)
      if (hand.rank_count(r) >= 2) out |= rank_cards(hand, r);
  }
  for (int s = 0; s < kNumSuits; ++s)
    if (suit_count(hand, s) >= 5) out |= suit_cards(hand, s);
  for (int w = 0; w < kNumStraightWindows; ++w) {
    if (!window_complete(hand, w)) continue;
    for (int r = w; r < w + 5; ++r) out |= rank_cards(hand, r);
  }
  return out;
}

int low_orphans(CardSet hand) {
  const CardSet structured = structure_cards(hand);
  int n = 0;
  hand.for_each([&](Card c) {
    const int r = rank_index(c);
    if (r <= 4 && hand.rank_count(r) == 1 && !structured.contains(c)) ++n;
  });
  return n;
}

// A pair/triple is broken when the action takes some but not all cards of a
// rank held two or more times. A five-card structure is broken when it is
// present in the hand, absent afterwards, and the action is not itself a
// five-card hand realizing that structure.
double break_penalty(const Combination& action, CardSet hand) {
  const Phase phase = phase_of(hand.size());
  const CardSet rest = hand - action.cards;

  bool breaks_group = false;
  for (int r = 0; r < kNumRanks; ++r) {
    const int held = hand.rank_count(r);
    const int used = action.cards.rank_count(r);
    if (held >= 2 && used > 0 && used < held) breaks_group = true;
  }

  bool breaks_structure = false;
  for (int r = 0; r < kNumRanks; ++r) {
    if (hand.rank_count(r) == 4 && action.cards.rank_count(r) > 0 &&
        !(action.type == ComboType::kFourOfAKind && action.key == r))
      breaks_structure = true;
  }
  if (full_house_possible(hand) && !full_house_possible(rest) &&
      action.type != ComboType::kFullHouse)
    breaks_structure = true;
  const bool suited_play =
      action.type == ComboType::kFlush || action.type == ComboType::kStraightFlush;
  for (int s = 0; s < kNumSuits; ++s) {
    if (suit_count(hand, s) >= 5 && suit_count(rest, s) < 5 &&
        !(suited_play && suit_index(action.cards.lowest()) == s))
      breaks_structure = true;
  }
  const bool straight_play =
      action.type == ComboType::kStraight || action.type == ComboType::kStraightFlush;
  for (int w = 0; w < kNumStraightWindows; ++w) {
    if (window_complete(hand, w) && !window_complete(rest, w) &&
        !(straight_play && rank_index(action.cards.lowest()) == w))
      breaks_structure = true;
  }

  static constexpr std::array<double, 3> kGroupPenalty{8.0, 4.0, 0.0};
  static constexpr std::array<double, 3> kStructurePenalty{20.0, 8.0, 4.0};
  const auto p = static_cast<std::size_t>(phase);
  return (breaks_group ? kGroupPenalty[p] : 0.0) +
         (breaks_structure ? kStructurePenalty[p] : 0.0);
}

bool is_very_strong_trick(const Combination& trick) {
  if (trick.is_pass()) return false;
  if (trick.type >= ComboType::kFullHouse) return true;
  return rank_index(trick.key_card) == kRankTwo;
}

double smart_score(const Combination& action, CardSet hand,
                   const std::optional<Combination>& trick) {
  require(!action.is_pass(), "smart_score: pass has no score");
  require(hand.contains_all(action.cards), "smart_score: action not in hand");
  return smart_score_fifths(action, hand, trick) / 5.0;
}

std::size_t random_choice(std::span<const Combination> legal, Rng& rng) {
  require_non_empty(legal);
  return static_cast<std::size_t>(rng.uniform_index(legal.size()));
}

std::size_t greedy_choice(std::span<const Combination> legal) {
  require_non_empty(legal);
  if (legal.size() <= 1) return 0;
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < legal.size(); ++i) {
    if (legal[i].is_pass()) continue;
    if (!best || combination_less(legal[i], legal[*best])) best = i;
  }
  return best.value_or(0);
}

std::size_t smart_choice(std::span<const Combination> legal, CardSet hand,
                         const std::optional<Combination>& trick) {
  require_non_empty(legal);
  std::optional<std::size_t> pass_index;
  std::size_t non_pass = 0;
  for (std::size_t i = 0; i < legal.size(); ++i) {
    if (legal[i].is_pass()) pass_index = i;
    else ++non_pass;
  }
  if (non_pass == 0 || legal.size() == 1) return 0;

  std::size_t best = 0;
  int best_score = 0;
  bool have_best = false;
  for (std::size_t i = 0; i < legal.size(); ++i) {
    if (legal[i].is_pass()) continue;
    const int s = smart_score_fifths(legal[i], hand, trick);
    if (!have_best || s < best_score ||
        (s == best_score && combination_less(legal[i], legal[best]))) {
      best = i;
      best_score = s;
      have_best = true;
    }
  }
  if (pass_index) {
    if (phase_of(hand.size()) == Phase::kEarly && count_twos(legal[best].cards) >= 2 &&
        best_score > 30 * 5)
      return *pass_index;
    if (trick && (trick->type == ComboType::kFourOfAKind ||
                  trick->type == ComboType::kStraightFlush))
      return *pass_index;
  }
  return best;
}

Combination random_agent(std::span<const Combination> legal, Rng& rng) {
  return legal[random_choice(legal, rng)];
}

Combination greedy_agent(std::span<const Combination> legal) {
  return legal[greedy_choice(legal)];
}

Combination smart_agent(std::span<const Combination> legal, CardSet hand,
                        const std::optional<Combination>& trick) {
  return legal[smart_choice(legal, hand, trick)];
}

Decision RandomAgent::decide(const Observation&, std::span<const Combination> legal,
                             std::span<const ActionFeatures>, Rng& rng) const {
  return {.index = random_choice(legal, rng)};
}

Decision GreedyAgent::decide(const Observation&, std::span<const Combination> legal,
                             std::span<const ActionFeatures>, Rng&) const {
  return {.index = greedy_choice(legal)};
}

Decision SmartAgent::decide(const Observation& obs, std::span<const Combination> legal,
                            std::span<const ActionFeatures>, Rng&) const {
  return {.index = smart_choice(legal, obs.hand(), obs.trick())};
}

bool is_heuristic_name(std::string_view name) {
  return name == "random" || name == "greedy" || name == "smart";
}

std::shared_ptr<const Agent> make_heuristic_agent(std::string_view name) {
  if (name == "random") return std::make_shared<RandomAgent>();
  if (name == "greedy") return std::make_shared<GreedyAgent>();
  if (name == "smart") return std::make_shared<SmartAgent>();
  throw ConfigError("unknown heuristic agent '" + std::string(name) + "'");
}

}  // namespace big2
