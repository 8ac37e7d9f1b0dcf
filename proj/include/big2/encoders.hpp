#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "big2/cards.hpp"
#include "big2/game.hpp"

namespace big2 {

// Information-state observation for the acting seat.
//
// Flattened layout (277 floats):
//   [0,13)    hand card ids ascending, padded with 52
//   [13,65)   active-trick indicator
//   [65,117)  seen-cards indicator
//   [117,120) opponent remaining counts / 13, clockwise from the seat
//   [120]     consecutive passes / 3
//   [121,277) per-opponent played-card indicators, clockwise from the seat
struct Observation {
  static constexpr int kHandOffset = 0;
  static constexpr int kTrickOffset = 13;
  static constexpr int kSeenOffset = 65;
  static constexpr int kCountsOffset = 117;
  static constexpr int kPassOffset = 120;
  static constexpr int kPlayedOffset = 121;
  static constexpr int kSize = 13 + 52 + 52 + 3 + 1 + 3 * 52;

  std::array<int, kHandSize> hand_ids{};
  std::array<float, kNumCards> trick_indicator{};
  std::array<float, kNumCards> seen_indicator{};
  std::array<float, kNumPlayers - 1> opponent_counts{};
  float pass_count = 0.0f;
  std::array<std::array<float, kNumCards>, kNumPlayers - 1> opponent_played{};

  std::array<float, kSize> flatten() const;
  static Observation unflatten(std::span<const float> v);

  // Decoders used by rule-based agents; they read public fields only.
  CardSet hand() const;
  // nullopt when the seat has control.
  std::optional<Combination> trick() const;
  bool operator==(const Observation&) const = default;
};
static_assert(Observation::kSize == 277);

// Per-candidate action features (80 floats):
//   [0,52)  card indicators
//   [52]    pass bit
//   [53,62) combination type one-hot (Pass..StraightFlush)
//   [62,75) rank one-hot of the key card
//   [75,79) suit one-hot of the key card
//   [79]    card count / 5
inline constexpr int kActionFeatureSize = 80;
using ActionFeatures = std::array<float, kActionFeatureSize>;

namespace action_layout {
inline constexpr int kCards = 0;
inline constexpr int kPassBit = 52;
inline constexpr int kType = 53;
inline constexpr int kRank = 62;
inline constexpr int kSuit = 75;
inline constexpr int kCount = 79;
}  // namespace action_layout

Observation encode_observation(const GameState& state, int seat);
ActionFeatures encode_action(const Combination& action);
std::vector<ActionFeatures> encode_actions(std::span<const Combination> actions);

// Cards recovered from the indicator block of an action feature vector.
CardSet decode_action_cards(const ActionFeatures& f);

// Labeled multi-line dump for debugging.
std::string describe(const Observation& obs);

}  // namespace big2
