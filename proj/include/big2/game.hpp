#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "big2/cards.hpp"

namespace big2 {

// Full hidden state of a game. Value type; transitions are pure.
struct GameState {
  std::array<CardSet, kNumPlayers> hands;
  int current_player = 0;
  // nullopt while the acting player has control (no trick to beat).
  std::optional<Combination> active_trick;
  CardSet seen;
  // Consecutive passes since the last non-pass play.
  int pass_count = 0;
  std::array<CardSet, kNumPlayers> played_by;
  std::optional<int> winner;
  // Seat that played the active trick (-1 when none).
  int last_player = -1;
  int ply = 0;

  bool terminal() const { return winner.has_value(); }
  bool has_control() const { return !active_trick.has_value(); }
  bool opening_play() const { return seen.empty(); }
  bool operator==(const GameState&) const = default;
};

using TerminalScores = std::array<int, kNumPlayers>;

// No reachable game runs longer than this; exceeding it is an engine fault.
inline constexpr int kMaxPlies = 400;

constexpr int next_seat(int seat) { return (seat + 1) % kNumPlayers; }

GameState deal(std::uint64_t seed);
// Deals a fixed set of hands; the seat holding card 0 opens.
GameState deal_hands(const std::array<CardSet, kNumPlayers>& hands);

// Every Single, Pair, Triple and five-card combination in `hand`, once each,
// sorted by the global combination order. Never contains Pass.
std::vector<Combination> enumerate_combinations(CardSet hand);

// Legal plays at a non-terminal state. Non-pass plays are sorted by the
// global combination order; Pass, when legal, comes last.
std::vector<Combination> legal_actions(const GameState& state);
// Appends into `out` (cleared first); avoids reallocation in hot loops.
void legal_actions(const GameState& state, std::vector<Combination>& out);

bool is_legal(const GameState& state, const Combination& action);

GameState apply_action(const GameState& state, const Combination& action);
// In-place variant used by rollouts.
void apply_action_in_place(GameState& state, const Combination& action);

TerminalScores terminal_scores(const GameState& state);

// Checks card conservation and bookkeeping invariants; returns false on any
// violation.
bool check_invariants(const GameState& state);

}  // namespace big2
