#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "big2/cards.hpp"
#include "big2/encoders.hpp"
#include "big2/rng.hpp"

namespace big2 {

// What an agent returns at a decision point. Rule-based agents leave the
// log-prob/value/entropy fields at zero.
struct Decision {
  std::size_t index = 0;
  double log_prob = 0.0;
  double value = 0.0;
  double entropy = 0.0;
};

// An agent sees only the acting seat's observation and the legal candidates.
// `features` is filled by the caller when needs_features() is true.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::string name() const = 0;
  virtual bool needs_features() const { return false; }
  virtual Decision decide(const Observation& obs, std::span<const Combination> legal,
                          std::span<const ActionFeatures> features, Rng& rng) const = 0;
};

// ---------------------------------------------------------------------------
// Rule helpers shared by the Smart policy.

enum class Phase { kEarly, kMid, kLate };

constexpr Phase phase_of(int hand_size) {
  if (hand_size > 10) return Phase::kEarly;
  if (hand_size >= 6) return Phase::kMid;
  return Phase::kLate;
}

// Cards of `hand` that belong to a detected five-card structure: a complete
// four-of-a-kind, full-house components (ranks held 3+ / 2+ when a full house
// can be formed), suits held 5+ times, and complete five-rank straight windows
// (rank 2 excluded).
CardSet structure_cards(CardSet hand);

// Cards whose rank appears exactly once in `hand`, with rank index <= 4
// (ranks 3..7), and which lie outside every five-card structure.
int low_orphans(CardSet hand);

// Pair/triple-break term plus five-card-structure-break term; each applied at
// most once. See the implementation for the exact "breaks" predicates.
double break_penalty(const Combination& action, CardSet hand);

// Five-card hand of full house or better, or any trick keyed by a 2.
bool is_very_strong_trick(const Combination& trick);

// Lower is better; -1000 marks an immediate win. `action` must be a non-pass
// subset of `hand`.
double smart_score(const Combination& action, CardSet hand,
                   const std::optional<Combination>& trick);

// ---------------------------------------------------------------------------
// Policies over an explicit legal set. All throw ContractViolation on an
// empty legal set.

std::size_t random_choice(std::span<const Combination> legal, Rng& rng);
std::size_t greedy_choice(std::span<const Combination> legal);
std::size_t smart_choice(std::span<const Combination> legal, CardSet hand,
                         const std::optional<Combination>& trick);

Combination random_agent(std::span<const Combination> legal, Rng& rng);
Combination greedy_agent(std::span<const Combination> legal);
Combination smart_agent(std::span<const Combination> legal, CardSet hand,
                        const std::optional<Combination>& trick);

class RandomAgent final : public Agent {
 public:
  std::string name() const override { return "random"; }
  Decision decide(const Observation&, std::span<const Combination> legal,
                  std::span<const ActionFeatures>, Rng& rng) const override;
};

class GreedyAgent final : public Agent {
 public:
  std::string name() const override { return "greedy"; }
  Decision decide(const Observation&, std::span<const Combination> legal,
                  std::span<const ActionFeatures>, Rng&) const override;
};

class SmartAgent final : public Agent {
 public:
  std::string name() const override { return "smart"; }
  Decision decide(const Observation& obs, std::span<const Combination> legal,
                  std::span<const ActionFeatures>, Rng&) const override;
};

bool is_heuristic_name(std::string_view name);
// "random", "greedy" or "smart"; throws ConfigError otherwise.
std::shared_ptr<const Agent> make_heuristic_agent(std::string_view name);

}  // namespace big2
