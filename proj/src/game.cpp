#include "big2/game.hpp"

#include <algorithm>
#include <numeric>

#include "big2/error.hpp"
#include "big2/rng.hpp"

namespace big2 {
namespace {

constexpr unsigned type_bit(ComboType t) { return 1u << static_cast<unsigned>(t); }
constexpr unsigned kSmallTypes =
    type_bit(ComboType::kSingle) | type_bit(ComboType::kPair) | type_bit(ComboType::kTriple);
constexpr unsigned kFiveCardTypes =
    type_bit(ComboType::kStraight) | type_bit(ComboType::kFlush) |
    type_bit(ComboType::kFullHouse) | type_bit(ComboType::kFourOfAKind) |
    type_bit(ComboType::kStraightFlush);
constexpr unsigned kAllTypes = kSmallTypes | kFiveCardTypes;

// Lowest straight starts at rank index 0 (the 3); highest ends at the ace.
constexpr int kNumStraightWindows = 8;

CardSet rank_cards(int rank, unsigned suits) {
  return CardSet(static_cast<std::uint64_t>(suits) << (rank * kNumSuits));
}

Combination make(ComboType type, CardSet cards, int key, Card key_card) {
  Combination c;
  c.type = type;
  c.cards = cards;
  c.key = key;
  c.key_card = key_card;
  return c;
}

// Calls f(subset) for each k-card subset of the (<= 4) suits present.
template <typename F>
void for_each_suit_subset(unsigned suits, int k, F&& f) {
  for (unsigned sub = suits;; sub = (sub - 1) & suits) {
    if (std::popcount(sub) == k) f(sub);
    if (sub == 0) break;
  }
}

void add_rank_groups(CardSet hand, unsigned types, std::vector<Combination>& out) {
  for (int r = 0; r < kNumRanks; ++r) {
    const unsigned suits = hand.rank_suits(r);
    const int count = std::popcount(suits);
    for (int k = 1; k <= std::min(count, 3); ++k) {
      const auto type = static_cast<ComboType>(k);
      if (!(types & type_bit(type))) continue;
      for_each_suit_subset(suits, k, [&](unsigned sub) {
        const CardSet cards = rank_cards(r, sub);
        out.push_back(make(type, cards, cards.highest(), cards.highest()));
      });
    }
  }
}

void add_straights(CardSet hand, unsigned types, std::vector<Combination>& out) {
  const bool want_plain = types & type_bit(ComboType::kStraight);
  const bool want_flush = types & type_bit(ComboType::kStraightFlush);
  if (!want_plain && !want_flush) return;
  for (int start = 0; start < kNumStraightWindows; ++start) {
    std::array<unsigned, 5> suits{};
    bool complete = true;
    for (int i = 0; i < 5 && complete; ++i) {
      suits[i] = hand.rank_suits(start + i);
      complete = suits[i] != 0;
    }
    if (!complete) continue;
    // Odometer over one suit choice per rank.
    std::array<int, 5> pick{};
    while (true) {
      CardSet cards;
      unsigned common = 0xF;
      for (int i = 0; i < 5; ++i) {
        int seen = 0;
        for (int s = 0; s < kNumSuits; ++s) {
          if (!(suits[i] & (1u << s))) continue;
          if (seen++ == pick[i]) {
            cards.insert(make_card(start + i, s));
            common &= 1u << s;
          }
        }
      }
      const bool flush = common != 0;
      if (flush ? want_flush : want_plain) {
        out.push_back(make(flush ? ComboType::kStraightFlush : ComboType::kStraight, cards,
                           cards.highest(), cards.highest()));
      }
      int i = 0;
      while (i < 5 && ++pick[i] == std::popcount(suits[i])) pick[i++] = 0;
      if (i == 5) break;
    }
  }
}

void add_flushes(CardSet hand, std::vector<Combination>& out) {
  for (int s = 0; s < kNumSuits; ++s) {
    std::array<Card, kNumRanks> suited{};
    int n = 0;
    for (int r = 0; r < kNumRanks; ++r)
      if (hand.contains(make_card(r, s))) suited[n++] = make_card(r, s);
    if (n < 5) continue;
    std::array<int, 5> idx{0, 1, 2, 3, 4};
    while (true) {
      const int low = rank_index(suited[idx[0]]);
      const int high = rank_index(suited[idx[4]]);
      const bool straight = high - low == 4 && high < kRankTwo;
      if (!straight) {
        CardSet cards;
        for (int i : idx) cards.insert(suited[i]);
        out.push_back(make(ComboType::kFlush, cards, cards.highest(), cards.highest()));
      }
      int i = 4;
      while (i >= 0 && idx[i] == n - 5 + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (int j = i + 1; j < 5; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
}

void add_full_houses(CardSet hand, std::vector<Combination>& out) {
  for (int tr = 0; tr < kNumRanks; ++tr) {
    const unsigned tsuits = hand.rank_suits(tr);
    if (std::popcount(tsuits) < 3) continue;
    for_each_suit_subset(tsuits, 3, [&](unsigned tsub) {
      const CardSet triple = rank_cards(tr, tsub);
      for (int pr = 0; pr < kNumRanks; ++pr) {
        if (pr == tr) continue;
        const unsigned psuits = hand.rank_suits(pr);
        if (std::popcount(psuits) < 2) continue;
        for_each_suit_subset(psuits, 2, [&](unsigned psub) {
          out.push_back(make(ComboType::kFullHouse, triple | rank_cards(pr, psub),
                             triple.highest(), triple.highest()));
        });
      }
    });
  }
}

void add_quads(CardSet hand, std::vector<Combination>& out) {
  for (int r = 0; r < kNumRanks; ++r) {
    if (hand.rank_count(r) != 4) continue;
    const CardSet quad = rank_cards(r, 0xF);
    (hand - quad).for_each([&](Card kicker) {
      CardSet cards = quad;
      cards.insert(kicker);
      out.push_back(make(ComboType::kFourOfAKind, cards, r, quad.highest()));
    });
  }
}

void enumerate_into(CardSet hand, unsigned types, std::vector<Combination>& out) {
  add_rank_groups(hand, types, out);
  if (hand.size() >= 5) {
    add_straights(hand, types, out);
    if (types & type_bit(ComboType::kFlush)) add_flushes(hand, out);
    if (types & type_bit(ComboType::kFullHouse)) add_full_houses(hand, out);
    if (types & type_bit(ComboType::kFourOfAKind)) add_quads(hand, out);
  }
}

}  // namespace

GameState deal_hands(const std::array<CardSet, kNumPlayers>& hands) {
  GameState state;
  state.hands = hands;
  for (int seat = 0; seat < kNumPlayers; ++seat)
    if (hands[seat].contains(0)) state.current_player = seat;
  return state;
}

GameState deal(std::uint64_t seed) {
  Rng rng(seed);
  std::array<Card, kNumCards> deck{};
  std::iota(deck.begin(), deck.end(), 0);
  rng.shuffle(std::span<Card>(deck));
  std::array<CardSet, kNumPlayers> hands;
  for (int i = 0; i < kNumCards; ++i) hands[i / kHandSize].insert(deck[i]);
  return deal_hands(hands);
}

std::vector<Combination> enumerate_combinations(CardSet hand) {
  std::vector<Combination> out;
  enumerate_into(hand, kAllTypes, out);
  std::sort(out.begin(), out.end(), combination_less);
  return out;
}

void legal_actions(const GameState& state, std::vector<Combination>& out) {
  require(!state.terminal(), "legal_actions: terminal state");
  out.clear();
  const CardSet hand = state.hands[state.current_player];
  if (state.has_control()) {
    enumerate_into(hand, kAllTypes, out);
    if (state.opening_play()) {
      std::erase_if(out, [](const Combination& c) { return !c.cards.contains(0); });
    }
    std::sort(out.begin(), out.end(), combination_less);
    return;
  }
  const Combination& trick = *state.active_trick;
  const unsigned types = is_five_card(trick.type) ? kFiveCardTypes : type_bit(trick.type);
  enumerate_into(hand, types, out);
  std::erase_if(out, [&](const Combination& c) { return !beats(c, trick); });
  std::sort(out.begin(), out.end(), combination_less);
  out.push_back(Combination::pass());
}

std::vector<Combination> legal_actions(const GameState& state) {
  std::vector<Combination> out;
  legal_actions(state, out);
  return out;
}

bool is_legal(const GameState& state, const Combination& action) {
  if (state.terminal()) return false;
  if (action.is_pass()) return !state.has_control();
  const CardSet hand = state.hands[state.current_player];
  if (!hand.contains_all(action.cards)) return false;
  const auto classified = make_combination(action.cards);
  if (!classified || classified->type != action.type || classified->key != action.key)
    return false;
  if (state.opening_play() && !action.cards.contains(0)) return false;
  if (state.has_control()) return true;
  return beats(*classified, *state.active_trick);
}

void apply_action_in_place(GameState& state, const Combination& action) {
  require(is_legal(state, action), "apply_action: illegal action " + to_string(action));
  const int seat = state.current_player;
  if (action.is_pass()) {
    ++state.pass_count;
    if (state.pass_count == kNumPlayers - 1) {
      state.active_trick.reset();
      state.pass_count = 0;
    }
  } else {
    state.hands[seat] -= action.cards;
    state.seen |= action.cards;
    state.played_by[seat] |= action.cards;
    state.active_trick = action;
    state.last_player = seat;
    state.pass_count = 0;
    if (state.hands[seat].empty()) state.winner = seat;
  }
  ++state.ply;
  if (!state.terminal()) state.current_player = next_seat(seat);
}

GameState apply_action(const GameState& state, const Combination& action) {
  GameState next = state;
  apply_action_in_place(next, action);
  return next;
}

TerminalScores terminal_scores(const GameState& state) {
  require(state.terminal(), "terminal_scores: game not finished");
  TerminalScores scores{};
  int pot = 0;
  for (int seat = 0; seat < kNumPlayers; ++seat) {
    if (seat == *state.winner) continue;
    scores[seat] = -state.hands[seat].size();
    pot += state.hands[seat].size();
  }
  scores[*state.winner] = pot;
  return scores;
}

bool check_invariants(const GameState& state) {
  CardSet all = state.seen;
  int total = state.seen.size();
  for (const CardSet& hand : state.hands) {
    if (hand.intersects(all)) return false;
    all |= hand;
    total += hand.size();
  }
  if (all != CardSet::full() || total != kNumCards) return false;
  CardSet played;
  for (const CardSet& p : state.played_by) {
    if (p.intersects(played)) return false;
    played |= p;
  }
  if (played != state.seen) return false;
  int empty_hands = 0;
  for (const CardSet& hand : state.hands) empty_hands += hand.empty();
  if (empty_hands > 1) return false;
  if (state.winner.has_value() != (empty_hands == 1)) return false;
  if (state.pass_count < 0 || state.pass_count >= kNumPlayers - 1) return false;
  if (state.current_player < 0 || state.current_player >= kNumPlayers) return false;
  return true;
}

}  // namespace big2
