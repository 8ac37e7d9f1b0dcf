#include "big2/cards.hpp"

#include <algorithm>
#include <array>

namespace big2 {
namespace {

constexpr std::array<char, kNumRanks> kRankChars{'3', '4', '5', '6', '7', '8', '9',
                                                 'T', 'J', 'Q', 'K', 'A', '2'};
constexpr std::array<char, kNumSuits> kSuitChars{'d', 'c', 'h', 's'};

// Highest card of `rank` inside `cards`.
Card top_of_rank(CardSet cards, int rank) {
  const unsigned suits = cards.rank_suits(rank);
  return make_card(rank, 31 - std::countl_zero(suits));
}

std::optional<Combination> classify_five(CardSet cards) {
  std::array<int, kNumRanks> counts{};
  int distinct = 0;
  int low_rank = kNumRanks;
  int high_rank = -1;
  for (int r = 0; r < kNumRanks; ++r) {
    counts[r] = cards.rank_count(r);
    if (counts[r] > 0) {
      ++distinct;
      low_rank = std::min(low_rank, r);
      high_rank = r;
    }
  }
  const int first_suit = suit_index(cards.lowest());
  bool same_suit = true;
  cards.for_each([&](Card c) { same_suit = same_suit && suit_index(c) == first_suit; });
  // Rank 2 never takes part in a straight and straights do not wrap.
  const bool consecutive =
      distinct == 5 && high_rank - low_rank == 4 && high_rank < kRankTwo;

  Combination combo;
  combo.cards = cards;
  if (consecutive && same_suit) {
    combo.type = ComboType::kStraightFlush;
    combo.key = combo.key_card = cards.highest();
    return combo;
  }
  if (distinct == 2) {
    int quad_rank = -1;
    int triple_rank = -1;
    for (int r = 0; r < kNumRanks; ++r) {
      if (counts[r] == 4) quad_rank = r;
      if (counts[r] == 3) triple_rank = r;
    }
    if (quad_rank >= 0) {
      combo.type = ComboType::kFourOfAKind;
      combo.key = quad_rank;
      combo.key_card = top_of_rank(cards, quad_rank);
      return combo;
    }
    if (triple_rank >= 0) {
      combo.type = ComboType::kFullHouse;
      combo.key = combo.key_card = top_of_rank(cards, triple_rank);
      return combo;
    }
    return std::nullopt;
  }
  if (same_suit) {
    combo.type = ComboType::kFlush;
    combo.key = combo.key_card = cards.highest();
    return combo;
  }
  if (consecutive) {
    combo.type = ComboType::kStraight;
    combo.key = combo.key_card = cards.highest();
    return combo;
  }
  return std::nullopt;
}

}  // namespace

std::string card_name(Card c) {
  if (c < 0 || c >= kNumCards) return "??";
  return {kRankChars[rank_index(c)], kSuitChars[suit_index(c)]};
}

std::optional<Card> parse_card(std::string_view name) {
  if (name.size() != 2) return std::nullopt;
  int rank = -1;
  int suit = -1;
  for (int r = 0; r < kNumRanks; ++r)
    if (kRankChars[r] == name[0]) rank = r;
  for (int s = 0; s < kNumSuits; ++s)
    if (kSuitChars[s] == name[1]) suit = s;
  if (rank < 0 || suit < 0) return std::nullopt;
  return make_card(rank, suit);
}

std::vector<Card> CardSet::cards() const {
  std::vector<Card> out;
  out.reserve(static_cast<std::size_t>(size()));
  for_each([&](Card c) { out.push_back(c); });
  return out;
}

std::string_view combo_type_name(ComboType t) {
  switch (t) {
    case ComboType::kPass: return "Pass";
    case ComboType::kSingle: return "Single";
    case ComboType::kPair: return "Pair";
    case ComboType::kTriple: return "Triple";
    case ComboType::kStraight: return "Straight";
    case ComboType::kFlush: return "Flush";
    case ComboType::kFullHouse: return "FullHouse";
    case ComboType::kFourOfAKind: return "FourOfAKind";
    case ComboType::kStraightFlush: return "StraightFlush";
  }
  return "?";
}

std::optional<Combination> make_combination(CardSet cards) {
  if (cards.bits() & ~CardSet::full().bits()) return std::nullopt;
  const int n = cards.size();
  if (n == 5) return classify_five(cards);
  if (n < 1 || n > 3) return std::nullopt;
  const int rank = rank_index(cards.lowest());
  if (cards.rank_count(rank) != n) return std::nullopt;
  Combination combo;
  combo.type = static_cast<ComboType>(n);  // Single=1, Pair=2, Triple=3
  combo.cards = cards;
  combo.key = combo.key_card = cards.highest();
  return combo;
}

std::strong_ordering compare_combinations(const Combination& a, const Combination& b) {
  if (auto c = a.type <=> b.type; c != 0) return c;
  if (auto c = a.key <=> b.key; c != 0) return c;
  return a.cards.bits() <=> b.cards.bits();
}

bool beats(const Combination& play, const Combination& trick) {
  if (play.is_pass() || trick.is_pass()) return false;
  if (is_five_card(trick.type)) {
    if (!is_five_card(play.type)) return false;
    if (play.type != trick.type) return play.type > trick.type;
    return play.key > trick.key;
  }
  return play.type == trick.type && play.key > trick.key;
}

std::string to_string(const Combination& c) {
  if (c.is_pass()) return "PASS";
  std::string out(combo_type_name(c.type));
  out += '[';
  bool first = true;
  c.cards.for_each([&](Card card) {
    if (!first) out += ' ';
    out += card_name(card);
    first = false;
  });
  out += ']';
  return out;
}

}  // namespace big2
