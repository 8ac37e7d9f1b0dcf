#pragma once

#include <array>
#include <bit>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace big2 {

inline constexpr int kNumCards = 52;
inline constexpr int kNumRanks = 13;
inline constexpr int kNumSuits = 4;
inline constexpr int kNumPlayers = 4;
inline constexpr int kHandSize = 13;
inline constexpr int kPadCard = 52;

// Card ids run 0..51 ordered by rank then suit: 0 is 3 of diamonds, 51 is the
// 2 of spades. Rank index 0 is the 3, rank index 12 is the 2. Suits are
// diamonds < clubs < hearts < spades.
using Card = int;

constexpr int rank_index(Card c) { return c / kNumSuits; }
constexpr int suit_index(Card c) { return c % kNumSuits; }
constexpr Card make_card(int rank, int suit) { return rank * kNumSuits + suit; }

inline constexpr int kRankTwo = 12;

std::string card_name(Card c);               // e.g. "3d", "Ts", "2s"
std::optional<Card> parse_card(std::string_view name);

// 52-bit set of cards.
class CardSet {
 public:
  constexpr CardSet() = default;
  constexpr explicit CardSet(std::uint64_t bits) : bits_(bits) {}
  CardSet(std::initializer_list<Card> cards) {
    for (Card c : cards) insert(c);
  }

  static constexpr CardSet full() { return CardSet((1ULL << kNumCards) - 1); }
  static CardSet from_cards(const std::vector<Card>& cards) {
    CardSet s;
    for (Card c : cards) s.insert(c);
    return s;
  }

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool contains(Card c) const { return (bits_ >> c) & 1ULL; }
  constexpr bool contains_all(CardSet o) const { return (bits_ & o.bits_) == o.bits_; }
  constexpr bool intersects(CardSet o) const { return (bits_ & o.bits_) != 0; }

  constexpr void insert(Card c) { bits_ |= 1ULL << c; }
  constexpr void erase(Card c) { bits_ &= ~(1ULL << c); }

  constexpr int lowest() const { return std::countr_zero(bits_); }
  constexpr int highest() const { return 63 - std::countl_zero(bits_); }

  // Suit bits (4) present for the given rank.
  constexpr unsigned rank_suits(int rank) const {
    return static_cast<unsigned>((bits_ >> (rank * kNumSuits)) & 0xFULL);
  }
  constexpr int rank_count(int rank) const { return std::popcount(rank_suits(rank)); }

  std::vector<Card> cards() const;

  template <typename F>
  constexpr void for_each(F&& f) const {
    for (std::uint64_t b = bits_; b != 0; b &= b - 1) f(std::countr_zero(b));
  }

  constexpr CardSet operator|(CardSet o) const { return CardSet(bits_ | o.bits_); }
  constexpr CardSet operator&(CardSet o) const { return CardSet(bits_ & o.bits_); }
  constexpr CardSet operator-(CardSet o) const { return CardSet(bits_ & ~o.bits_); }
  constexpr CardSet& operator|=(CardSet o) { bits_ |= o.bits_; return *this; }
  constexpr CardSet& operator-=(CardSet o) { bits_ &= ~o.bits_; return *this; }
  constexpr bool operator==(const CardSet&) const = default;

 private:
  std::uint64_t bits_ = 0;
};

// Tag order doubles as the global combination order (Pass sorts first but is
// never compared against plays).
enum class ComboType : std::uint8_t {
  kPass = 0,
  kSingle,
  kPair,
  kTriple,
  kStraight,
  kFlush,
  kFullHouse,
  kFourOfAKind,
  kStraightFlush,
};
inline constexpr int kNumComboTypes = 9;

std::string_view combo_type_name(ComboType t);
constexpr bool is_five_card(ComboType t) { return t >= ComboType::kStraight; }

// A typed set of cards with its within-type comparison key.
//
// key:      Single/Pair/Triple/Straight/Flush/StraightFlush -> highest card id;
//           FullHouse -> highest card id of the triple;
//           FourOfAKind -> rank index of the quad.
// key_card: the card that carries the key (highest card of the triple / quad
//           for FullHouse / FourOfAKind); used by action features.
struct Combination {
  ComboType type = ComboType::kPass;
  CardSet cards;
  int key = -1;
  Card key_card = -1;

  static Combination pass() { return {}; }

  bool is_pass() const { return type == ComboType::kPass; }
  int size() const { return cards.size(); }
  bool operator==(const Combination& o) const {
    return type == o.type && cards == o.cards;
  }
};

// Classifies a card set as a legal combination, or nullopt if the cards do
// not form one. The empty set is not a combination (use Combination::pass()).
std::optional<Combination> make_combination(CardSet cards);

// Global order: combination type, then key, then the card bitmask. The last
// component only separates equal-key pairs/triples/five-card hands.
std::strong_ordering compare_combinations(const Combination& a, const Combination& b);
inline bool combination_less(const Combination& a, const Combination& b) {
  return compare_combinations(a, b) < 0;
}

// True iff `play` may be played on top of `trick` (both non-pass).
bool beats(const Combination& play, const Combination& trick);

std::string to_string(const Combination& c);  // "Pair[3d 3s]" / "PASS"

}  // namespace big2
