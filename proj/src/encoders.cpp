#include "big2/encoders.hpp"

#include <sstream>

#include "big2/error.hpp"

namespace big2 {
namespace {

CardSet indicator_set(const std::array<float, kNumCards>& v) {
  CardSet s;
  for (int c = 0; c < kNumCards; ++c)
    if (v[c] != 0.0f) s.insert(c);
  return s;
}

void fill_indicator(CardSet cards, std::array<float, kNumCards>& v) {
  cards.for_each([&](Card c) { v[c] = 1.0f; });
}

std::string card_list(CardSet cards) {
  std::string out;
  cards.for_each([&](Card c) {
    if (!out.empty()) out += ' ';
    out += card_name(c);
  });
  return out.empty() ? "-" : out;
}

}  // namespace

std::array<float, Observation::kSize> Observation::flatten() const {
  std::array<float, kSize> v{};
  for (int i = 0; i < kHandSize; ++i) v[kHandOffset + i] = static_cast<float>(hand_ids[i]);
  for (int c = 0; c < kNumCards; ++c) {
    v[kTrickOffset + c] = trick_indicator[c];
    v[kSeenOffset + c] = seen_indicator[c];
  }
  for (int o = 0; o < kNumPlayers - 1; ++o) {
    v[kCountsOffset + o] = opponent_counts[o];
    for (int c = 0; c < kNumCards; ++c) v[kPlayedOffset + o * kNumCards + c] = opponent_played[o][c];
  }
  v[kPassOffset] = pass_count;
  return v;
}

Observation Observation::unflatten(std::span<const float> v) {
  require(v.size() == kSize, "Observation::unflatten: wrong length");
  Observation obs;
  for (int i = 0; i < kHandSize; ++i) obs.hand_ids[i] = static_cast<int>(v[kHandOffset + i]);
  for (int c = 0; c < kNumCards; ++c) {
    obs.trick_indicator[c] = v[kTrickOffset + c];
    obs.seen_indicator[c] = v[kSeenOffset + c];
  }
  for (int o = 0; o < kNumPlayers - 1; ++o) {
    obs.opponent_counts[o] = v[kCountsOffset + o];
    for (int c = 0; c < kNumCards; ++c) obs.opponent_played[o][c] = v[kPlayedOffset + o * kNumCards + c];
  }
  obs.pass_count = v[kPassOffset];
  return obs;
}

CardSet Observation::hand() const {
  CardSet s;
  for (int id : hand_ids)
    if (id >= 0 && id < kNumCards) s.insert(id);
  return s;
}

std::optional<Combination> Observation::trick() const {
  const CardSet cards = indicator_set(trick_indicator);
  if (cards.empty()) return std::nullopt;
  return make_combination(cards);
}

Observation encode_observation(const GameState& state, int seat) {
  require(seat >= 0 && seat < kNumPlayers, "encode_observation: bad seat");
  Observation obs;
  obs.hand_ids.fill(kPadCard);
  int i = 0;
  state.hands[seat].for_each([&](Card c) { obs.hand_ids[i++] = c; });
  if (state.active_trick) fill_indicator(state.active_trick->cards, obs.trick_indicator);
  fill_indicator(state.seen, obs.seen_indicator);
  for (int o = 0; o < kNumPlayers - 1; ++o) {
    const int other = (seat + 1 + o) % kNumPlayers;
    obs.opponent_counts[o] = static_cast<float>(state.hands[other].size()) / kHandSize;
    fill_indicator(state.played_by[other], obs.opponent_played[o]);
  }
  obs.pass_count = static_cast<float>(state.pass_count) / 3.0f;
  return obs;
}

ActionFeatures encode_action(const Combination& action) {
  namespace L = action_layout;
  ActionFeatures f{};
  f[L::kType + static_cast<int>(action.type)] = 1.0f;
  if (action.is_pass()) {
    f[L::kPassBit] = 1.0f;
    return f;
  }
  action.cards.for_each([&](Card c) { f[L::kCards + c] = 1.0f; });
  f[L::kRank + rank_index(action.key_card)] = 1.0f;
  f[L::kSuit + suit_index(action.key_card)] = 1.0f;
  f[L::kCount] = static_cast<float>(action.size()) / 5.0f;
  return f;
}

std::vector<ActionFeatures> encode_actions(std::span<const Combination> actions) {
  std::vector<ActionFeatures> out;
  out.reserve(actions.size());
  for (const Combination& a : actions) out.push_back(encode_action(a));
  return out;
}

CardSet decode_action_cards(const ActionFeatures& f) {
  CardSet s;
  for (int c = 0; c < kNumCards; ++c)
    if (f[action_layout::kCards + c] != 0.0f) s.insert(c);
  return s;
}

std::string describe(const Observation& obs) {
  std::ostringstream out;
  out << "hand:            " << card_list(obs.hand()) << '\n';
  out << "hand_ids:       ";
  for (int id : obs.hand_ids) out << ' ' << id;
  out << '\n';
  out << "active_trick:    " << card_list(indicator_set(obs.trick_indicator)) << '\n';
  out << "seen:            " << card_list(indicator_set(obs.seen_indicator)) << '\n';
  out << "opponent_counts:";
  for (float c : obs.opponent_counts) out << ' ' << c;
  out << "  (x13:";
  for (float c : obs.opponent_counts) out << ' ' << static_cast<int>(c * kHandSize + 0.5f);
  out << ")\n";
  out << "pass_count:      " << obs.pass_count << '\n';
  for (int o = 0; o < kNumPlayers - 1; ++o) {
    out << "opponent_" << o + 1 << "_played: " << card_list(indicator_set(obs.opponent_played[o]))
        << '\n';
  }
  return out.str();
}

}  // namespace big2
