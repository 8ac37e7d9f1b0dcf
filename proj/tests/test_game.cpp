#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "big2/error.hpp"
#include "big2/game.hpp"
#include "big2/transcript.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace big2;
using namespace big2::oracle;

namespace {

CardSet random_hand(Rng& rng, int size) {
  std::vector<int> deck(52);
  for (int i = 0; i < 52; ++i) deck[i] = i;
  rng.shuffle(std::span<int>(deck));
  return CardSet::from_cards(std::vector<int>(deck.begin(), deck.begin() + size));
}

Combination combo(std::initializer_list<Card> cards) {
  const auto c = make_combination(CardSet(cards));
  REQUIRE(c.has_value());
  return *c;
}

}  // namespace

TEST_CASE("card indexing and names") {
  CHECK(rank_index(0) == 0);
  CHECK(suit_index(0) == 0);
  CHECK(rank_index(51) == 12);
  CHECK(suit_index(51) == 3);
  CHECK(card_name(0) == "3d");
  CHECK(card_name(1) == "3c");
  CHECK(card_name(30) == "Th");
  CHECK(card_name(51) == "2s");
  for (int c = 0; c < 52; ++c) CHECK(parse_card(card_name(c)) == c);
  CHECK_FALSE(parse_card("1x").has_value());
}

TEST_CASE("classification agrees with the subset oracle") {
  Rng rng(1);
  for (int trial = 0; trial < 400; ++trial) {
    const int size = 1 + static_cast<int>(rng.uniform_index(13));
    const CardSet hand = random_hand(rng, size);
    for (const auto& sub : subsets_up_to_five(hand.cards())) {
      const auto mine = make_combination(CardSet::from_cards(sub));
      const auto ref = classify(sub);
      REQUIRE(mine.has_value() == ref.has_value());
      if (mine) CHECK(static_cast<int>(mine->type) == ref->type);
    }
  }
}

TEST_CASE("enumeration equals brute force and is sorted") {
  Rng rng(2);
  for (int trial = 0; trial < 300; ++trial) {
    const int size = trial < 200 ? 1 + static_cast<int>(rng.uniform_index(8)) : 13;
    const CardSet hand = random_hand(rng, size);
    const auto combos = enumerate_combinations(hand);
    std::set<std::uint64_t> masks;
    for (const Combination& c : combos) {
      CHECK(c.type != ComboType::kPass);
      CHECK(masks.insert(c.cards.bits()).second);
    }
    CHECK(masks == oracle_combination_masks(hand));
    for (std::size_t i = 1; i < combos.size(); ++i) {
      const auto a = *classify(combos[i - 1].cards.cards());
      const auto b = *classify(combos[i].cards.cards());
      CHECK(std::tie(a.type, a.key) <= std::tie(b.type, b.key));
    }
  }
}

TEST_CASE("enumeration examples") {
  const auto quads = enumerate_combinations(CardSet{0, 1, 2, 3});
  CHECK(quads.size() == 14);
  std::map<ComboType, int> by_type;
  for (const auto& c : quads) ++by_type[c.type];
  CHECK(by_type[ComboType::kSingle] == 4);
  CHECK(by_type[ComboType::kPair] == 6);
  CHECK(by_type[ComboType::kTriple] == 4);

  const auto one = enumerate_combinations(CardSet{0});
  REQUIRE(one.size() == 1);
  CHECK(one[0].type == ComboType::kSingle);

  const auto sf = enumerate_combinations(CardSet{0, 4, 8, 12, 16});
  CHECK(sf.size() == 6);
  int sf_count = 0;
  for (const auto& c : sf) {
    CHECK(c.type != ComboType::kFlush);
    CHECK(c.type != ComboType::kStraight);
    sf_count += c.type == ComboType::kStraightFlush;
  }
  CHECK(sf_count == 1);

  // 2 cannot appear in a straight and straights do not wrap.
  CHECK_FALSE(make_combination(CardSet{make_card(9, 0), make_card(10, 1), make_card(11, 2), make_card(12, 3), make_card(0, 0)}).has_value());
  CHECK(make_combination(CardSet{make_card(7, 0), make_card(8, 1), make_card(9, 2), make_card(10, 3), make_card(11, 0)})->type == ComboType::kStraight);
}

TEST_CASE("comparison keys and category order") {
  CHECK(beats(combo({1}), combo({0})));
  CHECK_FALSE(beats(combo({0}), combo({1})));
  CHECK(beats(combo({4, 7}), combo({0, 3})));
  CHECK_FALSE(beats(combo({1, 3}), combo({0, 3})));  // equal key
  CHECK(beats(combo({0, 2}), combo({0, 1})));
  CHECK_FALSE(beats(combo({0, 1}), combo({4})));     // size mismatch
  const Combination straight = combo({0, 5, 8, 12, 16});
  const Combination flush = combo({0, 8, 16, 24, 40});
  const Combination full = combo({0, 1, 2, 4, 5});
  const Combination quad = combo({0, 1, 2, 3, 4});
  const Combination sflush = combo({0, 4, 8, 12, 16});
  CHECK(straight.type == ComboType::kStraight);
  CHECK(flush.type == ComboType::kFlush);
  CHECK(full.type == ComboType::kFullHouse);
  CHECK(quad.type == ComboType::kFourOfAKind);
  CHECK(sflush.type == ComboType::kStraightFlush);
  const std::vector<Combination> ladder{straight, flush, full, quad, sflush};
  for (std::size_t i = 0; i < ladder.size(); ++i)
    for (std::size_t j = 0; j < ladder.size(); ++j) CHECK(beats(ladder[i], ladder[j]) == (i > j));
  // Full house compares on the triple, not the pair.
  CHECK(beats(combo({4, 5, 6, 0, 1}), combo({0, 1, 2, 48, 49})));
  // Four of a kind compares on the quad rank.
  CHECK(beats(combo({4, 5, 6, 7, 0}), combo({0, 1, 2, 3, 51})));
}

TEST_CASE("seeded deal golden fixture") {
  const GameState s = deal(42);
  const std::array<std::vector<int>, 4> expected{{
      {3, 9, 12, 16, 17, 18, 23, 30, 33, 35, 36, 40, 50},
      {10, 19, 22, 26, 27, 28, 29, 31, 39, 41, 46, 48, 49},
      {4, 6, 7, 11, 13, 15, 20, 21, 37, 38, 43, 45, 47},
      {0, 1, 2, 5, 8, 14, 24, 25, 32, 34, 42, 44, 51},
  }};
  for (int p = 0; p < 4; ++p) CHECK(s.hands[p].cards() == expected[p]);
  CHECK(s.current_player == 3);
}

TEST_CASE("deals partition the deck and the 3 of diamonds opens") {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const GameState s = deal(seed);
    CardSet all;
    for (const CardSet& h : s.hands) {
      CHECK(h.size() == 13);
      CHECK_FALSE(all.intersects(h));
      all |= h;
    }
    CHECK(all == CardSet::full());
    CHECK(s.hands[s.current_player].contains(0));
    CHECK(s.has_control());
    CHECK(s.seen.empty());
    CHECK(s.pass_count == 0);
    CHECK(check_invariants(s));
  }
  CHECK(deal(9) == deal(9));
  CHECK_FALSE(deal(9) == deal(10));
}

TEST_CASE("legal actions agree with the rule oracle at reachable states") {
  for (const GameState& s : testing::random_states(3, 400, 0.1)) {
    const auto legal = legal_actions(s);
    std::set<std::uint64_t> mine;
    bool pass_seen = false;
    for (std::size_t i = 0; i < legal.size(); ++i) {
      if (legal[i].is_pass()) {
        pass_seen = true;
        CHECK(i + 1 == legal.size());
        continue;
      }
      CHECK(mine.insert(legal[i].cards.bits()).second);
      CHECK(is_legal(s, legal[i]));
    }
    CHECK(pass_seen == !s.has_control());

    const std::set<std::uint64_t> ref = oracle_legal_masks(s);
    CHECK(mine == ref);
    if (s.has_control()) CHECK_FALSE(is_legal(s, Combination::pass()));
  }
}

TEST_CASE("legal action examples") {
  std::array<CardSet, 4> hands{CardSet{1, 4}, CardSet{0, 51}, CardSet{5, 6}, CardSet{7, 8}};
  GameState s = deal_hands(hands);
  CHECK(s.current_player == 1);
  apply_action_in_place(s, combo({0}));
  CHECK(s.current_player == 2);
  auto legal = legal_actions(s);
  std::vector<std::string> names;
  for (const auto& c : legal) names.push_back(to_string(c));
  CHECK(names.size() == 3);
  CHECK(std::find(names.begin(), names.end(), "PASS") != names.end());

  // Seat 2 passes; seat 3 passes; seat 0 holds {1, 4}.
  apply_action_in_place(s, Combination::pass());
  apply_action_in_place(s, Combination::pass());
  CHECK(s.pass_count == 2);
  legal = legal_actions(s);
  REQUIRE(legal.size() == 3);
  CHECK(legal[0] == combo({1}));
  CHECK(legal[1] == combo({4}));
  CHECK(legal[2].is_pass());

  // A pair trick nobody can beat forces a pass.
  std::array<CardSet, 4> h2{CardSet{0, 50, 51}, CardSet{4, 5, 9}, CardSet{12, 13}, CardSet{16}};
  GameState t = deal_hands(h2);
  t.active_trick = combo({50, 51});
  t.current_player = 1;
  t.seen = CardSet{50, 51};
  legal = legal_actions(t);
  REQUIRE(legal.size() == 1);
  CHECK(legal[0].is_pass());

  // A full house answers a flush.
  GameState u = deal_hands({CardSet{0, 1, 2, 4, 5, 30}, CardSet{8, 9}, CardSet{12, 13}, CardSet{16, 17}});
  u.active_trick = combo({20, 24, 28, 36, 44});
  u.seen = u.active_trick->cards;
  CHECK(u.active_trick->type == ComboType::kFlush);
  legal = legal_actions(u);
  CHECK(std::any_of(legal.begin(), legal.end(), [](const Combination& c) { return c.type == ComboType::kFullHouse; }));
}

TEST_CASE("transitions") {
  GameState s = deal(11);
  const int opener = s.current_player;
  CHECK_THROWS_AS(apply_action(s, Combination::pass()), ContractViolation);
  CHECK_THROWS_AS(apply_action(s, combo({51})), ContractViolation);

  const auto legal = legal_actions(s);
  const Combination single0 = *std::find_if(legal.begin(), legal.end(), [](const Combination& c) { return c.cards == CardSet{0}; });
  s = apply_action(s, single0);
  CHECK(s.active_trick == single0);
  CHECK(s.pass_count == 0);
  CHECK(s.seen == CardSet{0});
  CHECK(s.played_by[opener] == CardSet{0});
  CHECK(s.current_player == next_seat(opener));
  for (int k = 1; k <= 3; ++k) {
    s = apply_action(s, Combination::pass());
    if (k < 3) {
      CHECK(s.pass_count == k);
      CHECK(s.active_trick == single0);
    }
  }
  CHECK(s.has_control());
  CHECK(s.pass_count == 0);
  CHECK(s.current_player == opener);
  CHECK(check_invariants(s));
}

TEST_CASE("playing out the hand wins immediately") {
  GameState s = deal_hands({CardSet{0}, CardSet{4, 5, 6}, CardSet{8, 9, 10, 11, 12}, CardSet{1, 2, 3, 13, 14, 15, 16}});
  s = apply_action(s, combo({0}));
  CHECK(s.terminal());
  CHECK(*s.winner == 0);
  const auto scores = terminal_scores(s);
  CHECK(scores == TerminalScores{15, -3, -5, -7});
  CHECK_THROWS_AS(legal_actions(s), ContractViolation);
  CHECK_THROWS_AS(terminal_scores(deal(1)), ContractViolation);
}

TEST_CASE("random games terminate with zero-sum recounted scores") {
  Rng rng(7);
  std::vector<Combination> legal;
  for (std::uint64_t game = 0; game < 5000; ++game) {
    GameState s = deal(derive_seed(7, game));
    while (!s.terminal()) {
      REQUIRE(s.ply < kMaxPlies);
      legal_actions(s, legal);
      apply_action_in_place(s, legal[rng.uniform_index(legal.size())]);
      if (s.ply % 17 == 0) REQUIRE(check_invariants(s));
    }
    REQUIRE(check_invariants(s));
    const auto scores = terminal_scores(s);
    int sum = 0, positive = 0;
    for (int p = 0; p < 4; ++p) {
      sum += scores[p];
      if (p == *s.winner) {
        int others = 0;
        for (int q = 0; q < 4; ++q)
          if (q != p) others += static_cast<int>(s.hands[q].cards().size());
        CHECK(scores[p] == others);
        positive += scores[p] > 0;
      } else {
        CHECK(scores[p] == -static_cast<int>(s.hands[p].cards().size()));
      }
    }
    CHECK(sum == 0);
    CHECK(positive == 1);
  }
}

TEST_CASE("identical seeds and actions give identical traces") {
  auto run = [](std::uint64_t seed) {
    std::vector<GameState> trace;
    Rng rng(seed);
    GameState s = deal(seed);
    while (!s.terminal()) {
      trace.push_back(s);
      const auto legal = legal_actions(s);
      apply_action_in_place(s, legal[rng.uniform_index(legal.size())]);
    }
    trace.push_back(s);
    return trace;
  };
  CHECK(run(5) == run(5));
}

TEST_CASE("transcripts round-trip and replay") {
  Transcript t;
  t.seed = 123;
  t.agents = {"random", "random", "greedy", "smart"};
  Rng rng(1);
  GameState s = deal(t.seed);
  while (!s.terminal()) {
    const auto legal = legal_actions(s);
    const Combination a = legal[rng.uniform_index(legal.size())];
    t.plies.push_back({s.current_player, a});
    apply_action_in_place(s, a);
  }
  t.scores = terminal_scores(s);

  const std::string line = to_json_line(t);
  const Transcript back = transcript_from_json_line(line);
  CHECK(back.seed == t.seed);
  CHECK(back.agents == t.agents);
  CHECK(back.scores == t.scores);
  REQUIRE(back.plies.size() == t.plies.size());
  for (std::size_t i = 0; i < t.plies.size(); ++i) {
    CHECK(back.plies[i].seat == t.plies[i].seat);
    CHECK(back.plies[i].action == t.plies[i].action);
  }
  const ReplayReport ok = replay(back);
  CHECK(ok.valid);
  CHECK(ok.reached_terminal);
  CHECK(ok.scores_match);

  std::stringstream stream;
  write_transcript(stream, t);
  write_transcript(stream, t);
  CHECK(read_transcripts(stream).size() == 2);

  Transcript broken = t;
  broken.plies[3].action = combo({0});
  const ReplayReport bad = replay(broken);
  CHECK_FALSE(bad.valid);
  REQUIRE(bad.first_illegal_ply.has_value());
  CHECK(*bad.first_illegal_ply == 3);

  CHECK_THROWS_AS(transcript_from_json_line("{not json"), ConfigError);
  CHECK_THROWS_AS(transcript_from_json_line(R"({"seed":1,"agents":["a","b","c","d"],"plies":[[0,[0,5]]],"scores":[0,0,0,0]})"), ConfigError);
}
