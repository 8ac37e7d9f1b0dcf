#pragma once

#include <vector>

#include "big2/agents.hpp"
#include "big2/game.hpp"
#include "big2/nn/network.hpp"
#include "big2/rng.hpp"

namespace big2::testing {

// States reached by uniform random play from seeded deals, sampled at every
// decision point with probability `keep`.
inline std::vector<GameState> random_states(std::uint64_t seed, std::size_t count, double keep = 0.2) {
  std::vector<GameState> out;
  Rng rng(seed);
  std::uint64_t game = 0;
  while (out.size() < count) {
    GameState s = deal(derive_seed(seed, game++));
    while (!s.terminal() && out.size() < count) {
      if (rng.bernoulli(keep)) out.push_back(s);
      const auto legal = legal_actions(s);
      apply_action_in_place(s, legal[rng.uniform_index(legal.size())]);
    }
  }
  return out;
}

// A network small enough for finite-difference checks.
inline nn::NetworkConfig tiny_network(bool value_head = true) {
  nn::NetworkConfig c;
  c.d_emb = 8;
  c.heads = 2;
  c.attention_layers = 2;
  c.d_set = 6;
  c.d_misc = 4;
  c.d_state = 10;
  c.d_ff = 7;
  c.d_act = 6;
  c.d_action_hidden = 5;
  c.d_value = 4;
  c.value_head = value_head;
  return c;
}

// Every entry drawn uniformly from [-scale, scale], layer-norm gains near 1.
template <typename T>
nn::Parameters<T> random_network(const nn::NetworkConfig& config, std::uint64_t seed, double scale = 0.6) {
  nn::Parameters<T> p(config);
  Rng rng(seed);
  for (T& v : p.values) v = static_cast<T>((2.0 * rng.uniform01() - 1.0) * scale);
  for (T& g : p.span(p.layout->ln_gamma)) g = static_cast<T>(1.0 + 0.3 * (2.0 * rng.uniform01() - 1.0));
  return p;
}

}  // namespace big2::testing
