#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "big2/error.hpp"
#include "big2/rng.hpp"

namespace big2::nn {

template <typename T>
std::vector<double> softmax(std::span<const T> logits) {
  require(!logits.empty(), "softmax: no logits");
  double max_logit = static_cast<double>(logits[0]);
  for (T z : logits) max_logit = std::max(max_logit, static_cast<double>(z));
  std::vector<double> p(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(static_cast<double>(logits[i]) - max_logit);
    total += p[i];
  }
  for (double& x : p) x /= total;
  return p;
}

template <typename T>
std::vector<double> log_softmax(std::span<const T> logits) {
  require(!logits.empty(), "log_softmax: no logits");
  double max_logit = static_cast<double>(logits[0]);
  for (T z : logits) max_logit = std::max(max_logit, static_cast<double>(z));
  double total = 0.0;
  for (T z : logits) total += std::exp(static_cast<double>(z) - max_logit);
  const double log_z = max_logit + std::log(total);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = static_cast<double>(logits[i]) - log_z;
  return out;
}

// Entropy in nats of softmax(logits).
template <typename T>
double entropy(std::span<const T> logits) {
  const std::vector<double> logp = log_softmax(logits);
  double h = 0.0;
  for (double lp : logp) h -= std::exp(lp) * lp;
  return std::max(h, 0.0);
}

struct CategoricalSample {
  std::size_t index = 0;
  double log_prob = 0.0;
  double entropy = 0.0;
};

// Samples from softmax over the given candidates only.
template <typename T>
CategoricalSample sample_action(std::span<const T> logits, Rng& rng) {
  const std::vector<double> logp = log_softmax(logits);
  CategoricalSample out;
  if (logits.size() == 1) return out;
  const double u = rng.uniform01();
  double cumulative = 0.0;
  out.index = logits.size() - 1;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    cumulative += std::exp(logp[i]);
    if (u < cumulative) {
      out.index = i;
      break;
    }
  }
  out.log_prob = logp[out.index];
  for (double lp : logp) out.entropy -= std::exp(lp) * lp;
  out.entropy = std::max(out.entropy, 0.0);
  return out;
}

template <typename T>
std::size_t argmax(std::span<const T> values) {
  require(!values.empty(), "argmax: empty");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

}  // namespace big2::nn
