#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "big2/encoders.hpp"
#include "big2/nn/tensor.hpp"
#include "big2/rng.hpp"

namespace big2::nn {

struct NetworkConfig {
  int d_emb = 64;
  int heads = 4;
  int attention_layers = 1;
  int d_set = 64;             // per-role indicator-set encoder width
  int d_misc = 32;            // opponent counts + pass count encoder width
  int d_state = 256;
  int d_ff = 256;             // residual feed-forward hidden width
  int d_act = 128;
  int d_action_hidden = 128;  // first layer of the action MLP
  int d_value = 128;          // value-head hidden width
  bool value_head = true;     // policy nets have one, Q nets do not

  // Canonical "key=value;..." string; the checkpoint config hash is taken
  // over it.
  std::string canonical() const;
  std::uint64_t hash() const;
  void validate() const;
  bool operator==(const NetworkConfig&) const = default;
};

// Indicator-set roles, each with its own encoder.
enum class SetRole { kTrick = 0, kSeen, kOpponent1, kOpponent2, kOpponent3 };
inline constexpr int kNumSetRoles = 5;

struct TensorSpec {
  std::string name;
  int rows = 0;
  int cols = 0;
  std::size_t offset = 0;
  std::size_t size() const { return static_cast<std::size_t>(rows) * cols; }
};

// Named tensors (weights stored [in, out], biases as 1 x out) packed into one
// flat buffer. Index members point into tensors().
class ParameterLayout {
 public:
  explicit ParameterLayout(const NetworkConfig& config);

  const NetworkConfig& config() const { return config_; }
  const std::vector<TensorSpec>& tensors() const { return tensors_; }
  std::size_t total() const { return total_; }
  const TensorSpec& operator[](int index) const { return tensors_[static_cast<std::size_t>(index)]; }

  struct Attention { int wq, bq, wk, bk, wv, bv, wo, bo; };
  struct SetEncoder { int w1, b1, w2, b2; };

  int card_embedding;
  std::vector<Attention> attention;
  std::array<SetEncoder, kNumSetRoles> sets;
  int misc_w, misc_b;
  int proj_w, proj_b;
  int ln_gamma, ln_beta;
  int ff_w1, ff_b1, ff_w2, ff_b2;
  int act_w1, act_b1, act_w2, act_b2;
  int s2a_w, s2a_b;
  int val_w1 = -1, val_b1 = -1, val_w2 = -1, val_b2 = -1;

 private:
  int add(std::string name, int rows, int cols);

  NetworkConfig config_;
  std::vector<TensorSpec> tensors_;
  std::size_t total_ = 0;
};

template <typename T>
using MatR = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using RowVec = Eigen::Matrix<T, 1, Eigen::Dynamic>;

template <typename T>
struct Parameters {
  std::shared_ptr<const ParameterLayout> layout;
  Buffer<T> values;

  Parameters() = default;
  explicit Parameters(const NetworkConfig& config)
      : layout(std::make_shared<const ParameterLayout>(config)), values(layout->total(), T{0}) {}

  const NetworkConfig& config() const { return layout->config(); }
  std::size_t size() const { return values.size(); }

  Eigen::Map<MatR<T>> mat(int index) {
    const TensorSpec& s = (*layout)[index];
    return {values.data() + s.offset, s.rows, s.cols};
  }
  Eigen::Map<const MatR<T>> mat(int index) const {
    const TensorSpec& s = (*layout)[index];
    return {values.data() + s.offset, s.rows, s.cols};
  }
  std::span<T> span(int index) {
    const TensorSpec& s = (*layout)[index];
    return {values.data() + s.offset, s.size()};
  }
  std::span<const T> span(int index) const {
    const TensorSpec& s = (*layout)[index];
    return {values.data() + s.offset, s.size()};
  }

  template <typename U>
  Parameters<U> cast() const {
    Parameters<U> out;
    out.layout = layout;
    out.values.assign(values.begin(), values.end());
    return out;
  }
};

// Fan-in-scaled uniform linear maps, N(0, 0.02) embeddings, zero biases,
// unit layer-norm gain, zero-initialized final value layer.
template <typename T>
Parameters<T> init_parameters(const NetworkConfig& config, Rng& rng);

// One decision point: an observation and its legal candidates.
struct Sample {
  const Observation* obs = nullptr;
  std::span<const ActionFeatures> candidates;
};

// Activations recorded by forward() and consumed by backward().
template <typename T>
struct ForwardCache {
  bool recorded = false;
  const ParameterLayout* layout = nullptr;
  int batch = 0;
  std::vector<int> cand_offset;  // batch + 1 entries

  std::vector<int> token_ids;    // batch * 13, pads mapped to 52
  std::vector<T> token_valid;    // batch * 13 in {0, 1}
  std::vector<T> valid_count;    // batch
  struct AttentionLayer {
    MatR<T> input, q, k, v, mixed, output;
    std::vector<T> probs;        // batch * heads * 13 * 13
  };
  std::vector<AttentionLayer> attention;
  MatR<T> pooled;
  std::array<MatR<T>, kNumSetRoles> set_indicator, set_emb, set_pre1, set_h1, set_pre2, set_h2;
  MatR<T> misc_input, misc_pre, misc_h;
  MatR<T> concat, proj, xhat, ln_out, ff_pre, ff_h;
  std::vector<T> ln_rstd;
  MatR<T> state;                 // batch x d_state
  MatR<T> val_pre, val_h;
  MatR<T> features, act_pre, act_h, act_emb;
  MatR<T> state_act;             // batch x d_act

  std::vector<T> scores;         // all candidates, sample-major
  std::vector<T> values;         // batch (empty without a value head)

  std::span<const T> sample_scores(int b) const {
    return {scores.data() + cand_offset[b], static_cast<std::size_t>(cand_offset[b + 1] - cand_offset[b])};
  }
};

template <typename T>
ForwardCache<T> forward(const Parameters<T>& params, std::span<const Sample> batch);

// Reverse pass for a recorded forward. d_scores aligns with cache.scores,
// d_values with cache.values (may be empty). Gradients are accumulated into
// `grads` (size params.size()).
template <typename T>
void backward(const Parameters<T>& params, const ForwardCache<T>& cache,
              std::span<const T> d_scores, std::span<const T> d_values, std::span<T> grads);

// Single-decision conveniences.
template <typename T>
std::vector<T> forward_state(const Observation& obs, const Parameters<T>& params);
template <typename T>
std::vector<T> score_actions(std::span<const T> state_embedding,
                             std::span<const ActionFeatures> candidates, const Parameters<T>& params);
template <typename T>
T value_estimate(std::span<const T> state_embedding, const Parameters<T>& params);

}  // namespace big2::nn
