#include "big2/nn/network.hpp"

#include <cmath>
#include <sstream>

namespace big2::nn {
namespace {

constexpr int kTokens = kHandSize;
constexpr int kMiscInputs = kNumPlayers;  // 3 opponent counts + pass count
constexpr double kLayerNormEps = 1e-5;

template <typename T>
T sigmoid(T x) {
  return T(1) / (T(1) + std::exp(-x));
}

template <typename T>
MatR<T> silu(const MatR<T>& pre) {
  return pre.unaryExpr([](T x) { return x * sigmoid(x); });
}

// d/dx silu(x) = s(x) (1 + x (1 - s(x)))
template <typename T>
MatR<T> silu_backward(const MatR<T>& pre, const MatR<T>& d_out) {
  return d_out.binaryExpr(pre, [](T d, T x) {
    const T s = sigmoid(x);
    return d * s * (T(1) + x * (T(1) - s));
  });
}

template <typename T>
MatR<T> linear(const MatR<T>& x, const Parameters<T>& p, int w, int b) {
  MatR<T> y = x * p.mat(w);
  y.rowwise() += p.mat(b).row(0);
  return y;
}

template <typename T>
Eigen::Map<MatR<T>> grad_mat(std::span<T> grads, const ParameterLayout& layout, int index) {
  const TensorSpec& s = layout[index];
  return {grads.data() + s.offset, s.rows, s.cols};
}

// Accumulates dW, db for y = x W + b and returns dx.
template <typename T>
MatR<T> linear_backward(const MatR<T>& x, const MatR<T>& dy, const Parameters<T>& p, int w, int b,
                        std::span<T> grads) {
  const ParameterLayout& layout = *p.layout;
  grad_mat(grads, layout, w).noalias() += x.transpose() * dy;
  grad_mat(grads, layout, b).row(0) += dy.colwise().sum();
  return dy * p.mat(w).transpose();
}

template <typename T>
void linear_backward_no_input(const MatR<T>& x, const MatR<T>& dy, const Parameters<T>& p, int w,
                              int b, std::span<T> grads) {
  const ParameterLayout& layout = *p.layout;
  grad_mat(grads, layout, w).noalias() += x.transpose() * dy;
  grad_mat(grads, layout, b).row(0) += dy.colwise().sum();
}

const std::array<float, kNumCards>& set_indicator(const Observation& obs, int role) {
  switch (role) {
    case 0: return obs.trick_indicator;
    case 1: return obs.seen_indicator;
    default: return obs.opponent_played[static_cast<std::size_t>(role - 2)];
  }
}

}  // namespace

std::string NetworkConfig::canonical() const {
  std::ostringstream out;
  out << "d_emb=" << d_emb << ";heads=" << heads << ";attention_layers=" << attention_layers
      << ";d_set=" << d_set << ";d_misc=" << d_misc << ";d_state=" << d_state
      << ";d_ff=" << d_ff << ";d_act=" << d_act << ";d_action_hidden=" << d_action_hidden
      << ";d_value=" << d_value << ";value_head=" << (value_head ? 1 : 0);
  return out.str();
}

std::uint64_t NetworkConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : canonical()) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

void NetworkConfig::validate() const {
  const bool positive = d_emb > 0 && heads > 0 && attention_layers >= 0 && d_set > 0 &&
                        d_misc > 0 && d_state > 0 && d_ff > 0 && d_act > 0 &&
                        d_action_hidden > 0 && d_value > 0;
  if (!positive) throw ConfigError("network sizes must be positive");
  if (d_emb % heads != 0) throw ConfigError("d_emb must be divisible by heads");
}

ParameterLayout::ParameterLayout(const NetworkConfig& config) : config_(config) {
  config.validate();
  const int d = config.d_emb;
  card_embedding = add("card_embedding", kNumCards + 1, d);
  for (int l = 0; l < config.attention_layers; ++l) {
    const std::string p = "attention" + std::to_string(l) + ".";
    Attention a{};
    a.wq = add(p + "wq", d, d);
    a.bq = add(p + "bq", 1, d);
    a.wk = add(p + "wk", d, d);
    a.bk = add(p + "bk", 1, d);
    a.wv = add(p + "wv", d, d);
    a.bv = add(p + "bv", 1, d);
    a.wo = add(p + "wo", d, d);
    a.bo = add(p + "bo", 1, d);
    attention.push_back(a);
  }
  static constexpr std::array<const char*, kNumSetRoles> kRoles{
      "trick", "seen", "opponent1", "opponent2", "opponent3"};
  for (int r = 0; r < kNumSetRoles; ++r) {
    const std::string p = std::string("set.") + kRoles[static_cast<std::size_t>(r)] + ".";
    SetEncoder& s = sets[static_cast<std::size_t>(r)];
    s.w1 = add(p + "w1", d, config.d_set);
    s.b1 = add(p + "b1", 1, config.d_set);
    s.w2 = add(p + "w2", config.d_set, config.d_set);
    s.b2 = add(p + "b2", 1, config.d_set);
  }
  misc_w = add("misc.w", kMiscInputs, config.d_misc);
  misc_b = add("misc.b", 1, config.d_misc);
  const int concat = d + kNumSetRoles * config.d_set + config.d_misc;
  proj_w = add("state.proj.w", concat, config.d_state);
  proj_b = add("state.proj.b", 1, config.d_state);
  ln_gamma = add("state.ln.gamma", 1, config.d_state);
  ln_beta = add("state.ln.beta", 1, config.d_state);
  ff_w1 = add("state.ff.w1", config.d_state, config.d_ff);
  ff_b1 = add("state.ff.b1", 1, config.d_ff);
  ff_w2 = add("state.ff.w2", config.d_ff, config.d_state);
  ff_b2 = add("state.ff.b2", 1, config.d_state);
  act_w1 = add("action.w1", kActionFeatureSize, config.d_action_hidden);
  act_b1 = add("action.b1", 1, config.d_action_hidden);
  act_w2 = add("action.w2", config.d_action_hidden, config.d_act);
  act_b2 = add("action.b2", 1, config.d_act);
  s2a_w = add("state_to_action.w", config.d_state, config.d_act);
  s2a_b = add("state_to_action.b", 1, config.d_act);
  if (config.value_head) {
    val_w1 = add("value.w1", config.d_state, config.d_value);
    val_b1 = add("value.b1", 1, config.d_value);
    val_w2 = add("value.w2", config.d_value, 1);
    val_b2 = add("value.b2", 1, 1);
  }
}

int ParameterLayout::add(std::string name, int rows, int cols) {
  TensorSpec spec{std::move(name), rows, cols, total_};
  total_ += spec.size();
  tensors_.push_back(std::move(spec));
  return static_cast<int>(tensors_.size()) - 1;
}

template <typename T>
Parameters<T> init_parameters(const NetworkConfig& config, Rng& rng) {
  Parameters<T> p(config);
  const ParameterLayout& layout = *p.layout;
  for (std::size_t i = 0; i < layout.tensors().size(); ++i) {
    const TensorSpec& spec = layout.tensors()[i];
    std::span<T> values = p.span(static_cast<int>(i));
    const int index = static_cast<int>(i);
    if (index == layout.card_embedding) {
      for (T& v : values) v = static_cast<T>(rng.normal(0.0, 0.02));
    } else if (index == layout.ln_gamma) {
      for (T& v : values) v = T(1);
    } else if (spec.rows == 1) {
      for (T& v : values) v = T(0);  // biases, layer-norm shift
    } else if (index == layout.val_w2) {
      for (T& v : values) v = T(0);
    } else {
      const double bound = 1.0 / std::sqrt(static_cast<double>(spec.rows));
      for (T& v : values) v = static_cast<T>((2.0 * rng.uniform01() - 1.0) * bound);
    }
  }
  return p;
}

template <typename T>
ForwardCache<T> forward(const Parameters<T>& params, std::span<const Sample> batch) {
  const ParameterLayout& L = *params.layout;
  const NetworkConfig& cfg = L.config();
  const int B = static_cast<int>(batch.size());
  const int d = cfg.d_emb;
  const int heads = cfg.heads;
  const int hd = d / heads;
  const T attn_scale = T(1) / std::sqrt(static_cast<T>(hd));

  ForwardCache<T> c;
  c.layout = &L;
  c.batch = B;
  c.cand_offset.assign(static_cast<std::size_t>(B) + 1, 0);
  for (int b = 0; b < B; ++b)
    c.cand_offset[b + 1] = c.cand_offset[b] + static_cast<int>(batch[b].candidates.size());
  const int C = c.cand_offset[B];

  // Hand tokens.
  const auto E = params.mat(L.card_embedding);
  c.token_ids.resize(static_cast<std::size_t>(B) * kTokens);
  c.token_valid.resize(static_cast<std::size_t>(B) * kTokens);
  c.valid_count.assign(static_cast<std::size_t>(B), T(0));
  MatR<T> x(B * kTokens, d);
  for (int b = 0; b < B; ++b) {
    for (int i = 0; i < kTokens; ++i) {
      int id = batch[b].obs->hand_ids[i];
      const bool valid = id >= 0 && id < kNumCards;
      if (!valid) id = kPadCard;
      c.token_ids[b * kTokens + i] = id;
      c.token_valid[b * kTokens + i] = valid ? T(1) : T(0);
      c.valid_count[b] += valid ? T(1) : T(0);
      x.row(b * kTokens + i) = E.row(id);
    }
  }

  // Masked self-attention layers with residual connections.
  for (const auto& A : L.attention) {
    typename ForwardCache<T>::AttentionLayer layer;
    layer.input = x;
    layer.q = linear(x, params, A.wq, A.bq);
    layer.k = linear(x, params, A.wk, A.bk);
    layer.v = linear(x, params, A.wv, A.bv);
    layer.mixed = MatR<T>::Zero(B * kTokens, d);
    layer.probs.assign(static_cast<std::size_t>(B) * heads * kTokens * kTokens, T(0));
    for (int b = 0; b < B; ++b) {
      const T* valid = &c.token_valid[static_cast<std::size_t>(b) * kTokens];
      for (int h = 0; h < heads; ++h) {
        T* probs = &layer.probs[((static_cast<std::size_t>(b) * heads + h) * kTokens) * kTokens];
        for (int i = 0; i < kTokens; ++i) {
          const auto qi = layer.q.row(b * kTokens + i).segment(h * hd, hd);
          T row_max = -std::numeric_limits<T>::infinity();
          T logits[kTokens];
          for (int j = 0; j < kTokens; ++j) {
            if (valid[j] == T(0)) continue;
            logits[j] = qi.dot(layer.k.row(b * kTokens + j).segment(h * hd, hd)) * attn_scale;
            row_max = std::max(row_max, logits[j]);
          }
          T total = T(0);
          for (int j = 0; j < kTokens; ++j) {
            if (valid[j] == T(0)) continue;
            probs[i * kTokens + j] = std::exp(logits[j] - row_max);
            total += probs[i * kTokens + j];
          }
          auto out = layer.mixed.row(b * kTokens + i).segment(h * hd, hd);
          for (int j = 0; j < kTokens; ++j) {
            if (valid[j] == T(0)) continue;
            probs[i * kTokens + j] /= total;
            out += probs[i * kTokens + j] * layer.v.row(b * kTokens + j).segment(h * hd, hd);
          }
        }
      }
    }
    layer.output = x + linear(layer.mixed, params, A.wo, A.bo);
    x = layer.output;
    c.attention.push_back(std::move(layer));
  }

  // Mean-pool over held cards.
  c.pooled = MatR<T>::Zero(B, d);
  for (int b = 0; b < B; ++b) {
    for (int i = 0; i < kTokens; ++i)
      if (c.token_valid[b * kTokens + i] != T(0)) c.pooled.row(b) += x.row(b * kTokens + i);
    if (c.valid_count[b] > T(0)) c.pooled.row(b) /= c.valid_count[b];
  }

  // Indicator sets through the shared card table, then per-role encoders.
  const auto card_rows = E.topRows(kNumCards);
  for (int r = 0; r < kNumSetRoles; ++r) {
    const auto& S = L.sets[static_cast<std::size_t>(r)];
    MatR<T>& ind = c.set_indicator[r];
    ind.resize(B, kNumCards);
    for (int b = 0; b < B; ++b) {
      const auto& src = set_indicator(*batch[b].obs, r);
      for (int k = 0; k < kNumCards; ++k) ind(b, k) = static_cast<T>(src[k]);
    }
    c.set_emb[r] = ind * card_rows;
    c.set_pre1[r] = linear(c.set_emb[r], params, S.w1, S.b1);
    c.set_h1[r] = silu(c.set_pre1[r]);
    c.set_pre2[r] = linear(c.set_h1[r], params, S.w2, S.b2);
    c.set_h2[r] = silu(c.set_pre2[r]);
  }

  c.misc_input.resize(B, kMiscInputs);
  for (int b = 0; b < B; ++b) {
    for (int o = 0; o < kNumPlayers - 1; ++o)
      c.misc_input(b, o) = static_cast<T>(batch[b].obs->opponent_counts[o]);
    c.misc_input(b, kNumPlayers - 1) = static_cast<T>(batch[b].obs->pass_count);
  }
  c.misc_pre = linear(c.misc_input, params, L.misc_w, L.misc_b);
  c.misc_h = silu(c.misc_pre);

  const int concat_width = d + kNumSetRoles * cfg.d_set + cfg.d_misc;
  c.concat.resize(B, concat_width);
  c.concat.leftCols(d) = c.pooled;
  for (int r = 0; r < kNumSetRoles; ++r) c.concat.middleCols(d + r * cfg.d_set, cfg.d_set) = c.set_h2[r];
  c.concat.rightCols(cfg.d_misc) = c.misc_h;

  // Projection, layer norm, residual feed-forward.
  c.proj = linear(c.concat, params, L.proj_w, L.proj_b);
  c.xhat.resize(B, cfg.d_state);
  c.ln_rstd.resize(static_cast<std::size_t>(B));
  for (int b = 0; b < B; ++b) {
    const T mean = c.proj.row(b).mean();
    const T var = (c.proj.row(b).array() - mean).square().mean();
    const T rstd = T(1) / std::sqrt(var + static_cast<T>(kLayerNormEps));
    c.ln_rstd[b] = rstd;
    c.xhat.row(b) = (c.proj.row(b).array() - mean) * rstd;
  }
  c.ln_out = (c.xhat.array().rowwise() * params.mat(L.ln_gamma).row(0).array()).matrix();
  c.ln_out.rowwise() += params.mat(L.ln_beta).row(0);
  c.ff_pre = linear(c.ln_out, params, L.ff_w1, L.ff_b1);
  c.ff_h = silu(c.ff_pre);
  c.state = c.ln_out + linear(c.ff_h, params, L.ff_w2, L.ff_b2);

  if (cfg.value_head) {
    c.val_pre = linear(c.state, params, L.val_w1, L.val_b1);
    c.val_h = silu(c.val_pre);
    const MatR<T> v = linear(c.val_h, params, L.val_w2, L.val_b2);
    c.values.assign(v.data(), v.data() + B);
  }

  // Candidate actions and scaled dot-product scores.
  c.features.resize(C, kActionFeatureSize);
  for (int b = 0; b < B; ++b) {
    for (std::size_t k = 0; k < batch[b].candidates.size(); ++k) {
      const ActionFeatures& f = batch[b].candidates[k];
      for (int j = 0; j < kActionFeatureSize; ++j)
        c.features(c.cand_offset[b] + static_cast<int>(k), j) = static_cast<T>(f[j]);
    }
  }
  c.state_act = linear(c.state, params, L.s2a_w, L.s2a_b);
  c.scores.assign(static_cast<std::size_t>(C), T(0));
  if (C > 0) {
    c.act_pre = linear(c.features, params, L.act_w1, L.act_b1);
    c.act_h = silu(c.act_pre);
    c.act_emb = linear(c.act_h, params, L.act_w2, L.act_b2);
    const T score_scale = T(1) / std::sqrt(static_cast<T>(cfg.d_act));
    for (int b = 0; b < B; ++b)
      for (int k = c.cand_offset[b]; k < c.cand_offset[b + 1]; ++k)
        c.scores[k] = c.state_act.row(b).dot(c.act_emb.row(k)) * score_scale;
  }
  c.recorded = true;
  return c;
}

template <typename T>
void backward(const Parameters<T>& params, const ForwardCache<T>& c, std::span<const T> d_scores,
              std::span<const T> d_values, std::span<T> grads) {
  require(c.recorded, "backward: forward cache was not recorded");
  require(c.layout == params.layout.get(), "backward: cache recorded with other parameters");
  require(grads.size() == params.size(), "backward: gradient buffer size mismatch");
  require(d_scores.size() == c.scores.size(), "backward: d_scores misaligned");
  require(d_values.empty() || d_values.size() == c.values.size(), "backward: d_values misaligned");

  const ParameterLayout& L = *params.layout;
  const NetworkConfig& cfg = L.config();
  const int B = c.batch;
  const int C = c.cand_offset[B];
  const int d = cfg.d_emb;
  const int heads = cfg.heads;
  const int hd = d / heads;
  const T attn_scale = T(1) / std::sqrt(static_cast<T>(hd));

  MatR<T> d_state = MatR<T>::Zero(B, cfg.d_state);

  if (C > 0) {
    const T score_scale = T(1) / std::sqrt(static_cast<T>(cfg.d_act));
    MatR<T> d_state_act = MatR<T>::Zero(B, cfg.d_act);
    MatR<T> d_act_emb(C, cfg.d_act);
    for (int b = 0; b < B; ++b) {
      for (int k = c.cand_offset[b]; k < c.cand_offset[b + 1]; ++k) {
        const T g = d_scores[k] * score_scale;
        d_state_act.row(b) += g * c.act_emb.row(k);
        d_act_emb.row(k) = g * c.state_act.row(b);
      }
    }
    const MatR<T> d_act_h = linear_backward(c.act_h, d_act_emb, params, L.act_w2, L.act_b2, grads);
    linear_backward_no_input(c.features, silu_backward(c.act_pre, d_act_h), params, L.act_w1,
                             L.act_b1, grads);
    d_state += linear_backward(c.state, d_state_act, params, L.s2a_w, L.s2a_b, grads);
  }

  if (cfg.value_head && !d_values.empty()) {
    MatR<T> dv(B, 1);
    for (int b = 0; b < B; ++b) dv(b, 0) = d_values[b];
    const MatR<T> d_val_h = linear_backward(c.val_h, dv, params, L.val_w2, L.val_b2, grads);
    d_state += linear_backward(c.state, silu_backward(c.val_pre, d_val_h), params, L.val_w1,
                               L.val_b1, grads);
  }

  // Residual feed-forward and layer norm.
  const MatR<T> d_ff_h = linear_backward(c.ff_h, d_state, params, L.ff_w2, L.ff_b2, grads);
  MatR<T> d_ln = d_state + linear_backward(c.ln_out, silu_backward(c.ff_pre, d_ff_h), params,
                                           L.ff_w1, L.ff_b1, grads);
  grad_mat(grads, L, L.ln_gamma).row(0) += (d_ln.array() * c.xhat.array()).colwise().sum().matrix();
  grad_mat(grads, L, L.ln_beta).row(0) += d_ln.colwise().sum();
  const MatR<T> d_xhat = (d_ln.array().rowwise() * params.mat(L.ln_gamma).row(0).array()).matrix();
  MatR<T> d_proj(B, cfg.d_state);
  for (int b = 0; b < B; ++b) {
    const T mean_d = d_xhat.row(b).mean();
    const T mean_dx = (d_xhat.row(b).array() * c.xhat.row(b).array()).mean();
    d_proj.row(b) =
        ((d_xhat.row(b).array() - mean_d - c.xhat.row(b).array() * mean_dx) * c.ln_rstd[b]).matrix();
  }
  const MatR<T> d_concat = linear_backward(c.concat, d_proj, params, L.proj_w, L.proj_b, grads);

  // Scalar features.
  const MatR<T> d_misc_h = d_concat.rightCols(cfg.d_misc);
  linear_backward_no_input(c.misc_input, silu_backward(c.misc_pre, d_misc_h), params, L.misc_w,
                           L.misc_b, grads);

  // Indicator sets back into the shared card table.
  auto d_E = grad_mat(grads, L, L.card_embedding);
  for (int r = 0; r < kNumSetRoles; ++r) {
    const auto& S = L.sets[static_cast<std::size_t>(r)];
    const MatR<T> d_h2 = d_concat.middleCols(d + r * cfg.d_set, cfg.d_set);
    const MatR<T> d_h1 =
        linear_backward(c.set_h1[r], silu_backward(c.set_pre2[r], d_h2), params, S.w2, S.b2, grads);
    const MatR<T> d_emb =
        linear_backward(c.set_emb[r], silu_backward(c.set_pre1[r], d_h1), params, S.w1, S.b1, grads);
    d_E.topRows(kNumCards).noalias() += c.set_indicator[r].transpose() * d_emb;
  }

  // Pooling.
  const MatR<T> d_pooled = d_concat.leftCols(d);
  MatR<T> dx = MatR<T>::Zero(B * kTokens, d);
  for (int b = 0; b < B; ++b) {
    if (c.valid_count[b] == T(0)) continue;
    for (int i = 0; i < kTokens; ++i)
      if (c.token_valid[b * kTokens + i] != T(0))
        dx.row(b * kTokens + i) = d_pooled.row(b) / c.valid_count[b];
  }

  // Attention layers in reverse.
  for (int l = static_cast<int>(L.attention.size()) - 1; l >= 0; --l) {
    const auto& A = L.attention[static_cast<std::size_t>(l)];
    const auto& layer = c.attention[static_cast<std::size_t>(l)];
    const MatR<T> d_mixed = linear_backward(layer.mixed, dx, params, A.wo, A.bo, grads);
    MatR<T> dq = MatR<T>::Zero(B * kTokens, d);
    MatR<T> dk = MatR<T>::Zero(B * kTokens, d);
    MatR<T> dv = MatR<T>::Zero(B * kTokens, d);
    for (int b = 0; b < B; ++b) {
      const T* valid = &c.token_valid[static_cast<std::size_t>(b) * kTokens];
      for (int h = 0; h < heads; ++h) {
        const T* probs = &layer.probs[((static_cast<std::size_t>(b) * heads + h) * kTokens) * kTokens];
        for (int i = 0; i < kTokens; ++i) {
          const auto d_out = d_mixed.row(b * kTokens + i).segment(h * hd, hd);
          T d_prob[kTokens];
          T weighted = T(0);
          for (int j = 0; j < kTokens; ++j) {
            if (valid[j] == T(0)) continue;
            const T p = probs[i * kTokens + j];
            d_prob[j] = d_out.dot(layer.v.row(b * kTokens + j).segment(h * hd, hd));
            dv.row(b * kTokens + j).segment(h * hd, hd) += p * d_out;
            weighted += p * d_prob[j];
          }
          const auto qi = layer.q.row(b * kTokens + i).segment(h * hd, hd);
          for (int j = 0; j < kTokens; ++j) {
            if (valid[j] == T(0)) continue;
            const T d_logit = probs[i * kTokens + j] * (d_prob[j] - weighted) * attn_scale;
            dq.row(b * kTokens + i).segment(h * hd, hd) +=
                d_logit * layer.k.row(b * kTokens + j).segment(h * hd, hd);
            dk.row(b * kTokens + j).segment(h * hd, hd) += d_logit * qi;
          }
        }
      }
    }
    dx += linear_backward(layer.input, dq, params, A.wq, A.bq, grads);
    dx += linear_backward(layer.input, dk, params, A.wk, A.bk, grads);
    dx += linear_backward(layer.input, dv, params, A.wv, A.bv, grads);
  }

  for (int t = 0; t < B * kTokens; ++t) d_E.row(c.token_ids[t]) += dx.row(t);
}

template <typename T>
std::vector<T> forward_state(const Observation& obs, const Parameters<T>& params) {
  const Sample sample{&obs, {}};
  const ForwardCache<T> c = forward(params, std::span<const Sample>(&sample, 1));
  return {c.state.data(), c.state.data() + c.state.cols()};
}

template <typename T>
std::vector<T> score_actions(std::span<const T> state_embedding,
                             std::span<const ActionFeatures> candidates, const Parameters<T>& params) {
  const ParameterLayout& L = *params.layout;
  const NetworkConfig& cfg = L.config();
  require(state_embedding.size() == static_cast<std::size_t>(cfg.d_state),
          "score_actions: state embedding has wrong width");
  require(!candidates.empty(), "score_actions: no candidates");
  const Eigen::Map<const MatR<T>> s(state_embedding.data(), 1, cfg.d_state);
  const MatR<T> state_act = linear(MatR<T>(s), params, L.s2a_w, L.s2a_b);
  MatR<T> features(static_cast<int>(candidates.size()), kActionFeatureSize);
  for (std::size_t k = 0; k < candidates.size(); ++k)
    for (int j = 0; j < kActionFeatureSize; ++j)
      features(static_cast<int>(k), j) = static_cast<T>(candidates[k][j]);
  const MatR<T> emb = linear(silu(linear(features, params, L.act_w1, L.act_b1)), params, L.act_w2, L.act_b2);
  const T scale = T(1) / std::sqrt(static_cast<T>(cfg.d_act));
  std::vector<T> scores(candidates.size());
  for (std::size_t k = 0; k < candidates.size(); ++k)
    scores[k] = state_act.row(0).dot(emb.row(static_cast<int>(k))) * scale;
  return scores;
}

template <typename T>
T value_estimate(std::span<const T> state_embedding, const Parameters<T>& params) {
  const ParameterLayout& L = *params.layout;
  const NetworkConfig& cfg = L.config();
  require(cfg.value_head, "value_estimate: network has no value head");
  require(state_embedding.size() == static_cast<std::size_t>(cfg.d_state),
          "value_estimate: state embedding has wrong width");
  const Eigen::Map<const MatR<T>> s(state_embedding.data(), 1, cfg.d_state);
  const MatR<T> v = linear(silu(linear(MatR<T>(s), params, L.val_w1, L.val_b1)), params, L.val_w2, L.val_b2);
  return v(0, 0);
}

#define BIG2_INSTANTIATE(T)                                                                    \
  template Parameters<T> init_parameters<T>(const NetworkConfig&, Rng&);                       \
  template ForwardCache<T> forward<T>(const Parameters<T>&, std::span<const Sample>);          \
  template void backward<T>(const Parameters<T>&, const ForwardCache<T>&, std::span<const T>,  \
                            std::span<const T>, std::span<T>);                                 \
  template std::vector<T> forward_state<T>(const Observation&, const Parameters<T>&);          \
  template std::vector<T> score_actions<T>(std::span<const T>, std::span<const ActionFeatures>, \
                                           const Parameters<T>&);                              \
  template T value_estimate<T>(std::span<const T>, const Parameters<T>&);

BIG2_INSTANTIATE(float)
BIG2_INSTANTIATE(double)

#undef BIG2_INSTANTIATE

}  // namespace big2::nn
