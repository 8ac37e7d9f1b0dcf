#include "big2/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

#include "big2/error.hpp"
#include "json.hpp"

namespace big2 {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    const json* v = find(key);
    if (!v) return;
    if constexpr (std::is_same_v<T, bool>) {
      if (!v->is_boolean()) throw type_error(key, "a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v->is_number_integer()) throw type_error(key, "an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (!v->is_number_unsigned()) throw type_error(key, "a non-negative integer");
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v->is_number()) throw type_error(key, "a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v->is_string()) throw type_error(key, "a string");
    } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
      if (!v->is_array()) throw type_error(key, "an array of strings");
      for (const json& e : *v)
        if (!e.is_string()) throw type_error(key, "an array of strings");
    }
    out = v->get<T>();
  }

  const json* child(const std::string& key) { return find(key); }

  std::string path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& item : j_.items())
      if (!seen_.count(item.key())) throw ConfigError("unknown config key '" + path(item.key()) + "'");
  }

 private:
  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  std::string where() const { return path_.empty() ? "config" : path_; }
  ConfigError type_error(const std::string& key, const char* expected) const {
    return ConfigError("config key '" + path(key) + "' must be " + expected);
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

CurriculumKind parse_curriculum_kind(const std::string& s) {
  if (s == "current") return CurriculumKind::kCurrentSelfPlay;
  if (s == "checkpoint") return CurriculumKind::kCheckpointSelfPlay;
  if (s == "fixed") return CurriculumKind::kFixedOpponent;
  throw ConfigError("unknown curriculum kind '" + s + "' (expected current, checkpoint or fixed)");
}

std::string curriculum_kind_name(CurriculumKind k) {
  switch (k) {
    case CurriculumKind::kCurrentSelfPlay: return "current";
    case CurriculumKind::kCheckpointSelfPlay: return "checkpoint";
    case CurriculumKind::kFixedOpponent: return "fixed";
  }
  return "?";
}

bool is_heuristic(const std::string& name) { return name == "random" || name == "greedy" || name == "smart"; }

void read_ppo(ObjectReader& r, rl::PPOConfig& p) {
  r.get("clip", p.clip);
  r.get("gamma", p.gamma);
  r.get("lambda", p.lambda);
  r.get("lr", p.lr);
  r.get("epochs", p.epochs);
  r.get("minibatch", p.minibatch);
  r.get("value_coef", p.value_coef);
  r.get("entropy_coef", p.entropy_coef);
  r.get("max_grad_norm", p.max_grad_norm);
}

void read_value(ObjectReader& r, rl::ValueConfig& v) {
  r.get("lr", v.lr);
  r.get("gamma", v.gamma);
  r.get("epsilon_start", v.epsilon_start);
  r.get("target_sync", v.target_sync);
  r.get("max_grad_norm", v.max_grad_norm);
  r.get("reward_divisor", v.reward_divisor);
}

void read_network(ObjectReader& r, nn::NetworkConfig& n) {
  r.get("d_emb", n.d_emb);
  r.get("heads", n.heads);
  r.get("attention_layers", n.attention_layers);
  r.get("d_set", n.d_set);
  r.get("d_misc", n.d_misc);
  r.get("d_state", n.d_state);
  r.get("d_ff", n.d_ff);
  r.get("d_act", n.d_act);
  r.get("d_action_hidden", n.d_action_hidden);
  r.get("d_value", n.d_value);
}

}  // namespace

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kPPO: return "ppo";
    case Algorithm::kMonteCarlo: return "mc_q";
    case Algorithm::kSarsa: return "sarsa";
    case Algorithm::kQLearning: return "q_learning";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "ppo") return Algorithm::kPPO;
  if (name == "mc_q") return Algorithm::kMonteCarlo;
  if (name == "sarsa") return Algorithm::kSarsa;
  if (name == "q_learning") return Algorithm::kQLearning;
  throw ConfigError("unknown algorithm '" + name + "' (expected ppo, mc_q, sarsa or q_learning)");
}

bool is_value_method(Algorithm a) { return a != Algorithm::kPPO; }

rl::ValueMethod value_method(Algorithm a) {
  switch (a) {
    case Algorithm::kMonteCarlo: return rl::ValueMethod::kMonteCarlo;
    case Algorithm::kSarsa: return rl::ValueMethod::kSarsa;
    case Algorithm::kQLearning: return rl::ValueMethod::kQLearning;
    case Algorithm::kPPO: break;
  }
  throw ContractViolation("value_method: PPO is not a value method");
}

nn::NetworkConfig RunConfig::network_config() const {
  nn::NetworkConfig n = network;
  n.value_head = !is_value_method(algorithm);
  return n;
}

void RunConfig::validate() const {
  if (total_batches <= 0) throw ConfigError("total_batches must be positive");
  if (episodes_per_batch <= 0) throw ConfigError("episodes_per_batch must be positive");
  if (workers <= 0) throw ConfigError("workers must be positive");
  if (checkpoint_every < 0 || pool_period < 0 || entropy_every < 0 || eval_every < 0)
    throw ConfigError("schedule intervals must be non-negative (0 disables)");
  if (entropy_states <= 0) throw ConfigError("entropy_states must be positive");
  if (eval_games <= 0) throw ConfigError("eval_games must be positive");
  for (const std::string& o : eval_opponents)
    if (!is_heuristic(o)) throw ConfigError("unknown evaluation opponent '" + o + "'");
  if (curriculum.kind == CurriculumKind::kFixedOpponent && !is_heuristic(curriculum.opponent))
    throw ConfigError("unknown fixed opponent '" + curriculum.opponent + "'");
  if (!(curriculum.current_probability >= 0.0 && curriculum.current_probability <= 1.0))
    throw ConfigError("curriculum.current_probability must lie in [0, 1]");
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
  network_config().validate();
  ppo.validate();
  value.validate();
}

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig cfg;
  ObjectReader r(j, "");
  r.get("name", cfg.name);
  std::string algorithm = to_string(cfg.algorithm);
  r.get("algorithm", algorithm);
  cfg.algorithm = parse_algorithm(algorithm);
  if (const json* c = r.child("curriculum")) {
    ObjectReader cr(*c, "curriculum");
    std::string kind = curriculum_kind_name(cfg.curriculum.kind);
    cr.get("kind", kind);
    cfg.curriculum.kind = parse_curriculum_kind(kind);
    cr.get("opponent", cfg.curriculum.opponent);
    cr.get("current_probability", cfg.curriculum.current_probability);
    cr.finish();
  }
  r.get("total_batches", cfg.total_batches);
  r.get("episodes_per_batch", cfg.episodes_per_batch);
  r.get("seed", cfg.seed);
  r.get("output_dir", cfg.output_dir);
  r.get("workers", cfg.workers);
  r.get("deterministic", cfg.deterministic);
  if (const json* p = r.child("ppo")) {
    ObjectReader pr(*p, "ppo");
    read_ppo(pr, cfg.ppo);
    pr.finish();
  }
  if (const json* v = r.child("value")) {
    ObjectReader vr(*v, "value");
    read_value(vr, cfg.value);
    vr.finish();
  }
  if (const json* n = r.child("network")) {
    ObjectReader nr(*n, "network");
    read_network(nr, cfg.network);
    nr.finish();
  }
  if (const json* s = r.child("schedule")) {
    ObjectReader sr(*s, "schedule");
    sr.get("checkpoint_every", cfg.checkpoint_every);
    sr.get("pool_period", cfg.pool_period);
    sr.get("entropy_every", cfg.entropy_every);
    sr.get("entropy_states", cfg.entropy_states);
    sr.get("eval_every", cfg.eval_every);
    sr.get("eval_games", cfg.eval_games);
    sr.get("eval_opponents", cfg.eval_opponents);
    sr.get("eval_greedy_policy", cfg.eval_greedy_policy);
    sr.finish();
  }
  r.finish();
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(text.str());
}

void apply_env_overrides(RunConfig& cfg) {
  auto parse = [](const char* name, const char* value) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(value, &end, 10);
    if (*value == '\0' || *end != '\0' || *value == '-')
      throw ConfigError(std::string(name) + " must be a non-negative integer");
    return v;
  };
  if (const char* s = std::getenv("BIG2_SEED")) cfg.seed = parse("BIG2_SEED", s);
  if (const char* w = std::getenv("BIG2_WORKERS")) cfg.workers = static_cast<int>(parse("BIG2_WORKERS", w));
  cfg.validate();
}

std::string to_json(const RunConfig& cfg) {
  ordered_json j;
  j["name"] = cfg.name;
  j["algorithm"] = to_string(cfg.algorithm);
  j["curriculum"] = {{"kind", curriculum_kind_name(cfg.curriculum.kind)},
                     {"opponent", cfg.curriculum.opponent},
                     {"current_probability", cfg.curriculum.current_probability}};
  j["total_batches"] = cfg.total_batches;
  j["episodes_per_batch"] = cfg.episodes_per_batch;
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;
  j["workers"] = cfg.workers;
  j["deterministic"] = cfg.deterministic;
  const rl::PPOConfig& p = cfg.ppo;
  j["ppo"] = {{"clip", p.clip},
              {"gamma", p.gamma},
              {"lambda", p.lambda},
              {"lr", p.lr},
              {"epochs", p.epochs},
              {"minibatch", p.minibatch},
              {"value_coef", p.value_coef},
              {"entropy_coef", p.entropy_coef},
              {"max_grad_norm", p.max_grad_norm}};
  const rl::ValueConfig& v = cfg.value;
  j["value"] = {{"lr", v.lr},
                {"gamma", v.gamma},
                {"epsilon_start", v.epsilon_start},
                {"target_sync", v.target_sync},
                {"max_grad_norm", v.max_grad_norm},
                {"reward_divisor", v.reward_divisor}};
  const nn::NetworkConfig& n = cfg.network;
  j["network"] = {{"d_emb", n.d_emb},   {"heads", n.heads}, {"attention_layers", n.attention_layers},
                  {"d_set", n.d_set},   {"d_misc", n.d_misc}, {"d_state", n.d_state},
                  {"d_ff", n.d_ff},     {"d_act", n.d_act}, {"d_action_hidden", n.d_action_hidden},
                  {"d_value", n.d_value}};
  j["schedule"] = {{"checkpoint_every", cfg.checkpoint_every},
                   {"pool_period", cfg.pool_period},
                   {"entropy_every", cfg.entropy_every},
                   {"entropy_states", cfg.entropy_states},
                   {"eval_every", cfg.eval_every},
                   {"eval_games", cfg.eval_games},
                   {"eval_opponents", cfg.eval_opponents},
                   {"eval_greedy_policy", cfg.eval_greedy_policy}};
  return j.dump(2) + "\n";
}

}  // namespace big2
