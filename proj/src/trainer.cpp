#include "big2/trainer.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "big2/error.hpp"
#include "big2/eval.hpp"
#include "big2/nn/checkpoint.hpp"
#include "big2/report.hpp"
#include "json.hpp"

namespace big2 {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

constexpr std::uint64_t kInitStream = 0x1417;
constexpr std::uint64_t kUpdateStream = 0x0FD7;
constexpr std::uint64_t kEvalStream = 0xE7A1;
constexpr std::uint64_t kProbeStream = 0x9B0B;

using MutableParams = std::shared_ptr<nn::Parameters<float>>;

struct TrainingState {
  MutableParams net;
  nn::Adam adam;
  nn::Parameters<float> target;  // value methods only
  CheckpointPool pool;
  int completed = 0;
};

// The part of the config that determines the trajectory of a run.
std::string run_identity(const RunConfig& cfg) {
  RunConfig c = cfg;
  c.workers = 1;
  c.deterministic = true;
  c.output_dir = ".";
  return to_json(c);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + p.string() + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& p, const std::string& text) {
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << text;
    if (!out.flush()) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, p);
}

void append_line(const fs::path& p, const std::string& line) {
  std::ofstream out(p, std::ios::binary | std::ios::app);
  if (!out) throw std::runtime_error("cannot append to '" + p.string() + "'");
  out << line << '\n';
}

std::string pool_file(std::size_t i) {
  char name[32];
  std::snprintf(name, sizeof name, "pool_%02zu.ckpt", i);
  return name;
}

std::string checkpoint_metadata(const RunConfig& cfg, int completed) {
  ordered_json m;
  m["algorithm"] = to_string(cfg.algorithm);
  m["name"] = cfg.name;
  m["batches"] = completed;
  m["seed"] = cfg.seed;
  return m.dump();
}

void save_state(const fs::path& out, const RunConfig& cfg, const TrainingState& s) {
  const fs::path tmp = out / "state.tmp";
  const fs::path live = out / "state";
  const fs::path old = out / "state.old";
  fs::remove_all(tmp);
  fs::create_directories(tmp);
  const std::string meta = checkpoint_metadata(cfg, s.completed);
  nn::save_checkpoint((tmp / "network.ckpt").string(), *s.net, &s.adam, meta);
  if (is_value_method(cfg.algorithm)) nn::save_checkpoint((tmp / "target.ckpt").string(), s.target, nullptr, meta);
  ordered_json progress;
  progress["completed"] = s.completed;
  progress["pool"] = json::array();
  for (std::size_t i = 0; i < s.pool.size(); ++i) {
    nn::save_checkpoint((tmp / pool_file(i)).string(), *s.pool[i].params);
    progress["pool"].push_back(s.pool[i].batch);
  }
  write_file(tmp / "progress.json", progress.dump(2) + "\n");
  write_file(tmp / "config.json", run_identity(cfg));
  fs::remove_all(old);
  if (fs::exists(live)) fs::rename(live, old);
  fs::rename(tmp, live);
  fs::remove_all(old);
}

bool load_state(const fs::path& out, const RunConfig& cfg, TrainingState& s) {
  fs::path dir = out / "state";
  if (!fs::exists(dir / "progress.json")) {
    dir = out / "state.old";
    if (!fs::exists(dir / "progress.json")) return false;
  }
  if (read_file(dir / "config.json") != run_identity(cfg))
    throw ConfigError("'" + out.string() + "' holds a run with a different config; use a fresh output_dir or --fresh");
  const json progress = json::parse(read_file(dir / "progress.json"));
  const nn::NetworkConfig net_cfg = cfg.network_config();
  nn::Checkpoint net = nn::load_checkpoint((dir / "network.ckpt").string(), net_cfg);
  if (!net.optimizer) throw ConfigError("resumable state lacks optimizer moments");
  s.net = std::make_shared<nn::Parameters<float>>(std::move(net.params));
  s.adam = std::move(*net.optimizer);
  if (is_value_method(cfg.algorithm))
    s.target = nn::load_checkpoint((dir / "target.ckpt").string(), net_cfg).params;
  s.pool.clear();
  const auto& batches = progress.at("pool");
  for (std::size_t i = 0; i < batches.size(); ++i)
    s.pool.add(nn::load_checkpoint((dir / pool_file(i)).string(), net_cfg).params, batches[i].get<int>());
  s.completed = progress.at("completed").get<int>();
  return true;
}

// Drops log records past the resumed batch (written after the last save).
void truncate_log(const fs::path& p, int completed) {
  if (!fs::exists(p)) return;
  std::ifstream in(p, std::ios::binary);
  std::string kept, line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("batch")) continue;
    if (j["batch"].get<int>() <= completed) kept += line + "\n";
  }
  in.close();
  write_file(p, kept);
}

AgentPtr acting_agent(const RunConfig& cfg, const ParamsPtr& params, double epsilon) {
  if (is_value_method(cfg.algorithm)) return std::make_shared<QAgent>(params, epsilon, to_string(cfg.algorithm));
  return std::make_shared<PolicyAgent>(params, false, to_string(cfg.algorithm));
}

AgentPtr evaluated_agent(const RunConfig& cfg, const ParamsPtr& params) {
  if (is_value_method(cfg.algorithm)) return std::make_shared<QAgent>(params, 0.0, to_string(cfg.algorithm));
  return std::make_shared<PolicyAgent>(params, cfg.eval_greedy_policy, to_string(cfg.algorithm));
}

}  // namespace

TrainSummary train(const RunConfig& cfg, const TrainOptions& options) {
  cfg.validate();
  const fs::path out(cfg.output_dir);
  fs::create_directories(out);
  const nn::NetworkConfig net_cfg = cfg.network_config();
  const bool value_run = is_value_method(cfg.algorithm);
  const int workers = cfg.effective_workers();

  TrainingState s;
  s.pool = CheckpointPool(CheckpointPool::kCapacity);
  const bool resumed = options.resume && load_state(out, cfg, s);
  if (!resumed) {
    for (const char* name : {"metrics.jsonl", "timing.jsonl", "entropy.jsonl", "final.ckpt"}) fs::remove(out / name);
    for (const char* name : {"eval", "state", "state.old", "state.tmp"}) fs::remove_all(out / name);
    Rng init_rng(derive_seed(cfg.seed, kInitStream));
    s.net = std::make_shared<nn::Parameters<float>>(nn::init_parameters<float>(net_cfg, init_rng));
    s.adam = nn::Adam(s.net->size());
    if (value_run) s.target = *s.net;
  } else {
    for (const char* name : {"metrics.jsonl", "timing.jsonl", "entropy.jsonl"}) truncate_log(out / name, s.completed);
  }
  write_file(out / "config.json", to_json(cfg));
  fs::create_directories(out / "eval");

  TrainSummary summary;
  summary.start_batch = s.completed;
  const SnapshotAgentFactory snapshot = [&](const ParamsPtr& p) -> AgentPtr {
    if (value_run) return std::make_shared<QAgent>(p, 0.0, "snapshot");
    return std::make_shared<PolicyAgent>(p, false, "snapshot");
  };

  int run_this_call = 0;
  while (s.completed < cfg.total_batches && (options.max_batches < 0 || run_this_call < options.max_batches)) {
    const int b = s.completed;
    const auto t0 = std::chrono::steady_clock::now();
    const double lr = rl::lr_schedule(b, cfg.total_batches, value_run ? cfg.value.lr : cfg.ppo.lr);
    const double epsilon = value_run ? rl::epsilon_schedule(b, cfg.total_batches, cfg.value.epsilon_start) : 0.0;
    const ParamsPtr current = s.net;

    CollectOptions collect;
    collect.episodes = cfg.episodes_per_batch;
    collect.run_seed = cfg.seed;
    collect.batch_index = b;
    collect.workers = workers;
    const rl::TrajectoryBatch batch =
        collect_batch(cfg.curriculum, acting_agent(cfg, current, epsilon), s.pool, snapshot, collect);
    const auto t1 = std::chrono::steady_clock::now();

    ordered_json m;
    m["batch"] = b + 1;
    m["lr"] = lr;
    m["decisions"] = batch.size();
    double learner_score = 0.0;
    int learner_wins = 0;
    for (const rl::TrajectorySpan& t : batch.trajectories) {
      const double r = batch.records[t.end - 1].reward;
      learner_score += r;
      learner_wins += r > 0.0;
    }
    const double trajectories = static_cast<double>(std::max<std::size_t>(1, batch.trajectories.size()));
    m["learner_avg_score"] = learner_score / trajectories;
    m["learner_win_rate"] = learner_wins / trajectories;

    if (value_run) {
      const rl::ValueStats v =
          rl::value_update(batch, *s.net, s.target, s.adam, value_method(cfg.algorithm), cfg.value, lr);
      const bool sync = (b + 1) % cfg.value.target_sync == 0;
      if (sync) s.target.values = s.net->values;
      m["epsilon"] = epsilon;
      m["loss"] = v.loss;
      m["mean_target"] = v.mean_target;
      m["grad_norm"] = v.grad_norm;
      m["target_synced"] = sync;
    } else {
      Rng update_rng(derive_seed(cfg.seed, kUpdateStream, static_cast<std::uint64_t>(b)));
      const rl::PPOStats p = rl::ppo_update(batch, *s.net, s.adam, cfg.ppo, lr, update_rng);
      m["policy_loss"] = p.policy_loss;
      m["value_loss"] = p.value_loss;
      m["entropy"] = p.entropy;
      m["clip_fraction"] = p.clip_fraction;
      m["approx_kl"] = p.approx_kl;
      m["grad_norm"] = p.grad_norm;
      m["minibatches"] = p.minibatches;
    }
    if (cfg.curriculum.kind == CurriculumKind::kCheckpointSelfPlay)
      s.pool.maybe_checkpoint(*s.net, b, cfg.effective_pool_period());
    m["pool_size"] = s.pool.size();
    const auto t2 = std::chrono::steady_clock::now();

    s.completed = b + 1;
    ++run_this_call;
    const int n = s.completed;
    append_line(out / "metrics.jsonl", m.dump());
    ordered_json timing;
    timing["batch"] = n;
    timing["collect_s"] = std::chrono::duration<double>(t1 - t0).count();
    timing["update_s"] = std::chrono::duration<double>(t2 - t1).count();
    append_line(out / "timing.jsonl", timing.dump());

    if (!value_run && cfg.entropy_every > 0 && n % cfg.entropy_every == 0) {
      ordered_json e;
      e["batch"] = n;
      e["states"] = cfg.entropy_states;
      e["entropy"] = entropy_probe(s.net, cfg.entropy_states, derive_seed(cfg.seed, kProbeStream));
      append_line(out / "entropy.jsonl", e.dump());
    }
    if (cfg.eval_every > 0 && n % cfg.eval_every == 0) {
      ordered_json e;
      e["batch"] = n;
      e["algorithm"] = to_string(cfg.algorithm);
      e["results"] = json::array();
      const AgentPtr agent = evaluated_agent(cfg, s.net);
      for (const std::string& opponent : cfg.eval_opponents) {
        const auto r = tournament(agent, opponent, cfg.eval_games,
                                  derive_seed(cfg.seed, kEvalStream, static_cast<std::uint64_t>(n)), workers);
        e["results"].push_back(to_json(r));
      }
      write_file(out / "eval" / ("batch_" + std::to_string(n) + ".json"), e.dump(2) + "\n");
    }
    if ((cfg.checkpoint_every > 0 && n % cfg.checkpoint_every == 0) || n == cfg.total_batches) save_state(out, cfg, s);
    if (options.progress) {
      *options.progress << "batch " << n << "/" << cfg.total_batches << "  decisions " << batch.size()
                        << "  learner score " << std::fixed << std::setprecision(2) << learner_score / trajectories
                        << std::defaultfloat << "\n";
    }
  }

  summary.completed = s.completed;
  summary.finished = s.completed >= cfg.total_batches;
  if (summary.finished) {
    summary.final_checkpoint = (out / "final.ckpt").string();
    nn::save_checkpoint(summary.final_checkpoint, *s.net, &s.adam, checkpoint_metadata(cfg, s.completed));
  } else if (run_this_call > 0) {
    save_state(out, cfg, s);
  }
  return summary;
}

AgentPtr agent_from_checkpoint(const std::string& path, bool greedy_policy) {
  nn::Checkpoint ck = nn::load_checkpoint(path);
  std::string name;
  const json meta = json::parse(ck.metadata, nullptr, false);
  if (meta.is_object() && meta.contains("algorithm") && meta["algorithm"].is_string())
    name = meta["algorithm"].get<std::string>();
  auto params = std::make_shared<const nn::Parameters<float>>(std::move(ck.params));
  if (params->config().value_head) return std::make_shared<PolicyAgent>(params, greedy_policy, name.empty() ? "policy" : name);
  return std::make_shared<QAgent>(params, 0.0, name.empty() ? "q" : name);
}

}  // namespace big2
