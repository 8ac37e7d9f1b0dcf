#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "big2/config.hpp"
#include "big2/error.hpp"
#include "big2/nn/checkpoint.hpp"
#include "big2/trainer.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace big2;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t line_count(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) n += !line.empty();
  return n;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("big2_test_" + name);
  fs::remove_all(p);
  return p;
}

RunConfig tiny_run(Algorithm algorithm, const std::string& name) {
  RunConfig c;
  c.name = name;
  c.algorithm = algorithm;
  c.network = testing::tiny_network();
  c.total_batches = 6;
  c.episodes_per_batch = 2;
  c.seed = 99;
  c.ppo.minibatch = 64;
  c.ppo.lr = 1e-3;
  c.value.lr = 1e-3;
  c.value.target_sync = 2;
  c.checkpoint_every = 2;
  c.entropy_every = 3;
  c.entropy_states = 20;
  c.eval_every = 3;
  c.eval_games = 4;
  c.output_dir = scratch_dir(name).string();
  return c;
}

}  // namespace

TEST_CASE("default config matches the documented training setup") {
  const RunConfig c = parse_run_config("{}");
  CHECK(c.algorithm == Algorithm::kPPO);
  CHECK(c.curriculum.kind == CurriculumKind::kCurrentSelfPlay);
  CHECK(c.total_batches == 5000);
  CHECK(c.episodes_per_batch == 64);
  CHECK(c.ppo.clip == 0.2);
  CHECK(c.ppo.gamma == 0.99);
  CHECK(c.ppo.lambda == 0.95);
  CHECK(c.ppo.lr == 3e-5);
  CHECK(c.ppo.epochs == 4);
  CHECK(c.ppo.minibatch == 256);
  CHECK(c.ppo.value_coef == 0.5);
  CHECK(c.ppo.entropy_coef == 0.0);
  CHECK(c.ppo.max_grad_norm == 0.5);
  CHECK(c.value.epsilon_start == 0.5);
  CHECK(c.network.d_emb == 64);
  CHECK(c.network_config().value_head);
  CHECK(c.eval_every == 250);
  CHECK(c.entropy_every == 100);
}

TEST_CASE("config parsing rejects unknown keys and wrong types") {
  CHECK_THROWS_AS(parse_run_config(R"({"bogus": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"ppo": {"clip": 0.2, "clipp": 0.1}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"curriculum": {"kind": "league"}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"curriculum": {"kind": "fixed", "opponent": "expert"}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"algorithm": "dqn"})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"total_batches": 2.5})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"total_batches": "10"})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"seed": -1})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"deterministic": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"network": {"d_emb": 10, "heads": 4}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"schedule": {"eval_opponents": ["random", "human"]}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("{not json"), ConfigError);
  CHECK_THROWS_AS(load_run_config("/nonexistent/config.json"), ConfigError);

  const RunConfig c = parse_run_config(
      R"({"algorithm": "sarsa", "curriculum": {"kind": "fixed", "opponent": "greedy"},
          "value": {"epsilon_start": 0.3}, "seed": 12345678901234})");
  CHECK(c.algorithm == Algorithm::kSarsa);
  CHECK_FALSE(c.network_config().value_head);
  CHECK(c.curriculum.kind == CurriculumKind::kFixedOpponent);
  CHECK(c.curriculum.opponent == "greedy");
  CHECK(c.value.epsilon_start == 0.3);
  CHECK(c.seed == 12345678901234ULL);
}

TEST_CASE("config JSON round trips") {
  RunConfig c = tiny_run(Algorithm::kQLearning, "roundtrip");
  c.curriculum = {CurriculumKind::kCheckpointSelfPlay, "smart", 0.3};
  c.eval_opponents = {"smart"};
  c.ppo.entropy_coef = 0.05;
  const std::string text = to_json(c);
  CHECK(to_json(parse_run_config(text)) == text);
}

TEST_CASE("environment overrides seed and workers") {
  RunConfig c;
  ::setenv("BIG2_SEED", "31337", 1);
  ::setenv("BIG2_WORKERS", "3", 1);
  apply_env_overrides(c);
  CHECK(c.seed == 31337);
  CHECK(c.workers == 3);
  CHECK(c.effective_workers() == 1);
  c.deterministic = false;
  CHECK(c.effective_workers() == 3);
  ::setenv("BIG2_WORKERS", "many", 1);
  CHECK_THROWS_AS(apply_env_overrides(c), ConfigError);
  ::unsetenv("BIG2_SEED");
  ::unsetenv("BIG2_WORKERS");
}

TEST_CASE("a PPO run writes its logs and is reproducible byte for byte") {
  RunConfig a = tiny_run(Algorithm::kPPO, "ppo_a");
  RunConfig b = a;
  b.output_dir = scratch_dir("ppo_b").string();
  const TrainSummary sa = train(a);
  const TrainSummary sb = train(b);
  CHECK(sa.finished);
  CHECK(sa.completed == 6);
  const fs::path pa(a.output_dir), pb(b.output_dir);
  CHECK(line_count(pa / "metrics.jsonl") == 6);
  CHECK(line_count(pa / "timing.jsonl") == 6);
  CHECK(line_count(pa / "entropy.jsonl") == 2);
  CHECK(fs::exists(pa / "eval" / "batch_3.json"));
  CHECK(fs::exists(pa / "eval" / "batch_6.json"));
  CHECK(slurp(pa / "metrics.jsonl") == slurp(pb / "metrics.jsonl"));
  CHECK(slurp(pa / "entropy.jsonl") == slurp(pb / "entropy.jsonl"));
  CHECK(slurp(pa / "eval" / "batch_6.json") == slurp(pb / "eval" / "batch_6.json"));
  CHECK(slurp(pa / "final.ckpt") == slurp(pb / "final.ckpt"));
  CHECK(slurp(pa / "metrics.jsonl").find("_s\"") == std::string::npos);

  const nn::Checkpoint ck = nn::load_checkpoint(sa.final_checkpoint, a.network_config());
  CHECK(ck.optimizer.has_value());
  CHECK(ck.optimizer->steps() > 0);
  const AgentPtr agent = agent_from_checkpoint(sa.final_checkpoint);
  CHECK(agent->name() == "ppo");
  CHECK(dynamic_cast<const PolicyAgent*>(agent.get()) != nullptr);
}

TEST_CASE("results do not depend on heap layout") {
  RunConfig c;
  c.name = "heap";
  c.total_batches = 1;
  c.episodes_per_batch = 16;
  c.seed = 5;
  c.eval_every = 0;
  c.entropy_every = 0;
  std::string reference;
  for (int i = 0; i < 3; ++i) {
    // Large freed blocks move later allocations off fresh mmap pages.
    std::vector<std::vector<char>> churn;
    for (int k = 0; k < 8; ++k) churn.emplace_back((1u << 20) + 48 * static_cast<unsigned>(k + i));
    churn.clear();
    c.output_dir = scratch_dir("heap_" + std::to_string(i)).string();
    train(c);
    const std::string metrics = slurp(fs::path(c.output_dir) / "metrics.jsonl");
    if (i == 0) reference = metrics;
    CHECK(metrics == reference);
  }
}

TEST_CASE("an interrupted run resumes to the same result") {
  RunConfig whole = tiny_run(Algorithm::kPPO, "resume_whole");
  whole.curriculum.kind = CurriculumKind::kCheckpointSelfPlay;
  whole.pool_period = 2;
  RunConfig parts = whole;
  parts.output_dir = scratch_dir("resume_parts").string();
  train(whole);

  TrainOptions first;
  first.max_batches = 3;
  const TrainSummary s1 = train(parts, first);
  CHECK(s1.completed == 3);
  CHECK_FALSE(s1.finished);
  // Simulates log lines written after the last save.
  std::ofstream(fs::path(parts.output_dir) / "metrics.jsonl", std::ios::app) << "{\"batch\":4,\"stale\":true}\n";
  const TrainSummary s2 = train(parts);
  CHECK(s2.start_batch == 3);
  CHECK(s2.finished);
  const fs::path pw(whole.output_dir), pp(parts.output_dir);
  CHECK(slurp(pw / "metrics.jsonl") == slurp(pp / "metrics.jsonl"));
  CHECK(slurp(pw / "final.ckpt") == slurp(pp / "final.ckpt"));
  CHECK(slurp(pw / "metrics.jsonl").find("\"pool_size\":3") != std::string::npos);

  RunConfig changed = parts;
  changed.seed = 100;
  CHECK_THROWS_AS(train(changed), ConfigError);
  TrainOptions fresh;
  fresh.resume = false;
  fresh.max_batches = 1;
  CHECK(train(changed, fresh).completed == 1);
}

TEST_CASE("value-method runs sync the target network and evaluate greedily") {
  for (Algorithm alg : {Algorithm::kMonteCarlo, Algorithm::kSarsa, Algorithm::kQLearning}) {
    RunConfig c = tiny_run(alg, "value_" + to_string(alg));
    c.curriculum = {CurriculumKind::kFixedOpponent, "greedy"};
    const TrainSummary s = train(c);
    CHECK(s.finished);
    const std::string metrics = slurp(fs::path(c.output_dir) / "metrics.jsonl");
    CHECK(metrics.find("\"target_synced\":true") != std::string::npos);
    CHECK(metrics.find("\"epsilon\":0.5,") != std::string::npos);
    CHECK(metrics.find("\"epsilon\":0.0,") != std::string::npos);
    CHECK_FALSE(fs::exists(fs::path(c.output_dir) / "entropy.jsonl"));
    const AgentPtr agent = agent_from_checkpoint(s.final_checkpoint);
    const auto* q = dynamic_cast<const QAgent*>(agent.get());
    REQUIRE(q != nullptr);
    CHECK(q->epsilon() == 0.0);
    CHECK(agent->name() == to_string(alg));
    const nn::Checkpoint target =
        nn::load_checkpoint((fs::path(c.output_dir) / "state" / "target.ckpt").string(), c.network_config());
    const nn::Checkpoint net = nn::load_checkpoint(s.final_checkpoint, c.network_config());
    CHECK(target.params.values == net.params.values);
  }
}
