#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "big2/config.hpp"
#include "big2/error.hpp"
#include "big2/eval.hpp"
#include "big2/report.hpp"
#include "big2/trainer.hpp"
#include "big2/transcript.hpp"

using namespace big2;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitCheck = 3;

bool is_heuristic(const std::string& s) { return s == "random" || s == "greedy" || s == "smart"; }

// A heuristic name or a checkpoint path.
AgentPtr resolve_agent(const std::string& spec, bool greedy_policy) {
  if (is_heuristic(spec)) return make_heuristic_agent(spec);
  if (!std::filesystem::exists(spec)) throw ConfigError("'" + spec + "' is neither a heuristic nor a checkpoint file");
  return agent_from_checkpoint(spec, greedy_policy);
}

std::vector<std::string> opponent_list(const std::string& spec) {
  if (spec == "all") return {"random", "greedy", "smart"};
  if (!is_heuristic(spec)) throw ConfigError("unknown opponent pool '" + spec + "'");
  return {spec};
}

struct TrainArgs {
  std::string config;
  bool fresh = false;
  int max_batches = -1;
  bool quiet = false;
  std::string output_dir;
};

int cmd_train(const TrainArgs& a) {
  RunConfig cfg = load_run_config(a.config);
  if (!a.output_dir.empty()) cfg.output_dir = a.output_dir;
  apply_env_overrides(cfg);
  TrainOptions opt;
  opt.resume = !a.fresh;
  opt.max_batches = a.max_batches;
  opt.progress = a.quiet ? nullptr : &std::cerr;
  const TrainSummary s = train(cfg, opt);
  std::cout << "trained " << s.completed - s.start_batch << " batches (" << s.completed << "/" << cfg.total_batches
            << ")";
  if (s.finished) std::cout << ", final checkpoint " << s.final_checkpoint;
  std::cout << "\n";
  return 0;
}

struct EvalArgs {
  std::string agent;
  std::string opponent = "all";
  int games = 1000;
  std::uint64_t seed = 0;
  int workers = 1;
  bool greedy_policy = false;
  bool json = false;
  bool require_success = false;
};

int cmd_eval(const EvalArgs& a) {
  const AgentPtr agent = resolve_agent(a.agent, a.greedy_policy);
  std::vector<TournamentResult> results;
  for (const std::string& opp : opponent_list(a.opponent))
    results.push_back(tournament(agent, opp, a.games, a.seed, a.workers));
  if (a.json) {
    for (const auto& r : results) std::cout << to_json(r).dump() << "\n";
  } else {
    print_tournaments(std::cout, results);
  }
  if (a.require_success)
    for (const auto& r : results)
      if (!r.success()) return kExitCheck;
  return 0;
}

struct StatsArgs {
  int games = 10000;
  std::uint64_t seed = 0;
  int workers = 1;
  bool histogram = false;
  bool json = false;
  bool check = false;
};

// Reference bands for 10,000 random-play games.
bool branching_in_band(const BranchingStats& s) {
  const double total = static_cast<double>(s.all.total());
  return std::abs(total - 752677.0) <= 0.02 * 752677.0 && std::abs(static_cast<double>(s.all.percentile(99)) - 19.0) <= 1.0 &&
         s.all.max() >= 100 && std::abs(s.control.mean() - 8.1) <= 0.3 &&
         std::abs(static_cast<double>(s.control.percentile(95)) - 20.0) <= 1.0;
}

int cmd_stats(const StatsArgs& a) {
  const BranchingStats s = branching_stats(a.games, a.seed, a.workers);
  if (a.json) std::cout << to_json(s).dump() << "\n";
  else print_branching(std::cout, s, a.histogram);
  if (a.check && !branching_in_band(s)) {
    std::cerr << "branching statistics outside the reference bands\n";
    return kExitCheck;
  }
  return 0;
}

int cmd_replay(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open transcript file '" + path + "'");
  const std::vector<Transcript> games = read_transcripts(in);
  if (games.empty()) throw ConfigError("'" + path + "' contains no transcripts");
  int bad = 0;
  for (std::size_t i = 0; i < games.size(); ++i) {
    const ReplayReport r = replay(games[i]);
    std::cout << "game " << i << " seed " << games[i].seed << ": ";
    if (r.valid) {
      std::cout << "valid, " << games[i].plies.size() << " plies\n";
      continue;
    }
    ++bad;
    std::cout << "INVALID";
    if (r.first_illegal_ply) std::cout << " at ply " << *r.first_illegal_ply;
    std::cout << ": " << r.message << "\n";
  }
  return bad ? kExitCheck : 0;
}

struct PlayArgs {
  std::vector<std::string> seats{"smart", "greedy", "random", "random"};
  int games = 1;
  std::uint64_t seed = 42;
  std::string output;
  bool greedy_policy = false;
};

int cmd_play(const PlayArgs& a) {
  if (a.seats.size() != kNumPlayers) throw ConfigError("play needs exactly four seat agents");
  std::array<AgentPtr, kNumPlayers> agents;
  for (int s = 0; s < kNumPlayers; ++s) agents[s] = evaluation_agent(resolve_agent(a.seats[s], a.greedy_policy));
  std::ofstream file;
  if (!a.output.empty()) {
    file.open(a.output);
    if (!file) throw ConfigError("cannot write '" + a.output + "'");
  }
  std::ostream& out = a.output.empty() ? std::cout : file;
  for (int g = 0; g < a.games; ++g) {
    const std::uint64_t seed = a.games == 1 ? a.seed : derive_seed(a.seed, static_cast<std::uint64_t>(g));
    write_transcript(out, play_episode(agents, {}, seed, false).transcript);
  }
  return 0;
}

struct InspectArgs {
  std::uint64_t seed = 42;
  int ply = 0;
  std::string driver = "smart";
  bool flat = false;
};

int cmd_inspect(const InspectArgs& a) {
  const AgentPtr driver = make_heuristic_agent(a.driver);
  GameState s = deal(a.seed);
  Rng rng(derive_seed(a.seed, 0x1A5));
  std::vector<Combination> legal;
  while (!s.terminal() && s.ply < a.ply) {
    legal_actions(s, legal);
    const Decision d = driver->decide(encode_observation(s, s.current_player), legal, {}, rng);
    apply_action_in_place(s, legal[d.index]);
  }
  if (s.terminal()) {
    std::cout << "game ended at ply " << s.ply << "\n";
    return 0;
  }
  const Observation obs = encode_observation(s, s.current_player);
  std::cout << "seed " << a.seed << ", ply " << s.ply << ", seat " << s.current_player << " to act\n";
  std::cout << describe(obs) << "\n";
  if (a.flat) {
    const auto v = obs.flatten();
    for (std::size_t i = 0; i < v.size(); ++i) std::cout << (i ? " " : "") << v[i];
    std::cout << "\n";
  }
  legal_actions(s, legal);
  std::cout << legal.size() << " legal actions:\n";
  for (std::size_t i = 0; i < legal.size(); ++i) std::cout << "  " << i << "  " << to_string(legal[i]) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Big 2 simulator, self-play training and evaluation"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train an agent from a run config (resumes by default)");
  train_cmd->add_option("config", train_args.config, "Run config JSON file")->required();
  train_cmd->add_flag("--fresh", train_args.fresh, "Ignore saved state and start over");
  train_cmd->add_option("--max-batches", train_args.max_batches, "Stop after this many batches");
  train_cmd->add_option("--output-dir", train_args.output_dir, "Override output_dir");
  train_cmd->add_flag("-q,--quiet", train_args.quiet, "No per-batch progress");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Tournament of one agent against a heuristic pool");
  eval_cmd->add_option("agent", eval_args.agent, "Checkpoint path or random|greedy|smart")->required();
  eval_cmd->add_option("-o,--opponent", eval_args.opponent, "random|greedy|smart|all");
  eval_cmd->add_option("-n,--games", eval_args.games, "Games per pool")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--seed", eval_args.seed, "Tournament seed");
  eval_cmd->add_option("--workers", eval_args.workers, "Worker threads")->check(CLI::PositiveNumber);
  eval_cmd->add_flag("--greedy-policy", eval_args.greedy_policy, "Evaluate a policy network by argmax");
  eval_cmd->add_flag("--json", eval_args.json, "One JSON record per pool");
  eval_cmd->add_flag("--require-success", eval_args.require_success, "Exit 3 unless every pool is beaten");

  StatsArgs stats_args;
  auto* stats_cmd = app.add_subcommand("stats", "Branching-factor statistics under random play");
  stats_cmd->add_option("-n,--games", stats_args.games, "Number of games")->check(CLI::PositiveNumber);
  stats_cmd->add_option("--seed", stats_args.seed, "Seed");
  stats_cmd->add_option("--workers", stats_args.workers, "Worker threads")->check(CLI::PositiveNumber);
  stats_cmd->add_flag("--histogram", stats_args.histogram, "Print the full histogram");
  stats_cmd->add_flag("--json", stats_args.json, "JSON output");
  stats_cmd->add_flag("--check", stats_args.check, "Exit 3 when outside the reference bands");

  std::string replay_path;
  auto* replay_cmd = app.add_subcommand("replay", "Check every ply of recorded transcripts");
  replay_cmd->add_option("transcripts", replay_path, "JSON-lines transcript file")->required();

  PlayArgs play_args;
  auto* play_cmd = app.add_subcommand("play", "Play games and write transcripts");
  play_cmd->add_option("--seats", play_args.seats, "Four agents (heuristic names or checkpoints)")->expected(4);
  play_cmd->add_option("-n,--games", play_args.games, "Number of games")->check(CLI::PositiveNumber);
  play_cmd->add_option("--seed", play_args.seed, "Deal seed (per-game seeds derived when n > 1)");
  play_cmd->add_option("--out", play_args.output, "Output file (default stdout)");
  play_cmd->add_flag("--greedy-policy", play_args.greedy_policy, "Policy checkpoints act by argmax");

  InspectArgs inspect_args;
  auto* inspect_cmd = app.add_subcommand("inspect-obs", "Print the observation of the seat to act");
  inspect_cmd->add_option("--seed", inspect_args.seed, "Deal seed");
  inspect_cmd->add_option("--ply", inspect_args.ply, "Advance this many plies first")->check(CLI::NonNegativeNumber);
  inspect_cmd->add_option("--driver", inspect_args.driver, "Agent used to advance: random|greedy|smart");
  inspect_cmd->add_flag("--flat", inspect_args.flat, "Also print the flat 277-float vector");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*train_cmd) return cmd_train(train_args);
    if (*eval_cmd) return cmd_eval(eval_args);
    if (*stats_cmd) return cmd_stats(stats_args);
    if (*replay_cmd) return cmd_replay(replay_path);
    if (*play_cmd) return cmd_play(play_args);
    if (*inspect_cmd) return cmd_inspect(inspect_args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}
