// Acceptance checks. One PASS/FAIL/SKIP line per criterion; exit 3 on any
// failure.
//
// usage: big2_acceptance <configs dir> <work dir> <big2 cli>
// The report is also written to <work dir>/acceptance_report.txt.
// BIG2_ACCEPT_ONLY=1,4,10 runs a subset. BIG2_LONG_RUN=1 enables the full
// training budget reproduction.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "big2/config.hpp"
#include "big2/encoders.hpp"
#include "big2/eval.hpp"
#include "big2/game.hpp"
#include "big2/rl/rl.hpp"
#include "big2/trainer.hpp"
#include "gradcheck.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace big2;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  enum Kind { kPass, kFail, kSkip } kind = kPass;
  std::string detail;
};

Outcome fail(std::string d) { return {Outcome::kFail, std::move(d)}; }
Outcome verdict(bool ok, std::string d) { return {ok ? Outcome::kPass : Outcome::kFail, std::move(d)}; }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

fs::path g_configs;
fs::path g_cli;
fs::path g_work;

// --- Engine ----------------------------------------------------------------

Outcome branching() {
  const BranchingStats s = branching_stats(10000, 0);
  const double total = static_cast<double>(s.all.total());
  const auto p99 = s.all.percentile(99);
  const auto mx = s.all.max();
  const double cmean = s.control.mean();
  const auto cp95 = s.control.percentile(95);
  const bool ok = std::abs(total - 752677.0) <= 0.02 * 752677.0 && p99 >= 18 && p99 <= 20 && mx >= 100 &&
                  std::abs(cmean - 8.1) <= 0.3 && cp95 >= 19 && cp95 <= 21;
  return verdict(ok, fmt("decision points %.0f (752677 +-2%%), p99 %zu (19+-1), max %zu (>=100), "
                         "control mean %.3f (8.1+-0.3), control p95 %zu (20+-1)",
                         total, p99, mx, cmean, cp95));
}

// Plays uniform random games from derive_seed(seed, g) and calls visit at
// every state, terminal ones included.
void random_games(std::uint64_t seed, int games, const std::function<void(const GameState&)>& visit) {
  std::vector<Combination> legal;
  for (int g = 0; g < games; ++g) {
    Rng rng(derive_seed(seed, 0x7A, static_cast<std::uint64_t>(g)));
    GameState s = deal(derive_seed(seed, static_cast<std::uint64_t>(g)));
    visit(s);
    while (!s.terminal()) {
      legal_actions(s, legal);
      apply_action_in_place(s, legal[rng.uniform_index(legal.size())]);
      visit(s);
    }
  }
}

Outcome observation_contract() {
  std::size_t states = 0, bad = 0;
  random_games(11, 1000, [&](const GameState& s) {
    if (s.terminal()) return;
    for (int seat = 0; seat < kNumPlayers; ++seat) {
      const Observation obs = encode_observation(s, seat);
      const auto flat = obs.flatten();
      const std::vector<float> v(flat.begin(), flat.end());
      ++states;
      if (v.size() != 277 || !(Observation::unflatten(v) == obs) || obs.hand() != s.hands[seat]) ++bad;
    }
  });
  return verdict(bad == 0, fmt("%zu observations of length 277, %zu violations", states, bad));
}

// Hands and seen cards partition the deck, and each seat's played cards are
// exactly the seen cards it contributed.
bool conserved(const GameState& s) {
  std::uint64_t all = s.seen.bits();
  std::uint64_t played = 0;
  int count = std::popcount(s.seen.bits());
  for (int p = 0; p < kNumPlayers; ++p) {
    if (all & s.hands[p].bits()) return false;
    if (played & s.played_by[p].bits()) return false;
    all |= s.hands[p].bits();
    played |= s.played_by[p].bits();
    count += std::popcount(s.hands[p].bits());
  }
  return all == (1ULL << kNumCards) - 1 && count == kNumCards && played == s.seen.bits();
}

Outcome zero_sum() {
  std::size_t plies = 0, conservation = 0, sums = 0, games = 0;
  random_games(12, 100000, [&](const GameState& s) {
    ++plies;
    if (!conserved(s)) ++conservation;
    if (s.terminal()) {
      ++games;
      const TerminalScores sc = terminal_scores(s);
      if (sc[0] + sc[1] + sc[2] + sc[3] != 0) ++sums;
    }
  });
  return verdict(conservation == 0 && sums == 0 && games == 100000,
                 fmt("%zu games, %zu states, %zu nonzero score sums, %zu conservation violations", games, plies,
                     sums, conservation));
}

Outcome rule_oracle() {
  std::size_t mismatches = 0;
  for (const GameState& s : testing::random_states(13, 10000, 0.1)) {
    std::set<std::uint64_t> mine;
    bool pass_legal = false;
    for (const Combination& c : legal_actions(s)) {
      if (c.is_pass()) pass_legal = true;
      else mine.insert(c.cards.bits());
    }
    if (mine != oracle::oracle_legal_masks(s) || pass_legal == s.has_control()) ++mismatches;
  }
  std::size_t enum_mismatches = 0;
  Rng rng(14);
  const int hands = 5000;
  for (int t = 0; t < hands; ++t) {
    const int size = 1 + static_cast<int>(rng.uniform_index(8));
    std::vector<int> deck(kNumCards);
    for (int i = 0; i < kNumCards; ++i) deck[i] = i;
    CardSet hand;
    for (int i = 0; i < size; ++i) {
      const std::size_t j = i + rng.uniform_index(deck.size() - i);
      std::swap(deck[i], deck[j]);
      hand.insert(deck[i]);
    }
    std::set<std::uint64_t> mine;
    bool duplicate = false;
    for (const Combination& c : enumerate_combinations(hand)) duplicate |= !mine.insert(c.cards.bits()).second;
    if (duplicate || mine != oracle::oracle_combination_masks(hand)) ++enum_mismatches;
  }
  return verdict(mismatches == 0 && enum_mismatches == 0,
                 fmt("legal sets: %zu/10000 states differ; enumeration: %zu/%d hands of size <= 8 differ",
                     mismatches, enum_mismatches, hands));
}

Outcome heuristic_fidelity() {
  const auto smart = make_heuristic_agent("smart");
  const auto greedy = make_heuristic_agent("greedy");
  std::size_t smart_bad = 0, greedy_bad = 0, points = 0;
  Rng rng(0);
  for (const GameState& s : testing::random_states(15, 10000, 0.3)) {
    const auto legal = legal_actions(s);
    const Observation obs = encode_observation(s, s.current_player);
    const auto hand = s.hands[s.current_player].cards();
    ++points;
    if (smart->decide(obs, legal, {}, rng).index != oracle::oracle_smart(legal, hand, s.active_trick)) ++smart_bad;
    if (greedy->decide(obs, legal, {}, rng).index != oracle::oracle_greedy(legal)) ++greedy_bad;
  }
  return verdict(smart_bad == 0 && greedy_bad == 0,
                 fmt("%zu decision points: smart %zu mismatches, greedy %zu mismatches", points, smart_bad,
                     greedy_bad));
}

Outcome baselines() {
  const auto sg = tournament(make_heuristic_agent("smart"), "greedy", 1000, 21);
  const auto gr = tournament(make_heuristic_agent("greedy"), "random", 1000, 22);
  const auto rr = tournament(make_heuristic_agent("random"), "random", 1000, 23);
  const bool ok = sg.success() && gr.success() && std::abs(rr.win_rate - 0.25) <= 0.03;
  return verdict(ok, fmt("smart vs greedy %.1f%% / %+.2f; greedy vs random %.1f%% / %+.2f; "
                         "random vs random %.1f%% (25+-3)",
                         100 * sg.win_rate, sg.avg_score, 100 * gr.win_rate, gr.avg_score, 100 * rr.win_rate));
}

// --- Learning math -----------------------------------------------------------

Outcome gradients() {
  double worst = 0.0;
  std::string where;
  std::size_t params = 0;
  for (bool value_head : {true, false}) {
    const auto r = testing::finite_difference_check(testing::tiny_network(value_head), value_head ? 31 : 32, 4);
    params += r.parameters;
    if (r.worst_relative_error >= worst) {
      worst = r.worst_relative_error;
      where = r.worst_tensor;
    }
  }
  return verdict(worst < 1e-4, fmt("%zu parameters (policy and Q networks, d_emb 8), worst relative error %.3g at %s",
                                   params, worst, where.c_str()));
}

Outcome gae() {
  Rng rng(41);
  double worst_sum = 0.0, worst_mc = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + rng.uniform_index(60);
    std::vector<double> r(n), v(n);
    for (std::size_t i = 0; i < n; ++i) {
      r[i] = 4.0 * rng.uniform01() - 2.0;
      v[i] = 6.0 * rng.uniform01() - 3.0;
    }
    const double gamma = 0.9 + 0.1 * rng.uniform01();
    const double lambda = rng.uniform01();
    const auto g = rl::compute_gae(r, v, gamma, lambda);
    const auto ref = oracle::gae_oracle(r, v, gamma, lambda);
    const auto g1 = rl::compute_gae(r, v, gamma, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      worst_sum = std::max(worst_sum, std::abs(g.advantages[i] - ref[i]));
      double ret = 0.0;
      for (std::size_t k = n; k-- > i;) ret = r[k] + gamma * ret;
      worst_mc = std::max(worst_mc, std::abs(g1.advantages[i] - (ret - v[i])));
    }
  }
  return verdict(worst_sum < 1e-10 && worst_mc < 1e-10,
                 fmt("1000 trajectories: max |GAE - double sum| %.2g, max |GAE(1) - (G - V)| %.2g", worst_sum,
                     worst_mc));
}

Outcome targets() {
  Rng rng(42);
  int order = 0, terminal = 0;
  for (int t = 0; t < 1000; ++t) {
    const double r = 4.0 * rng.uniform01() - 2.0;
    std::vector<double> qs(1 + rng.uniform_index(40));
    for (double& q : qs) q = 6.0 * rng.uniform01() - 3.0;
    const std::size_t chosen = rng.uniform_index(qs.size());
    if (rl::q_learning_target(r, qs, 0.99) < rl::sarsa_target(r, &qs[chosen], 0.99)) ++order;
    const std::vector<double> last{r};
    if (rl::sarsa_target(r, nullptr, 0.99) != r || rl::q_learning_target(r, std::span<const double>{}, 0.99) != r ||
        rl::mc_q_target(last, 0.99).back() != r)
      ++terminal;
  }
  const double e0 = rl::epsilon_schedule(0, 5000);
  const double e1 = rl::epsilon_schedule(4999, 5000);
  return verdict(order == 0 && terminal == 0 && e0 == 0.5 && e1 == 0.0,
                 fmt("1000 fixtures: %d Q-learning < SARSA, %d terminal mismatches; epsilon %.3g -> %.3g", order,
                     terminal, e0, e1));
}

// --- Training ----------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::map<int, double> read_entropy(const fs::path& dir) {
  std::map<int, double> out;
  std::ifstream in(dir / "entropy.jsonl");
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    out[j.at("batch").get<int>()] = j.at("entropy").get<double>();
  }
  return out;
}

TrainSummary run(RunConfig cfg, const std::string& name, bool resume = false) {
  cfg.output_dir = (g_work / name).string();
  TrainOptions opt;
  opt.resume = resume;
  const auto t0 = std::chrono::steady_clock::now();
  TrainSummary s = train(cfg, opt);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << "  trained " << name << ": " << s.completed << " batches in " << fmt("%.0f", secs) << " s\n"
            << std::flush;
  return s;
}

Outcome training_smoke() {
  const RunConfig smoke = load_run_config((g_configs / "smoke.json").string());
  const TrainSummary s = run(smoke, "smoke");
  const auto agent = agent_from_checkpoint(s.final_checkpoint);
  const auto vr = tournament(agent, "random", 1000, 0);
  const bool strength = vr.win_rate > 0.40 && vr.avg_score > 2.0;

  std::map<double, std::map<int, double>> probes;
  probes[smoke.ppo.entropy_coef] = read_entropy(g_work / "smoke");
  for (double beta : {0.0, 0.10}) {
    RunConfig c = smoke;
    c.ppo.entropy_coef = beta;
    const std::string name = fmt("smoke_beta_%.2f", beta);
    run(c, name);
    probes[beta] = read_entropy(g_work / name);
  }
  bool ordered = !probes[0.0].empty();
  std::string trace;
  for (const auto& [batch, h0] : probes[0.0]) {
    const auto it = probes[0.10].find(batch);
    ordered &= it != probes[0.10].end() && h0 < it->second;
    trace += fmt(" @%d %.3f<%.3f", batch, h0, it == probes[0.10].end() ? NAN : it->second);
  }
  return verdict(strength && ordered,
                 fmt("vs random %.1f%% (>40) avg %+.2f (>2.0); entropy beta 0 vs 0.10:", 100 * vr.win_rate,
                     vr.avg_score) +
                     trace);
}

Outcome long_run() {
  const char* flag = std::getenv("BIG2_LONG_RUN");
  if (!flag || std::string(flag) != "1") return {Outcome::kSkip, "set BIG2_LONG_RUN=1 for the full-budget runs"};
  std::map<std::string, std::map<std::string, TournamentResult>> res;
  for (const char* name : {"main_ppo", "main_mc_q", "main_sarsa", "main_q_learning", "entropy_0.05", "entropy_0.10",
                           "curriculum_ppo_checkpoint", "curriculum_ppo_smart"}) {
    const RunConfig c = load_run_config((g_configs / (std::string(name) + ".json")).string());
    const TrainSummary s = run(c, name, true);
    const auto agent = agent_from_checkpoint(s.final_checkpoint);
    for (const char* opp : {"random", "greedy", "smart"}) res[name][opp] = tournament(agent, opp, 1000, 0);
  }
  auto wr = [&](const char* run, const char* opp) { return res[run][opp].win_rate; };
  const double ppo_random = wr("main_ppo", "random");
  bool ok = std::abs(ppo_random - 0.854) <= 0.05;
  for (const char* v : {"main_mc_q", "main_sarsa", "main_q_learning"}) ok &= wr("main_ppo", "smart") > wr(v, "smart");
  for (const char* opp : {"random", "greedy", "smart"})
    ok &= wr("entropy_0.05", opp) > wr("entropy_0.10", opp) && wr("entropy_0.10", opp) > wr("main_ppo", opp);
  // The current-policy curriculum at beta 0.05 is the entropy_0.05 run.
  for (const char* opp : {"random", "greedy", "smart"})
    ok &= wr("entropy_0.05", opp) > wr("curriculum_ppo_checkpoint", opp) &&
          wr("entropy_0.05", opp) > wr("curriculum_ppo_smart", opp);
  std::string detail = fmt("ppo vs random %.1f%% (85.4+-5)", 100 * ppo_random);
  for (const auto& [run, pools] : res)
    detail += fmt("; %s %.1f/%.1f/%.1f", run.c_str(), 100 * pools.at("random").win_rate,
                  100 * pools.at("greedy").win_rate, 100 * pools.at("smart").win_rate);
  return verdict(ok, detail);
}

// One run in this process, one through the CLI in a fresh process.
Outcome determinism() {
  const fs::path config = g_configs / "quick.json";
  RunConfig c = load_run_config(config.string());
  c.deterministic = true;
  const TrainSummary a = run(c, "determinism_a");
  const fs::path b = g_work / "determinism_b";
  const std::string cmd = "\"" + g_cli.string() + "\" train \"" + config.string() + "\" --fresh -q --output-dir \"" +
                          b.string() + "\" > /dev/null";
  if (std::system(cmd.c_str()) != 0) return fail("CLI training run failed: " + cmd);
  const bool metrics = slurp(g_work / "determinism_a" / "metrics.jsonl") == slurp(b / "metrics.jsonl");
  const bool ckpt = slurp(a.final_checkpoint) == slurp(b / "final.ckpt");
  const bool nonempty = !slurp(a.final_checkpoint).empty();
  return verdict(metrics && ckpt && nonempty,
                 fmt("in-process run vs CLI run: metrics.jsonl %s, final.ckpt %s", metrics ? "identical" : "differ",
                     ckpt && nonempty ? "identical" : "differ"));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 4) {
    std::cerr << "usage: big2_acceptance <configs dir> <work dir> <big2 cli>\n";
    return 1;
  }
  g_configs = argv[1];
  g_work = argv[2];
  g_cli = argv[3];
  fs::create_directories(g_work);

  std::set<int> only;
  if (const char* sel = std::getenv("BIG2_ACCEPT_ONLY")) {
    std::stringstream in(sel);
    for (std::string item; std::getline(in, item, ',');) only.insert(std::stoi(item));
  }

  const std::vector<std::pair<std::string, Outcome (*)()>> criteria{
      {"branching factor", branching},
      {"observation contract", observation_contract},
      {"zero-sum and conservation", zero_sum},
      {"rule oracle", rule_oracle},
      {"heuristic fidelity", heuristic_fidelity},
      {"baseline ordering", baselines},
      {"gradient check", gradients},
      {"GAE oracle", gae},
      {"target relations", targets},
      {"training smoke", training_smoke},
      {"long-run reproduction", long_run},
      {"determinism", determinism},
  };

  // Also kept in the work dir, since ctest hides the output of passing tests.
  std::ofstream report(g_work / "acceptance_report.txt");
  auto emit = [&](const std::string& line) {
    std::cout << line << std::flush;
    report << line << std::flush;
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const char* tag = o.kind == Outcome::kPass ? "PASS" : o.kind == Outcome::kFail ? "FAIL" : "SKIP";
    failures += o.kind == Outcome::kFail;
    emit(std::string(tag) + "  " + std::to_string(id) + ". " + criteria[i].first + ": " + o.detail +
         fmt(" [%.1f s]\n", secs));
  }
  emit((failures ? "FAILED " : "OK ") + std::to_string(failures) + " failing criteria\n");
  return failures ? 3 : 0;
}
