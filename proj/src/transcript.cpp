#include "big2/transcript.hpp"

#include <istream>
#include <ostream>

#include <json.hpp>

#include "big2/error.hpp"

namespace big2 {

using nlohmann::json;

std::string to_json_line(const Transcript& t) {
  json plies = json::array();
  for (const Ply& p : t.plies) {
    if (p.action.is_pass()) {
      plies.push_back(json::array({p.seat, "PASS"}));
    } else {
      plies.push_back(json::array({p.seat, p.action.cards.cards()}));
    }
  }
  json j;
  j["seed"] = t.seed;
  j["agents"] = t.agents;
  j["plies"] = std::move(plies);
  j["scores"] = t.scores;
  return j.dump();
}

Transcript transcript_from_json_line(const std::string& line) {
  Transcript t;
  try {
    const json j = json::parse(line);
    t.seed = j.at("seed").get<std::uint64_t>();
    t.agents = j.at("agents").get<std::array<std::string, kNumPlayers>>();
    t.scores = j.at("scores").get<TerminalScores>();
    for (const json& p : j.at("plies")) {
      Ply ply;
      ply.seat = p.at(0).get<int>();
      const json& action = p.at(1);
      if (action.is_string()) {
        if (action.get<std::string>() != "PASS") throw ConfigError("unknown action token");
        ply.action = Combination::pass();
      } else {
        CardSet cards;
        for (const json& c : action) {
          const int id = c.get<int>();
          if (id < 0 || id >= kNumCards || cards.contains(id))
            throw ConfigError("bad card id in transcript");
          cards.insert(id);
        }
        const auto combo = make_combination(cards);
        if (!combo) throw ConfigError("transcript action is not a combination");
        ply.action = *combo;
      }
      t.plies.push_back(ply);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed transcript: ") + e.what());
  }
  return t;
}

std::vector<Transcript> read_transcripts(std::istream& in) {
  std::vector<Transcript> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(transcript_from_json_line(line));
  }
  return out;
}

void write_transcript(std::ostream& out, const Transcript& t) {
  out << to_json_line(t) << '\n';
}

ReplayReport replay(const Transcript& t) {
  ReplayReport report;
  GameState state = deal(t.seed);
  for (std::size_t i = 0; i < t.plies.size(); ++i) {
    const Ply& ply = t.plies[i];
    if (state.terminal()) {
      report.first_illegal_ply = i;
      report.message = "ply after the game ended";
      return report;
    }
    if (ply.seat != state.current_player) {
      report.first_illegal_ply = i;
      report.message = "seat " + std::to_string(ply.seat) + " acted out of turn (expected " +
                       std::to_string(state.current_player) + ")";
      return report;
    }
    if (!is_legal(state, ply.action)) {
      report.first_illegal_ply = i;
      report.message = "illegal action " + to_string(ply.action);
      return report;
    }
    apply_action_in_place(state, ply.action);
  }
  report.reached_terminal = state.terminal();
  if (!report.reached_terminal) {
    report.message = "transcript ends before the game is over";
    return report;
  }
  report.scores_match = terminal_scores(state) == t.scores;
  report.valid = report.scores_match;
  report.message = report.scores_match ? "ok" : "recorded scores differ from replay";
  return report;
}

}  // namespace big2
