#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "big2/cards.hpp"
#include "big2/game.hpp"

namespace big2 {

struct Ply {
  int seat = 0;
  Combination action;
};

// One recorded game. Serialized as a single JSON line:
//   {"seed":42,"agents":["random",...],"plies":[[0,[0,4]],[1,"PASS"],...],
//    "scores":[21,-5,-7,-9]}
struct Transcript {
  std::uint64_t seed = 0;
  std::array<std::string, kNumPlayers> agents;
  std::vector<Ply> plies;
  TerminalScores scores{};
};

std::string to_json_line(const Transcript& t);
// Throws ConfigError on malformed input. Actions are classified from their
// card lists; a card list that is not a combination throws as well.
Transcript transcript_from_json_line(const std::string& line);

std::vector<Transcript> read_transcripts(std::istream& in);
void write_transcript(std::ostream& out, const Transcript& t);

struct ReplayReport {
  bool valid = false;
  // Index of the first ply that is illegal (or does not match the seat to
  // act); nullopt when every ply was legal.
  std::optional<std::size_t> first_illegal_ply;
  bool reached_terminal = false;
  bool scores_match = false;
  std::string message;
};

// Re-deals from the transcript seed and re-applies every ply.
ReplayReport replay(const Transcript& t);

}  // namespace big2
