#include "big2/report.hpp"

#include <iomanip>
#include <ostream>

namespace big2 {
namespace {

nlohmann::ordered_json histogram_json(const Histogram& h) {
  nlohmann::ordered_json j;
  j["decision_points"] = h.total();
  j["mean"] = h.mean();
  j["p95"] = h.percentile(95);
  j["p99"] = h.percentile(99);
  j["max"] = h.max();
  j["counts"] = h.counts;
  return j;
}

}  // namespace

nlohmann::ordered_json to_json(const TournamentResult& r) {
  nlohmann::ordered_json j;
  j["agent"] = r.agent;
  j["opponent"] = r.opponent;
  j["games"] = r.games;
  j["seed"] = r.seed;
  j["wins"] = r.wins;
  j["win_rate"] = r.win_rate;
  j["avg_score"] = r.avg_score;
  j["win_rate_ci"] = r.win_rate_ci;
  j["avg_score_ci"] = r.avg_score_ci;
  j["success"] = r.success();
  return j;
}

nlohmann::ordered_json to_json(const BranchingStats& s) {
  nlohmann::ordered_json j;
  j["games"] = s.games;
  j["seed"] = s.seed;
  j["all"] = histogram_json(s.all);
  j["control"] = histogram_json(s.control);
  j["response"] = histogram_json(s.response);
  return j;
}

void print_tournaments(std::ostream& out, const std::vector<TournamentResult>& results) {
  out << std::left << std::setw(14) << "agent" << std::setw(10) << "opponent" << std::right << std::setw(7)
      << "games" << std::setw(16) << "win rate" << std::setw(18) << "avg score" << "  success\n";
  for (const TournamentResult& r : results) {
    out << std::left << std::setw(14) << r.agent << std::setw(10) << r.opponent << std::right << std::setw(7)
        << r.games << std::fixed << std::setprecision(1) << std::setw(8) << 100.0 * r.win_rate << "% +-"
        << std::setw(4) << 100.0 * r.win_rate_ci << std::setprecision(2) << std::setw(10) << r.avg_score
        << " +-" << std::setw(5) << r.avg_score_ci << "  " << (r.success() ? "yes" : "no") << "\n"
        << std::defaultfloat;
  }
}

void print_branching(std::ostream& out, const BranchingStats& s, bool histogram) {
  auto row = [&](const char* label, const Histogram& h) {
    out << std::left << std::setw(10) << label << std::right << std::setw(10) << h.total() << std::fixed
        << std::setprecision(2) << std::setw(8) << h.mean() << std::setw(6) << h.percentile(95) << std::setw(6)
        << h.percentile(99) << std::setw(6) << h.max() << "\n"
        << std::defaultfloat;
  };
  out << "games " << s.games << ", seed " << s.seed << "\n";
  out << std::left << std::setw(10) << "states" << std::right << std::setw(10) << "points" << std::setw(8)
      << "mean" << std::setw(6) << "p95" << std::setw(6) << "p99" << std::setw(6) << "max" << "\n";
  row("all", s.all);
  row("control", s.control);
  row("response", s.response);
  if (!histogram) return;
  out << "\nlegal  all  control  response\n";
  for (std::size_t k = 0; k < s.all.counts.size(); ++k) {
    if (!s.all.counts[k]) continue;
    const auto at = [k](const Histogram& h) { return k < h.counts.size() ? h.counts[k] : 0; };
    out << k << " " << s.all.counts[k] << " " << at(s.control) << " " << at(s.response) << "\n";
  }
}

}  // namespace big2
