#pragma once

#include <iosfwd>
#include <vector>

#include "big2/eval.hpp"
#include "json.hpp"

namespace big2 {

// Summary record without the per-game lists.
nlohmann::ordered_json to_json(const TournamentResult& r);
// Totals, percentiles and the exact histograms (index = legal-action count).
nlohmann::ordered_json to_json(const BranchingStats& s);

void print_tournaments(std::ostream& out, const std::vector<TournamentResult>& results);
void print_branching(std::ostream& out, const BranchingStats& s, bool histogram);

}  // namespace big2
