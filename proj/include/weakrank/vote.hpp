#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace weakrank {

// Tri-state labeling-function output. The numeric value doubles as the index
// into per-state weight tables, so keep Negative=0, Positive=1, Abstain=2.
// On disk a vote is 0 / 1 / null respectively.
enum class Vote : std::uint8_t { Negative = 0, Positive = 1, Abstain = 2 };

using VoteVector = std::vector<Vote>;

// n x m vote matrix with per-row record ids.  lf_count is carried explicitly
// so an empty dataset still knows its column count.
struct VoteMatrix {
  std::size_t lf_count = 0;
  std::vector<std::string> record_ids;
  std::vector<VoteVector> rows;

  std::size_t size() const { return rows.size(); }
};

}  // namespace weakrank
