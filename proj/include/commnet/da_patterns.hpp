#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "commnet/network.hpp"

namespace commnet {

/// Ordered DA-pair frequencies over a pair corpus. Ties in the descending
/// order are broken by the fixed DA-pair index so ranking is deterministic.
struct DaPairFrequencyTable {
  std::array<std::int64_t, kDaPairCount> counts{};

  void add(DaPair pair, std::int64_t n = 1) { counts[da_pair_index(pair)] += n; }
  void merge(const DaPairFrequencyTable& other);
  std::int64_t total() const;
  std::vector<std::pair<DaPair, std::int64_t>> sorted_desc() const;
};

DaPairFrequencyTable count_da_pairs(std::span<const AdjacencyPair> pairs);

/// Kneedle knee detection on a descending curve (no smoothing, offline,
/// convex-decreasing orientation). Returns the 1-based knee index, or
/// nullopt when the curve has no qualifying knee (e.g. strictly linear or
/// constant input).
///
/// Throws std::invalid_argument when fewer than 3 points are supplied.
std::optional<int> kneedle_elbow(std::span<const double> y,
                                 double sensitivity = 1.0);

class SelectionAmbiguousError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Top-k DA pairs by count, k chosen by the Kneedle knee of the descending
/// frequency curve unless overridden. Output order is the descending-count
/// order (a prefix of sorted_desc).
///
/// Throws SelectionAmbiguousError when no knee is detectable and no override
/// is given.
std::vector<DaPair> select_frequent_pairs(
    const DaPairFrequencyTable& table,
    std::optional<int> override_k = std::nullopt, double sensitivity = 1.0);

}  // namespace commnet
