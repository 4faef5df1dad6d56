#include "commnet/da_patterns.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace commnet {

void DaPairFrequencyTable::merge(const DaPairFrequencyTable& other) {
  for (int i = 0; i < kDaPairCount; ++i) counts[i] += other.counts[i];
}

std::int64_t DaPairFrequencyTable::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

std::vector<std::pair<DaPair, std::int64_t>>
DaPairFrequencyTable::sorted_desc() const {
  std::vector<std::pair<DaPair, std::int64_t>> rows;
  rows.reserve(kDaPairCount);
  for (int i = 0; i < kDaPairCount; ++i) {
    rows.emplace_back(da_pair_from_index(i), counts[i]);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.second > b.second;
  });
  return rows;
}

DaPairFrequencyTable count_da_pairs(std::span<const AdjacencyPair> pairs) {
  DaPairFrequencyTable table;
  for (const AdjacencyPair& p : pairs) table.add(p.da_pair);
  return table;
}

std::optional<int> kneedle_elbow(std::span<const double> y,
                                 double sensitivity) {
  const std::size_t n = y.size();
  if (n < 3) {
    throw std::invalid_argument("kneedle_elbow: need at least 3 points");
  }
  const auto [min_it, max_it] = std::minmax_element(y.begin(), y.end());
  const double y_min = *min_it;
  const double y_max = *max_it;
  if (y_max == y_min) return std::nullopt;

  // Normalize both axes to [0,1], flip the descending-convex curve into an
  // ascending-concave one, and take its difference from the diagonal.
  std::vector<double> x_norm(n), diff(n);
  for (std::size_t i = 0; i < n; ++i) {
    x_norm[i] = static_cast<double>(i) / static_cast<double>(n - 1);
    const double y_norm = (y[i] - y_min) / (y_max - y_min);
    diff[i] = (1.0 - y_norm) - x_norm[i];
  }

  // Local extrema with clipped boundaries (ties count as extrema).
  std::vector<std::size_t> maxima, minima;
  for (std::size_t i = 0; i < n; ++i) {
    const double left = diff[i > 0 ? i - 1 : 0];
    const double right = diff[i + 1 < n ? i + 1 : n - 1];
    if (diff[i] >= left && diff[i] >= right) maxima.push_back(i);
    if (diff[i] <= left && diff[i] <= right) minima.push_back(i);
  }
  if (maxima.empty()) return std::nullopt;

  const double step = 1.0 / static_cast<double>(n - 1);
  std::vector<double> thresholds(maxima.size());
  for (std::size_t k = 0; k < maxima.size(); ++k) {
    thresholds[k] = diff[maxima[k]] - sensitivity * step;
  }

  auto contains = [](const std::vector<std::size_t>& v, std::size_t i) {
    return std::binary_search(v.begin(), v.end(), i);
  };

  // Walk the difference curve from the first local maximum; a knee fires
  // when the curve drops below the threshold of the latest maximum before
  // reaching the next one.
  std::size_t next_threshold = 0;
  std::size_t knee_candidate = 0;
  double threshold = 0.0;
  for (std::size_t i = maxima.front(); i + 1 < n; ++i) {
    if (contains(maxima, i)) {
      threshold = thresholds[next_threshold];
      knee_candidate = i;
      ++next_threshold;
    }
    if (contains(minima, i)) {
      threshold = 0.0;
    }
    if (diff[i + 1] < threshold) {
      return static_cast<int>(knee_candidate) + 1;  // 1-based
    }
  }
  return std::nullopt;
}

std::vector<DaPair> select_frequent_pairs(const DaPairFrequencyTable& table,
                                          std::optional<int> override_k,
                                          double sensitivity) {
  const auto rows = table.sorted_desc();
  int k = 0;
  if (override_k) {
    k = *override_k;
    if (k < 1 || k > kDaPairCount) {
      throw std::invalid_argument("select_frequent_pairs: k outside [1,16]");
    }
  } else {
    std::vector<double> curve;
    curve.reserve(rows.size());
    for (const auto& [pair, count] : rows) {
      curve.push_back(static_cast<double>(count));
    }
    const auto knee = kneedle_elbow(curve, sensitivity);
    if (!knee) {
      throw SelectionAmbiguousError(
          "no knee detectable in the DA-pair frequency curve; pass an "
          "explicit k");
    }
    k = *knee;
  }
  std::vector<DaPair> selected;
  selected.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) selected.push_back(rows[i].first);
  return selected;
}

}  // namespace commnet
