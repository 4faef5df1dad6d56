#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "commnet/moi.hpp"
#include "commnet/network.hpp"

namespace commnet {

/// Per-1%-of-game-progress ratio of one DA pair's occurrences (within a
/// centered probe window) to the session's total pair count. Absent when the
/// session produced no pairs at all.
struct ProgressCurve {
  std::array<std::optional<double>, 100> values{};
  std::optional<DaPair> pair;  // nullopt = all pairs
};

/// For each progress point p in 1..100, counts pairs whose sender start time
/// lies in [t_p - probe/2, t_p + probe/2) clipped to [0, duration], divided
/// by the session's total pair count. `session_pairs` must come from the
/// whole session's utterance sequence.
ProgressCurve progress_curve(const Session& session,
                             std::optional<DaPair> pair,
                             std::span<const AdjacencyPair> session_pairs,
                             Millis probe_window_ms = 30000);

struct BinnedCurve {
  std::vector<std::optional<double>> bins;
  int bin_pct = 5;
};

/// Mean over each bin's present values; a bin with no present values stays
/// absent. bin_pct must divide 100.
BinnedCurve bin_curve(const ProgressCurve& curve, int bin_pct = 5);

/// Per-bin mean and confidence interval across sessions.
struct CiBand {
  std::vector<std::optional<double>> mean, lower, upper;
  std::vector<std::size_t> n;  // sessions contributing to each bin
};

enum class CiMethod { StudentT, Bootstrap };

/// Requires at least two curves (throws std::invalid_argument otherwise) and
/// identical bin layouts. Absent values are excluded per bin; bins reached
/// by a single session get a zero-width interval. Bootstrap mode draws
/// seeded percentile intervals of the mean instead of the t interval.
CiBand aggregate_band(std::span<const BinnedCurve> curves, double level = 0.95,
                      CiMethod method = CiMethod::StudentT,
                      std::uint64_t seed = 0, int resamples = 1000);

/// Pairs-per-minute for each game phase, with phase spans clipped to the
/// session duration; zero-length phases are absent.
std::array<std::optional<double>, 4> phase_rates(
    const Session& session, std::optional<DaPair> pair,
    std::span<const AdjacencyPair> session_pairs,
    const PhaseBounds& bounds = {});

}  // namespace commnet
