#include "commnet/timeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "commnet/prng.hpp"
#include "commnet/stats.hpp"

namespace commnet {

ProgressCurve progress_curve(const Session& session,
                             std::optional<DaPair> pair,
                             std::span<const AdjacencyPair> session_pairs,
                             Millis probe_window_ms) {
  if (probe_window_ms <= 0) {
    throw std::invalid_argument("progress_curve: probe window must be > 0");
  }
  ProgressCurve curve;
  curve.pair = pair;
  const std::size_t total = session_pairs.size();
  if (total == 0 || session.duration_ms <= 0) return curve;

  const Millis half = probe_window_ms / 2;
  for (int p = 1; p <= 100; ++p) {
    const Millis t_p = session.duration_ms * p / 100;
    const Millis lo = std::max<Millis>(0, t_p - half);
    const Millis hi = std::min(session.duration_ms, t_p + half);
    std::size_t hits = 0;
    for (const AdjacencyPair& ap : session_pairs) {
      if (pair && ap.da_pair != *pair) continue;
      if (ap.sender_start_ms >= lo && ap.sender_start_ms < hi) ++hits;
    }
    curve.values[p - 1] =
        static_cast<double>(hits) / static_cast<double>(total);
  }
  return curve;
}

BinnedCurve bin_curve(const ProgressCurve& curve, int bin_pct) {
  if (bin_pct <= 0 || 100 % bin_pct != 0) {
    throw std::invalid_argument("bin_curve: bin_pct must divide 100");
  }
  BinnedCurve out;
  out.bin_pct = bin_pct;
  const int bins = 100 / bin_pct;
  out.bins.resize(bins);
  for (int b = 0; b < bins; ++b) {
    double sum = 0.0;
    int present = 0;
    for (int i = b * bin_pct; i < (b + 1) * bin_pct; ++i) {
      if (curve.values[i]) {
        sum += *curve.values[i];
        ++present;
      }
    }
    if (present > 0) out.bins[b] = sum / present;
  }
  return out;
}

namespace {

double percentile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

}  // namespace

CiBand aggregate_band(std::span<const BinnedCurve> curves, double level,
                      CiMethod method, std::uint64_t seed, int resamples) {
  if (curves.size() < 2) {
    throw std::invalid_argument("aggregate_band: need at least 2 curves");
  }
  const std::size_t bins = curves.front().bins.size();
  for (const BinnedCurve& c : curves) {
    if (c.bins.size() != bins) {
      throw std::invalid_argument("aggregate_band: inconsistent bin layouts");
    }
  }
  CiBand band;
  band.mean.resize(bins);
  band.lower.resize(bins);
  band.upper.resize(bins);
  band.n.resize(bins, 0);
  std::vector<double> values;
  for (std::size_t b = 0; b < bins; ++b) {
    values.clear();
    for (const BinnedCurve& c : curves) {
      if (c.bins[b]) values.push_back(*c.bins[b]);
    }
    band.n[b] = values.size();
    if (values.empty()) continue;
    const Descriptive d = describe(values);
    band.mean[b] = *d.mean;
    if (values.size() < 2 || !d.sd) {
      band.lower[b] = *d.mean;
      band.upper[b] = *d.mean;
      continue;
    }
    if (method == CiMethod::StudentT) {
      const double t = student_t_critical(
          level, static_cast<double>(values.size()) - 1.0);
      const double margin =
          t * *d.sd / std::sqrt(static_cast<double>(values.size()));
      band.lower[b] = *d.mean - margin;
      band.upper[b] = *d.mean + margin;
    } else {
      SplitMix64 rng(seed ^ (0x9E3779B97F4A7C15ULL * (b + 1)));
      std::vector<double> means(static_cast<std::size_t>(resamples));
      for (double& m : means) {
        double sum = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
          sum += values[static_cast<std::size_t>(rng.next_in(
              0, static_cast<std::int64_t>(values.size()) - 1))];
        }
        m = sum / static_cast<double>(values.size());
      }
      std::sort(means.begin(), means.end());
      band.lower[b] = std::min(*d.mean,
                               percentile_sorted(means, (1.0 - level) / 2.0));
      band.upper[b] = std::max(*d.mean,
                               percentile_sorted(means, (1.0 + level) / 2.0));
    }
  }
  return band;
}

std::array<std::optional<double>, 4> phase_rates(
    const Session& session, std::optional<DaPair> pair,
    std::span<const AdjacencyPair> session_pairs, const PhaseBounds& bounds) {
  const std::array<Millis, 5> edges = {0, bounds.early_end_ms,
                                       bounds.laning_end_ms,
                                       bounds.teamfight_end_ms,
                                       session.duration_ms};
  std::array<std::optional<double>, 4> rates;
  for (int phase = 0; phase < 4; ++phase) {
    const Millis lo = std::min(edges[phase], session.duration_ms);
    const Millis hi = phase == 3
                          ? session.duration_ms
                          : std::min(edges[phase + 1], session.duration_ms);
    const Millis span = hi - lo;
    if (span <= 0) continue;
    std::size_t count = 0;
    for (const AdjacencyPair& ap : session_pairs) {
      if (pair && ap.da_pair != *pair) continue;
      if (ap.sender_start_ms >= lo && ap.sender_start_ms < hi) ++count;
    }
    const double minutes = static_cast<double>(span) / 60000.0;
    rates[phase] = static_cast<double>(count) / minutes;
  }
  return rates;
}

}  // namespace commnet
