#include "commnet/moi.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace commnet {

namespace {

bool qualifies(const GameEvent& ev, const MoiConfig& cfg) {
  if (ev.kind != EventKind::ChampionKill) return true;
  int involved = 1 + static_cast<int>(ev.assisters.size());
  if (cfg.involvement == InvolvementCounting::KillerAssistersPlusVictim &&
      ev.victim) {
    involved += 1;
  }
  return involved >= cfg.min_kill_involvement;
}

void check_config(const MoiConfig& cfg) {
  if (cfg.window_ms <= 0 || cfg.window_ms % 2 != 0) {
    throw std::invalid_argument("MoiConfig: window_ms must be positive even");
  }
  if (cfg.min_kill_involvement < 1) {
    throw std::invalid_argument("MoiConfig: min_kill_involvement must be >= 1");
  }
}

}  // namespace

std::span<const Utterance> utterances_in_window(const Session& session,
                                                Millis start_ms,
                                                Millis end_ms) {
  const auto& utts = session.utterances;
  const auto first = std::lower_bound(
      utts.begin(), utts.end(), start_ms,
      [](const Utterance& u, Millis t) { return u.start_ms < t; });
  const auto last = std::lower_bound(
      first, utts.end(), end_ms,
      [](const Utterance& u, Millis t) { return u.start_ms < t; });
  return {utts.data() + (first - utts.begin()),
          static_cast<std::size_t>(last - first)};
}

std::vector<MoiWindow> detect_mois(const Session& session,
                                   const MoiConfig& config) {
  check_config(config);
  const Millis half = config.half_span();
  std::vector<MoiWindow> out;
  for (const GameEvent& ev : session.events) {
    if (!qualifies(ev, config)) continue;
    const Millis start = ev.time_ms - half;
    const Millis end = ev.time_ms + half;
    if (start < 0 || end > session.duration_ms) continue;
    auto slice = utterances_in_window(session, start, end);
    if (slice.empty()) continue;
    out.push_back(MoiWindow{Window{start, end, WindowKind::MoI}, ev, slice});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const MoiWindow& a, const MoiWindow& b) {
                     return a.source_event.time_ms < b.source_event.time_ms;
                   });
  return out;
}

std::optional<PairedWindows> pair_non_moi(const Session& session,
                                          const MoiWindow& moi,
                                          std::span<const MoiWindow> all_mois,
                                          const MoiConfig& config) {
  check_config(config);
  const Millis initial = moi.window.start_ms - config.window_ms;
  Millis start = initial;
  int shifts = 0;
  while (true) {
    if (start < 0) return std::nullopt;
    if (config.max_pairing_shift_ms &&
        initial - start > *config.max_pairing_shift_ms) {
      return std::nullopt;
    }
    const Window candidate{start, start + config.window_ms,
                           WindowKind::NonMoI};
    const bool overlaps_moi =
        std::any_of(all_mois.begin(), all_mois.end(),
                    [&candidate](const MoiWindow& m) {
                      return candidate.overlaps(m.window);
                    });
    if (!overlaps_moi) {
      auto slice = utterances_in_window(session, candidate.start_ms,
                                        candidate.end_ms);
      if (!slice.empty()) {
        std::set<int> speakers;
        for (const Utterance& u : slice) speakers.insert(u.speaker.value);
        if (static_cast<int>(speakers.size()) >= config.min_speakers) {
          return PairedWindows{moi, candidate, slice, shifts};
        }
      }
    }
    start -= 1000;
    ++shifts;
  }
}

GamePhase phase_of(Millis time_ms, const PhaseBounds& bounds) {
  if (time_ms < 0) {
    throw std::invalid_argument("phase_of: negative game time");
  }
  if (time_ms < bounds.early_end_ms) return GamePhase::EarlyLaning;
  if (time_ms < bounds.laning_end_ms) return GamePhase::LateLaning;
  if (time_ms < bounds.teamfight_end_ms) return GamePhase::TeamFight;
  return GamePhase::Endgame;
}

}  // namespace commnet
