#pragma once

#include <optional>
#include <span>
#include <vector>

#include "commnet/domain.hpp"

namespace commnet {

enum class InvolvementCounting {
  KillerPlusAssisters,        // victim excluded from the involvement count
  KillerAssistersPlusVictim,
};

struct MoiConfig {
  Millis window_ms = 30000;  // must be positive and even
  int min_kill_involvement = 3;
  InvolvementCounting involvement = InvolvementCounting::KillerPlusAssisters;
  int min_speakers = 2;  // distinct speakers required of a control window
  /// Furthest a control window start may be shifted below the initial
  /// candidate; unbounded down to game start when unset.
  std::optional<Millis> max_pairing_shift_ms;

  Millis half_span() const { return window_ms / 2; }
};

/// A window centered on a qualifying event, carrying the session utterances
/// whose start time falls inside it. The span references the Session's
/// utterance storage and must not outlive it.
struct MoiWindow {
  Window window;
  GameEvent source_event;
  std::span<const Utterance> utterances;
};

/// One qualifying window per event: ChampionKills passing the involvement
/// filter, every EliteMonsterKill and BuildingDestruction. Windows that
/// would extend beyond [0, duration] are dropped, as are windows without any
/// utterance. Output is sorted by center time.
///
/// Throws std::invalid_argument on an invalid config.
std::vector<MoiWindow> detect_mois(const Session& session,
                                   const MoiConfig& config = {});

struct PairedWindows {
  MoiWindow moi;
  Window control;
  std::span<const Utterance> control_utterances;
  int shifts = 0;  // 1-second steps taken to find the control
};

/// Pairs a MoI with the nearest earlier non-MoI window: the candidate starts
/// as the window_ms interval immediately preceding the MoI and shifts
/// earlier in 1-second steps while it overlaps any MoI window, has no
/// utterances, or has fewer than min_speakers distinct speakers. Returns
/// nullopt when the search runs out of game time (or exceeds
/// max_pairing_shift_ms).
std::optional<PairedWindows> pair_non_moi(const Session& session,
                                          const MoiWindow& moi,
                                          std::span<const MoiWindow> all_mois,
                                          const MoiConfig& config = {});

/// Game-phase transition points, in game-time ms. Defaults follow the 5/14/25
/// minute transitions (first Elite Monster spawn, turret plate removal,
/// Baron Nashor availability).
struct PhaseBounds {
  Millis early_end_ms = 5 * 60 * 1000;
  Millis laning_end_ms = 14 * 60 * 1000;
  Millis teamfight_end_ms = 25 * 60 * 1000;
};

/// Left-closed/right-open phase membership covering [0, inf).
/// Throws std::invalid_argument for negative times.
GamePhase phase_of(Millis time_ms, const PhaseBounds& bounds = {});

/// Utterances of `session` whose start time lies in [start_ms, end_ms).
std::span<const Utterance> utterances_in_window(const Session& session,
                                                Millis start_ms,
                                                Millis end_ms);

}  // namespace commnet
