#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "commnet/ingest.hpp"
#include "commnet/prng.hpp"

namespace commnet {

struct PhaseProfile {
  double team_utterances_per_minute = 12.0;  // chain initiations
  std::array<double, 4> da_distribution = {0.45, 0.21, 0.22, 0.12};
};

struct SynthEventRates {
  double champion_kills_per_minute = 1.6;
  double elite_monster_kills_per_minute = 0.33;
  double building_destructions_per_minute = 0.42;
};

struct SynthConfig {
  std::uint64_t seed = 0;
  Millis duration_ms = 30 * 60 * 1000;
  std::array<PhaseProfile, 4> phases{};
  SynthEventRates event_rates{};
  int kill_assisters_min = 0;
  int kill_assisters_max = 4;

  /// Speaker-share weights over the five slots; skewing the reply weights
  /// plants a dominance/centralization structure.
  std::array<double, 5> initiation_weights = {1, 1, 1, 1, 1};
  std::array<double, 5> reply_weights = {1, 1, 1, 1, 1};
  double reply_probability = 0.35;
  Millis reply_gap_min_ms = 300;
  Millis reply_gap_max_ms = 4000;
  Millis utterance_len_min_ms = 300;
  Millis utterance_len_max_ms = 2500;

  /// When nonempty these are used verbatim (times on the game axis) and the
  /// stochastic schedule is skipped.
  std::vector<GameEvent> scripted_events;
  std::vector<Utterance> scripted_utterances;

  /// Pauses as (game time, wall duration) pairs, sorted by game time.
  std::vector<std::pair<Millis, Millis>> pauses;

  std::string team_label = "synth";
  Cohort cohort = Cohort::Amateur;
  TeamSide team_side = TeamSide::Blue;
  Millis match_start_utc_ms = 1'700'000'000'000;
  Millis recording_lead_ms = 1500;  // recording starts this far before match

  Millis moi_window_ms = 30000;  // used for the ground-truth MoI scan
  int min_kill_involvement = 3;
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// What the generator knows it planted, for end-to-end assertions.
struct GroundTruth {
  std::vector<GameEvent> planted_events;
  std::vector<Window> expected_moi_windows;
  std::array<std::int64_t, kDaPairCount> pair_counts{};
  std::vector<PlayerId> dominance_order;  // utterance count, descending
  std::size_t utterance_count = 0;
};

struct SynthResult {
  Session session;
  RawRecordingMeta meta;
  GroundTruth truth;
};

/// Reproducible session generation: the same config and seed always yields
/// a byte-identical export. Throws GenerationError for invalid or infeasible
/// configs (speaker utilization above capacity).
SynthResult generate_session(const SynthConfig& config);

}  // namespace commnet
