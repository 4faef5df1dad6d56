#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace commnet {

/// Milliseconds. Two axes exist: wall clock (UTC ms since epoch) and game
/// time (ms since game start, frozen during pauses). Analysis types carry
/// game time; only ingest touches the wall clock.
using Millis = std::int64_t;

/// Sessions shorter than this are excluded from analysis (earliest possible
/// match conclusion is 15 minutes).
inline constexpr Millis kMinSessionDurationMs = 15 * 60 * 1000;

inline constexpr int kTeamSize = 5;

enum class DialogueAct : int {
  Inform = 0,
  Question = 1,
  Directive = 2,
  Commissive = 3,
};

inline constexpr std::array<DialogueAct, 4> kAllDialogueActs = {
    DialogueAct::Inform, DialogueAct::Question, DialogueAct::Directive,
    DialogueAct::Commissive};

std::optional<DialogueAct> dialogue_act_from_code(int code);
char dialogue_act_letter(DialogueAct da);  // 'I', 'Q', 'D', 'C'
std::optional<DialogueAct> dialogue_act_from_letter(char c);

/// Standard position order.
enum class Role : int { Top = 0, Jungle = 1, Mid = 2, Bot = 3, Support = 4 };

std::string_view role_name(Role role);
std::optional<Role> role_from_name(std::string_view name);

enum class TeamSide { Blue, Red };

/// Numerical player identifier: 1-5 blue team, 6-10 red team, assigned in
/// position order within each side.
struct PlayerId {
  int value = 0;

  constexpr bool valid() const { return value >= 1 && value <= 10; }
  constexpr auto operator<=>(const PlayerId&) const = default;
};

/// Position slot within a team, 0..4. Valid id required.
constexpr int team_slot(PlayerId id) { return (id.value - 1) % kTeamSize; }

Role role_of(PlayerId id);           // throws std::out_of_range on invalid id
TeamSide side_of(PlayerId id);       // throws std::out_of_range on invalid id
PlayerId player_for(TeamSide side, Role role);

enum class Cohort { Professional, Amateur };

std::string_view cohort_name(Cohort cohort);
std::optional<Cohort> cohort_from_name(std::string_view name);

/// One labeled speech unit on the game-time axis (after synchronization).
struct Utterance {
  PlayerId speaker;
  std::string text;  // may be empty after redaction
  Millis start_ms = 0;
  Millis end_ms = 0;
  DialogueAct da = DialogueAct::Inform;
};

/// Deterministic utterance ordering: (start_ms, end_ms, speaker).
bool utterance_order_less(const Utterance& a, const Utterance& b);

enum class EventKind {
  ChampionKill,
  EliteMonsterKill,
  BuildingDestruction,
};

std::string_view event_kind_name(EventKind kind);
std::optional<EventKind> event_kind_from_name(std::string_view name);

/// A collaborative in-game event. `victim` is present exactly for
/// ChampionKill; the killer never appears among the assisters.
struct GameEvent {
  EventKind kind = EventKind::ChampionKill;
  Millis time_ms = 0;
  PlayerId killer;
  std::optional<PlayerId> victim;
  std::vector<PlayerId> assisters;
};

/// Wall-clock interval during which the game clock is frozen.
struct PauseInterval {
  Millis start_utc_ms = 0;
  Millis end_utc_ms = 0;
};

/// One match: events and one recorded team's utterance streams, both on the
/// game-time axis, plus the wall-clock anchors needed to reconstruct it.
struct Session {
  Millis match_start_utc_ms = 0;
  Millis duration_ms = 0;
  std::vector<PauseInterval> pauses;       // disjoint, sorted
  std::vector<GameEvent> events;           // sorted by time_ms
  std::vector<Utterance> utterances;       // sorted by utterance_order_less
  std::string team_label;
  Cohort cohort = Cohort::Amateur;
  TeamSide team_side = TeamSide::Blue;
};

enum class WindowKind { MoI, NonMoI };

/// Half-open game-time interval [start_ms, end_ms).
struct Window {
  Millis start_ms = 0;
  Millis end_ms = 0;
  WindowKind kind = WindowKind::MoI;

  Millis length() const { return end_ms - start_ms; }
  bool contains(Millis t) const { return t >= start_ms && t < end_ms; }
  bool overlaps(const Window& other) const {
    return start_ms < other.end_ms && other.start_ms < end_ms;
  }
};

/// Ordered pair of dialogue acts on two consecutive utterances.
struct DaPair {
  DialogueAct first = DialogueAct::Inform;
  DialogueAct second = DialogueAct::Inform;

  constexpr auto operator<=>(const DaPair&) const = default;
};

inline constexpr int kDaPairCount = 16;

constexpr int da_pair_index(DaPair p) {
  return static_cast<int>(p.first) * 4 + static_cast<int>(p.second);
}
DaPair da_pair_from_index(int index);     // throws std::out_of_range
std::string da_pair_label(DaPair p);      // e.g. "I->I"
/// Accepts "I->I", "I:I" and full-word forms like "Inform->Inform".
std::optional<DaPair> da_pair_from_label(std::string_view label);

enum class GamePhase : int {
  EarlyLaning = 0,
  LateLaning = 1,
  TeamFight = 2,
  Endgame = 3,
};

inline constexpr std::array<GamePhase, 4> kAllPhases = {
    GamePhase::EarlyLaning, GamePhase::LateLaning, GamePhase::TeamFight,
    GamePhase::Endgame};

std::string_view phase_name(GamePhase phase);

enum class ViolationCode {
  TooShort,
  NegativeDuration,
  UnsortedEvents,
  UnsortedUtterances,
  EventTimeOutOfRange,
  InvalidUtteranceSpan,
  NegativeUtteranceStart,
  UtteranceBeyondDuration,
  InvalidParticipantId,
  MissingVictim,
  UnexpectedVictim,
  KillerAmongAssisters,
  VictimAmongParticipants,
  InvalidPauseSpan,
  OverlappingPauses,
};

std::string_view violation_code_name(ViolationCode code);

struct Violation {
  ViolationCode code;
  std::string detail;
};

/// Checks every type invariant plus the 15-minute inclusion rule. Violations
/// are data, not failures; an empty list means the session is analyzable.
std::vector<Violation> validate_session(const Session& session);

}  // namespace commnet
