#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "commnet/domain.hpp"

namespace commnet {

/// Wall-clock instant at which the recording bot started capturing audio;
/// the anchor that places transcript offsets on the wall clock.
struct RawRecordingMeta {
  Millis recording_start_utc_ms = 0;
};

enum class PausePolicy { DropUtterancesDuringPause, ClampToPauseStart };

struct IngestConfig {
  PausePolicy pause_policy = PausePolicy::DropUtterancesDuringPause;
  bool strict = false;  // fail on malformed rows instead of warning
};

class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IngestWarning {
  std::size_t line = 0;  // 1-based input line, 0 when not line-scoped
  std::string message;
};

/// Clock and team metadata carried by the event log's key=value section.
struct SessionClock {
  Millis match_start_utc_ms = 0;
  Millis duration_ms = 0;
  std::vector<PauseInterval> pauses;
  std::string team_label = "unknown";
  Cohort cohort = Cohort::Amateur;
  TeamSide team_side = TeamSide::Blue;
};

struct EventLog {
  std::vector<GameEvent> events;  // sorted by time_ms
  SessionClock clock;
  std::vector<IngestWarning> warnings;
};

/// Event log format: key=value clock lines, then the CSV header
/// `kind,time_ms,killer,victim,assisters`, then one row per event. The
/// victim field is empty for non-kill events; assisters is a bracketed
/// comma list such as [2,4]. Unknown event kinds are skipped with a
/// warning. Row errors are fatal only in strict mode; a missing clock
/// anchor (match start or duration) is always fatal.
EventLog parse_event_log(std::string_view text, const IngestConfig& cfg = {});

struct TranscriptResult {
  std::vector<Utterance> utterances;  // start/end are recording offsets
  std::vector<IngestWarning> warnings;
};

/// Transcript format: JSON lines with keys speaker, text, start_ms, end_ms,
/// da (0-3). The speaker may be the numeric id or a role name resolved on
/// the declared speaker's side; a mismatch against `speaker` is a row error.
TranscriptResult parse_transcript(std::string_view text, PlayerId speaker,
                                  const IngestConfig& cfg = {});

RawRecordingMeta parse_recording_meta(std::string_view text);

struct SyncResult {
  Session session;
  std::vector<IngestWarning> warnings;
};

/// Places every transcript utterance on the game-time axis:
///   game = (recording_start + offset - match_start) - completed pause time,
/// with the game clock frozen during pauses. Utterances starting strictly
/// inside a pause follow the pause policy; anything landing outside
/// [0, duration] is dropped with a warning. Streams are merged and sorted.
///
/// Throws IngestError when the recording started after the match ended.
SyncResult synchronize(const EventLog& event_log,
                       const std::vector<std::vector<Utterance>>& transcripts,
                       const RawRecordingMeta& meta,
                       const IngestConfig& cfg = {});

/// Wall-clock instant -> game time, frozen during pauses. Pauses must be
/// sorted and disjoint.
Millis wall_to_game(Millis wall_utc_ms, Millis match_start_utc_ms,
                    std::span<const PauseInterval> pauses);

/// Canonical inverse of wall_to_game (in-pause instants have no preimage;
/// frozen boundaries map to the pause end).
Millis game_to_wall(Millis game_ms, Millis match_start_utc_ms,
                    std::span<const PauseInterval> pauses);

// Writers emit the exact formats the parsers accept.
std::string write_event_log(const Session& session);
std::string write_transcript(const Session& session,
                             const RawRecordingMeta& meta, PlayerId speaker);
std::string write_recording_meta(const RawRecordingMeta& meta);

/// Session directory layout: events.csv, recording.txt and one
/// transcript_p<id>.jsonl per recorded player.
void export_session_dir(const Session& session, const RawRecordingMeta& meta,
                        const std::filesystem::path& dir);
SyncResult load_session_dir(const std::filesystem::path& dir,
                            const IngestConfig& cfg = {});

}  // namespace commnet
