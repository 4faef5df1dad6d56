#include "commnet/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace commnet {

namespace {

using nlohmann::json;

constexpr std::string_view kEventHeader = "kind,time_ms,killer,victim,assisters";

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                        s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::optional<Millis> parse_millis(std::string_view s) {
  s = trim(s);
  Millis value = 0;
  const auto* begin = s.data();
  const auto* end = s.data() + s.size();
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc{} || result.ptr != end || s.empty()) {
    return std::nullopt;
  }
  return value;
}

std::optional<int> parse_int(std::string_view s) {
  const auto v = parse_millis(s);
  if (!v || *v < INT32_MIN || *v > INT32_MAX) return std::nullopt;
  return static_cast<int>(*v);
}

struct RowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unknown event kinds are skipped with a warning even in strict mode.
struct UnknownKindError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void report(std::vector<IngestWarning>& warnings, const IngestConfig& cfg,
            std::size_t line, std::string message) {
  if (cfg.strict) {
    throw IngestError("line " + std::to_string(line) + ": " + message);
  }
  warnings.push_back(IngestWarning{line, std::move(message)});
}

PlayerId parse_player(std::string_view field, std::size_t line,
                      const char* what) {
  const auto id = parse_int(field);
  if (!id || !PlayerId{*id}.valid()) {
    throw RowError("line " + std::to_string(line) + ": " + what + " id '" +
                   std::string(field) + "' outside [1,10]");
  }
  return PlayerId{*id};
}

GameEvent parse_event_row(std::string_view row, std::size_t line) {
  // First four fields are comma-separated; the assisters list is everything
  // after the fourth comma (it contains commas itself).
  std::array<std::string_view, 4> head;
  std::size_t pos = 0;
  for (int f = 0; f < 4; ++f) {
    const auto comma = row.find(',', pos);
    if (comma == std::string_view::npos) {
      throw RowError("line " + std::to_string(line) +
                     ": expected 5 fields in event row");
    }
    head[f] = trim(row.substr(pos, comma - pos));
    pos = comma + 1;
  }
  const std::string_view assisters_field = trim(row.substr(pos));

  GameEvent ev;
  const auto kind = event_kind_from_name(head[0]);
  if (!kind) {
    throw UnknownKindError("line " + std::to_string(line) +
                           ": unknown event kind '" + std::string(head[0]) +
                           "' skipped");
  }
  ev.kind = *kind;
  const auto time = parse_millis(head[1]);
  if (!time || *time < 0) {
    throw RowError("line " + std::to_string(line) +
                   ": unparseable event time '" + std::string(head[1]) + "'");
  }
  ev.time_ms = *time;
  ev.killer = parse_player(head[2], line, "killer");
  if (!head[3].empty()) {
    ev.victim = parse_player(head[3], line, "victim");
  }
  if (ev.kind == EventKind::ChampionKill && !ev.victim) {
    throw RowError("line " + std::to_string(line) +
                   ": ChampionKill row missing victim");
  }
  if (ev.kind != EventKind::ChampionKill && ev.victim) {
    throw RowError("line " + std::to_string(line) +
                   ": victim given for non-kill event");
  }

  if (assisters_field.size() < 2 || assisters_field.front() != '[' ||
      assisters_field.back() != ']') {
    throw RowError("line " + std::to_string(line) +
                   ": assisters must be a bracketed list");
  }
  std::string_view inner =
      assisters_field.substr(1, assisters_field.size() - 2);
  while (!inner.empty()) {
    const auto comma = inner.find(',');
    const std::string_view token =
        comma == std::string_view::npos ? inner : inner.substr(0, comma);
    ev.assisters.push_back(parse_player(trim(token), line, "assister"));
    if (comma == std::string_view::npos) break;
    inner.remove_prefix(comma + 1);
  }
  return ev;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

}  // namespace

EventLog parse_event_log(std::string_view text, const IngestConfig& cfg) {
  EventLog log;
  bool have_match_start = false;
  bool have_duration = false;
  bool header_seen = false;

  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const std::string_view line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;

    const auto eq = line.find('=');
    if (!header_seen && eq != std::string_view::npos) {
      const std::string_view key = line.substr(0, eq);
      const std::string_view value = trim(line.substr(eq + 1));
      if (key == "match_start_utc_ms") {
        const auto v = parse_millis(value);
        if (!v) throw IngestError("unparseable match_start_utc_ms");
        log.clock.match_start_utc_ms = *v;
        have_match_start = true;
      } else if (key == "duration_ms") {
        const auto v = parse_millis(value);
        if (!v) throw IngestError("unparseable duration_ms");
        log.clock.duration_ms = *v;
        have_duration = true;
      } else if (key == "pause") {
        const auto colon = value.find(':');
        const auto s = colon == std::string_view::npos
                           ? std::nullopt
                           : parse_millis(value.substr(0, colon));
        const auto e = colon == std::string_view::npos
                           ? std::nullopt
                           : parse_millis(value.substr(colon + 1));
        if (!s || !e || *s >= *e) {
          report(log.warnings, cfg, line_no, "malformed pause interval");
        } else {
          log.clock.pauses.push_back(PauseInterval{*s, *e});
        }
      } else if (key == "team_label") {
        log.clock.team_label = std::string(value);
      } else if (key == "cohort") {
        const auto c = cohort_from_name(value);
        if (!c) {
          report(log.warnings, cfg, line_no,
                 "unknown cohort '" + std::string(value) + "'");
        } else {
          log.clock.cohort = *c;
        }
      } else if (key == "team_side") {
        if (value == "blue") {
          log.clock.team_side = TeamSide::Blue;
        } else if (value == "red") {
          log.clock.team_side = TeamSide::Red;
        } else {
          report(log.warnings, cfg, line_no,
                 "unknown team_side '" + std::string(value) + "'");
        }
      } else {
        report(log.warnings, cfg, line_no,
               "unknown clock key '" + std::string(key) + "'");
      }
      continue;
    }

    if (line == kEventHeader) {
      header_seen = true;
      continue;
    }
    if (!header_seen) {
      report(log.warnings, cfg, line_no,
             "event row before header; header line required");
      continue;
    }
    try {
      log.events.push_back(parse_event_row(line, line_no));
    } catch (const UnknownKindError& err) {
      log.warnings.push_back(IngestWarning{line_no, err.what()});
    } catch (const RowError& err) {
      report(log.warnings, cfg, line_no, err.what());
    }
  }

  if (!have_match_start || !have_duration) {
    throw IngestError(
        "event log missing match_start_utc_ms or duration_ms clock line");
  }
  std::stable_sort(log.events.begin(), log.events.end(),
                   [](const GameEvent& a, const GameEvent& b) {
                     return a.time_ms < b.time_ms;
                   });
  std::stable_sort(log.clock.pauses.begin(), log.clock.pauses.end(),
                   [](const PauseInterval& a, const PauseInterval& b) {
                     return a.start_utc_ms < b.start_utc_ms;
                   });
  for (std::size_t i = 1; i < log.clock.pauses.size(); ++i) {
    if (log.clock.pauses[i - 1].end_utc_ms >
        log.clock.pauses[i].start_utc_ms) {
      throw IngestError("overlapping pause intervals in event log");
    }
  }
  return log;
}

TranscriptResult parse_transcript(std::string_view text, PlayerId speaker,
                                  const IngestConfig& cfg) {
  if (!speaker.valid()) {
    throw IngestError("parse_transcript: invalid declared speaker id");
  }
  TranscriptResult result;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const std::string_view line = trim(lines[i]);
    if (line.empty()) continue;

    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
      report(result.warnings, cfg, line_no, "invalid JSON object");
      continue;
    }
    try {
      Utterance u;
      u.speaker = speaker;
      if (obj.contains("speaker")) {
        const auto& sp = obj.at("speaker");
        if (sp.is_number_integer()) {
          u.speaker = PlayerId{sp.get<int>()};
        } else if (sp.is_string()) {
          const auto role = role_from_name(sp.get<std::string>());
          if (!role) throw RowError("unknown speaker role name");
          u.speaker = player_for(side_of(speaker), *role);
        } else {
          throw RowError("speaker must be an id or role name");
        }
        if (!u.speaker.valid()) throw RowError("speaker id outside [1,10]");
        if (u.speaker != speaker) {
          throw RowError("speaker disagrees with the file's declared player");
        }
      }
      u.text = obj.value("text", std::string{});
      u.start_ms = obj.at("start_ms").get<Millis>();
      u.end_ms = obj.at("end_ms").get<Millis>();
      if (u.start_ms < 0) throw RowError("negative start offset");
      if (u.end_ms < u.start_ms) throw RowError("end offset before start");
      const auto da = dialogue_act_from_code(obj.at("da").get<int>());
      if (!da) throw RowError("DA code outside {0,1,2,3}");
      u.da = *da;
      result.utterances.push_back(std::move(u));
    } catch (const RowError& err) {
      report(result.warnings, cfg, line_no, err.what());
    } catch (const json::exception& err) {
      report(result.warnings, cfg, line_no, err.what());
    }
  }
  std::stable_sort(result.utterances.begin(), result.utterances.end(),
                   utterance_order_less);
  return result;
}

RawRecordingMeta parse_recording_meta(std::string_view text) {
  for (std::string_view line : split_lines(text)) {
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) continue;
    if (line.substr(0, eq) == "recording_start_utc_ms") {
      const auto v = parse_millis(line.substr(eq + 1));
      if (!v || *v < 0) {
        throw IngestError("unparseable recording_start_utc_ms");
      }
      return RawRecordingMeta{*v};
    }
  }
  throw IngestError("recording meta missing recording_start_utc_ms");
}

Millis wall_to_game(Millis wall_utc_ms, Millis match_start_utc_ms,
                    std::span<const PauseInterval> pauses) {
  Millis completed = 0;
  for (const PauseInterval& p : pauses) {
    if (p.end_utc_ms <= wall_utc_ms) {
      completed += p.end_utc_ms - p.start_utc_ms;
    } else if (p.start_utc_ms < wall_utc_ms) {
      // frozen: clock shows the value it had when the pause began
      return p.start_utc_ms - match_start_utc_ms - completed;
    } else {
      break;
    }
  }
  return wall_utc_ms - match_start_utc_ms - completed;
}

Millis game_to_wall(Millis game_ms, Millis match_start_utc_ms,
                    std::span<const PauseInterval> pauses) {
  Millis completed = 0;
  for (const PauseInterval& p : pauses) {
    const Millis pause_game_anchor =
        p.start_utc_ms - match_start_utc_ms - completed;
    if (pause_game_anchor <= game_ms) {
      completed += p.end_utc_ms - p.start_utc_ms;
    } else {
      break;
    }
  }
  return match_start_utc_ms + game_ms + completed;
}

SyncResult synchronize(const EventLog& event_log,
                       const std::vector<std::vector<Utterance>>& transcripts,
                       const RawRecordingMeta& meta, const IngestConfig& cfg) {
  const SessionClock& clock = event_log.clock;
  Millis total_pause = 0;
  for (const PauseInterval& p : clock.pauses) {
    total_pause += p.end_utc_ms - p.start_utc_ms;
  }
  const Millis match_end_wall =
      clock.match_start_utc_ms + clock.duration_ms + total_pause;
  if (meta.recording_start_utc_ms > match_end_wall) {
    throw IngestError("recording started after the match ended");
  }

  SyncResult out;
  out.warnings = event_log.warnings;
  Session& s = out.session;
  s.match_start_utc_ms = clock.match_start_utc_ms;
  s.duration_ms = clock.duration_ms;
  s.pauses = clock.pauses;
  s.events = event_log.events;
  s.team_label = clock.team_label;
  s.cohort = clock.cohort;
  s.team_side = clock.team_side;

  for (const auto& stream : transcripts) {
    for (const Utterance& raw : stream) {
      const Millis wall_start = meta.recording_start_utc_ms + raw.start_ms;
      const Millis wall_end = meta.recording_start_utc_ms + raw.end_ms;

      const auto in_pause =
          std::find_if(s.pauses.begin(), s.pauses.end(),
                       [wall_start](const PauseInterval& p) {
                         return p.start_utc_ms < wall_start &&
                                wall_start < p.end_utc_ms;
                       });
      Millis game_start;
      if (in_pause != s.pauses.end()) {
        if (cfg.pause_policy == PausePolicy::DropUtterancesDuringPause) {
          out.warnings.push_back(IngestWarning{
              0, "dropped utterance at wall " + std::to_string(wall_start) +
                     " ms: inside a pause"});
          continue;
        }
        game_start = wall_to_game(in_pause->start_utc_ms,
                                  s.match_start_utc_ms, s.pauses);
      } else {
        game_start = wall_to_game(wall_start, s.match_start_utc_ms, s.pauses);
      }
      if (game_start < 0 || game_start > s.duration_ms) {
        out.warnings.push_back(IngestWarning{
            0, "dropped utterance at game " + std::to_string(game_start) +
                   " ms: outside [0, duration]"});
        continue;
      }
      Utterance u = raw;
      u.start_ms = game_start;
      const Millis raw_len = raw.end_ms - raw.start_ms;
      const Millis game_end =
          in_pause != s.pauses.end()
              ? game_start + raw_len
              : wall_to_game(wall_end, s.match_start_utc_ms, s.pauses);
      u.end_ms = std::min(std::max(game_end, game_start), s.duration_ms);
      s.utterances.push_back(std::move(u));
    }
  }
  std::stable_sort(s.utterances.begin(), s.utterances.end(),
                   utterance_order_less);
  return out;
}

std::string write_event_log(const Session& session) {
  std::ostringstream os;
  os << "match_start_utc_ms=" << session.match_start_utc_ms << '\n';
  os << "duration_ms=" << session.duration_ms << '\n';
  for (const PauseInterval& p : session.pauses) {
    os << "pause=" << p.start_utc_ms << ':' << p.end_utc_ms << '\n';
  }
  os << "team_label=" << session.team_label << '\n';
  os << "cohort=" << cohort_name(session.cohort) << '\n';
  os << "team_side=" << (session.team_side == TeamSide::Blue ? "blue" : "red")
     << '\n';
  os << kEventHeader << '\n';
  for (const GameEvent& ev : session.events) {
    os << event_kind_name(ev.kind) << ',' << ev.time_ms << ','
       << ev.killer.value << ',';
    if (ev.victim) os << ev.victim->value;
    os << ",[";
    for (std::size_t i = 0; i < ev.assisters.size(); ++i) {
      if (i > 0) os << ',';
      os << ev.assisters[i].value;
    }
    os << "]\n";
  }
  return os.str();
}

std::string write_transcript(const Session& session,
                             const RawRecordingMeta& meta, PlayerId speaker) {
  std::ostringstream os;
  for (const Utterance& u : session.utterances) {
    if (u.speaker != speaker) continue;
    const Millis wall_start =
        game_to_wall(u.start_ms, session.match_start_utc_ms, session.pauses);
    const Millis wall_end = wall_start + (u.end_ms - u.start_ms);
    json obj;
    obj["speaker"] = u.speaker.value;
    obj["text"] = u.text;
    obj["start_ms"] = wall_start - meta.recording_start_utc_ms;
    obj["end_ms"] = wall_end - meta.recording_start_utc_ms;
    obj["da"] = static_cast<int>(u.da);
    os << obj.dump() << '\n';
  }
  return os.str();
}

std::string write_recording_meta(const RawRecordingMeta& meta) {
  return "recording_start_utc_ms=" + std::to_string(meta.recording_start_utc_ms) +
         "\n";
}

void export_session_dir(const Session& session, const RawRecordingMeta& meta,
                        const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write_file = [&dir](const std::string& name, const std::string& body) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) {
      throw IngestError("cannot write " + (dir / name).string());
    }
    out << body;
  };
  write_file("events.csv", write_event_log(session));
  write_file("recording.txt", write_recording_meta(meta));
  const int base = session.team_side == TeamSide::Blue ? 1 : 6;
  for (int i = 0; i < kTeamSize; ++i) {
    const PlayerId id{base + i};
    write_file("transcript_p" + std::to_string(id.value) + ".jsonl",
               write_transcript(session, meta, id));
  }
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

SyncResult load_session_dir(const std::filesystem::path& dir,
                            const IngestConfig& cfg) {
  EventLog log = parse_event_log(read_file(dir / "events.csv"), cfg);
  const RawRecordingMeta meta =
      parse_recording_meta(read_file(dir / "recording.txt"));

  std::vector<std::vector<Utterance>> transcripts;
  std::vector<IngestWarning> transcript_warnings;
  for (int id = 1; id <= 10; ++id) {
    const auto path = dir / ("transcript_p" + std::to_string(id) + ".jsonl");
    if (!std::filesystem::exists(path)) continue;
    auto parsed = parse_transcript(read_file(path), PlayerId{id}, cfg);
    transcripts.push_back(std::move(parsed.utterances));
    for (auto& w : parsed.warnings) {
      w.message = path.filename().string() + ": " + w.message;
      transcript_warnings.push_back(std::move(w));
    }
  }
  if (transcripts.empty()) {
    throw IngestError("no transcript_p*.jsonl files in " + dir.string());
  }
  SyncResult result = synchronize(log, transcripts, meta, cfg);
  result.warnings.insert(result.warnings.end(),
                         transcript_warnings.begin(),
                         transcript_warnings.end());
  return result;
}

}  // namespace commnet
