#include "commnet/domain.hpp"

#include <algorithm>
#include <stdexcept>

namespace commnet {

namespace {

constexpr std::array<std::string_view, 5> kRoleNames = {"Top", "Jungle", "Mid",
                                                        "Bot", "Support"};
constexpr std::array<char, 4> kDaLetters = {'I', 'Q', 'D', 'C'};
constexpr std::array<std::string_view, 4> kDaWords = {"Inform", "Question",
                                                      "Directive", "Commissive"};
constexpr std::array<std::string_view, 3> kEventKindNames = {
    "ChampionKill", "EliteMonsterKill", "BuildingDestruction"};
constexpr std::array<std::string_view, 4> kPhaseNames = {
    "early_laning", "late_laning", "team_fight", "endgame"};

}  // namespace

std::optional<DialogueAct> dialogue_act_from_code(int code) {
  if (code < 0 || code > 3) return std::nullopt;
  return static_cast<DialogueAct>(code);
}

char dialogue_act_letter(DialogueAct da) {
  return kDaLetters[static_cast<int>(da)];
}

std::optional<DialogueAct> dialogue_act_from_letter(char c) {
  for (int i = 0; i < 4; ++i) {
    if (kDaLetters[i] == c) return static_cast<DialogueAct>(i);
  }
  return std::nullopt;
}

std::string_view role_name(Role role) {
  return kRoleNames[static_cast<int>(role)];
}

std::optional<Role> role_from_name(std::string_view name) {
  for (int i = 0; i < 5; ++i) {
    if (kRoleNames[i] == name) return static_cast<Role>(i);
  }
  return std::nullopt;
}

Role role_of(PlayerId id) {
  if (!id.valid()) {
    throw std::out_of_range("player id " + std::to_string(id.value) +
                            " outside [1,10]");
  }
  return static_cast<Role>(team_slot(id));
}

TeamSide side_of(PlayerId id) {
  if (!id.valid()) {
    throw std::out_of_range("player id " + std::to_string(id.value) +
                            " outside [1,10]");
  }
  return id.value <= 5 ? TeamSide::Blue : TeamSide::Red;
}

PlayerId player_for(TeamSide side, Role role) {
  const int base = side == TeamSide::Blue ? 1 : 6;
  return PlayerId{base + static_cast<int>(role)};
}

std::string_view cohort_name(Cohort cohort) {
  return cohort == Cohort::Professional ? "professional" : "amateur";
}

std::optional<Cohort> cohort_from_name(std::string_view name) {
  if (name == "professional" || name == "pro") return Cohort::Professional;
  if (name == "amateur") return Cohort::Amateur;
  return std::nullopt;
}

bool utterance_order_less(const Utterance& a, const Utterance& b) {
  if (a.start_ms != b.start_ms) return a.start_ms < b.start_ms;
  if (a.end_ms != b.end_ms) return a.end_ms < b.end_ms;
  return a.speaker.value < b.speaker.value;
}

std::string_view event_kind_name(EventKind kind) {
  return kEventKindNames[static_cast<int>(kind)];
}

std::optional<EventKind> event_kind_from_name(std::string_view name) {
  for (int i = 0; i < 3; ++i) {
    if (kEventKindNames[i] == name) return static_cast<EventKind>(i);
  }
  return std::nullopt;
}

DaPair da_pair_from_index(int index) {
  if (index < 0 || index >= kDaPairCount) {
    throw std::out_of_range("DA pair index outside [0,16)");
  }
  return DaPair{static_cast<DialogueAct>(index / 4),
                static_cast<DialogueAct>(index % 4)};
}

std::string da_pair_label(DaPair p) {
  return std::string{dialogue_act_letter(p.first)} + "->" +
         dialogue_act_letter(p.second);
}

std::optional<DaPair> da_pair_from_label(std::string_view label) {
  auto sep = label.find("->");
  std::size_t sep_len = 2;
  if (sep == std::string_view::npos) {
    sep = label.find(':');
    sep_len = 1;
  }
  if (sep == std::string_view::npos) return std::nullopt;
  const std::string_view lhs = label.substr(0, sep);
  const std::string_view rhs = label.substr(sep + sep_len);
  auto parse_side = [](std::string_view s) -> std::optional<DialogueAct> {
    if (s.size() == 1) return dialogue_act_from_letter(s[0]);
    for (int i = 0; i < 4; ++i) {
      if (kDaWords[i] == s) return static_cast<DialogueAct>(i);
    }
    return std::nullopt;
  };
  const auto first = parse_side(lhs);
  const auto second = parse_side(rhs);
  if (!first || !second) return std::nullopt;
  return DaPair{*first, *second};
}

std::string_view phase_name(GamePhase phase) {
  return kPhaseNames[static_cast<int>(phase)];
}

std::string_view violation_code_name(ViolationCode code) {
  switch (code) {
    case ViolationCode::TooShort: return "TooShort";
    case ViolationCode::NegativeDuration: return "NegativeDuration";
    case ViolationCode::UnsortedEvents: return "UnsortedEvents";
    case ViolationCode::UnsortedUtterances: return "UnsortedUtterances";
    case ViolationCode::EventTimeOutOfRange: return "EventTimeOutOfRange";
    case ViolationCode::InvalidUtteranceSpan: return "InvalidUtteranceSpan";
    case ViolationCode::NegativeUtteranceStart: return "NegativeUtteranceStart";
    case ViolationCode::UtteranceBeyondDuration:
      return "UtteranceBeyondDuration";
    case ViolationCode::InvalidParticipantId: return "InvalidParticipantId";
    case ViolationCode::MissingVictim: return "MissingVictim";
    case ViolationCode::UnexpectedVictim: return "UnexpectedVictim";
    case ViolationCode::KillerAmongAssisters: return "KillerAmongAssisters";
    case ViolationCode::VictimAmongParticipants:
      return "VictimAmongParticipants";
    case ViolationCode::InvalidPauseSpan: return "InvalidPauseSpan";
    case ViolationCode::OverlappingPauses: return "OverlappingPauses";
  }
  return "Unknown";
}

std::vector<Violation> validate_session(const Session& session) {
  std::vector<Violation> out;
  auto add = [&out](ViolationCode code, std::string detail) {
    out.push_back(Violation{code, std::move(detail)});
  };

  if (session.duration_ms < 0) {
    add(ViolationCode::NegativeDuration,
        "duration_ms = " + std::to_string(session.duration_ms));
  } else if (session.duration_ms < kMinSessionDurationMs) {
    add(ViolationCode::TooShort,
        "duration " + std::to_string(session.duration_ms) + " ms < 15 min");
  }

  for (std::size_t i = 0; i < session.pauses.size(); ++i) {
    const auto& p = session.pauses[i];
    if (p.start_utc_ms >= p.end_utc_ms) {
      add(ViolationCode::InvalidPauseSpan,
          "pause " + std::to_string(i) + " start >= end");
    }
    if (i > 0 && session.pauses[i - 1].end_utc_ms > p.start_utc_ms) {
      add(ViolationCode::OverlappingPauses,
          "pauses " + std::to_string(i - 1) + " and " + std::to_string(i));
    }
  }

  for (std::size_t i = 0; i < session.events.size(); ++i) {
    const auto& ev = session.events[i];
    if (i > 0 && session.events[i - 1].time_ms > ev.time_ms) {
      add(ViolationCode::UnsortedEvents, "event index " + std::to_string(i));
    }
    if (ev.time_ms < 0 || ev.time_ms > session.duration_ms) {
      add(ViolationCode::EventTimeOutOfRange,
          "event at " + std::to_string(ev.time_ms) + " ms");
    }
    auto check_id = [&](PlayerId id, const char* what) {
      if (!id.valid()) {
        add(ViolationCode::InvalidParticipantId,
            std::string(what) + " id " + std::to_string(id.value) +
                " in event at " + std::to_string(ev.time_ms) + " ms");
      }
    };
    check_id(ev.killer, "killer");
    if (ev.victim) check_id(*ev.victim, "victim");
    for (PlayerId a : ev.assisters) check_id(a, "assister");

    if (ev.kind == EventKind::ChampionKill && !ev.victim) {
      add(ViolationCode::MissingVictim,
          "ChampionKill at " + std::to_string(ev.time_ms) + " ms");
    }
    if (ev.kind != EventKind::ChampionKill && ev.victim) {
      add(ViolationCode::UnexpectedVictim,
          std::string(event_kind_name(ev.kind)) + " at " +
              std::to_string(ev.time_ms) + " ms");
    }
    const bool killer_assists =
        std::find(ev.assisters.begin(), ev.assisters.end(), ev.killer) !=
        ev.assisters.end();
    if (killer_assists) {
      add(ViolationCode::KillerAmongAssisters,
          "event at " + std::to_string(ev.time_ms) + " ms");
    }
    if (ev.victim) {
      const bool victim_participates =
          *ev.victim == ev.killer ||
          std::find(ev.assisters.begin(), ev.assisters.end(), *ev.victim) !=
              ev.assisters.end();
      if (victim_participates) {
        add(ViolationCode::VictimAmongParticipants,
            "event at " + std::to_string(ev.time_ms) + " ms");
      }
    }
  }

  for (std::size_t i = 0; i < session.utterances.size(); ++i) {
    const auto& u = session.utterances[i];
    if (i > 0 && session.utterances[i - 1].start_ms > u.start_ms) {
      add(ViolationCode::UnsortedUtterances,
          "utterance index " + std::to_string(i));
    }
    if (u.start_ms > u.end_ms) {
      add(ViolationCode::InvalidUtteranceSpan,
          "utterance at " + std::to_string(u.start_ms) + " ms");
    }
    if (u.start_ms < 0) {
      add(ViolationCode::NegativeUtteranceStart,
          "utterance at " + std::to_string(u.start_ms) + " ms");
    }
    if (u.start_ms > session.duration_ms) {
      add(ViolationCode::UtteranceBeyondDuration,
          "utterance at " + std::to_string(u.start_ms) + " ms");
    }
    if (!u.speaker.valid()) {
      add(ViolationCode::InvalidParticipantId,
          "speaker id " + std::to_string(u.speaker.value));
    }
  }

  return out;
}

}  // namespace commnet
