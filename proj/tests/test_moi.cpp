#include <doctest.h>

#include <set>

#include "commnet/moi.hpp"
#include "commnet/synth.hpp"

using namespace commnet;

namespace {

Utterance utt(int speaker, Millis start, DialogueAct da = DialogueAct::Inform) {
  return Utterance{PlayerId{speaker}, "", start, start + 700, da};
}

GameEvent kill(Millis t, int killer, int victim, std::vector<int> assisters) {
  GameEvent ev{EventKind::ChampionKill, t, PlayerId{killer}, PlayerId{victim},
               {}};
  for (int a : assisters) ev.assisters.push_back(PlayerId{a});
  return ev;
}

Session base_session(Millis duration = 1800000) {
  Session s;
  s.duration_ms = duration;
  s.match_start_utc_ms = 1700000000000;
  s.team_label = "t";
  return s;
}

/// Brute-force control search: first valid 1s-aligned candidate scanning
/// down from the interval immediately preceding the MoI.
std::optional<Window> scan_control(const Session& s, const MoiWindow& moi,
                                   std::span<const MoiWindow> all,
                                   const MoiConfig& cfg) {
  for (Millis start = moi.window.start_ms - cfg.window_ms; start >= 0;
       start -= 1000) {
    const Window cand{start, start + cfg.window_ms, WindowKind::NonMoI};
    bool overlap = false;
    for (const MoiWindow& m : all) {
      if (cand.overlaps(m.window)) overlap = true;
    }
    if (overlap) continue;
    std::set<int> speakers;
    std::size_t count = 0;
    for (const Utterance& u : s.utterances) {
      if (u.start_ms >= cand.start_ms && u.start_ms < cand.end_ms) {
        ++count;
        speakers.insert(u.speaker.value);
      }
    }
    if (count >= 1 && static_cast<int>(speakers.size()) >= cfg.min_speakers) {
      return cand;
    }
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("phase boundaries at 5, 14 and 25 minutes are left-closed") {
  CHECK(phase_of(0) == GamePhase::EarlyLaning);
  CHECK(phase_of(299999) == GamePhase::EarlyLaning);
  CHECK(phase_of(300000) == GamePhase::LateLaning);
  CHECK(phase_of(839999) == GamePhase::LateLaning);
  CHECK(phase_of(840000) == GamePhase::TeamFight);
  CHECK(phase_of(1499999) == GamePhase::TeamFight);
  CHECK(phase_of(1500000) == GamePhase::Endgame);
  CHECK(phase_of(7200000) == GamePhase::Endgame);
  CHECK_THROWS_AS(phase_of(-1), std::invalid_argument);
}

TEST_CASE("phase_of covers all of game time with custom bounds") {
  const PhaseBounds bounds{120000, 480000, 900000};
  SplitMix64 rng(5);
  for (int i = 0; i < 500; ++i) {
    const Millis t = rng.next_in(0, 3600000);
    const GamePhase p = phase_of(t, bounds);
    if (t < bounds.early_end_ms) CHECK(p == GamePhase::EarlyLaning);
    else if (t < bounds.laning_end_ms) CHECK(p == GamePhase::LateLaning);
    else if (t < bounds.teamfight_end_ms) CHECK(p == GamePhase::TeamFight);
    else CHECK(p == GamePhase::Endgame);
  }
}

TEST_CASE("a kill with three involved players opens a centered window") {
  Session s = base_session();
  s.events.push_back(kill(600000, 3, 7, {2, 4}));
  s.utterances = {utt(1, 590000), utt(2, 592000)};

  const auto mois = detect_mois(s);
  REQUIRE(mois.size() == 1);
  CHECK(mois[0].window.start_ms == 585000);
  CHECK(mois[0].window.end_ms == 615000);
  CHECK(mois[0].utterances.size() == 2);
  CHECK(mois[0].source_event.kind == EventKind::ChampionKill);
}

TEST_CASE("involvement filter respects the counting mode") {
  Session s = base_session();
  s.events.push_back(kill(600000, 3, 7, {2}));  // killer + 1 assister
  s.utterances = {utt(1, 590000)};

  CHECK(detect_mois(s).empty());  // victim excluded by default

  MoiConfig with_victim;
  with_victim.involvement = InvolvementCounting::KillerAssistersPlusVictim;
  CHECK(detect_mois(s, with_victim).size() == 1);
}

TEST_CASE("elite monster and building events always qualify") {
  Session s = base_session();
  s.events.push_back(GameEvent{EventKind::EliteMonsterKill, 600000,
                               PlayerId{2}, std::nullopt, {}});
  s.events.push_back(GameEvent{EventKind::BuildingDestruction, 900000,
                               PlayerId{5}, std::nullopt, {}});
  s.utterances = {utt(1, 590000), utt(2, 890000)};
  CHECK(detect_mois(s).size() == 2);
}

TEST_CASE("silent windows are excluded") {
  Session s = base_session();
  s.events.push_back(kill(600000, 3, 7, {2, 4}));
  s.utterances = {utt(1, 550000)};  // outside [585000, 615000)
  CHECK(detect_mois(s).empty());
}

TEST_CASE("membership is by utterance start time only") {
  Session s = base_session();
  s.events.push_back(kill(600000, 3, 7, {2, 4}));
  // starts before the window, ends inside: excluded
  s.utterances = {Utterance{PlayerId{1}, "", 584200, 586000,
                            DialogueAct::Inform}};
  CHECK(detect_mois(s).empty());

  // starts on the last contained millisecond: included
  s.utterances = {utt(1, 614999)};
  CHECK(detect_mois(s).size() == 1);
}

TEST_CASE("windows clipped by the session edges are dropped") {
  Session s = base_session();
  s.events.push_back(kill(10000, 4, 9, {1, 2}));    // would start below 0
  s.events.push_back(kill(600000, 3, 7, {2, 4}));   // fine
  s.events.push_back(GameEvent{EventKind::EliteMonsterKill, 1795000,
                               PlayerId{7}, std::nullopt, {}});  // beyond end
  s.utterances = {utt(1, 9000), utt(2, 590000), utt(3, 1790000)};
  const auto mois = detect_mois(s);
  REQUIRE(mois.size() == 1);
  CHECK(mois[0].source_event.time_ms == 600000);
}

TEST_CASE("detection is deterministic and sorted by center") {
  Session s = base_session();
  s.events.push_back(kill(500000, 3, 7, {2, 4}));
  s.events.push_back(kill(600000, 1, 6, {2, 3}));
  s.utterances = {utt(1, 495000), utt(2, 595000)};
  const auto a = detect_mois(s);
  const auto b = detect_mois(s);
  REQUIRE(a.size() == 2);
  CHECK(a[0].window.start_ms < a[1].window.start_ms);
  REQUIRE(b.size() == a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].window.start_ms == b[i].window.start_ms);
  }
}

TEST_CASE("invalid config is rejected") {
  Session s = base_session();
  MoiConfig odd;
  odd.window_ms = 30001;
  CHECK_THROWS_AS(detect_mois(s, odd), std::invalid_argument);
  MoiConfig zero_involved;
  zero_involved.min_kill_involvement = 0;
  CHECK_THROWS_AS(detect_mois(s, zero_involved), std::invalid_argument);
}

TEST_CASE("the immediately preceding interval is used when valid") {
  Session s = base_session();
  s.events.push_back(kill(600000, 3, 7, {2, 4}));
  s.utterances = {utt(3, 560000), utt(4, 563000),  // control zone
                  utt(1, 590000), utt(2, 592000)};
  const auto mois = detect_mois(s);
  REQUIRE(mois.size() == 1);
  const auto paired = pair_non_moi(s, mois[0], mois);
  REQUIRE(paired.has_value());
  CHECK(paired->control.start_ms == 555000);
  CHECK(paired->control.end_ms == 585000);
  CHECK(paired->shifts == 0);
  CHECK(paired->control_utterances.size() == 2);
}

TEST_CASE("an exact 1 second right-edge overlap clears in one shift") {
  Session s = base_session();
  s.events.push_back(kill(599000, 1, 9, {4, 5}));  // window [584000, 614000)
  s.events.push_back(kill(600000, 3, 7, {2, 4}));  // window [585000, 615000)
  s.utterances = {utt(1, 560000), utt(5, 562000),  // shared control zone
                  utt(1, 586000), utt(2, 587500)};
  const auto mois = detect_mois(s);
  REQUIRE(mois.size() == 2);

  // initial candidate [555000, 585000) overlaps [584000, 614000) by 1000 ms
  const auto paired = pair_non_moi(s, mois[1], mois);
  REQUIRE(paired.has_value());
  CHECK(paired->shifts == 1);
  CHECK(paired->control.start_ms == 554000);
  CHECK(paired->control.end_ms == 584000);
}

TEST_CASE("control search fails cleanly at the game start") {
  Session s = base_session();
  s.events.push_back(kill(30000, 3, 7, {2, 4}));  // window [15000, 45000)
  s.utterances = {utt(1, 20000), utt(2, 22000)};
  const auto mois = detect_mois(s);
  REQUIRE(mois.size() == 1);
  CHECK(!pair_non_moi(s, mois[0], mois).has_value());
}

TEST_CASE("min_speakers gates the control window") {
  Session s = base_session();
  s.events.push_back(kill(600000, 3, 7, {2, 4}));
  s.utterances = {utt(3, 530000), utt(4, 533000),   // two speakers, earlier
                  utt(1, 560000), utt(1, 562000),   // single speaker zone
                  utt(1, 590000), utt(2, 592000)};
  const auto mois = detect_mois(s);
  REQUIRE(mois.size() == 1);
  const auto paired = pair_non_moi(s, mois[0], mois);
  REQUIRE(paired.has_value());
  // [555000, 585000) has utterances but only one speaker; search walks back
  // until both requirements hold
  CHECK(paired->control.end_ms <= 585000);
  std::set<int> speakers;
  for (const Utterance& u : paired->control_utterances) {
    speakers.insert(u.speaker.value);
  }
  CHECK(speakers.size() >= 2);
}

TEST_CASE("max pairing shift bounds the search") {
  Session s = base_session();
  s.events.push_back(kill(600000, 3, 7, {2, 4}));
  s.utterances = {utt(3, 410000), utt(4, 413000),  // far-away valid zone
                  utt(1, 590000), utt(2, 592000)};
  const auto mois = detect_mois(s);
  REQUIRE(mois.size() == 1);

  CHECK(pair_non_moi(s, mois[0], mois).has_value());  // unbounded finds it

  MoiConfig bounded;
  bounded.max_pairing_shift_ms = 30000;  // not enough to reach 413000
  CHECK(!pair_non_moi(s, mois[0], mois, bounded).has_value());
}

TEST_CASE("pairing agrees with the brute-force scan on random sessions") {
  SplitMix64 rng(98765);
  const MoiConfig cfg;
  for (int round = 0; round < 40; ++round) {
    SynthConfig gen;
    gen.seed = rng.next();
    gen.duration_ms = 1200000 + rng.next_in(0, 600000);
    const Session s = generate_session(gen).session;
    const auto mois = detect_mois(s, cfg);
    for (const MoiWindow& moi : mois) {
      const auto got = pair_non_moi(s, moi, mois, cfg);
      const auto expected = scan_control(s, moi, mois, cfg);
      REQUIRE(got.has_value() == expected.has_value());
      if (got) {
        CHECK(got->control.start_ms == expected->start_ms);
        // control window invariants
        CHECK(got->control.end_ms <= moi.window.start_ms);
        CHECK(!got->control_utterances.empty());
        for (const MoiWindow& other : mois) {
          CHECK(!got->control.overlaps(other.window));
        }
      }
    }
  }
}

TEST_CASE("every detected window has speech and exact length") {
  SplitMix64 rng(1111);
  for (int round = 0; round < 20; ++round) {
    SynthConfig gen;
    gen.seed = rng.next();
    const Session s = generate_session(gen).session;
    for (const MoiWindow& moi : detect_mois(s)) {
      CHECK(moi.window.length() == 30000);
      CHECK(!moi.utterances.empty());
      for (const Utterance& u : moi.utterances) {
        CHECK(u.start_ms >= moi.window.start_ms);
        CHECK(u.start_ms < moi.window.end_ms);
      }
    }
  }
}
