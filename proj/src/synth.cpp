#include "commnet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "commnet/moi.hpp"
#include "commnet/network.hpp"

namespace commnet {

namespace {

void check_config(const SynthConfig& cfg) {
  if (cfg.duration_ms <= 0) {
    throw GenerationError("duration_ms must be positive");
  }
  for (const PhaseProfile& p : cfg.phases) {
    if (p.team_utterances_per_minute < 0) {
      throw GenerationError("utterance rate must be >= 0");
    }
    double sum = 0.0;
    for (double q : p.da_distribution) {
      if (q < 0) throw GenerationError("DA probabilities must be >= 0");
      sum += q;
    }
    if (std::fabs(sum - 1.0) > 1e-9) {
      throw GenerationError("DA distribution must sum to 1");
    }
  }
  if (cfg.reply_probability < 0.0 || cfg.reply_probability > 0.95) {
    throw GenerationError("reply_probability must lie in [0, 0.95]");
  }
  if (cfg.utterance_len_min_ms <= 0 ||
      cfg.utterance_len_max_ms < cfg.utterance_len_min_ms) {
    throw GenerationError("invalid utterance length range");
  }
  if (cfg.reply_gap_min_ms < 0 || cfg.reply_gap_max_ms < cfg.reply_gap_min_ms) {
    throw GenerationError("invalid reply gap range");
  }
  if (cfg.kill_assisters_min < 0 ||
      cfg.kill_assisters_max < cfg.kill_assisters_min ||
      cfg.kill_assisters_max > 4) {
    throw GenerationError("kill assister count range must lie in [0,4]");
  }

  // Feasibility: a speaker cannot talk more than wall time allows. Expected
  // per-speaker speaking load uses the chain factor 1/(1-r) and the largest
  // share across the two weight vectors.
  const double chain = 1.0 / (1.0 - cfg.reply_probability);
  const double mean_len =
      (cfg.utterance_len_min_ms + cfg.utterance_len_max_ms) / 2.0;
  auto share_of = [](const std::array<double, 5>& w, int i) {
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    return total > 0 ? w[i] / total : 0.0;
  };
  double max_rate = 0.0;
  for (const PhaseProfile& p : cfg.phases) {
    max_rate = std::max(max_rate, p.team_utterances_per_minute);
  }
  for (int i = 0; i < 5; ++i) {
    const double share =
        std::max(share_of(cfg.initiation_weights, i),
                 share_of(cfg.reply_weights, i));
    const double speaker_ms_per_min = max_rate * chain * share * mean_len;
    if (speaker_ms_per_min > 0.95 * 60000.0) {
      throw GenerationError(
          "infeasible config: speaker " + std::to_string(i + 1) +
          " would need to talk more than wall time allows");
    }
  }
}

PlayerId slot_to_player(const SynthConfig& cfg, int slot) {
  return PlayerId{(cfg.team_side == TeamSide::Blue ? 1 : 6) + slot};
}

std::vector<GameEvent> make_events(const SynthConfig& cfg, SplitMix64& rng) {
  if (!cfg.scripted_events.empty()) return cfg.scripted_events;
  std::vector<GameEvent> events;
  const struct {
    EventKind kind;
    double rate;
  } kinds[] = {
      {EventKind::ChampionKill, cfg.event_rates.champion_kills_per_minute},
      {EventKind::EliteMonsterKill,
       cfg.event_rates.elite_monster_kills_per_minute},
      {EventKind::BuildingDestruction,
       cfg.event_rates.building_destructions_per_minute},
  };
  for (const auto& [kind, rate] : kinds) {
    if (rate <= 0) continue;
    double t = rng.next_exp_gap_ms(rate);
    while (t < static_cast<double>(cfg.duration_ms)) {
      GameEvent ev;
      ev.kind = kind;
      ev.time_ms = static_cast<Millis>(t);
      ev.killer = PlayerId{static_cast<int>(rng.next_in(1, 10))};
      const bool killer_blue = ev.killer.value <= 5;
      if (kind == EventKind::ChampionKill) {
        ev.victim =
            PlayerId{static_cast<int>(rng.next_in(1, 5)) + (killer_blue ? 5 : 0)};
      }
      const int n_assist = static_cast<int>(
          rng.next_in(cfg.kill_assisters_min, cfg.kill_assisters_max));
      std::vector<int> teammates;
      for (int id = killer_blue ? 1 : 6; id <= (killer_blue ? 5 : 10); ++id) {
        if (id != ev.killer.value) teammates.push_back(id);
      }
      for (int a = 0; a < n_assist && !teammates.empty(); ++a) {
        const auto pick =
            static_cast<std::size_t>(rng.next_in(0, static_cast<std::int64_t>(
                                                        teammates.size()) - 1));
        ev.assisters.push_back(PlayerId{teammates[pick]});
        teammates.erase(teammates.begin() + static_cast<std::ptrdiff_t>(pick));
      }
      std::sort(ev.assisters.begin(), ev.assisters.end());
      events.push_back(std::move(ev));
      t += rng.next_exp_gap_ms(rate);
    }
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const GameEvent& a, const GameEvent& b) {
                     return a.time_ms < b.time_ms;
                   });
  return events;
}

std::vector<Utterance> make_utterances(const SynthConfig& cfg,
                                       SplitMix64& rng) {
  if (!cfg.scripted_utterances.empty()) return cfg.scripted_utterances;
  std::vector<Utterance> utts;
  std::array<Millis, 5> last_end{};
  std::size_t counter = 0;
  const PhaseBounds bounds;

  auto emit = [&](int slot, Millis start, DialogueAct da) -> bool {
    if (start >= cfg.duration_ms) return false;
    if (start < last_end[slot]) return false;  // speaker still talking
    Utterance u;
    u.speaker = slot_to_player(cfg, slot);
    u.text = "u" + std::to_string(counter++);
    u.start_ms = start;
    u.end_ms = std::min<Millis>(
        cfg.duration_ms,
        start + rng.next_in(cfg.utterance_len_min_ms, cfg.utterance_len_max_ms));
    u.da = da;
    last_end[slot] = u.end_ms;
    utts.push_back(std::move(u));
    return true;
  };

  double t = 0.0;
  while (true) {
    const auto phase = phase_of(
        std::min<Millis>(static_cast<Millis>(t), cfg.duration_ms - 1), bounds);
    const PhaseProfile& profile = cfg.phases[static_cast<int>(phase)];
    if (profile.team_utterances_per_minute <= 0.0) {
      // jump to the next phase boundary
      const std::array<Millis, 3> edges = {bounds.early_end_ms,
                                           bounds.laning_end_ms,
                                           bounds.teamfight_end_ms};
      Millis next_edge = cfg.duration_ms;
      for (Millis e : edges) {
        if (static_cast<double>(e) > t) {
          next_edge = e;
          break;
        }
      }
      if (next_edge >= cfg.duration_ms) break;
      t = static_cast<double>(next_edge);
      continue;
    }
    t += rng.next_exp_gap_ms(profile.team_utterances_per_minute);
    if (t >= static_cast<double>(cfg.duration_ms)) break;

    int slot = static_cast<int>(rng.next_weighted(cfg.initiation_weights));
    Millis start = static_cast<Millis>(t);
    DialogueAct da = kAllDialogueActs[rng.next_weighted(profile.da_distribution)];
    if (!emit(slot, start, da)) continue;

    // reply chain
    while (rng.next_double() < cfg.reply_probability) {
      std::array<double, 5> weights = cfg.reply_weights;
      weights[slot] = 0.0;  // nobody replies to themselves
      if (std::accumulate(weights.begin(), weights.end(), 0.0) <= 0.0) break;
      const int replier = static_cast<int>(rng.next_weighted(weights));
      const Millis gap = rng.next_in(cfg.reply_gap_min_ms, cfg.reply_gap_max_ms);
      start += gap;
      da = kAllDialogueActs[rng.next_weighted(profile.da_distribution)];
      if (!emit(replier, start, da)) break;
      slot = replier;
    }
  }
  std::stable_sort(utts.begin(), utts.end(), utterance_order_less);
  return utts;
}

GroundTruth compute_truth(const SynthConfig& cfg, const Session& session) {
  GroundTruth truth;
  truth.planted_events = session.events;
  truth.utterance_count = session.utterances.size();

  // Straight-line re-derivation of the window rule over the planted data.
  const Millis half = cfg.moi_window_ms / 2;
  for (const GameEvent& ev : session.events) {
    if (ev.kind == EventKind::ChampionKill &&
        1 + static_cast<int>(ev.assisters.size()) < cfg.min_kill_involvement) {
      continue;
    }
    const Millis lo = ev.time_ms - half;
    const Millis hi = ev.time_ms + half;
    if (lo < 0 || hi > session.duration_ms) continue;
    const bool has_speech =
        std::any_of(session.utterances.begin(), session.utterances.end(),
                    [lo, hi](const Utterance& u) {
                      return u.start_ms >= lo && u.start_ms < hi;
                    });
    if (has_speech) {
      truth.expected_moi_windows.push_back(Window{lo, hi, WindowKind::MoI});
    }
  }

  const auto& utts = session.utterances;
  for (std::size_t i = 0; i + 1 < utts.size(); ++i) {
    if (utts[i].speaker == utts[i + 1].speaker) continue;
    if (utts[i + 1].start_ms - utts[i].start_ms > kDefaultPairingGapMs) continue;
    truth.pair_counts[da_pair_index(DaPair{utts[i].da, utts[i + 1].da})] += 1;
  }

  std::array<std::pair<std::size_t, int>, 5> talk{};  // (count, slot)
  for (int slot = 0; slot < 5; ++slot) talk[slot] = {0, slot};
  for (const Utterance& u : utts) talk[team_slot(u.speaker)].first += 1;
  std::stable_sort(talk.begin(), talk.end(), [](const auto& a, const auto& b) {
    return a.first > b.first;
  });
  for (const auto& [count, slot] : talk) {
    truth.dominance_order.push_back(slot_to_player(cfg, slot));
  }
  return truth;
}

}  // namespace

SynthResult generate_session(const SynthConfig& cfg) {
  check_config(cfg);
  SplitMix64 rng(derive_seed(cfg.seed, 0));

  SynthResult result;
  Session& s = result.session;
  s.match_start_utc_ms = cfg.match_start_utc_ms;
  s.duration_ms = cfg.duration_ms;
  s.team_label = cfg.team_label;
  s.cohort = cfg.cohort;
  s.team_side = cfg.team_side;

  Millis accumulated = 0;
  Millis prev_game_t = -1;
  for (const auto& [game_t, pause_len] : cfg.pauses) {
    if (game_t <= prev_game_t || game_t > cfg.duration_ms || pause_len <= 0) {
      throw GenerationError("pauses must be sorted, positive and in range");
    }
    const Millis wall_start = cfg.match_start_utc_ms + game_t + accumulated;
    s.pauses.push_back(PauseInterval{wall_start, wall_start + pause_len});
    accumulated += pause_len;
    prev_game_t = game_t;
  }

  s.events = make_events(cfg, rng);
  s.utterances = make_utterances(cfg, rng);

  result.meta.recording_start_utc_ms =
      cfg.match_start_utc_ms - cfg.recording_lead_ms;
  result.truth = compute_truth(cfg, s);
  return result;
}

}  // namespace commnet
