#include <doctest.h>

#include <numeric>

#include "commnet/moi.hpp"
#include "commnet/network.hpp"
#include "commnet/synth.hpp"

using namespace commnet;

TEST_CASE("same seed and config yield byte-identical exports") {
  SynthConfig cfg;
  cfg.seed = 99;
  cfg.pauses = {{300000, 15000}};
  const SynthResult a = generate_session(cfg);
  const SynthResult b = generate_session(cfg);
  CHECK(write_event_log(a.session) == write_event_log(b.session));
  for (int id = 1; id <= 5; ++id) {
    CHECK(write_transcript(a.session, a.meta, PlayerId{id}) ==
          write_transcript(b.session, b.meta, PlayerId{id}));
  }

  SynthConfig other = cfg;
  other.seed = 100;
  const SynthResult c = generate_session(other);
  CHECK(write_event_log(a.session) != write_event_log(c.session));
}

TEST_CASE("generated sessions pass validation") {
  SplitMix64 rng(2718);
  for (int round = 0; round < 10; ++round) {
    SynthConfig cfg;
    cfg.seed = rng.next();
    cfg.duration_ms = 1000000 + rng.next_in(0, 1200000);
    const SynthResult r = generate_session(cfg);
    CHECK(validate_session(r.session).empty());
  }
}

TEST_CASE("zero utterance rates produce an events-only session") {
  SynthConfig cfg;
  for (auto& phase : cfg.phases) phase.team_utterances_per_minute = 0.0;
  const SynthResult r = generate_session(cfg);
  CHECK(r.session.utterances.empty());
  CHECK(!r.session.events.empty());
  CHECK(r.truth.expected_moi_windows.empty());  // no speech, no windows
}

TEST_CASE("scripted sessions reproduce hand-computed analysis") {
  SynthConfig cfg;
  cfg.scripted_events = {
      GameEvent{EventKind::ChampionKill, 600000, PlayerId{3}, PlayerId{7},
                {PlayerId{2}, PlayerId{4}}}};
  cfg.scripted_utterances = {
      Utterance{PlayerId{1}, "", 590000, 590800, DialogueAct::Directive},
      Utterance{PlayerId{2}, "", 591500, 592300, DialogueAct::Commissive},
  };
  const SynthResult r = generate_session(cfg);
  const auto mois = detect_mois(r.session);
  REQUIRE(mois.size() == 1);
  CHECK(mois[0].window.start_ms == 585000);
  const auto pairs = extract_adjacency_pairs(mois[0].utterances);
  REQUIRE(pairs.size() == 1);
  const auto m = metrics(build_network(pairs, std::nullopt));
  CHECK(m.rho == 0.1);
  CHECK(m.c_od == 1.0);
  CHECK(m.c_id == 1.0);
}

TEST_CASE("a single sender script forces full outdegree concentration") {
  SynthConfig cfg;
  cfg.scripted_utterances = {
      Utterance{PlayerId{1}, "", 10000, 10500, DialogueAct::Inform},
      Utterance{PlayerId{2}, "", 11000, 11500, DialogueAct::Inform},
      Utterance{PlayerId{1}, "", 30000, 30500, DialogueAct::Inform},
      Utterance{PlayerId{3}, "", 31000, 31500, DialogueAct::Inform},
      Utterance{PlayerId{1}, "", 50000, 50500, DialogueAct::Inform},
      Utterance{PlayerId{4}, "", 51000, 51500, DialogueAct::Inform},
  };
  const SynthResult r = generate_session(cfg);
  const auto pairs = extract_adjacency_pairs(r.session.utterances);
  REQUIRE(pairs.size() == 3);  // the >5 s gaps between blocks pair nothing
  const auto m = metrics(build_network(pairs, std::nullopt));
  CHECK(m.c_od == 1.0);
}

TEST_CASE("ground truth matches library analysis on generated data") {
  SplitMix64 rng(31415);
  for (int round = 0; round < 10; ++round) {
    SynthConfig cfg;
    cfg.seed = rng.next();
    const SynthResult r = generate_session(cfg);

    const auto mois = detect_mois(r.session);
    REQUIRE(mois.size() == r.truth.expected_moi_windows.size());
    for (std::size_t i = 0; i < mois.size(); ++i) {
      CHECK(mois[i].window.start_ms ==
            r.truth.expected_moi_windows[i].start_ms);
    }

    const auto pairs = extract_adjacency_pairs(r.session.utterances);
    std::array<std::int64_t, kDaPairCount> counts{};
    for (const auto& p : pairs) counts[da_pair_index(p.da_pair)] += 1;
    CHECK(counts == r.truth.pair_counts);
    CHECK(r.truth.utterance_count == r.session.utterances.size());
  }
}

TEST_CASE("dominance weights order the speakers") {
  SynthConfig cfg;
  cfg.seed = 7;
  cfg.initiation_weights = {10, 1, 1, 1, 1};
  cfg.reply_weights = {10, 1, 1, 1, 1};
  const SynthResult r = generate_session(cfg);
  REQUIRE(!r.truth.dominance_order.empty());
  CHECK(r.truth.dominance_order.front() == PlayerId{1});
}

TEST_CASE("utterance volume tracks the configured rates") {
  // Initiations at 12.7/min with reply chains of expected factor
  // 1/(1-0.35) over 27.5 minutes targets roughly the 537-per-game scale.
  double total = 0;
  const int seeds = 8;
  for (int i = 0; i < seeds; ++i) {
    SynthConfig cfg;
    cfg.seed = 1000 + static_cast<std::uint64_t>(i);
    cfg.duration_ms = 1650000;  // 27.5 min
    for (auto& phase : cfg.phases) phase.team_utterances_per_minute = 12.7;
    cfg.reply_probability = 0.35;
    total += static_cast<double>(
        generate_session(cfg).session.utterances.size());
  }
  const double mean = total / seeds;
  const double expected = 12.7 * 27.5 / (1.0 - 0.35);
  CHECK(mean > expected * 0.85);
  CHECK(mean < expected * 1.10);
}

TEST_CASE("infeasible speaker loads are rejected") {
  SynthConfig cfg;
  for (auto& phase : cfg.phases) phase.team_utterances_per_minute = 200.0;
  cfg.initiation_weights = {1, 0, 0, 0, 0};  // one speaker takes it all
  cfg.utterance_len_min_ms = 2000;
  cfg.utterance_len_max_ms = 2500;
  CHECK_THROWS_AS(generate_session(cfg), GenerationError);
}

TEST_CASE("config validation rejects malformed distributions") {
  SynthConfig bad_dist;
  bad_dist.phases[0].da_distribution = {0.5, 0.5, 0.5, 0.5};
  CHECK_THROWS_AS(generate_session(bad_dist), GenerationError);

  SynthConfig bad_pause;
  bad_pause.pauses = {{100000, 0}};
  CHECK_THROWS_AS(generate_session(bad_pause), GenerationError);

  SynthConfig bad_reply;
  bad_reply.reply_probability = 1.5;
  CHECK_THROWS_AS(generate_session(bad_reply), GenerationError);
}

TEST_CASE("derive_seed separates streams") {
  const auto a = derive_seed(42, 0);
  const auto b = derive_seed(42, 1);
  const auto c = derive_seed(43, 0);
  CHECK(a != b);
  CHECK(a != c);
  CHECK(derive_seed(42, 0) == a);
}

TEST_CASE("speakers never overlap themselves") {
  SynthConfig cfg;
  cfg.seed = 6;
  for (auto& phase : cfg.phases) phase.team_utterances_per_minute = 40.0;
  const SynthResult r = generate_session(cfg);
  std::array<Millis, 11> last_end{};
  for (const Utterance& u : r.session.utterances) {
    CHECK(u.start_ms >= last_end[u.speaker.value]);
    last_end[u.speaker.value] = u.end_ms;
  }
}
