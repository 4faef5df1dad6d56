#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "commnet/report.hpp"
#include "commnet/synth.hpp"

using namespace commnet;

namespace {

constexpr DialogueAct I = DialogueAct::Inform;
constexpr DialogueAct Q = DialogueAct::Question;
constexpr DialogueAct D = DialogueAct::Directive;
constexpr DialogueAct C = DialogueAct::Commissive;

/// Scripted session with one MoI every 90 s. Dense sessions fill the MoI
/// windows with five-speaker round-robins (rho 0.5); sparse ones with a
/// two-speaker exchange (rho 0.1). Control zones always hold a minimal
/// valid two-speaker exchange (rho 0.1).
Session scripted_session(bool dense, int rotate, const std::string& team,
                         Cohort cohort) {
  Session s;
  s.duration_ms = 1800000;
  s.match_start_utc_ms = 1700000000000;
  s.team_label = team;
  s.cohort = cohort;
  const std::array<DialogueAct, 4> cycle = {I, Q, D, C};
  for (int k = 0; k < 18; ++k) {
    const Millis t = 120000 + static_cast<Millis>(k) * 90000;
    s.events.push_back(GameEvent{EventKind::ChampionKill, t, PlayerId{1},
                                 PlayerId{7}, {PlayerId{2}, PlayerId{3}}});
    const int n = dense ? 10 : 5;  // five sparse turns cover all four tags
    for (int i = 0; i < n; ++i) {
      const int speaker = dense ? (i + rotate) % 5 + 1 : (i % 2) + 1;
      s.utterances.push_back(Utterance{PlayerId{speaker}, "",
                                       t - 10000 + i * 2000,
                                       t - 10000 + i * 2000 + 900,
                                       cycle[i % 4]});
    }
    s.utterances.push_back(
        Utterance{PlayerId{3}, "", t - 44000, t - 43200, D});
    s.utterances.push_back(
        Utterance{PlayerId{4}, "", t - 41000, t - 40200, C});
  }
  std::stable_sort(s.utterances.begin(), s.utterances.end(),
                   utterance_order_less);
  return s;
}

AnalysisConfig test_config() {
  AnalysisConfig cfg;
  cfg.explicit_pairs = std::vector<DaPair>{{I, Q}, {D, C}};
  return cfg;
}

}  // namespace

TEST_CASE("analysis rows cover windows x tags") {
  const std::vector<NamedSession> sessions = {
      {"s1", scripted_session(true, 0, "teamA", Cohort::Professional)}};
  const AnalysisConfig cfg = test_config();
  const AnalysisResult r = analyze_sessions(sessions, cfg);

  CHECK(r.summary.moi_count == 18);
  CHECK(r.summary.paired_count == 18);
  // 36 windows (MoI + control) x 3 tags (all + two explicit)
  CHECK(r.rows.size() == 36 * 3);
  CHECK(r.summary.by_event_kind[0] == 18);
  CHECK(r.summary.by_team.at("teamA") == 18);
  CHECK(*r.summary.mois_per_session.mean == doctest::Approx(18.0));
}

TEST_CASE("analysis output is deterministic") {
  const std::vector<NamedSession> sessions = {
      {"s1", scripted_session(true, 1, "teamA", Cohort::Professional)},
      {"s2", scripted_session(false, 2, "teamB", Cohort::Amateur)}};
  const AnalysisConfig cfg = test_config();
  const std::string a = windows_csv(analyze_sessions(sessions, cfg), cfg);
  const std::string b = windows_csv(analyze_sessions(sessions, cfg), cfg);
  CHECK(a == b);
  CHECK(a.find("# tool_version=") == 0);  // config echo leads the file
}

TEST_CASE("planted MoI density shift is recovered as significant") {
  std::vector<NamedSession> sessions;
  for (int i = 0; i < 3; ++i) {
    sessions.push_back({"dense" + std::to_string(i),
                        scripted_session(true, i, "teamA",
                                         Cohort::Professional)});
  }
  const AnalysisConfig cfg = test_config();
  const AnalysisResult analysis = analyze_sessions(sessions, cfg);
  const auto rows = compare_moi(analysis, cfg);

  bool found = false;
  for (const MoiComparisonRow& row : rows) {
    if (row.tag == "all" && row.metric == "rho") {
      found = true;
      CHECK(*row.moi.mean > *row.control.mean);
      CHECK(row.test.p_value < 0.001);
      CHECK(significance_stars(row.test.p_value) == "***");
    }
  }
  CHECK(found);
}

TEST_CASE("identical MoI and control construction is not significant") {
  // sparse sessions: MoI windows and control zones both rho 0.1
  std::vector<NamedSession> sessions;
  for (int i = 0; i < 3; ++i) {
    sessions.push_back({"sparse" + std::to_string(i),
                        scripted_session(false, i, "teamA",
                                         Cohort::Amateur)});
  }
  const AnalysisConfig cfg = test_config();
  const auto rows = compare_moi(analyze_sessions(sessions, cfg), cfg);
  for (const MoiComparisonRow& row : rows) {
    if (row.tag == "all" && row.metric == "rho") {
      CHECK(row.test.degenerate);  // all differences zero
      CHECK(row.test.p_value == 1.0);
    }
  }
}

TEST_CASE("cohort comparison recovers a planted density offset") {
  std::vector<NamedSession> sessions;
  for (int i = 0; i < 3; ++i) {
    sessions.push_back({"p" + std::to_string(i),
                        scripted_session(true, i, "pro",
                                         Cohort::Professional)});
    sessions.push_back({"a" + std::to_string(i),
                        scripted_session(false, i, "ama", Cohort::Amateur)});
  }
  const AnalysisConfig cfg = test_config();
  const AnalysisResult analysis = analyze_sessions(sessions, cfg);
  const auto rows = compare_cohorts(analysis, cfg);
  bool found = false;
  for (const CohortComparisonRow& row : rows) {
    if (row.tag == "all" && row.metric == "rho") {
      found = true;
      CHECK(*row.professional.mean > *row.amateur.mean);
      CHECK(row.test.p_value < 0.001);
    }
  }
  CHECK(found);

  // single-cohort input is a contract error
  const std::vector<NamedSession> pro_only(sessions.begin(),
                                           sessions.begin() + 1);
  const AnalysisResult pro_analysis = analyze_sessions(pro_only, cfg);
  CHECK_THROWS_AS(compare_cohorts(pro_analysis, cfg), std::invalid_argument);
}

TEST_CASE("team comparison produces kruskal rows, post hoc and averages") {
  std::vector<NamedSession> sessions;
  const std::array<const char*, 5> teams = {"proA", "proB", "proC", "amaA",
                                            "amaB"};
  for (int t = 0; t < 5; ++t) {
    for (int i = 0; i < 2; ++i) {
      sessions.push_back(
          {std::string(teams[t]) + "_" + std::to_string(i),
           scripted_session(t % 2 == 0, t + i, teams[t],
                            t < 3 ? Cohort::Professional : Cohort::Amateur)});
    }
  }
  const AnalysisConfig cfg = test_config();
  const TeamComparisonReport report =
      compare_teams(analyze_sessions(sessions, cfg), cfg);

  CHECK(report.teams.size() == 5);
  CHECK(report.rows.size() == 3 * 3);  // 3 tags x 3 metrics
  for (const TeamComparisonRow& row : report.rows) {
    CHECK(row.per_team.size() == 5);
    CHECK(row.post_hoc.size() == 10);
    CHECK(row.kruskal.p_value >= 0.0);
    CHECK(row.kruskal.p_value <= 1.0);
  }
  REQUIRE(report.averages.count("rho") == 1);
  CHECK(report.averages.at("rho").size() == 5);

  // single team is a contract error
  const std::vector<NamedSession> one(sessions.begin(), sessions.begin() + 2);
  const AnalysisResult one_analysis = analyze_sessions(one, cfg);
  CHECK_THROWS_AS(compare_teams(one_analysis, cfg), std::invalid_argument);
}

TEST_CASE("timeline report rejects groups with fewer than two sessions") {
  const std::vector<NamedSession> one = {
      {"s1", scripted_session(true, 0, "teamA", Cohort::Professional)}};
  const AnalysisConfig cfg = test_config();
  const std::vector<DaPair> pairs = {{D, C}};
  CHECK_THROWS_AS(
      timeline_report(one, pairs, TimelineGrouping::All, cfg),
      std::invalid_argument);
}

TEST_CASE("timeline report emits bands and phase rates per group") {
  std::vector<NamedSession> sessions;
  for (int i = 0; i < 3; ++i) {
    sessions.push_back({"s" + std::to_string(i),
                        scripted_session(true, i, "teamA",
                                         Cohort::Professional)});
  }
  const AnalysisConfig cfg = test_config();
  const std::vector<DaPair> pairs = {{D, C}};
  const TimelineReport report =
      timeline_report(sessions, pairs, TimelineGrouping::All, cfg);

  // 2 tags (all + D->C) x 20 bins
  CHECK(report.band_rows.size() == 2 * 20);
  for (const TimelineBandRow& row : report.band_rows) {
    if (row.mean) {
      CHECK(*row.lo <= *row.mean + 1e-12);
      CHECK(*row.mean <= *row.hi + 1e-12);
    }
  }
  // 2 tags x 3 sessions x 4 phases
  CHECK(report.phase_rows.size() == 2 * 3 * 4);
  const std::string csv = timeline_band_csv(report, cfg);
  CHECK(csv.find("group,pair,bin_start_pct,mean,lo,hi,n") !=
        std::string::npos);
}

TEST_CASE("survey analysis is structural and flags bad rows") {
  std::string csv = "group,item,value\n";
  const std::array<const char*, 5> groups = {"proA", "proB", "proC", "amaA",
                                             "amaB"};
  for (int q = 1; q <= 7; ++q) {
    for (const char* g : groups) {
      for (int r = 0; r < 5; ++r) {
        csv += std::string(g) + ",Q" + std::to_string(q) + "," +
               std::to_string((q + r) % 7 + 1) + "\n";
      }
    }
  }
  csv += "proA,Q1,9\n";      // out of Likert range
  csv += "broken line\n";    // malformed
  const SurveyReport report = analyze_survey(csv, TestMode::Auto);
  CHECK(report.groups.size() == 5);
  CHECK(report.rows.size() == 7);
  CHECK(report.row_errors.size() == 2);
  for (const SurveyRow& row : report.rows) {
    CHECK(row.per_group.size() == 5);
    CHECK(row.post_hoc.size() == 10);
  }
}

TEST_CASE("identical survey groups are degenerate, planted shifts are not") {
  std::string flat = "group,item,value\n";
  for (const char* g : {"a", "b", "c"}) {
    for (int r = 0; r < 5; ++r) {
      flat += std::string(g) + ",Q1,4\n";
    }
  }
  const SurveyReport flat_report = analyze_survey(flat, TestMode::Auto);
  REQUIRE(flat_report.rows.size() == 1);
  CHECK(flat_report.rows[0].kruskal.degenerate);
  CHECK(flat_report.rows[0].kruskal.statistic == 0.0);

  std::string shifted = "group,item,value\n";
  for (int r = 0; r < 6; ++r) {
    shifted += "low,Q1," + std::to_string(1 + r % 2) + "\n";
    shifted += "mid,Q1," + std::to_string(3 + r % 2) + "\n";
    shifted += "high,Q1," + std::to_string(6 + r % 2) + "\n";
  }
  const SurveyReport shifted_report = analyze_survey(shifted, TestMode::Auto);
  REQUIRE(shifted_report.rows.size() == 1);
  CHECK(shifted_report.rows[0].kruskal.p_value < 0.01);
}

TEST_CASE("atomic_write leaves no temp file behind") {
  const auto dir = std::filesystem::temp_directory_path() /
                   "commnet_report_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "out.csv";
  atomic_write(path, "hello\n");
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "hello");
  CHECK(!std::filesystem::exists(dir / "out.csv.tmp"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("a scripted high-density window flows through analyze") {
  // speaker walk covering 8 of the 10 unordered pairs: the chain below
  // connects {2,3},{1,2},{1,4},{3,4},{3,5},{4,5},{2,4} and, after a
  // chain-breaking 6 s gap, {1,5}
  Session s;
  s.duration_ms = 1800000;
  s.team_label = "fig";
  const Millis t = 600000;
  s.events.push_back(GameEvent{EventKind::EliteMonsterKill, t, PlayerId{2},
                               std::nullopt, {}});
  const std::array<int, 8> walk = {3, 2, 1, 4, 3, 5, 4, 2};
  for (std::size_t i = 0; i < walk.size(); ++i) {
    const Millis at = t - 10000 + static_cast<Millis>(i) * 2000;
    s.utterances.push_back(Utterance{PlayerId{walk[i]}, "", at, at + 900, I});
  }
  s.utterances.push_back(Utterance{PlayerId{5}, "", t + 10000, t + 10800, I});
  s.utterances.push_back(Utterance{PlayerId{1}, "", t + 12000, t + 12800, I});
  // control zone
  s.utterances.push_back(Utterance{PlayerId{1}, "", t - 44000, t - 43200, I});
  s.utterances.push_back(Utterance{PlayerId{2}, "", t - 41000, t - 40200, I});
  std::stable_sort(s.utterances.begin(), s.utterances.end(),
                   utterance_order_less);

  AnalysisConfig cfg;
  cfg.explicit_pairs = std::vector<DaPair>{{I, I}};
  const std::vector<NamedSession> sessions = {{"fig", s}};
  const AnalysisResult r = analyze_sessions(sessions, cfg);
  bool found = false;
  for (const WindowRow& row : r.rows) {
    if (row.kind == WindowKind::MoI && !row.tag) {
      found = true;
      CHECK(row.m.rho == 0.8);
      CHECK(row.m.pair_count == 8);
      CHECK(row.utterance_count == 10);
    }
  }
  CHECK(found);
}

TEST_CASE("a planted late-game D->C surge overtakes Q->I") {
  SynthConfig gen;
  gen.seed = 2025;
  gen.duration_ms = 1800000;
  // early phases: questions answered with information; endgame: directives
  // met with commissives
  for (int p = 0; p < 3; ++p) {
    gen.phases[p].team_utterances_per_minute = 20.0;
    gen.phases[p].da_distribution = {0.50, 0.25, 0.20, 0.05};
  }
  gen.phases[3].team_utterances_per_minute = 20.0;
  gen.phases[3].da_distribution = {0.20, 0.05, 0.35, 0.40};

  const DaPair dc{D, C};
  const DaPair qi{Q, I};
  std::array<double, 4> dc_rate{}, qi_rate{};
  for (int i = 0; i < 4; ++i) {
    SynthConfig one = gen;
    one.seed = derive_seed(gen.seed, static_cast<std::uint64_t>(i));
    const Session session = generate_session(one).session;
    const auto pairs = extract_adjacency_pairs(session.utterances);
    const auto dc_rates = phase_rates(session, dc, pairs);
    const auto qi_rates = phase_rates(session, qi, pairs);
    for (int phase = 0; phase < 4; ++phase) {
      dc_rate[phase] += dc_rates[phase].value_or(0.0);
      qi_rate[phase] += qi_rates[phase].value_or(0.0);
    }
  }
  CHECK(dc_rate[0] < qi_rate[0]);  // laning: questions dominate
  CHECK(dc_rate[1] < qi_rate[1]);
  CHECK(dc_rate[3] > qi_rate[3]);  // endgame: the planted crossover
}

TEST_CASE("constant-rate corpora produce roughly flat curves") {
  std::vector<BinnedCurve> curves;
  for (int i = 0; i < 8; ++i) {
    SynthConfig gen;
    gen.seed = derive_seed(888, static_cast<std::uint64_t>(i));
    gen.duration_ms = 1800000;
    for (auto& phase : gen.phases) phase.team_utterances_per_minute = 18.0;
    const Session session = generate_session(gen).session;
    const auto pairs = extract_adjacency_pairs(session.utterances);
    curves.push_back(bin_curve(progress_curve(session, std::nullopt, pairs)));
  }
  const CiBand band = aggregate_band(curves);
  double global = 0.0;
  for (const auto& m : band.mean) global += m.value_or(0.0);
  global /= static_cast<double>(band.mean.size());
  for (const auto& m : band.mean) {
    REQUIRE(m.has_value());
    CHECK(*m > 0.5 * global);
    CHECK(*m < 1.5 * global);
  }
}

TEST_CASE("auto selection on generated corpora picks a prefix") {
  std::vector<NamedSession> sessions;
  for (int i = 0; i < 4; ++i) {
    SynthConfig gen;
    gen.seed = 500 + static_cast<std::uint64_t>(i);
    sessions.push_back({"g" + std::to_string(i),
                        generate_session(gen).session});
  }
  AnalysisConfig cfg;  // kneedle selection
  try {
    const AnalysisResult r = analyze_sessions(sessions, cfg);
    CHECK(!r.selected_pairs.empty());
    const auto sorted = r.freq.sorted_desc();
    for (std::size_t i = 0; i < r.selected_pairs.size(); ++i) {
      CHECK(r.selected_pairs[i] == sorted[i].first);
    }
  } catch (const SelectionAmbiguousError&) {
    // acceptable on a low-contrast synthetic corpus; covered by override
    AnalysisConfig with_k;
    with_k.override_k = 6;
    const AnalysisResult r = analyze_sessions(sessions, with_k);
    CHECK(r.selected_pairs.size() == 6);
  }
}
