#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "commnet/report.hpp"
#include "commnet/synth.hpp"

namespace fs = std::filesystem;
using namespace commnet;

namespace {

struct GlobalOptions {
  double moi_window_s = 30.0;
  double pairing_gap_s = 5.0;
  int min_involved = 3;
  bool count_victim = false;
  int min_speakers = 2;
  std::string normalization = "pairs";
  std::string phase_bounds = "5,14,25";
  std::string pause_policy = "drop";
  bool strict = false;
  std::vector<std::string> pairs;  // explicit DA pairs, e.g. D:C
  int top_k = 0;                   // 0 = kneedle
  double timeline_probe_s = 30.0;
  double kneedle_sensitivity = 1.0;
  bool count_moi_only = false;
  std::uint64_t seed = 42;
  std::string out_dir = ".";
  std::string format = "csv";
};

AnalysisConfig to_config(const GlobalOptions& g) {
  AnalysisConfig cfg;
  cfg.moi.window_ms = static_cast<Millis>(g.moi_window_s * 1000.0);
  cfg.moi.min_kill_involvement = g.min_involved;
  cfg.moi.involvement = g.count_victim
                            ? InvolvementCounting::KillerAssistersPlusVictim
                            : InvolvementCounting::KillerPlusAssisters;
  cfg.moi.min_speakers = g.min_speakers;
  cfg.pairing_gap_ms = static_cast<Millis>(g.pairing_gap_s * 1000.0);
  cfg.normalization = g.normalization == "utterances"
                          ? Normalization::Utterances
                          : Normalization::Pairs;
  cfg.ingest.strict = g.strict;
  cfg.ingest.pause_policy = g.pause_policy == "clamp"
                                ? PausePolicy::ClampToPauseStart
                                : PausePolicy::DropUtterancesDuringPause;
  {
    std::istringstream is(g.phase_bounds);
    double a = 5, b = 14, c = 25;
    char comma;
    if (is >> a >> comma >> b >> comma >> c) {
      cfg.phase_bounds.early_end_ms = static_cast<Millis>(a * 60000.0);
      cfg.phase_bounds.laning_end_ms = static_cast<Millis>(b * 60000.0);
      cfg.phase_bounds.teamfight_end_ms = static_cast<Millis>(c * 60000.0);
    } else {
      throw CLI::ValidationError("--phase-bounds expects e.g. 5,14,25");
    }
  }
  if (!g.pairs.empty()) {
    std::vector<DaPair> parsed;
    for (const std::string& label : g.pairs) {
      const auto p = da_pair_from_label(label);
      if (!p) {
        throw CLI::ValidationError("unrecognized DA pair '" + label + "'");
      }
      parsed.push_back(*p);
    }
    cfg.explicit_pairs = parsed;
  }
  if (g.top_k > 0) cfg.override_k = g.top_k;
  cfg.kneedle_sensitivity = g.kneedle_sensitivity;
  cfg.count_moi_windows_only = g.count_moi_only;
  cfg.timeline_probe_ms = static_cast<Millis>(g.timeline_probe_s * 1000.0);
  return cfg;
}

struct LoadedCorpus {
  std::vector<NamedSession> sessions;
  std::vector<std::string> errors;
  std::size_t warning_count = 0;
};

LoadedCorpus load_sessions(const std::vector<std::string>& dirs,
                           const IngestConfig& cfg, bool print_warnings) {
  LoadedCorpus corpus;
  for (const std::string& dir : dirs) {
    try {
      SyncResult loaded = load_session_dir(dir, cfg);
      corpus.warning_count += loaded.warnings.size();
      if (print_warnings) {
        for (const IngestWarning& w : loaded.warnings) {
          std::cerr << dir << ": warning: " << w.message << '\n';
        }
      }
      corpus.sessions.push_back(NamedSession{
          fs::path(dir).filename().string(), std::move(loaded.session)});
    } catch (const std::exception& err) {
      corpus.errors.push_back(dir + ": " + err.what());
    }
  }
  for (const std::string& e : corpus.errors) {
    std::cerr << "error: " << e << '\n';
  }
  return corpus;
}

void write_out(const fs::path& out_dir, const std::string& name,
               const std::string& content) {
  fs::create_directories(out_dir);
  atomic_write(out_dir / name, content);
  std::cout << "wrote " << (out_dir / name).string() << '\n';
}

SynthConfig load_profile(const std::string& path) {
  SynthConfig cfg;
  if (path.empty()) return cfg;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read profile " + path);
  nlohmann::json j;
  in >> j;
  cfg.duration_ms = j.value("duration_ms", cfg.duration_ms);
  cfg.team_label = j.value("team_label", cfg.team_label);
  if (j.contains("cohort")) {
    const auto c = cohort_from_name(j["cohort"].get<std::string>());
    if (!c) throw std::runtime_error("profile: unknown cohort");
    cfg.cohort = *c;
  }
  if (j.contains("team_side")) {
    cfg.team_side = j["team_side"].get<std::string>() == "red"
                        ? TeamSide::Red
                        : TeamSide::Blue;
  }
  if (j.contains("phases")) {
    const auto& phases = j["phases"];
    for (std::size_t p = 0; p < 4 && p < phases.size(); ++p) {
      auto& profile = cfg.phases[p];
      profile.team_utterances_per_minute =
          phases[p].value("utterances_per_minute",
                          profile.team_utterances_per_minute);
      if (phases[p].contains("da_distribution")) {
        const auto& dist = phases[p]["da_distribution"];
        for (std::size_t i = 0; i < 4 && i < dist.size(); ++i) {
          profile.da_distribution[i] = dist[i].get<double>();
        }
      }
    }
  }
  if (j.contains("initiation_weights")) {
    const auto& w = j["initiation_weights"];
    for (std::size_t i = 0; i < 5 && i < w.size(); ++i) {
      cfg.initiation_weights[i] = w[i].get<double>();
    }
  }
  if (j.contains("reply_weights")) {
    const auto& w = j["reply_weights"];
    for (std::size_t i = 0; i < 5 && i < w.size(); ++i) {
      cfg.reply_weights[i] = w[i].get<double>();
    }
  }
  cfg.reply_probability = j.value("reply_probability", cfg.reply_probability);
  if (j.contains("event_rates")) {
    const auto& e = j["event_rates"];
    cfg.event_rates.champion_kills_per_minute =
        e.value("champion_kills_per_minute",
                cfg.event_rates.champion_kills_per_minute);
    cfg.event_rates.elite_monster_kills_per_minute =
        e.value("elite_monster_kills_per_minute",
                cfg.event_rates.elite_monster_kills_per_minute);
    cfg.event_rates.building_destructions_per_minute =
        e.value("building_destructions_per_minute",
                cfg.event_rates.building_destructions_per_minute);
  }
  if (j.contains("pauses")) {
    for (const auto& p : j["pauses"]) {
      cfg.pauses.emplace_back(p.at(0).get<Millis>(), p.at(1).get<Millis>());
    }
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Communication-network analysis over game telemetry and "
               "dialogue-act transcripts"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--moi-window-s", g.moi_window_s,
                 "Event window length in seconds");
  app.add_option("--pairing-gap-s", g.pairing_gap_s,
                 "Max start-time gap for an adjacency pair, seconds");
  app.add_option("--min-involved", g.min_involved,
                 "Minimum players involved for a kill to open a window");
  app.add_flag("--count-victim", g.count_victim,
               "Count the victim toward kill involvement");
  app.add_option("--min-speakers", g.min_speakers,
                 "Distinct speakers a control window must contain");
  app.add_option("--normalization", g.normalization,
                 "Centralization denominator: pairs|utterances")
      ->check(CLI::IsMember({"pairs", "utterances"}));
  app.add_option("--phase-bounds", g.phase_bounds,
                 "Phase transition minutes, e.g. 5,14,25");
  app.add_option("--pause-policy", g.pause_policy,
                 "Utterances inside pauses: drop|clamp")
      ->check(CLI::IsMember({"drop", "clamp"}));
  app.add_flag("--strict", g.strict, "Fail on malformed rows");
  app.add_option("--pair", g.pairs,
                 "Explicit DA pair tag (repeatable), e.g. D:C or I->I");
  app.add_option("--top-k", g.top_k,
                 "Use the k most frequent DA pairs instead of the knee");
  app.add_option("--kneedle-sensitivity", g.kneedle_sensitivity,
                 "Kneedle sensitivity S");
  app.add_option("--timeline-probe-s", g.timeline_probe_s,
                 "Width of the centered probe window per progress point");
  app.add_flag("--count-moi-only", g.count_moi_only,
               "Count DA-pair frequencies over MoI windows only");
  app.add_option("--seed", g.seed, "Seed for synthetic generation");
  app.add_option("--out", g.out_dir, "Output directory");
  app.add_option("--format", g.format, "Output format: csv|json (json adds "
                                       "mirror files)")
      ->check(CLI::IsMember({"csv", "json"}));

  std::vector<std::string> inputs;
  std::string grouping = "team";
  std::string profile_path;
  int games = 1;

  auto* cmd_check = app.add_subcommand("ingest-check",
                                       "Parse sessions and report violations");
  cmd_check->fallthrough();
  cmd_check->add_option("sessions", inputs, "Session directories")->required();

  auto* cmd_analyze = app.add_subcommand(
      "analyze", "Per-window network metrics and descriptive summary");
  cmd_analyze->fallthrough();
  cmd_analyze->add_option("sessions", inputs, "Session directories")
      ->required();

  auto* cmd_moi = app.add_subcommand("compare-moi",
                                     "MoI vs non-MoI Wilcoxon comparison");
  cmd_moi->fallthrough();
  cmd_moi->add_option("sessions", inputs, "Session directories")->required();

  auto* cmd_teams = app.add_subcommand("compare-teams",
                                       "Cohort or team comparisons");
  cmd_teams->fallthrough();
  cmd_teams->add_option("sessions", inputs, "Session directories")->required();
  cmd_teams->add_option("--grouping", grouping, "cohort|team")
      ->check(CLI::IsMember({"cohort", "team"}));

  auto* cmd_timeline = app.add_subcommand(
      "timeline", "Progress curves with CI bands and per-phase rates");
  cmd_timeline->fallthrough();
  cmd_timeline->add_option("sessions", inputs, "Session directories")
      ->required();
  std::string timeline_grouping = "all";
  cmd_timeline->add_option("--grouping", timeline_grouping,
                           "all|cohort|team")
      ->check(CLI::IsMember({"all", "cohort", "team"}));

  auto* cmd_dapairs = app.add_subcommand("da-pairs",
                                         "DA-pair frequency table and knee");
  cmd_dapairs->fallthrough();
  cmd_dapairs->add_option("sessions", inputs, "Session directories")
      ->required();

  auto* cmd_survey = app.add_subcommand(
      "survey", "Kruskal-Wallis over a group,item,value Likert CSV");
  cmd_survey->fallthrough();
  cmd_survey->add_option("csv", inputs, "Survey CSV file")->required();

  auto* cmd_synth = app.add_subcommand("synth",
                                       "Generate synthetic session corpora");
  cmd_synth->fallthrough();
  cmd_synth->add_option("--games", games, "Number of sessions to generate");
  cmd_synth->add_option("--profile", profile_path,
                        "JSON generation profile");

  CLI11_PARSE(app, argc, argv);

  try {
    const AnalysisConfig cfg = to_config(g);
    const fs::path out_dir = g.out_dir;
    const bool json_mirror = g.format == "json";

    if (cmd_check->parsed()) {
      LoadedCorpus corpus = load_sessions(inputs, cfg.ingest, true);
      std::size_t violation_count = 0;
      for (const NamedSession& ns : corpus.sessions) {
        const auto violations = validate_session(ns.session);
        for (const Violation& v : violations) {
          std::cout << ns.name << ": " << violation_code_name(v.code) << ": "
                    << v.detail << '\n';
        }
        violation_count += violations.size();
        std::cout << ns.name << ": " << ns.session.utterances.size()
                  << " utterances, " << ns.session.events.size()
                  << " events, " << violations.size() << " violations\n";
      }
      return corpus.errors.empty() && violation_count == 0 ? 0 : 1;
    }

    if (cmd_synth->parsed()) {
      SynthConfig base = load_profile(profile_path);
      for (int i = 0; i < games; ++i) {
        SynthConfig one = base;
        one.seed = derive_seed(g.seed, static_cast<std::uint64_t>(i));
        SynthResult result = generate_session(one);
        char name[32];
        std::snprintf(name, sizeof name, "session_%03d", i + 1);
        export_session_dir(result.session, result.meta, out_dir / name);
        std::cout << name << ": " << result.session.utterances.size()
                  << " utterances, " << result.session.events.size()
                  << " events, " << result.truth.expected_moi_windows.size()
                  << " expected MoI windows\n";
      }
      return 0;
    }

    if (cmd_survey->parsed()) {
      std::ifstream in(inputs.front());
      if (!in) {
        std::cerr << "error: cannot read " << inputs.front() << '\n';
        return 1;
      }
      std::ostringstream buffer;
      buffer << in.rdbuf();
      const SurveyReport report = analyze_survey(buffer.str(), cfg.test_mode);
      for (const std::string& e : report.row_errors) {
        std::cerr << "warning: " << e << '\n';
      }
      write_out(out_dir, "survey.csv", survey_csv(report, cfg));
      return 0;
    }

    // Remaining subcommands operate on loaded session corpora.
    LoadedCorpus corpus = load_sessions(inputs, cfg.ingest, true);
    if (corpus.sessions.empty()) {
      std::cerr << "error: no readable sessions\n";
      return 1;
    }

    if (cmd_analyze->parsed()) {
      const AnalysisResult result = analyze_sessions(corpus.sessions, cfg);
      write_out(out_dir, "windows.csv", windows_csv(result, cfg));
      write_out(out_dir, "summary.csv", summary_csv(result, cfg));
      write_out(out_dir, "da_pairs.csv", da_pairs_csv(result.freq, cfg));
      if (json_mirror) {
        write_out(out_dir, "windows.json", windows_json(result, cfg));
      }
    } else if (cmd_moi->parsed()) {
      const AnalysisResult result = analyze_sessions(corpus.sessions, cfg);
      const auto rows = compare_moi(result, cfg);
      write_out(out_dir, "compare_moi.csv", compare_moi_csv(rows, cfg));
      if (json_mirror) {
        write_out(out_dir, "compare_moi.json", compare_moi_json(rows, cfg));
      }
    } else if (cmd_teams->parsed()) {
      const AnalysisResult result = analyze_sessions(corpus.sessions, cfg);
      if (grouping == "cohort") {
        const auto rows = compare_cohorts(result, cfg);
        write_out(out_dir, "compare_cohorts.csv", cohort_csv(rows, cfg));
      } else {
        const TeamComparisonReport report = compare_teams(result, cfg);
        write_out(out_dir, "compare_teams.csv", team_csv(report, cfg));
        if (json_mirror) {
          write_out(out_dir, "compare_teams.json", team_json(report, cfg));
        }
      }
    } else if (cmd_timeline->parsed()) {
      std::vector<DaPair> pairs;
      if (cfg.explicit_pairs) {
        pairs = *cfg.explicit_pairs;
      } else {
        const AnalysisResult result = analyze_sessions(corpus.sessions, cfg);
        pairs = result.selected_pairs;
      }
      const TimelineGrouping tg = timeline_grouping == "team"
                                      ? TimelineGrouping::Team
                                  : timeline_grouping == "cohort"
                                      ? TimelineGrouping::Cohort
                                      : TimelineGrouping::All;
      const TimelineReport report =
          timeline_report(corpus.sessions, pairs, tg, cfg);
      write_out(out_dir, "timeline_curves.csv", timeline_band_csv(report, cfg));
      write_out(out_dir, "timeline_phase_rates.csv",
                timeline_phase_csv(report, cfg));
    } else if (cmd_dapairs->parsed()) {
      const AnalysisResult result = analyze_sessions(corpus.sessions, cfg);
      write_out(out_dir, "da_pairs.csv", da_pairs_csv(result.freq, cfg));
    }

    // Per-file load failures were listed; the run fails only when nothing
    // could be analyzed (handled above).
    return 0;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
}
