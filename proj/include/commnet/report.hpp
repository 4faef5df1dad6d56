#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "commnet/da_patterns.hpp"
#include "commnet/ingest.hpp"
#include "commnet/moi.hpp"
#include "commnet/network.hpp"
#include "commnet/stats.hpp"
#include "commnet/timeline.hpp"

namespace commnet {

inline constexpr std::string_view kToolVersion = "0.1.0";

struct NamedSession {
  std::string name;
  Session session;
};

struct AnalysisConfig {
  MoiConfig moi;
  IngestConfig ingest;
  Normalization normalization = Normalization::Pairs;
  Millis pairing_gap_ms = kDefaultPairingGapMs;
  PhaseBounds phase_bounds;
  /// DA-pair tags to analyze: explicit list, or Kneedle-selected from the
  /// corpus frequency table (override_k pins k when the knee is ambiguous).
  std::optional<std::vector<DaPair>> explicit_pairs;
  std::optional<int> override_k;
  double kneedle_sensitivity = 1.0;
  bool count_moi_windows_only = false;  // frequency-count scope
  Millis timeline_probe_ms = 30000;
  int bin_pct = 5;
  double ci_level = 0.95;
  TestMode test_mode = TestMode::Auto;
};

/// One row per (session, window, MoI/control, tag).
struct WindowRow {
  std::string session;
  std::string team;
  Cohort cohort = Cohort::Amateur;
  WindowKind kind = WindowKind::MoI;
  int window_id = 0;  // MoI index within the session; shared by its control
  EventKind event_kind = EventKind::ChampionKill;
  GamePhase phase = GamePhase::EarlyLaning;
  Millis start_ms = 0;
  Millis end_ms = 0;
  std::optional<DaPair> tag;  // nullopt = all-pairs network
  NetworkMetrics m;
  int utterance_count = 0;
};

struct AnalysisSummary {
  std::size_t sessions = 0;
  std::size_t moi_count = 0;
  std::size_t paired_count = 0;
  std::array<std::size_t, 3> by_event_kind{};
  std::array<std::size_t, 4> by_phase{};
  std::map<std::string, std::size_t> by_team;
  Descriptive mois_per_session;
  Descriptive utterances_per_session;
};

struct AnalysisResult {
  std::vector<WindowRow> rows;
  DaPairFrequencyTable freq;
  std::vector<DaPair> selected_pairs;
  AnalysisSummary summary;
};

AnalysisResult analyze_sessions(std::span<const NamedSession> sessions,
                                const AnalysisConfig& cfg);

/// MoI vs control, Wilcoxon per (tag, metric) over windows where both sides
/// produced a non-degenerate network.
struct MoiComparisonRow {
  std::string tag;
  std::string metric;  // "rho", "c_od", "c_id"
  Descriptive moi;
  Descriptive control;
  TestResult test;
};

std::vector<MoiComparisonRow> compare_moi(const AnalysisResult& analysis,
                                          const AnalysisConfig& cfg);

struct CohortComparisonRow {
  std::string tag;
  std::string metric;
  Descriptive professional;
  Descriptive amateur;
  TestResult test;  // Mann-Whitney U
};

/// MoI-window metrics, professional vs amateur.
std::vector<CohortComparisonRow> compare_cohorts(const AnalysisResult& analysis,
                                                 const AnalysisConfig& cfg);

struct TeamComparisonRow {
  std::string tag;
  std::string metric;
  std::vector<Descriptive> per_team;  // aligned with report.teams
  TestResult kruskal;
  std::vector<PairwiseResult> post_hoc;
};

struct TeamComparisonReport {
  std::vector<std::string> teams;
  std::vector<TeamComparisonRow> rows;
  /// Per metric, each team's average of per-tag means (the "Average" rows).
  std::map<std::string, std::vector<double>> averages;
};

TeamComparisonReport compare_teams(const AnalysisResult& analysis,
                                   const AnalysisConfig& cfg);

enum class TimelineGrouping { All, Cohort, Team };

struct TimelineBandRow {
  std::string group;
  std::string tag;
  int bin_start_pct = 0;
  std::optional<double> mean, lo, hi;
  std::size_t n = 0;
};

struct PhaseRateRow {
  std::string group;
  std::string session;
  std::string tag;
  GamePhase phase = GamePhase::EarlyLaning;
  std::optional<double> rate;
};

struct TimelineReport {
  std::vector<TimelineBandRow> band_rows;
  std::vector<PhaseRateRow> phase_rows;
};

/// Throws std::invalid_argument when a group has fewer than two sessions
/// (no band can be formed).
TimelineReport timeline_report(std::span<const NamedSession> sessions,
                               std::span<const DaPair> pairs,
                               TimelineGrouping grouping,
                               const AnalysisConfig& cfg);

struct SurveyRow {
  std::string item;
  std::vector<Descriptive> per_group;  // aligned with report.groups
  TestResult kruskal;
  std::vector<PairwiseResult> post_hoc;  // empty when < 3 groups
};

struct SurveyReport {
  std::vector<std::string> groups;
  std::vector<SurveyRow> rows;
  std::vector<std::string> row_errors;
};

/// Long-format CSV `group,item,value` with integer Likert values 1..7;
/// malformed rows are collected as errors, not failures.
SurveyReport analyze_survey(std::string_view csv_text, TestMode mode);

// Emission helpers. Every file starts with `# key=value` config-echo lines.
std::string significance_stars(double p);
std::string config_echo(const AnalysisConfig& cfg);
std::string windows_csv(const AnalysisResult& r, const AnalysisConfig& cfg);
std::string windows_json(const AnalysisResult& r, const AnalysisConfig& cfg);
std::string summary_csv(const AnalysisResult& r, const AnalysisConfig& cfg);
std::string da_pairs_csv(const DaPairFrequencyTable& freq,
                         const AnalysisConfig& cfg);
std::string compare_moi_csv(std::span<const MoiComparisonRow> rows,
                            const AnalysisConfig& cfg);
std::string compare_moi_json(std::span<const MoiComparisonRow> rows,
                             const AnalysisConfig& cfg);
std::string cohort_csv(std::span<const CohortComparisonRow> rows,
                       const AnalysisConfig& cfg);
std::string team_csv(const TeamComparisonReport& report,
                     const AnalysisConfig& cfg);
std::string team_json(const TeamComparisonReport& report,
                      const AnalysisConfig& cfg);
std::string timeline_band_csv(const TimelineReport& report,
                              const AnalysisConfig& cfg);
std::string timeline_phase_csv(const TimelineReport& report,
                               const AnalysisConfig& cfg);
std::string survey_csv(const SurveyReport& report, const AnalysisConfig& cfg);

/// Writes via a temp file and rename so readers never observe partial output.
void atomic_write(const std::filesystem::path& path, std::string_view content);

}  // namespace commnet
