#include "commnet/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace commnet {

namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 3> kMetricNames = {"rho", "c_od",
                                                          "c_id"};

double metric_value(const NetworkMetrics& m, std::size_t metric) {
  switch (metric) {
    case 0: return m.rho;
    case 1: return m.c_od;
    default: return m.c_id;
  }
}

std::string tag_label(const std::optional<DaPair>& tag) {
  return tag ? da_pair_label(*tag) : std::string("all");
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

std::string fmt_opt(const std::optional<double>& v) {
  return v ? fmt(*v) : std::string();
}

std::string_view method_name(PValueMethod m) {
  switch (m) {
    case PValueMethod::Exact: return "exact";
    case PValueMethod::NormalApprox: return "normal_approx";
    case PValueMethod::ChiSquareApprox: return "chi_square_approx";
  }
  return "unknown";
}

/// Tags actually analyzed: the all-pairs network plus each selected tag.
std::vector<std::optional<DaPair>> analysis_tags(
    std::span<const DaPair> selected) {
  std::vector<std::optional<DaPair>> tags;
  tags.push_back(std::nullopt);
  for (DaPair p : selected) tags.push_back(p);
  return tags;
}

}  // namespace

AnalysisResult analyze_sessions(std::span<const NamedSession> sessions,
                                const AnalysisConfig& cfg) {
  AnalysisResult result;
  result.summary.sessions = sessions.size();

  struct SessionWindows {
    const NamedSession* named;
    std::vector<MoiWindow> mois;
    std::vector<std::optional<PairedWindows>> controls;
  };
  std::vector<SessionWindows> prepared;
  std::vector<double> mois_per_session;
  std::vector<double> utts_per_session;

  for (const NamedSession& ns : sessions) {
    SessionWindows sw{&ns, detect_mois(ns.session, cfg.moi), {}};
    for (const MoiWindow& moi : sw.mois) {
      sw.controls.push_back(
          pair_non_moi(ns.session, moi, sw.mois, cfg.moi));
    }
    // Frequency counting feeds tag selection; scope is MoI windows plus
    // their controls unless restricted to MoI-only.
    for (const MoiWindow& moi : sw.mois) {
      const auto pairs = extract_adjacency_pairs(moi.utterances,
                                                 cfg.pairing_gap_ms);
      result.freq.merge(count_da_pairs(pairs));
    }
    if (!cfg.count_moi_windows_only) {
      for (const auto& paired : sw.controls) {
        if (!paired) continue;
        const auto pairs = extract_adjacency_pairs(paired->control_utterances,
                                                   cfg.pairing_gap_ms);
        result.freq.merge(count_da_pairs(pairs));
      }
    }
    mois_per_session.push_back(static_cast<double>(sw.mois.size()));
    utts_per_session.push_back(
        static_cast<double>(ns.session.utterances.size()));
    prepared.push_back(std::move(sw));
  }

  if (cfg.explicit_pairs) {
    result.selected_pairs = *cfg.explicit_pairs;
  } else {
    result.selected_pairs = select_frequent_pairs(result.freq, cfg.override_k,
                                                  cfg.kneedle_sensitivity);
  }
  const auto tags = analysis_tags(result.selected_pairs);

  for (const SessionWindows& sw : prepared) {
    const Session& session = sw.named->session;
    for (std::size_t w = 0; w < sw.mois.size(); ++w) {
      const MoiWindow& moi = sw.mois[w];
      result.summary.moi_count += 1;
      result.summary.by_event_kind[static_cast<int>(moi.source_event.kind)] +=
          1;
      const GamePhase phase =
          phase_of(moi.source_event.time_ms, cfg.phase_bounds);
      result.summary.by_phase[static_cast<int>(phase)] += 1;
      result.summary.by_team[session.team_label] += 1;
      if (sw.controls[w]) result.summary.paired_count += 1;

      auto emit_rows = [&](const Window& win,
                           std::span<const Utterance> utts) {
        const auto pairs = extract_adjacency_pairs(utts, cfg.pairing_gap_ms);
        const auto count = static_cast<int>(utts.size());
        for (const auto& tag : tags) {
          const CommNetwork net = build_network(pairs, tag);
          WindowRow row;
          row.session = sw.named->name;
          row.team = session.team_label;
          row.cohort = session.cohort;
          row.kind = win.kind;
          row.window_id = static_cast<int>(w);
          row.event_kind = moi.source_event.kind;
          row.phase = phase;
          row.start_ms = win.start_ms;
          row.end_ms = win.end_ms;
          row.tag = tag;
          row.m = metrics(net, cfg.normalization,
                          cfg.normalization == Normalization::Utterances
                              ? std::optional<int>(count)
                              : std::nullopt);
          row.utterance_count = count;
          result.rows.push_back(std::move(row));
        }
      };
      emit_rows(moi.window, moi.utterances);
      if (sw.controls[w]) {
        emit_rows(sw.controls[w]->control, sw.controls[w]->control_utterances);
      }
    }
  }

  result.summary.mois_per_session = describe(mois_per_session);
  result.summary.utterances_per_session = describe(utts_per_session);
  return result;
}

std::vector<MoiComparisonRow> compare_moi(const AnalysisResult& analysis,
                                          const AnalysisConfig& cfg) {
  // (session, window_id, tag) -> row indices for MoI and control
  std::map<std::tuple<std::string, int, std::string>,
           std::pair<const WindowRow*, const WindowRow*>>
      by_key;
  for (const WindowRow& row : analysis.rows) {
    auto& slot = by_key[{row.session, row.window_id, tag_label(row.tag)}];
    (row.kind == WindowKind::MoI ? slot.first : slot.second) = &row;
  }

  const auto tags = analysis_tags(analysis.selected_pairs);
  std::vector<MoiComparisonRow> out;
  for (const auto& tag : tags) {
    const std::string label = tag_label(tag);
    for (std::size_t metric = 0; metric < kMetricNames.size(); ++metric) {
      std::vector<std::pair<double, double>> paired;
      std::vector<double> moi_values, control_values;
      for (const auto& [key, rows] : by_key) {
        if (std::get<2>(key) != label) continue;
        const auto* moi_row = rows.first;
        const auto* control_row = rows.second;
        if (!moi_row || !control_row) continue;
        if (moi_row->m.degenerate || control_row->m.degenerate) continue;
        const double a = metric_value(moi_row->m, metric);
        const double b = metric_value(control_row->m, metric);
        paired.emplace_back(a, b);
        moi_values.push_back(a);
        control_values.push_back(b);
      }
      MoiComparisonRow row;
      row.tag = label;
      row.metric = std::string(kMetricNames[metric]);
      row.moi = describe(moi_values);
      row.control = describe(control_values);
      if (paired.empty()) {
        row.test.degenerate = true;
      } else {
        row.test = wilcoxon_signed_rank(paired, cfg.test_mode);
        // a single usable pair cannot support a paired comparison
        if (paired.size() < 2) row.test.degenerate = true;
      }
      out.push_back(std::move(row));
    }
  }
  return out;
}

namespace {

/// Non-degenerate MoI-window metric values grouped by a session attribute.
template <typename KeyFn>
std::map<std::string, std::vector<double>> moi_groups(
    const AnalysisResult& analysis, const std::string& tag_name,
    std::size_t metric, KeyFn key_fn) {
  std::map<std::string, std::vector<double>> groups;
  for (const WindowRow& row : analysis.rows) {
    if (row.kind != WindowKind::MoI) continue;
    if (tag_label(row.tag) != tag_name) continue;
    if (row.m.degenerate) continue;
    groups[key_fn(row)].push_back(metric_value(row.m, metric));
  }
  return groups;
}

}  // namespace

std::vector<CohortComparisonRow> compare_cohorts(
    const AnalysisResult& analysis, const AnalysisConfig& cfg) {
  const auto tags = analysis_tags(analysis.selected_pairs);
  std::vector<CohortComparisonRow> out;
  for (const auto& tag : tags) {
    const std::string label = tag_label(tag);
    for (std::size_t metric = 0; metric < kMetricNames.size(); ++metric) {
      auto groups = moi_groups(analysis, label, metric,
                               [](const WindowRow& row) {
                                 return std::string(cohort_name(row.cohort));
                               });
      const auto& pro = groups["professional"];
      const auto& amateur = groups["amateur"];
      if (pro.empty() || amateur.empty()) {
        throw std::invalid_argument(
            "compare_cohorts: both cohorts must contribute windows");
      }
      CohortComparisonRow row;
      row.tag = label;
      row.metric = std::string(kMetricNames[metric]);
      row.professional = describe(pro);
      row.amateur = describe(amateur);
      row.test = mann_whitney_u(pro, amateur, cfg.test_mode);
      out.push_back(std::move(row));
    }
  }
  return out;
}

TeamComparisonReport compare_teams(const AnalysisResult& analysis,
                                   const AnalysisConfig& cfg) {
  std::set<std::string> team_set;
  for (const WindowRow& row : analysis.rows) team_set.insert(row.team);
  TeamComparisonReport report;
  report.teams.assign(team_set.begin(), team_set.end());
  if (report.teams.size() < 2) {
    throw std::invalid_argument("compare_teams: need at least 2 teams");
  }

  const auto tags = analysis_tags(analysis.selected_pairs);
  for (const auto& tag : tags) {
    const std::string label = tag_label(tag);
    for (std::size_t metric = 0; metric < kMetricNames.size(); ++metric) {
      auto groups_map = moi_groups(
          analysis, label, metric,
          [](const WindowRow& row) { return row.team; });
      std::vector<std::vector<double>> groups;
      TeamComparisonRow row;
      row.tag = label;
      row.metric = std::string(kMetricNames[metric]);
      for (const std::string& team : report.teams) {
        const auto it = groups_map.find(team);
        if (it == groups_map.end() || it->second.empty()) {
          throw std::invalid_argument("compare_teams: team '" + team +
                                      "' has no usable windows for tag " +
                                      label);
        }
        groups.push_back(it->second);
        row.per_team.push_back(describe(it->second));
      }
      row.kruskal = kruskal_wallis(groups);
      if (report.teams.size() >= 3) {
        row.post_hoc = post_hoc_pairwise(groups, cfg.test_mode);
      }
      report.rows.push_back(std::move(row));
    }
  }

  for (std::size_t metric = 0; metric < kMetricNames.size(); ++metric) {
    std::vector<double> averages(report.teams.size(), 0.0);
    std::size_t tag_rows = 0;
    for (const TeamComparisonRow& row : report.rows) {
      if (row.metric != kMetricNames[metric]) continue;
      if (row.tag == "all") continue;  // averages cover the selected tags
      ++tag_rows;
      for (std::size_t t = 0; t < averages.size(); ++t) {
        averages[t] += row.per_team[t].mean.value_or(0.0);
      }
    }
    if (tag_rows > 0) {
      for (double& a : averages) a /= static_cast<double>(tag_rows);
      report.averages[std::string(kMetricNames[metric])] = averages;
    }
  }
  return report;
}

TimelineReport timeline_report(std::span<const NamedSession> sessions,
                               std::span<const DaPair> pairs,
                               TimelineGrouping grouping,
                               const AnalysisConfig& cfg) {
  auto group_of = [&](const NamedSession& ns) -> std::string {
    switch (grouping) {
      case TimelineGrouping::All: return "all";
      case TimelineGrouping::Cohort:
        return std::string(cohort_name(ns.session.cohort));
      case TimelineGrouping::Team: return ns.session.team_label;
    }
    return "all";
  };

  std::map<std::string, std::vector<const NamedSession*>> groups;
  for (const NamedSession& ns : sessions) groups[group_of(ns)].push_back(&ns);
  for (const auto& [group, members] : groups) {
    if (members.size() < 2) {
      throw std::invalid_argument("timeline group '" + group +
                                  "' has fewer than 2 sessions; no band "
                                  "can be formed");
    }
  }

  std::vector<std::optional<DaPair>> tags;
  tags.push_back(std::nullopt);
  for (DaPair p : pairs) tags.push_back(p);

  TimelineReport report;
  for (const auto& [group, members] : groups) {
    // Whole-session pair lists are shared across tags.
    std::vector<std::vector<AdjacencyPair>> session_pairs;
    for (const NamedSession* ns : members) {
      session_pairs.push_back(extract_adjacency_pairs(
          ns->session.utterances, cfg.pairing_gap_ms));
    }
    for (const auto& tag : tags) {
      std::vector<BinnedCurve> curves;
      for (std::size_t i = 0; i < members.size(); ++i) {
        curves.push_back(bin_curve(
            progress_curve(members[i]->session, tag, session_pairs[i],
                           cfg.timeline_probe_ms),
            cfg.bin_pct));
      }
      const CiBand band = aggregate_band(curves, cfg.ci_level);
      for (std::size_t b = 0; b < band.mean.size(); ++b) {
        report.band_rows.push_back(TimelineBandRow{
            group, tag_label(tag), static_cast<int>(b) * cfg.bin_pct,
            band.mean[b], band.lower[b], band.upper[b], band.n[b]});
      }
      for (std::size_t i = 0; i < members.size(); ++i) {
        const auto rates = phase_rates(members[i]->session, tag,
                                       session_pairs[i], cfg.phase_bounds);
        for (int phase = 0; phase < 4; ++phase) {
          report.phase_rows.push_back(PhaseRateRow{
              group, members[i]->name, tag_label(tag),
              static_cast<GamePhase>(phase), rates[phase]});
        }
      }
    }
  }
  return report;
}

SurveyReport analyze_survey(std::string_view csv_text, TestMode mode) {
  SurveyReport report;
  // item -> group -> values
  std::map<std::string, std::map<std::string, std::vector<double>>> data;
  std::set<std::string> group_set;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header_skipped = false;
  while (pos <= csv_text.size()) {
    const auto nl = csv_text.find('\n', pos);
    std::string_view line = nl == std::string_view::npos
                                ? csv_text.substr(pos)
                                : csv_text.substr(pos, nl - pos);
    pos = nl == std::string_view::npos ? csv_text.size() + 1 : nl + 1;
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
      line.remove_suffix(1);
    }
    if (line.empty() || line.front() == '#') continue;
    if (!header_skipped) {
      header_skipped = true;
      if (line == "group,item,value") continue;
      // fall through: headerless input is accepted
    }
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string_view::npos
                        ? std::string_view::npos
                        : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos) {
      report.row_errors.push_back("line " + std::to_string(line_no) +
                                  ": expected group,item,value");
      continue;
    }
    const std::string group(line.substr(0, c1));
    const std::string item(line.substr(c1 + 1, c2 - c1 - 1));
    const std::string_view value_text = line.substr(c2 + 1);
    int value = 0;
    const auto res = std::from_chars(value_text.data(),
                                     value_text.data() + value_text.size(),
                                     value);
    if (res.ec != std::errc{} ||
        res.ptr != value_text.data() + value_text.size() || value < 1 ||
        value > 7) {
      report.row_errors.push_back("line " + std::to_string(line_no) +
                                  ": Likert value must be an integer in 1..7");
      continue;
    }
    data[item][group].push_back(static_cast<double>(value));
    group_set.insert(group);
  }

  report.groups.assign(group_set.begin(), group_set.end());
  for (const auto& [item, by_group] : data) {
    SurveyRow row;
    row.item = item;
    std::vector<std::vector<double>> groups;
    for (const std::string& g : report.groups) {
      const auto it = by_group.find(g);
      row.per_group.push_back(
          it == by_group.end() ? Descriptive{} : describe(it->second));
      if (it != by_group.end()) groups.push_back(it->second);
    }
    if (groups.size() >= 2) {
      row.kruskal = kruskal_wallis(groups);
      if (groups.size() >= 3) {
        row.post_hoc = post_hoc_pairwise(groups, mode);
      }
    } else {
      row.kruskal.degenerate = true;
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string significance_stars(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

std::string config_echo(const AnalysisConfig& cfg) {
  std::ostringstream os;
  os << "# tool_version=" << kToolVersion << '\n';
  os << "# moi_window_ms=" << cfg.moi.window_ms << '\n';
  os << "# min_kill_involvement=" << cfg.moi.min_kill_involvement << '\n';
  os << "# involvement_counting="
     << (cfg.moi.involvement == InvolvementCounting::KillerPlusAssisters
             ? "killer_plus_assisters"
             : "killer_assisters_plus_victim")
     << '\n';
  os << "# min_control_speakers=" << cfg.moi.min_speakers << '\n';
  os << "# pairing_gap_ms=" << cfg.pairing_gap_ms << '\n';
  os << "# normalization="
     << (cfg.normalization == Normalization::Pairs ? "pairs" : "utterances")
     << '\n';
  os << "# phase_bounds_ms=" << cfg.phase_bounds.early_end_ms << ','
     << cfg.phase_bounds.laning_end_ms << ',' << cfg.phase_bounds.teamfight_end_ms
     << '\n';
  os << "# pause_policy="
     << (cfg.ingest.pause_policy == PausePolicy::DropUtterancesDuringPause
             ? "drop"
             : "clamp")
     << '\n';
  os << "# pair_selection=";
  if (cfg.explicit_pairs) {
    for (std::size_t i = 0; i < cfg.explicit_pairs->size(); ++i) {
      if (i > 0) os << ';';
      os << da_pair_label((*cfg.explicit_pairs)[i]);
    }
  } else if (cfg.override_k) {
    os << "top" << *cfg.override_k;
  } else {
    os << "kneedle(S=" << cfg.kneedle_sensitivity << ")";
  }
  os << '\n';
  os << "# wilcoxon_w_convention=min(T+,T-)\n";
  return os.str();
}

std::string windows_csv(const AnalysisResult& r, const AnalysisConfig& cfg) {
  std::ostringstream os;
  os << config_echo(cfg);
  os << "session,team,cohort,window_kind,window_id,event_kind,phase,start_ms,"
        "end_ms,tag,rho,c_od,c_id,u,utterances,degenerate\n";
  for (const WindowRow& row : r.rows) {
    os << row.session << ',' << row.team << ',' << cohort_name(row.cohort)
       << ',' << (row.kind == WindowKind::MoI ? "moi" : "control") << ','
       << row.window_id << ',' << event_kind_name(row.event_kind) << ','
       << phase_name(row.phase) << ',' << row.start_ms << ',' << row.end_ms
       << ',' << tag_label(row.tag) << ',' << fmt(row.m.rho) << ','
       << fmt(row.m.c_od) << ',' << fmt(row.m.c_id) << ',' << row.m.pair_count
       << ',' << row.utterance_count << ',' << (row.m.degenerate ? 1 : 0)
       << '\n';
  }
  return os.str();
}

namespace {

json config_json(const AnalysisConfig& cfg) {
  json j;
  j["tool_version"] = std::string(kToolVersion);
  j["moi_window_ms"] = cfg.moi.window_ms;
  j["min_kill_involvement"] = cfg.moi.min_kill_involvement;
  j["involvement_counting"] =
      cfg.moi.involvement == InvolvementCounting::KillerPlusAssisters
          ? "killer_plus_assisters"
          : "killer_assisters_plus_victim";
  j["min_control_speakers"] = cfg.moi.min_speakers;
  j["pairing_gap_ms"] = cfg.pairing_gap_ms;
  j["normalization"] =
      cfg.normalization == Normalization::Pairs ? "pairs" : "utterances";
  j["phase_bounds_ms"] = {cfg.phase_bounds.early_end_ms,
                          cfg.phase_bounds.laning_end_ms,
                          cfg.phase_bounds.teamfight_end_ms};
  j["wilcoxon_w_convention"] = "min(T+,T-)";
  return j;
}

json test_json(const TestResult& t) {
  json j;
  j["statistic"] = t.statistic;
  j["p"] = t.p_value;
  j["method"] = std::string(method_name(t.method));
  j["degenerate"] = t.degenerate;
  j["n"] = t.n;
  return j;
}

}  // namespace

std::string windows_json(const AnalysisResult& r, const AnalysisConfig& cfg) {
  json j;
  j["config"] = config_json(cfg);
  json rows = json::array();
  for (const WindowRow& row : r.rows) {
    json o;
    o["session"] = row.session;
    o["team"] = row.team;
    o["cohort"] = std::string(cohort_name(row.cohort));
    o["window_kind"] = row.kind == WindowKind::MoI ? "moi" : "control";
    o["window_id"] = row.window_id;
    o["event_kind"] = std::string(event_kind_name(row.event_kind));
    o["phase"] = std::string(phase_name(row.phase));
    o["start_ms"] = row.start_ms;
    o["end_ms"] = row.end_ms;
    o["tag"] = tag_label(row.tag);
    o["rho"] = row.m.rho;
    o["c_od"] = row.m.c_od;
    o["c_id"] = row.m.c_id;
    o["u"] = row.m.pair_count;
    o["utterances"] = row.utterance_count;
    o["degenerate"] = row.m.degenerate;
    rows.push_back(std::move(o));
  }
  j["rows"] = std::move(rows);
  json selected = json::array();
  for (DaPair p : r.selected_pairs) selected.push_back(da_pair_label(p));
  j["selected_pairs"] = std::move(selected);
  return j.dump(2) + "\n";
}

std::string summary_csv(const AnalysisResult& r, const AnalysisConfig& cfg) {
  std::ostringstream os;
  os << config_echo(cfg);
  os << "key,value\n";
  const AnalysisSummary& s = r.summary;
  os << "sessions," << s.sessions << '\n';
  os << "moi_count," << s.moi_count << '\n';
  os << "paired_count," << s.paired_count << '\n';
  for (int k = 0; k < 3; ++k) {
    os << "moi_" << event_kind_name(static_cast<EventKind>(k)) << ','
       << s.by_event_kind[k] << '\n';
  }
  for (int p = 0; p < 4; ++p) {
    os << "moi_phase_" << phase_name(static_cast<GamePhase>(p)) << ','
       << s.by_phase[p] << '\n';
  }
  for (const auto& [team, count] : s.by_team) {
    os << "moi_team_" << team << ',' << count << '\n';
  }
  os << "mois_per_session_mean," << fmt_opt(s.mois_per_session.mean) << '\n';
  os << "mois_per_session_sd," << fmt_opt(s.mois_per_session.sd) << '\n';
  os << "utterances_per_session_mean,"
     << fmt_opt(s.utterances_per_session.mean) << '\n';
  os << "utterances_per_session_sd," << fmt_opt(s.utterances_per_session.sd)
     << '\n';
  return os.str();
}

std::string da_pairs_csv(const DaPairFrequencyTable& freq,
                         const AnalysisConfig& cfg) {
  std::ostringstream os;
  os << config_echo(cfg);
  os << "rank,pair,count\n";
  const auto rows = freq.sorted_desc();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    os << (i + 1) << ',' << da_pair_label(rows[i].first) << ','
       << rows[i].second << '\n';
  }
  return os.str();
}

std::string compare_moi_csv(std::span<const MoiComparisonRow> rows,
                            const AnalysisConfig& cfg) {
  std::ostringstream os;
  os << config_echo(cfg);
  os << "pair,metric,moi_mean,moi_sd,nonmoi_mean,nonmoi_sd,W,p,stars,method,"
        "n,degenerate\n";
  for (const MoiComparisonRow& row : rows) {
    os << row.tag << ',' << row.metric << ',' << fmt_opt(row.moi.mean) << ','
       << fmt_opt(row.moi.sd) << ',' << fmt_opt(row.control.mean) << ','
       << fmt_opt(row.control.sd) << ',' << fmt(row.test.statistic) << ','
       << fmt(row.test.p_value) << ',' << significance_stars(row.test.p_value)
       << ',' << method_name(row.test.method) << ',' << row.moi.count << ','
       << (row.test.degenerate ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string compare_moi_json(std::span<const MoiComparisonRow> rows,
                             const AnalysisConfig& cfg) {
  json j;
  j["config"] = config_json(cfg);
  json out = json::array();
  for (const MoiComparisonRow& row : rows) {
    json o;
    o["pair"] = row.tag;
    o["metric"] = row.metric;
    o["moi_mean"] = row.moi.mean.value_or(0.0);
    o["moi_sd"] = row.moi.sd.value_or(0.0);
    o["nonmoi_mean"] = row.control.mean.value_or(0.0);
    o["nonmoi_sd"] = row.control.sd.value_or(0.0);
    o["test"] = test_json(row.test);
    o["stars"] = significance_stars(row.test.p_value);
    o["n"] = row.moi.count;
    out.push_back(std::move(o));
  }
  j["rows"] = std::move(out);
  return j.dump(2) + "\n";
}

std::string cohort_csv(std::span<const CohortComparisonRow> rows,
                       const AnalysisConfig& cfg) {
  std::ostringstream os;
  os << config_echo(cfg);
  os << "pair,metric,pro_mean,pro_sd,pro_n,amateur_mean,amateur_sd,amateur_n,"
        "U,p,stars,method\n";
  for (const CohortComparisonRow& row : rows) {
    os << row.tag << ',' << row.metric << ','
       << fmt_opt(row.professional.mean) << ',' << fmt_opt(row.professional.sd)
       << ',' << row.professional.count << ',' << fmt_opt(row.amateur.mean)
       << ',' << fmt_opt(row.amateur.sd) << ',' << row.amateur.count << ','
       << fmt(row.test.statistic) << ',' << fmt(row.test.p_value) << ','
       << significance_stars(row.test.p_value) << ','
       << method_name(row.test.method) << '\n';
  }
  return os.str();
}

std::string team_csv(const TeamComparisonReport& report,
                     const AnalysisConfig& cfg) {
  std::ostringstream os;
  os << config_echo(cfg);
  os << "metric,pair";
  for (const std::string& team : report.teams) {
    os << ',' << team << "_mean," << team << "_sd";
  }
  os << ",H,p,stars\n";
  for (const TeamComparisonRow& row : report.rows) {
    os << row.metric << ',' << row.tag;
    for (const Descriptive& d : row.per_team) {
      os << ',' << fmt_opt(d.mean) << ',' << fmt_opt(d.sd);
    }
    os << ',' << fmt(row.kruskal.statistic) << ',' << fmt(row.kruskal.p_value)
       << ',' << significance_stars(row.kruskal.p_value) << '\n';
  }
  for (const auto& [metric, averages] : report.averages) {
    os << metric << ",average";
    for (double a : averages) os << ',' << fmt(a) << ',';  // sd left empty
    os << ",,,\n";  // no H/p/stars on average rows
  }
  return os.str();
}

std::string team_json(const TeamComparisonReport& report,
                      const AnalysisConfig& cfg) {
  json j;
  j["config"] = config_json(cfg);
  j["teams"] = report.teams;
  json rows = json::array();
  for (const TeamComparisonRow& row : report.rows) {
    json o;
    o["metric"] = row.metric;
    o["pair"] = row.tag;
    json per_team = json::array();
    for (std::size_t t = 0; t < report.teams.size(); ++t) {
      json g;
      g["team"] = report.teams[t];
      g["mean"] = row.per_team[t].mean.value_or(0.0);
      g["sd"] = row.per_team[t].sd.value_or(0.0);
      g["n"] = row.per_team[t].count;
      per_team.push_back(std::move(g));
    }
    o["groups"] = std::move(per_team);
    o["kruskal"] = test_json(row.kruskal);
    o["stars"] = significance_stars(row.kruskal.p_value);
    json post = json::array();
    for (const PairwiseResult& pr : row.post_hoc) {
      json p;
      p["a"] = report.teams[pr.group_a];
      p["b"] = report.teams[pr.group_b];
      p["test"] = test_json(pr.result);
      post.push_back(std::move(p));
    }
    o["post_hoc"] = std::move(post);
    rows.push_back(std::move(o));
  }
  j["rows"] = std::move(rows);
  json averages = json::object();
  for (const auto& [metric, values] : report.averages) {
    averages[metric] = values;
  }
  j["averages"] = std::move(averages);
  return j.dump(2) + "\n";
}

std::string timeline_band_csv(const TimelineReport& report,
                              const AnalysisConfig& cfg) {
  std::ostringstream os;
  os << config_echo(cfg);
  os << "group,pair,bin_start_pct,mean,lo,hi,n\n";
  for (const TimelineBandRow& row : report.band_rows) {
    os << row.group << ',' << row.tag << ',' << row.bin_start_pct << ','
       << fmt_opt(row.mean) << ',' << fmt_opt(row.lo) << ','
       << fmt_opt(row.hi) << ',' << row.n << '\n';
  }
  return os.str();
}

std::string timeline_phase_csv(const TimelineReport& report,
                               const AnalysisConfig& cfg) {
  std::ostringstream os;
  os << config_echo(cfg);
  os << "group,session,pair,phase,pairs_per_minute\n";
  for (const PhaseRateRow& row : report.phase_rows) {
    os << row.group << ',' << row.session << ',' << row.tag << ','
       << phase_name(row.phase) << ',' << fmt_opt(row.rate) << '\n';
  }
  return os.str();
}

std::string survey_csv(const SurveyReport& report, const AnalysisConfig& cfg) {
  std::ostringstream os;
  os << config_echo(cfg);
  os << "item";
  for (const std::string& g : report.groups) {
    os << ',' << g << "_mean," << g << "_sd," << g << "_n";
  }
  os << ",H,p,stars\n";
  for (const SurveyRow& row : report.rows) {
    os << row.item;
    for (const Descriptive& d : row.per_group) {
      os << ',' << fmt_opt(d.mean) << ',' << fmt_opt(d.sd) << ',' << d.count;
    }
    os << ',' << fmt(row.kruskal.statistic) << ',' << fmt(row.kruskal.p_value)
       << ',' << significance_stars(row.kruskal.p_value) << '\n';
  }
  return os.str();
}

void atomic_write(const std::filesystem::path& path,
                  std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot write " + tmp.string());
    }
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace commnet
