#include "commnet/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace commnet {

namespace {

constexpr std::size_t kWilcoxonExactLimit = 20;   // Auto switches above this
constexpr std::size_t kWilcoxonExactHardLimit = 62;
constexpr std::size_t kMannWhitneyExactLimit = 400;  // on n_a * n_b

double tie_term(std::span<const double> values) {
  std::map<double, std::size_t> tally;
  for (double v : values) ++tally[v];
  double sum = 0.0;
  for (const auto& [value, t] : tally) {
    sum += static_cast<double>(t) * t * t - static_cast<double>(t);
  }
  return sum;
}

double two_sided_normal_p(double z) {
  return std::min(1.0, 2.0 * normal_cdf(z));
}

}  // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double chi_squared_sf(double x, double df) {
  const boost::math::chi_squared dist(df);
  return boost::math::cdf(boost::math::complement(dist, x));
}

double student_t_critical(double level, double df) {
  const boost::math::students_t dist(df);
  return boost::math::quantile(dist, 0.5 + level / 2.0);
}

std::vector<double> midranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&values](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = static_cast<double>(i + j) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

TestResult wilcoxon_signed_rank(
    std::span<const std::pair<double, double>> paired, TestMode mode) {
  if (paired.empty()) {
    throw std::invalid_argument("wilcoxon_signed_rank: no pairs");
  }
  std::vector<double> diffs;
  diffs.reserve(paired.size());
  for (const auto& [a, b] : paired) {
    const double d = a - b;
    if (d != 0.0) diffs.push_back(d);
  }
  const std::size_t m = diffs.size();

  TestResult res;
  res.n = {paired.size(), m};
  if (m == 0) {
    res.degenerate = true;
    res.method = PValueMethod::Exact;
    return res;
  }

  std::vector<double> abs_diffs(m);
  for (std::size_t i = 0; i < m; ++i) abs_diffs[i] = std::fabs(diffs[i]);
  const auto ranks = midranks(abs_diffs);

  double t_plus = 0.0, t_minus = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    (diffs[i] > 0 ? t_plus : t_minus) += ranks[i];
  }
  const double w = std::min(t_plus, t_minus);
  res.statistic = w;

  const bool exact = mode == TestMode::Exact ||
                     (mode == TestMode::Auto && m <= kWilcoxonExactLimit);
  if (exact && m <= kWilcoxonExactHardLimit) {
    // Count sign assignments by doubled rank sum; midranks are multiples
    // of 1/2, so doubling makes every sum an integer.
    std::vector<std::int64_t> doubled(m);
    std::int64_t total = 0;
    for (std::size_t i = 0; i < m; ++i) {
      doubled[i] = std::llround(2.0 * ranks[i]);
      total += doubled[i];
    }
    std::vector<std::uint64_t> ways(static_cast<std::size_t>(total) + 1, 0);
    ways[0] = 1;
    std::int64_t reached = 0;
    for (std::size_t i = 0; i < m; ++i) {
      reached += doubled[i];
      for (std::int64_t s = reached; s >= doubled[i]; --s) {
        ways[static_cast<std::size_t>(s)] +=
            ways[static_cast<std::size_t>(s - doubled[i])];
      }
    }
    const std::int64_t w2 = std::llround(2.0 * w);
    std::uint64_t hits = 0;
    for (std::int64_t s = 0; s <= total; ++s) {
      if (std::min(s, total - s) <= w2) {
        hits += ways[static_cast<std::size_t>(s)];
      }
    }
    res.p_value = static_cast<double>(hits) /
                  std::ldexp(1.0, static_cast<int>(m));
    res.method = PValueMethod::Exact;
    return res;
  }

  const double md = static_cast<double>(m);
  const double mean = md * (md + 1.0) / 4.0;
  const double variance =
      md * (md + 1.0) * (2.0 * md + 1.0) / 24.0 - tie_term(abs_diffs) / 48.0;
  res.method = PValueMethod::NormalApprox;
  if (variance <= 0.0) {
    res.degenerate = true;
    return res;
  }
  const double z = (w - mean + 0.5) / std::sqrt(variance);
  res.p_value = two_sided_normal_p(z);
  return res;
}

TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                          TestMode mode) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("mann_whitney_u: empty sample");
  }
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  const std::size_t n = na + nb;

  std::vector<double> combined;
  combined.reserve(n);
  combined.insert(combined.end(), a.begin(), a.end());
  combined.insert(combined.end(), b.begin(), b.end());
  const auto ranks = midranks(combined);

  double rank_sum_a = 0.0;
  for (std::size_t i = 0; i < na; ++i) rank_sum_a += ranks[i];
  const double u_a =
      rank_sum_a - static_cast<double>(na) * (static_cast<double>(na) + 1.0) / 2.0;
  const double u_b = static_cast<double>(na) * static_cast<double>(nb) - u_a;
  const double u = std::min(u_a, u_b);

  TestResult res;
  res.statistic = u;
  res.n = {na, nb};

  const bool exact = mode == TestMode::Exact ||
                     (mode == TestMode::Auto && na * nb <= kMannWhitneyExactLimit);
  if (exact) {
    // Count subsets of size na by doubled rank sum; the permutation null
    // distribution conditional on the observed (tied) values.
    std::vector<std::int64_t> doubled(n);
    std::int64_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      doubled[i] = std::llround(2.0 * ranks[i]);
      total += doubled[i];
    }
    using Count = unsigned __int128;
    std::vector<std::vector<Count>> ways(
        na + 1, std::vector<Count>(static_cast<std::size_t>(total) + 1, 0));
    ways[0][0] = 1;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t kmax = std::min(i + 1, na);
      for (std::size_t k = kmax; k >= 1; --k) {
        const auto d = static_cast<std::size_t>(doubled[i]);
        for (std::size_t s = static_cast<std::size_t>(total); s >= d; --s) {
          ways[k][s] += ways[k - 1][s - d];
        }
      }
    }
    const std::int64_t offset =
        static_cast<std::int64_t>(na) * (static_cast<std::int64_t>(na) + 1);
    const std::int64_t u2_max =
        2 * static_cast<std::int64_t>(na) * static_cast<std::int64_t>(nb);
    const std::int64_t u2_obs = std::llround(2.0 * u);
    Count hits = 0, arrangements = 0;
    for (std::int64_t s = 0; s <= total; ++s) {
      const Count c = ways[na][static_cast<std::size_t>(s)];
      if (c == 0) continue;
      arrangements += c;
      const std::int64_t u2 = s - offset;  // s is the doubled R_a
      if (std::min(u2, u2_max - u2) <= u2_obs) hits += c;
    }
    res.p_value = static_cast<double>(static_cast<long double>(hits) /
                                      static_cast<long double>(arrangements));
    res.method = PValueMethod::Exact;
    return res;
  }

  const double nad = static_cast<double>(na);
  const double nbd = static_cast<double>(nb);
  const double nd = static_cast<double>(n);
  const double mean = nad * nbd / 2.0;
  const double variance =
      nad * nbd / 12.0 *
      ((nd + 1.0) - tie_term(combined) / (nd * (nd - 1.0)));
  res.method = PValueMethod::NormalApprox;
  if (variance <= 0.0) {
    res.degenerate = true;
    return res;
  }
  const double z = (u - mean + 0.5) / std::sqrt(variance);
  res.p_value = two_sided_normal_p(z);
  return res;
}

TestResult kruskal_wallis(std::span<const std::vector<double>> groups) {
  if (groups.size() < 2) {
    throw std::invalid_argument("kruskal_wallis: need at least 2 groups");
  }
  std::vector<double> combined;
  std::vector<std::size_t> sizes;
  for (const auto& g : groups) {
    if (g.empty()) {
      throw std::invalid_argument("kruskal_wallis: empty group");
    }
    sizes.push_back(g.size());
    combined.insert(combined.end(), g.begin(), g.end());
  }
  const std::size_t n = combined.size();
  const auto ranks = midranks(combined);

  TestResult res;
  res.n = sizes;
  res.method = PValueMethod::ChiSquareApprox;

  const double nd = static_cast<double>(n);
  const double correction = 1.0 - tie_term(combined) / (nd * nd * nd - nd);
  if (correction <= 0.0) {
    res.degenerate = true;  // every value identical
    return res;
  }

  double h = 0.0;
  std::size_t offset = 0;
  for (const auto& g : groups) {
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) rank_sum += ranks[offset + i];
    h += rank_sum * rank_sum / static_cast<double>(g.size());
    offset += g.size();
  }
  h = 12.0 / (nd * (nd + 1.0)) * h - 3.0 * (nd + 1.0);
  h /= correction;
  res.statistic = h;
  res.p_value = chi_squared_sf(h, static_cast<double>(groups.size() - 1));
  return res;
}

std::vector<PairwiseResult> post_hoc_pairwise(
    std::span<const std::vector<double>> groups, TestMode mode,
    Correction correction) {
  if (groups.size() < 3) {
    throw std::invalid_argument("post_hoc_pairwise: need at least 3 groups");
  }
  std::vector<PairwiseResult> out;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    for (std::size_t j = i + 1; j < groups.size(); ++j) {
      out.push_back(PairwiseResult{i, j, mann_whitney_u(groups[i], groups[j],
                                                        mode)});
    }
  }
  const std::size_t m = out.size();
  if (correction == Correction::Bonferroni) {
    for (auto& r : out) {
      r.result.p_value = std::min(1.0, r.result.p_value * static_cast<double>(m));
    }
  } else if (correction == Correction::Holm) {
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&out](std::size_t a, std::size_t b) {
      return out[a].result.p_value < out[b].result.p_value;
    });
    double running = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double adjusted =
          std::min(1.0, static_cast<double>(m - k) * out[order[k]].result.p_value);
      running = std::max(running, adjusted);
      out[order[k]].result.p_value = running;
    }
  }
  return out;
}

Descriptive describe(std::span<const double> values) {
  Descriptive d;
  d.count = values.size();
  if (values.empty()) return d;
  const double mean =
      std::accumulate(values.begin(), values.end(), 0.0) /
      static_cast<double>(values.size());
  d.mean = mean;
  if (values.size() >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    d.sd = std::sqrt(ss / (static_cast<double>(values.size()) - 1.0));
  }
  return d;
}

}  // namespace commnet
