#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace commnet {

enum class PValueMethod { Exact, NormalApprox, ChiSquareApprox };
enum class TestMode { Auto, Exact, Approx };
enum class Correction { None, Bonferroni, Holm };

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::vector<std::size_t> n;  // sample sizes entering the test
  PValueMethod method = PValueMethod::Exact;
  bool degenerate = false;
};

/// Midranks (average ranks for ties), 1-based.
std::vector<double> midranks(std::span<const double> values);

/// Paired two-sided Wilcoxon signed-rank test. Zero differences are dropped;
/// W = min(T+, T-). Exact p enumerates the 2^m sign assignments (via a
/// rank-sum count table) when m <= 20 in Auto mode; otherwise a normal
/// approximation with tie and continuity correction is used.
TestResult wilcoxon_signed_rank(
    std::span<const std::pair<double, double>> paired,
    TestMode mode = TestMode::Auto);

/// Two-sided Mann-Whitney U with midrank ties; U = min(U_a, U_b). Exact p
/// counts all C(n_a + n_b, n_a) group assignments (tie pattern respected)
/// when n_a * n_b <= 400 in Auto mode.
TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                          TestMode mode = TestMode::Auto);

/// Kruskal-Wallis H with tie correction; p from the chi-square approximation
/// with k-1 degrees of freedom. All-equal input yields H = 0 flagged
/// degenerate.
TestResult kruskal_wallis(std::span<const std::vector<double>> groups);

struct PairwiseResult {
  std::size_t group_a = 0;
  std::size_t group_b = 0;
  TestResult result;
};

/// Mann-Whitney U over every unordered group pair. Raw p values by default;
/// Bonferroni/Holm adjust in place when requested.
std::vector<PairwiseResult> post_hoc_pairwise(
    std::span<const std::vector<double>> groups, TestMode mode = TestMode::Auto,
    Correction correction = Correction::None);

struct Descriptive {
  std::size_t count = 0;
  std::optional<double> mean;
  std::optional<double> sd;  // sample SD, n-1 denominator
};

Descriptive describe(std::span<const double> values);

/// Standard normal CDF.
double normal_cdf(double z);
/// Chi-square survival function P(X >= x) with df degrees of freedom.
double chi_squared_sf(double x, double df);
/// Two-sided Student-t critical value t_{1-(1-level)/2, df}.
double student_t_critical(double level, double df);

}  // namespace commnet
