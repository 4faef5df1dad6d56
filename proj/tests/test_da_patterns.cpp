#include <doctest.h>

#include <vector>

#include "commnet/da_patterns.hpp"
#include "commnet/synth.hpp"

using namespace commnet;

namespace {

constexpr DialogueAct I = DialogueAct::Inform;
constexpr DialogueAct Q = DialogueAct::Question;
constexpr DialogueAct D = DialogueAct::Directive;
constexpr DialogueAct C = DialogueAct::Commissive;

AdjacencyPair pair_of(DialogueAct a, DialogueAct b) {
  return AdjacencyPair{PlayerId{1}, PlayerId{2}, DaPair{a, b}, 1000, 0};
}

/// Frequency table shaped like a reference corpus: the six leading counts
/// followed by a gently decaying tail.
DaPairFrequencyTable corpus_like_table() {
  DaPairFrequencyTable t;
  const std::vector<std::pair<DaPair, std::int64_t>> top = {
      {{I, I}, 1232}, {{Q, I}, 1130}, {{D, C}, 820},
      {{I, D}, 819},  {{I, Q}, 626},  {{C, I}, 269},
  };
  for (const auto& [p, n] : top) t.add(p, n);
  const std::vector<std::int64_t> tail = {230, 200, 175, 155, 140,
                                          128, 118, 110, 104, 100};
  std::size_t k = 0;
  for (int i = 0; i < kDaPairCount && k < tail.size(); ++i) {
    const DaPair p = da_pair_from_index(i);
    if (t.counts[i] == 0) t.add(p, tail[k++]);
  }
  return t;
}

}  // namespace

TEST_CASE("count_da_pairs tallies ordered categories") {
  const std::vector<AdjacencyPair> pairs = {pair_of(I, I), pair_of(I, I),
                                            pair_of(Q, I)};
  const auto table = count_da_pairs(pairs);
  CHECK(table.counts[da_pair_index({I, I})] == 2);
  CHECK(table.counts[da_pair_index({Q, I})] == 1);
  CHECK(table.total() == 3);

  const auto empty = count_da_pairs({});
  CHECK(empty.total() == 0);
}

TEST_CASE("sorted order is descending with deterministic tie-breaks") {
  DaPairFrequencyTable t;
  t.add({I, I}, 5);
  t.add({Q, I}, 5);
  t.add({D, C}, 9);
  const auto rows = t.sorted_desc();
  CHECK(rows[0].first == DaPair{D, C});
  CHECK(rows[1].first == DaPair{I, I});  // ties by pair index
  CHECK(rows[2].first == DaPair{Q, I});
  // sum over rows equals total
  std::int64_t sum = 0;
  for (const auto& [p, n] : rows) sum += n;
  CHECK(sum == t.total());
}

TEST_CASE("kneedle knee indices frozen from the reference implementation") {
  const std::vector<double> geometric = {100, 50, 25, 12, 6, 3, 2, 1};
  CHECK(kneedle_elbow(geometric) == 3);

  std::vector<double> linear;
  for (int i = 16; i >= 1; --i) linear.push_back(i);
  CHECK(!kneedle_elbow(linear));

  const std::vector<double> constant = {5, 5, 5, 5, 5};
  CHECK(!kneedle_elbow(constant));

  const std::vector<double> two = {3, 1};
  CHECK_THROWS_AS(kneedle_elbow(two), std::invalid_argument);
}

TEST_CASE("kneedle finds the sixth pair on a corpus-shaped curve") {
  std::vector<double> curve;
  for (const auto& [p, n] : corpus_like_table().sorted_desc()) {
    curve.push_back(static_cast<double>(n));
  }
  CHECK(kneedle_elbow(curve) == 6);
}

TEST_CASE("kneedle is scale invariant") {
  const std::vector<double> base = {100, 50, 25, 12, 6, 3, 2, 1};
  for (double factor : {0.001, 0.5, 7.0, 12345.0}) {
    std::vector<double> scaled;
    for (double v : base) scaled.push_back(v * factor);
    CHECK(kneedle_elbow(scaled) == kneedle_elbow(base));
  }
}

TEST_CASE("select_frequent_pairs reproduces the expected six") {
  const auto selected = select_frequent_pairs(corpus_like_table());
  const std::vector<DaPair> expected = {{I, I}, {Q, I}, {D, C},
                                        {I, D}, {I, Q}, {C, I}};
  CHECK(selected == expected);
}

TEST_CASE("select_frequent_pairs override and degenerate cases") {
  const auto top1 = select_frequent_pairs(corpus_like_table(), 1);
  REQUIRE(top1.size() == 1);
  CHECK(top1[0] == DaPair{I, I});

  CHECK_THROWS_AS(select_frequent_pairs(DaPairFrequencyTable{}),
                  SelectionAmbiguousError);
  CHECK_THROWS_AS(select_frequent_pairs(corpus_like_table(), 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(select_frequent_pairs(corpus_like_table(), 17),
                  std::invalid_argument);
}

TEST_CASE("selection is a prefix of the descending order") {
  SplitMix64 rng(321);
  for (int round = 0; round < 50; ++round) {
    DaPairFrequencyTable t;
    for (int i = 0; i < kDaPairCount; ++i) {
      t.add(da_pair_from_index(i), rng.next_in(0, 500));
    }
    const int k = static_cast<int>(rng.next_in(1, kDaPairCount));
    const auto selected = select_frequent_pairs(t, k);
    const auto rows = t.sorted_desc();
    REQUIRE(selected.size() == static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) CHECK(selected[i] == rows[i].first);
  }
}

TEST_CASE("merge adds counts elementwise") {
  DaPairFrequencyTable a, b;
  a.add({I, I}, 3);
  b.add({I, I}, 4);
  b.add({D, C}, 2);
  a.merge(b);
  CHECK(a.counts[da_pair_index({I, I})] == 7);
  CHECK(a.counts[da_pair_index({D, C})] == 2);
  CHECK(a.total() == 9);
}
