#include "commnet/network.hpp"

#include <algorithm>
#include <stdexcept>

namespace commnet {

std::vector<AdjacencyPair> extract_adjacency_pairs(
    std::span<const Utterance> utterances, Millis max_gap_ms) {
  if (!std::is_sorted(utterances.begin(), utterances.end(),
                      utterance_order_less)) {
    throw std::invalid_argument(
        "extract_adjacency_pairs: utterances not sorted");
  }
  std::vector<AdjacencyPair> pairs;
  if (utterances.size() < 2) return pairs;
  pairs.reserve(utterances.size() - 1);
  for (std::size_t i = 0; i + 1 < utterances.size(); ++i) {
    const Utterance& a = utterances[i];
    const Utterance& b = utterances[i + 1];
    if (a.speaker == b.speaker) continue;
    const Millis gap = b.start_ms - a.start_ms;
    if (gap > max_gap_ms) continue;
    pairs.push_back(AdjacencyPair{a.speaker, b.speaker,
                                  DaPair{a.da, b.da}, gap, a.start_ms});
  }
  return pairs;
}

CommNetwork build_network(std::span<const AdjacencyPair> pairs,
                          std::optional<DaPair> tag) {
  CommNetwork net;
  net.tag = tag;
  for (const AdjacencyPair& p : pairs) {
    if (tag && p.da_pair != *tag) continue;
    net.weights[team_slot(p.sender)][team_slot(p.receiver)] += 1;
    net.pair_count += 1;
  }
  return net;
}

NetworkSet build_networks(std::span<const AdjacencyPair> pairs,
                          std::span<const DaPair> tags) {
  NetworkSet set;
  set.all = build_network(pairs, std::nullopt);
  for (DaPair tag : tags) {
    set.by_tag.emplace(tag, build_network(pairs, tag));
  }
  return set;
}

double density(const CommNetwork& net) {
  int connected = 0;
  for (int i = 0; i < kTeamSize; ++i) {
    for (int j = i + 1; j < kTeamSize; ++j) {
      if (net.weights[i][j] + net.weights[j][i] >= 1) ++connected;
    }
  }
  return static_cast<double>(connected) /
         (kTeamSize * (kTeamSize - 1) / 2);
}

std::array<int, kTeamSize> degree_centrality(const CommNetwork& net,
                                             Direction direction) {
  std::array<int, kTeamSize> c{};
  for (int i = 0; i < kTeamSize; ++i) {
    for (int j = 0; j < kTeamSize; ++j) {
      if (direction == Direction::Out) {
        c[i] += net.weights[i][j];
      } else {
        c[i] += net.weights[j][i];
      }
    }
  }
  return c;
}

double centralization(const CommNetwork& net, Direction direction,
                      Normalization normalization,
                      std::optional<int> utterance_count) {
  int denominator_u = net.pair_count;
  if (normalization == Normalization::Utterances) {
    if (!utterance_count) {
      throw std::invalid_argument(
          "centralization: Utterances normalization requires an utterance "
          "count");
    }
    denominator_u = *utterance_count;
  }
  if (denominator_u <= 0) return 0.0;

  const auto c = degree_centrality(net, direction);
  const int c_max = *std::max_element(c.begin(), c.end());
  int spread = 0;
  for (int ci : c) spread += c_max - ci;
  return static_cast<double>(spread) /
         (static_cast<double>(kTeamSize - 1) * denominator_u);
}

NetworkMetrics metrics(const CommNetwork& net, Normalization normalization,
                       std::optional<int> utterance_count) {
  if (normalization == Normalization::Utterances && !utterance_count) {
    throw std::invalid_argument(
        "metrics: Utterances normalization requires an utterance count");
  }
  NetworkMetrics m;
  m.rho = density(net);
  m.pair_count = net.pair_count;
  m.out_centrality = degree_centrality(net, Direction::Out);
  m.in_centrality = degree_centrality(net, Direction::In);
  const int u = normalization == Normalization::Pairs
                    ? net.pair_count
                    : *utterance_count;
  if (net.pair_count == 0 || u <= 0) {
    m.degenerate = true;
    return m;
  }
  m.c_od = centralization(net, Direction::Out, normalization, utterance_count);
  m.c_id = centralization(net, Direction::In, normalization, utterance_count);
  return m;
}

}  // namespace commnet
