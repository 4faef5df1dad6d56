#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "commnet/domain.hpp"

namespace commnet {

inline constexpr Millis kDefaultPairingGapMs = 5000;

/// Two consecutive utterances by different speakers within the pairing
/// interval, modeled as a directed sender -> receiver exchange.
struct AdjacencyPair {
  PlayerId sender;
  PlayerId receiver;
  DaPair da_pair;
  Millis gap_ms = 0;        // receiver start - sender start
  Millis sender_start_ms = 0;
};

/// Walks consecutive utterances (sorted by utterance_order_less) and emits
/// one pair per adjacent different-speaker step whose start-time gap does not
/// exceed max_gap_ms. Skipped steps (same speaker or gap too large) do not
/// break the chain: utterance i+1 still pairs with i+2.
///
/// Throws std::invalid_argument if the input is not sorted.
std::vector<AdjacencyPair> extract_adjacency_pairs(
    std::span<const Utterance> utterances,
    Millis max_gap_ms = kDefaultPairingGapMs);

/// Directed weighted 5-node graph for one window. Nodes are the analyzed
/// team's five position slots; the node set stays fixed even when a player
/// was verbally inactive.
struct CommNetwork {
  std::optional<DaPair> tag;  // nullopt = aggregate over all DA pairs
  std::array<std::array<int, kTeamSize>, kTeamSize> weights{};  // [from][to]
  int pair_count = 0;  // U, total edge weight

  int weight(int from_slot, int to_slot) const {
    return weights[from_slot][to_slot];
  }
};

CommNetwork build_network(std::span<const AdjacencyPair> pairs,
                          std::optional<DaPair> tag);

struct NetworkSet {
  CommNetwork all;
  std::map<DaPair, CommNetwork> by_tag;
};

/// One network per requested tag plus the aggregate-over-everything network.
NetworkSet build_networks(std::span<const AdjacencyPair> pairs,
                          std::span<const DaPair> tags);

/// Fraction of the 10 unordered node pairs connected in either direction;
/// edge multiplicity is ignored.
double density(const CommNetwork& net);

enum class Direction { Out, In };

/// Denominator convention for centralization: Pairs uses U = total edge
/// weight (full single-speaker concentration scores exactly 1); Utterances
/// uses the raw utterance count of the window.
enum class Normalization { Pairs, Utterances };

std::array<int, kTeamSize> degree_centrality(const CommNetwork& net,
                                             Direction direction);

/// Freeman-style centralization: sum of (max centrality - centrality) over
/// nodes, divided by (N-1)*U. Returns 0 for U = 0 networks.
///
/// Throws std::invalid_argument when normalization = Utterances and no
/// utterance count is supplied.
double centralization(const CommNetwork& net, Direction direction,
                      Normalization normalization = Normalization::Pairs,
                      std::optional<int> utterance_count = std::nullopt);

struct NetworkMetrics {
  double rho = 0.0;
  double c_od = 0.0;
  double c_id = 0.0;
  std::array<int, kTeamSize> out_centrality{};
  std::array<int, kTeamSize> in_centrality{};
  int pair_count = 0;
  bool degenerate = false;  // U = 0: metrics are zero placeholders
};

NetworkMetrics metrics(const CommNetwork& net,
                       Normalization normalization = Normalization::Pairs,
                       std::optional<int> utterance_count = std::nullopt);

}  // namespace commnet
