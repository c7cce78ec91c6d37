#pragma once

// Independent oracles for the test suites. These re-derive expected values
// from first principles (dense matrices, direct set arithmetic) and must not
// share code with the implementation paths they check.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "pane/graph.hpp"
#include "pane/ranking.hpp"

namespace pane::testsupport {

/// Dense symmetrically normalized adjacency D^{-1/2} A D^{-1/2} over the full
/// node space (users first, then items).
inline Eigen::MatrixXd dense_norm_adjacency(const graph::Adjacency& side,
                                            std::uint32_t n_users, std::uint32_t n_items) {
  const std::uint32_t n = n_users + n_items;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (std::uint32_t u = 0; u < n_users; ++u) {
    for (const std::uint32_t i : side.user_items[u]) {
      const double coeff = 1.0 / (std::sqrt(static_cast<double>(side.user_degree(u))) *
                                  std::sqrt(static_cast<double>(side.item_degree(i))));
      a(u, n_users + i) = coeff;
      a(n_users + i, u) = coeff;
    }
  }
  return a;
}

/// Matrix-form propagation: the layer mean of the dense recurrence
/// X^{(k+1)} = (D^{-1/2} A D^{-1/2}) X^{(k)}.
inline Eigen::MatrixXd dense_propagate(const graph::Adjacency& side, std::uint32_t n_users,
                                       std::uint32_t n_items, const Eigen::MatrixXd& x0,
                                       int layer_count) {
  const Eigen::MatrixXd a = dense_norm_adjacency(side, n_users, n_items);
  Eigen::MatrixXd layer = x0;
  Eigen::MatrixXd sum = x0;
  for (int k = 0; k < layer_count; ++k) {
    layer = a * layer;
    sum += layer;
  }
  return sum / static_cast<double>(layer_count + 1);
}

struct OracleMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double ndcg = 0.0;
};

/// Brute-force Precision/Recall/nDCG: direct set arithmetic per user, mean
/// over users with non-empty ground truth, normalizer summed over exactly K
/// ranks unless capped.
inline OracleMetrics brute_force_metrics(const std::vector<ranking::RankedList>& lists,
                                         const ranking::GroundTruth& truth, int k,
                                         bool capped_idcg = false) {
  OracleMetrics out;
  std::size_t evaluated = 0;
  for (const ranking::RankedList& list : lists) {
    const auto& gt = truth[list.user];
    if (gt.empty()) continue;
    ++evaluated;

    std::size_t hits = 0;
    double dcg = 0.0;
    for (std::size_t rank = 0; rank < list.items.size() && rank < static_cast<std::size_t>(k);
         ++rank) {
      const bool hit =
          std::find(gt.begin(), gt.end(), list.items[rank].item) != gt.end();
      if (hit) {
        ++hits;
        dcg += 1.0 / std::log2(static_cast<double>(rank) + 2.0);
      }
    }
    double idcg = 0.0;
    const std::size_t ranks =
        capped_idcg ? std::min<std::size_t>(k, gt.size()) : static_cast<std::size_t>(k);
    for (std::size_t rank = 0; rank < ranks; ++rank) {
      idcg += 1.0 / std::log2(static_cast<double>(rank) + 2.0);
    }
    out.precision += static_cast<double>(hits) / static_cast<double>(k);
    out.recall += static_cast<double>(hits) / static_cast<double>(gt.size());
    out.ndcg += idcg > 0.0 ? dcg / idcg : 0.0;
  }
  if (evaluated > 0) {
    out.precision /= static_cast<double>(evaluated);
    out.recall /= static_cast<double>(evaluated);
    out.ndcg /= static_cast<double>(evaluated);
  }
  return out;
}

/// Random bipartite graph for property tests; guarantees at least one edge
/// per requested side.
inline graph::SignedBipartiteGraph random_bipartite(std::uint32_t n_users, std::uint32_t n_items,
                                                    double pos_density, double neg_density,
                                                    RngStream& rng) {
  std::vector<datasets::SignedEdge> edges;
  for (std::uint32_t u = 0; u < n_users; ++u) {
    for (std::uint32_t i = 0; i < n_items; ++i) {
      const double r = rng.next_unit();
      if (r < pos_density) {
        edges.push_back({u, i, datasets::Sign::positive});
      } else if (r < pos_density + neg_density) {
        edges.push_back({u, i, datasets::Sign::negative});
      }
    }
  }
  if (pos_density > 0 && edges.empty()) edges.push_back({0, 0, datasets::Sign::positive});
  return graph::build(edges, n_users, n_items);
}

}  // namespace pane::testsupport
