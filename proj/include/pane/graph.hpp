#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pane/datasets.hpp"

namespace pane::graph {

/// Adjacency of one graph side (positive, negative, or distorted), stored in
/// both directions with lists sorted ascending for determinism. Degrees are
/// the list lengths.
struct Adjacency {
  std::vector<std::vector<std::uint32_t>> user_items;
  std::vector<std::vector<std::uint32_t>> item_users;
  std::size_t edge_count = 0;

  std::size_t user_degree(std::uint32_t user) const { return user_items[user].size(); }
  std::size_t item_degree(std::uint32_t item) const { return item_users[item].size(); }
  bool has_edge(std::uint32_t user, std::uint32_t item) const;
  bool empty() const { return edge_count == 0; }
};

/// The positive graph and the negative graph over a shared user/item space.
/// Invariant: the two edge sets are disjoint (a pair cannot be both liked and
/// disliked after deduplication). Immutable after build.
struct SignedBipartiteGraph {
  std::uint32_t n_users = 0;
  std::uint32_t n_items = 0;
  Adjacency positive;
  Adjacency negative;

  std::uint32_t n_nodes() const { return n_users + n_items; }
};

/// Builds both graph sides from signed edges. Errors on out-of-range indices
/// and on duplicate (user, item) pairs, regardless of sign.
SignedBipartiteGraph build(const std::vector<datasets::SignedEdge>& edges,
                           std::uint32_t n_users, std::uint32_t n_items);

/// Symmetric normalization coefficient 1/(sqrt(deg(u)) * sqrt(deg(i))) of an
/// existing edge. Errors when the pair is not adjacent in this side.
double norm_coeff(const Adjacency& side, std::uint32_t user, std::uint32_t item);

/// The negative graph after independent Bernoulli edge removal. The subset
/// relation edges ⊆ E_n is structural: distort never introduces edges.
struct DistortedGraph {
  Adjacency adj;
  double removal_probability = 0.0;
  std::uint64_t seed = 0;
};

/// Keeps each undirected negative edge with probability 1-p, one draw per
/// edge so both adjacency directions stay consistent. Deterministic per seed.
DistortedGraph distort(const SignedBipartiteGraph& graph, double p, std::uint64_t seed);

// Binary graph cache: magic "PGNN", version, counts, then the positive and
// negative edge arrays, little-endian u32.
void write_graph_cache(const std::string& path, const SignedBipartiteGraph& graph);
SignedBipartiteGraph read_graph_cache(const std::string& path);

}  // namespace pane::graph
