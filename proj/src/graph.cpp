#include "pane/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "pane/rng.hpp"

namespace pane::graph {

bool Adjacency::has_edge(std::uint32_t user, std::uint32_t item) const {
  const auto& items = user_items[user];
  return std::binary_search(items.begin(), items.end(), item);
}

SignedBipartiteGraph build(const std::vector<datasets::SignedEdge>& edges,
                           std::uint32_t n_users, std::uint32_t n_items) {
  SignedBipartiteGraph g;
  g.n_users = n_users;
  g.n_items = n_items;
  for (Adjacency* side : {&g.positive, &g.negative}) {
    side->user_items.resize(n_users);
    side->item_users.resize(n_items);
  }

  for (const datasets::SignedEdge& e : edges) {
    if (e.user >= n_users || e.item >= n_items) {
      fail(ErrorCategory::dimension,
           "edge (" + std::to_string(e.user) + ", " + std::to_string(e.item) +
               ") out of range for " + std::to_string(n_users) + " users x " +
               std::to_string(n_items) + " items");
    }
    Adjacency& side = e.sign == datasets::Sign::positive ? g.positive : g.negative;
    side.user_items[e.user].push_back(e.item);
    side.item_users[e.item].push_back(e.user);
    ++side.edge_count;
  }

  for (Adjacency* side : {&g.positive, &g.negative}) {
    for (auto& list : side->user_items) std::sort(list.begin(), list.end());
    for (auto& list : side->item_users) std::sort(list.begin(), list.end());
  }

  // A pair may appear at most once across both sides.
  for (std::uint32_t u = 0; u < n_users; ++u) {
    const auto& pos = g.positive.user_items[u];
    const auto& neg = g.negative.user_items[u];
    if (std::adjacent_find(pos.begin(), pos.end()) != pos.end() ||
        std::adjacent_find(neg.begin(), neg.end()) != neg.end()) {
      fail(ErrorCategory::format,
           "duplicate signed edge for user " + std::to_string(u));
    }
    std::vector<std::uint32_t> both;
    std::set_intersection(pos.begin(), pos.end(), neg.begin(), neg.end(),
                          std::back_inserter(both));
    if (!both.empty()) {
      fail(ErrorCategory::format, "user " + std::to_string(u) + " and item " +
                                      std::to_string(both.front()) +
                                      " carry both a positive and a negative edge");
    }
  }
  return g;
}

double norm_coeff(const Adjacency& side, std::uint32_t user, std::uint32_t item) {
  if (user >= side.user_items.size() || item >= side.item_users.size() ||
      !side.has_edge(user, item)) {
    fail(ErrorCategory::dimension, "norm_coeff: (" + std::to_string(user) + ", " +
                                       std::to_string(item) + ") is not an edge");
  }
  return 1.0 / (std::sqrt(static_cast<double>(side.user_degree(user))) *
                std::sqrt(static_cast<double>(side.item_degree(item))));
}

DistortedGraph distort(const SignedBipartiteGraph& graph, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) {
    fail(ErrorCategory::config, "edge removal probability must lie in [0, 1]");
  }

  DistortedGraph d;
  d.removal_probability = p;
  d.seed = seed;
  d.adj.user_items.resize(graph.n_users);
  d.adj.item_users.resize(graph.n_items);

  // One Bernoulli draw per undirected edge, walked in canonical (user, item)
  // order so the kept subset is a pure function of the seed.
  RngStream rng = derive_stream(seed, StreamPurpose::distortion);
  for (std::uint32_t u = 0; u < graph.n_users; ++u) {
    for (const std::uint32_t i : graph.negative.user_items[u]) {
      if (rng.next_unit() < 1.0 - p) {
        d.adj.user_items[u].push_back(i);
        d.adj.item_users[i].push_back(u);
        ++d.adj.edge_count;
      }
    }
  }
  for (auto& list : d.adj.item_users) std::sort(list.begin(), list.end());
  return d;
}

namespace {

constexpr char kMagic[4] = {'P', 'G', 'N', 'N'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ofstream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::ifstream& in, const std::string& path) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) {
    fail(ErrorCategory::format, "truncated graph cache '" + path + "'");
  }
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_edges(std::ofstream& out, const Adjacency& side) {
  for (std::uint32_t u = 0; u < side.user_items.size(); ++u) {
    for (const std::uint32_t i : side.user_items[u]) {
      put_u32(out, u);
      put_u32(out, i);
    }
  }
}

}  // namespace

void write_graph_cache(const std::string& path, const SignedBipartiteGraph& graph) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCategory::io, "cannot write graph cache '" + path + "'");
  out.write(kMagic, 4);
  put_u32(out, kVersion);
  put_u32(out, graph.n_users);
  put_u32(out, graph.n_items);
  put_u32(out, static_cast<std::uint32_t>(graph.positive.edge_count));
  put_u32(out, static_cast<std::uint32_t>(graph.negative.edge_count));
  put_edges(out, graph.positive);
  put_edges(out, graph.negative);
  if (!out) fail(ErrorCategory::io, "failed writing graph cache '" + path + "'");
}

SignedBipartiteGraph read_graph_cache(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCategory::io, "cannot open graph cache '" + path + "'");

  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    fail(ErrorCategory::format, "'" + path + "' is not a graph cache (bad magic)");
  }
  const std::uint32_t version = get_u32(in, path);
  if (version != kVersion) {
    fail(ErrorCategory::format, "unsupported graph cache version " + std::to_string(version));
  }
  const std::uint32_t n_users = get_u32(in, path);
  const std::uint32_t n_items = get_u32(in, path);
  const std::uint32_t n_pos = get_u32(in, path);
  const std::uint32_t n_neg = get_u32(in, path);

  std::vector<datasets::SignedEdge> edges;
  edges.reserve(static_cast<std::size_t>(n_pos) + n_neg);
  for (std::uint32_t e = 0; e < n_pos + n_neg; ++e) {
    datasets::SignedEdge edge;
    edge.user = get_u32(in, path);
    edge.item = get_u32(in, path);
    edge.sign = e < n_pos ? datasets::Sign::positive : datasets::Sign::negative;
    edges.push_back(edge);
  }
  return build(edges, n_users, n_items);
}

}  // namespace pane::graph
