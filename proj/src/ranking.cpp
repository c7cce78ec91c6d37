#include "pane/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace pane::ranking {

std::vector<ScoredItem> score_all(std::uint32_t user, const model::Mat<float>& z,
                                  const model::Mat<float>& v,
                                  const graph::SignedBipartiteGraph& train_graph) {
  const std::uint32_t n_users = train_graph.n_users;
  const std::uint32_t n_items = train_graph.n_items;
  if (user >= n_users) {
    fail(ErrorCategory::dimension,
         "unknown user index " + std::to_string(user) + " (have " + std::to_string(n_users) +
             " users)");
  }

  std::vector<ScoredItem> scores;
  scores.reserve(n_items);
  for (std::uint32_t item = 0; item < n_items; ++item) {
    if (train_graph.positive.has_edge(user, item) || train_graph.negative.has_edge(user, item)) {
      continue;  // training-interacted items are not candidates
    }
    ScoredItem s;
    s.item = item;
    const Eigen::Index row = static_cast<Eigen::Index>(n_users) + item;
    if (z.rows() > 0) s.interest = z.row(user).dot(z.row(row));
    if (v.rows() > 0) s.disinterest = v.row(user).dot(v.row(row));
    scores.push_back(s);
  }
  return scores;
}

std::vector<ScoredItem> score_user(const model::ForwardResult<float>& embeddings,
                                   const graph::SignedBipartiteGraph& train_graph,
                                   std::uint32_t user, Variant variant) {
  static const model::Mat<float> kEmpty;
  const model::Mat<float>& z = embeddings.has_interest ? embeddings.z : kEmpty;
  const model::Mat<float>& v = embeddings.has_disinterest ? embeddings.v : kEmpty;
  std::vector<ScoredItem> scores = score_all(user, z, v, train_graph);
  if (variant == Variant::a) {
    // Only the disinterest embeddings carry signal: least disliked first.
    for (ScoredItem& s : scores) s.interest = -s.disinterest;
  }
  return scores;
}

std::vector<std::uint32_t> filter_kept(const std::vector<ScoredItem>& scores, float threshold,
                                       FilterKeep keep) {
  std::vector<std::uint32_t> kept;
  for (std::uint32_t idx = 0; idx < scores.size(); ++idx) {
    const float d = scores[idx].disinterest;
    const bool pass = keep == FilterKeep::below ? d < threshold : d > threshold;
    if (pass) kept.push_back(idx);
  }
  return kept;
}

RankedList recommend(std::uint32_t user, std::vector<ScoredItem> scores,
                     const RecommendOptions& options) {
  if (options.list_size < 1) fail(ErrorCategory::config, "recommendation list size must be >= 1");

  std::vector<std::uint32_t> kept = filter_kept(scores, options.threshold, options.keep);
  std::vector<bool> is_kept(scores.size(), false);
  for (const std::uint32_t idx : kept) is_kept[idx] = true;

  const auto by_interest = [&](std::uint32_t a, std::uint32_t b) {
    if (scores[a].interest != scores[b].interest) return scores[a].interest > scores[b].interest;
    return scores[a].item < scores[b].item;
  };
  std::sort(kept.begin(), kept.end(), by_interest);

  RankedList list;
  list.user = user;
  const std::size_t want = static_cast<std::size_t>(options.list_size);
  for (const std::uint32_t idx : kept) {
    if (list.items.size() >= want) break;
    list.items.push_back({scores[idx].item, scores[idx].interest, scores[idx].disinterest, false});
  }

  if (list.items.size() < want && options.backfill) {
    std::vector<std::uint32_t> rest;
    for (std::uint32_t idx = 0; idx < scores.size(); ++idx) {
      if (!is_kept[idx]) rest.push_back(idx);
    }
    std::sort(rest.begin(), rest.end(), [&](std::uint32_t a, std::uint32_t b) {
      if (scores[a].disinterest != scores[b].disinterest) {
        return scores[a].disinterest < scores[b].disinterest;
      }
      if (scores[a].interest != scores[b].interest) {
        return scores[a].interest > scores[b].interest;
      }
      return scores[a].item < scores[b].item;
    });
    for (const std::uint32_t idx : rest) {
      if (list.items.size() >= want) break;
      list.items.push_back(
          {scores[idx].item, scores[idx].interest, scores[idx].disinterest, true});
    }
  }
  return list;
}

GroundTruth ground_truth_from_edges(const std::vector<datasets::SignedEdge>& test_edges,
                                    std::uint32_t n_users) {
  GroundTruth truth(n_users);
  for (const datasets::SignedEdge& e : test_edges) {
    if (e.sign != datasets::Sign::positive) continue;
    if (e.user >= n_users) {
      fail(ErrorCategory::dimension,
           "test edge user " + std::to_string(e.user) + " outside the trained user space");
    }
    truth[e.user].push_back(e.item);
  }
  for (auto& items : truth) {
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
  }
  return truth;
}

namespace {

bool counts_as_hit(const RankedEntry& entry, const std::vector<std::uint32_t>& truth,
                   const MetricOptions& options) {
  if (options.backfill_as_miss && entry.backfilled) return false;
  return std::binary_search(truth.begin(), truth.end(), entry.item);
}

template <typename PerUser>
double mean_over_evaluated(const std::vector<RankedList>& lists, const GroundTruth& truth,
                           PerUser per_user) {
  double sum = 0.0;
  std::size_t evaluated = 0;
  for (const RankedList& list : lists) {
    const auto& gt = truth[list.user];
    if (gt.empty()) continue;  // recall undefined without ground truth
    sum += per_user(list, gt);
    ++evaluated;
  }
  return evaluated > 0 ? sum / static_cast<double>(evaluated) : 0.0;
}

}  // namespace

double precision_at_k(const std::vector<RankedList>& lists, const GroundTruth& truth, int k,
                      const MetricOptions& options) {
  if (k < 1) fail(ErrorCategory::config, "metrics require k >= 1");
  return mean_over_evaluated(lists, truth, [&](const RankedList& list, const auto& gt) {
    std::size_t hits = 0;
    const std::size_t top = std::min<std::size_t>(k, list.items.size());
    for (std::size_t r = 0; r < top; ++r) {
      if (counts_as_hit(list.items[r], gt, options)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(k);
  });
}

double recall_at_k(const std::vector<RankedList>& lists, const GroundTruth& truth, int k,
                   const MetricOptions& options) {
  if (k < 1) fail(ErrorCategory::config, "metrics require k >= 1");
  return mean_over_evaluated(lists, truth, [&](const RankedList& list, const auto& gt) {
    std::size_t hits = 0;
    const std::size_t top = std::min<std::size_t>(k, list.items.size());
    for (std::size_t r = 0; r < top; ++r) {
      if (counts_as_hit(list.items[r], gt, options)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(gt.size());
  });
}

double ndcg_at_k(const std::vector<RankedList>& lists, const GroundTruth& truth, int k,
                 const MetricOptions& options) {
  if (k < 1) fail(ErrorCategory::config, "metrics require k >= 1");
  return mean_over_evaluated(lists, truth, [&](const RankedList& list, const auto& gt) {
    double dcg = 0.0;
    const std::size_t top = std::min<std::size_t>(k, list.items.size());
    for (std::size_t r = 0; r < top; ++r) {
      if (counts_as_hit(list.items[r], gt, options)) {
        dcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
      }
    }
    // The normalizer runs over K ranks; the capped form stops at |GT_u|.
    const std::size_t ideal_ranks =
        options.capped_idcg ? std::min<std::size_t>(k, gt.size()) : static_cast<std::size_t>(k);
    double idcg = 0.0;
    for (std::size_t r = 0; r < ideal_ranks; ++r) {
      idcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
    }
    return idcg > 0.0 ? dcg / idcg : 0.0;
  });
}

MetricsReport evaluate(const std::vector<RankedList>& lists, const GroundTruth& truth,
                       const std::vector<int>& k_values, const MetricOptions& options) {
  MetricsReport report;
  for (const int k : k_values) {
    MetricsAtK m;
    m.k = k;
    m.precision = precision_at_k(lists, truth, k, options);
    m.recall = recall_at_k(lists, truth, k, options);
    m.ndcg = ndcg_at_k(lists, truth, k, options);
    report.at_k.push_back(m);
  }
  for (const RankedList& list : lists) {
    if (!truth[list.user].empty()) ++report.evaluated_users;
  }
  return report;
}

void write_recommendations(const std::string& path, const std::vector<RankedList>& lists) {
  std::ofstream out(path);
  if (!out) fail(ErrorCategory::io, "cannot write recommendations file '" + path + "'");
  for (const RankedList& list : lists) {
    for (std::size_t rank = 0; rank < list.items.size(); ++rank) {
      const RankedEntry& e = list.items[rank];
      out << list.user << '\t' << rank + 1 << '\t' << e.item << '\t' << e.interest << '\t'
          << e.disinterest << '\t' << (e.backfilled ? 1 : 0) << '\n';
    }
  }
  if (!out) fail(ErrorCategory::io, "failed writing recommendations file '" + path + "'");
}

std::string format_metrics_report(const MetricsReport& report) {
  std::ostringstream out;
  out.precision(6);
  out << std::fixed;
  for (const MetricsAtK& m : report.at_k) {
    out << "precision@" << m.k << '\t' << m.precision << '\n';
    out << "recall@" << m.k << '\t' << m.recall << '\n';
    out << "ndcg@" << m.k << '\t' << m.ndcg << '\n';
  }
  out << "evaluated_users\t" << report.evaluated_users << '\n';
  return out.str();
}

void write_metrics_report(const std::string& path, const MetricsReport& report) {
  std::ofstream out(path);
  if (!out) fail(ErrorCategory::io, "cannot write metrics report '" + path + "'");
  out << format_metrics_report(report);
  if (!out) fail(ErrorCategory::io, "failed writing metrics report '" + path + "'");
}

}  // namespace pane::ranking
