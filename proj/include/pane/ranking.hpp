#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "pane/graph.hpp"
#include "pane/model.hpp"

namespace pane::ranking {

struct ScoredItem {
  std::uint32_t item = 0;
  float interest = 0.0f;     // S_it
  float disinterest = 0.0f;  // S_dt
};

struct RankedEntry {
  std::uint32_t item = 0;
  float interest = 0.0f;
  float disinterest = 0.0f;
  bool backfilled = false;
};

struct RankedList {
  std::uint32_t user = 0;
  std::vector<RankedEntry> items;
};

enum class FilterKeep { below, above };

struct RecommendOptions {
  int list_size = 10;  // K_rec
  float threshold = std::numeric_limits<float>::infinity();
  FilterKeep keep = FilterKeep::below;
  bool backfill = true;
};

/// Interest and disinterest scores for every candidate item of a user.
/// Items the user interacted with in training (either sign) are excluded.
/// Errors on an out-of-range user.
std::vector<ScoredItem> score_all(std::uint32_t user, const model::Mat<float>& z,
                                  const model::Mat<float>& v,
                                  const graph::SignedBipartiteGraph& train_graph);

/// Variant-aware scoring. Variant `a` carries no trained interest embeddings,
/// so items are ranked by least disinterest (interest := -S_dt) and the
/// filter does not apply.
std::vector<ScoredItem> score_user(const model::ForwardResult<float>& embeddings,
                                   const graph::SignedBipartiteGraph& train_graph,
                                   std::uint32_t user, Variant variant);

/// Strict-threshold kept set: indices into `scores` whose disinterest score
/// passes the filter, before any backfill.
std::vector<std::uint32_t> filter_kept(const std::vector<ScoredItem>& scores, float threshold,
                                       FilterKeep keep);

/// Keeps items passing the disinterest filter, sorts by interest descending
/// (ties by ascending item index), and truncates to K_rec. When fewer than
/// K_rec survive and backfill is on, filtered-out items are appended ordered
/// by ascending disinterest then descending interest, flagged as backfilled.
RankedList recommend(std::uint32_t user, std::vector<ScoredItem> scores,
                     const RecommendOptions& options);

/// Ground truth: the positive test items of each user (users with none are
/// skipped by the metrics).
using GroundTruth = std::vector<std::vector<std::uint32_t>>;

GroundTruth ground_truth_from_edges(const std::vector<datasets::SignedEdge>& test_edges,
                                    std::uint32_t n_users);

struct MetricOptions {
  bool capped_idcg = false;       // cap the iDCG sum at |GT_u| ranks
  bool backfill_as_miss = false;  // treat backfilled slots as misses
};

// Mean over evaluated users (those with at least one ground-truth item).
double precision_at_k(const std::vector<RankedList>& lists, const GroundTruth& truth, int k,
                      const MetricOptions& options = {});
double recall_at_k(const std::vector<RankedList>& lists, const GroundTruth& truth, int k,
                   const MetricOptions& options = {});
double ndcg_at_k(const std::vector<RankedList>& lists, const GroundTruth& truth, int k,
                 const MetricOptions& options = {});

struct MetricsAtK {
  int k = 0;
  double precision = 0.0;
  double recall = 0.0;
  double ndcg = 0.0;
};

struct MetricsReport {
  std::vector<MetricsAtK> at_k;
  std::size_t evaluated_users = 0;
};

MetricsReport evaluate(const std::vector<RankedList>& lists, const GroundTruth& truth,
                       const std::vector<int>& k_values, const MetricOptions& options = {});

// Recommendations file: user, rank (1-based), item, interest, disinterest,
// backfilled flag; tab-separated. Metrics report: `key\tvalue` lines with
// keys precision@K / recall@K / ndcg@K and evaluated_users.
void write_recommendations(const std::string& path, const std::vector<RankedList>& lists);
std::string format_metrics_report(const MetricsReport& report);
void write_metrics_report(const std::string& path, const MetricsReport& report);

}  // namespace pane::ranking
