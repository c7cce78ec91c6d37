#include <doctest.h>

#include <cmath>
#include <numeric>

#include "pane/ranking.hpp"
#include "support/oracles.hpp"
#include "support/tempdir.hpp"

using namespace pane;
using namespace pane::ranking;
using datasets::Sign;
using model::Mat;

namespace {

graph::SignedBipartiteGraph two_by_three() {
  return graph::build({{0, 0, Sign::positive}, {1, 2, Sign::negative}}, 2, 3);
}

std::vector<ScoredItem> items(std::initializer_list<ScoredItem> list) { return list; }

RankedList list_of(std::uint32_t user, std::initializer_list<std::uint32_t> item_ids) {
  RankedList list;
  list.user = user;
  for (const std::uint32_t item : item_ids) list.items.push_back({item, 0.0f, 0.0f, false});
  return list;
}

}  // namespace

TEST_CASE("score_all computes inner products and excludes training items") {
  const auto g = two_by_three();
  Mat<float> z(5, 2);  // users 0,1 then items 0,1,2
  z << 1, 2, 0, 1, 1, 2, 3, -1, 0.5f, 0;
  Mat<float> v = Mat<float>::Zero(5, 2);
  v.row(0) << 1, 0;
  v.row(3) << 0, 1;  // orthogonal to user 0

  const auto scores = score_all(0, z, v, g);
  REQUIRE(scores.size() == 2);  // item 0 excluded (train positive)
  CHECK(scores[0].item == 1);
  CHECK(scores[0].interest == doctest::Approx(1.0f));   // (1,2).(3,-1) = 1
  CHECK(scores[0].disinterest == doctest::Approx(0.0f));  // orthogonal rows
  CHECK(scores[1].item == 2);

  // z_u == z_i gives the squared norm
  CHECK(z.row(0).dot(z.row(0)) == doctest::Approx(5.0f));

  // a zero interest row scores zero everywhere
  Mat<float> zz = Mat<float>::Zero(5, 2);
  const auto zero_scores = score_all(1, zz, v, g);
  for (const auto& s : zero_scores) CHECK(s.interest == 0.0f);

  CHECK_THROWS_AS(score_all(7, z, v, g), Error);
}

TEST_CASE("recommend worked example: filter then rank") {
  const auto scored = items({{0, 0.9f, 0.6f}, {1, 0.8f, 0.2f}, {2, 0.1f, 0.1f}});
  RecommendOptions o;
  o.list_size = 2;
  o.threshold = 0.5f;
  const RankedList list = recommend(9, scored, o);
  REQUIRE(list.items.size() == 2);
  CHECK(list.items[0].item == 1);  // item 0 filtered (0.6 not < 0.5)
  CHECK(list.items[1].item == 2);
  CHECK_FALSE(list.items[0].backfilled);
}

TEST_CASE("an infinite threshold is a pure interest ranking") {
  const auto scored = items({{0, 0.9f, 9.0f}, {1, 0.8f, 0.0f}, {2, 1.1f, 5.0f}});
  RecommendOptions o;
  o.list_size = 3;
  const RankedList list = recommend(0, scored, o);
  CHECK(list.items[0].item == 2);
  CHECK(list.items[1].item == 0);
  CHECK(list.items[2].item == 1);
  for (const auto& e : list.items) CHECK_FALSE(e.backfilled);
}

TEST_CASE("backfill: everything filtered returns the least-disliked item flagged") {
  const auto scored = items({{0, 0.9f, 2.0f}, {1, 0.8f, 1.5f}, {2, 0.1f, 3.0f}});
  RecommendOptions o;
  o.list_size = 1;
  o.threshold = 1.0f;
  const RankedList list = recommend(0, scored, o);
  REQUIRE(list.items.size() == 1);
  CHECK(list.items[0].item == 1);  // minimum disinterest among the filtered
  CHECK(list.items[0].backfilled);

  // short-list mode instead of backfilling
  RecommendOptions no_fill = o;
  no_fill.backfill = false;
  CHECK(recommend(0, scored, no_fill).items.empty());
}

TEST_CASE("keep-above comparator flips the filter direction") {
  const auto scored = items({{0, 0.9f, 0.6f}, {1, 0.8f, 0.2f}});
  RecommendOptions o;
  o.list_size = 2;
  o.threshold = 0.5f;
  o.keep = FilterKeep::above;
  o.backfill = false;
  const RankedList list = recommend(0, scored, o);
  REQUIRE(list.items.size() == 1);
  CHECK(list.items[0].item == 0);
}

TEST_CASE("kept sets grow with the threshold and ties break by item index") {
  RngStream rng(31);
  for (int round = 0; round < 20; ++round) {
    std::vector<ScoredItem> scored;
    for (std::uint32_t i = 0; i < 30; ++i) {
      scored.push_back({i, static_cast<float>(rng.next_unit()),
                        static_cast<float>(2.0 * rng.next_unit() - 1.0)});
    }
    const float lo = static_cast<float>(rng.next_unit() - 0.5);
    const float hi = lo + static_cast<float>(rng.next_unit());
    const auto kept_lo = filter_kept(scored, lo, FilterKeep::below);
    const auto kept_hi = filter_kept(scored, hi, FilterKeep::below);
    CHECK(std::includes(kept_hi.begin(), kept_hi.end(), kept_lo.begin(), kept_lo.end()));
  }

  const auto tied = items({{3, 0.5f, 0.0f}, {1, 0.5f, 0.0f}, {2, 0.9f, 0.0f}});
  RecommendOptions o;
  o.list_size = 3;
  const RankedList list = recommend(0, tied, o);
  CHECK(list.items[0].item == 2);
  CHECK(list.items[1].item == 1);  // equal interest: ascending item index
  CHECK(list.items[2].item == 3);
}

TEST_CASE("metric worked example: GT={a,b}, R(2)=[a,c]") {
  GroundTruth truth(1);
  truth[0] = {0, 1};  // a, b
  const std::vector<RankedList> lists = {list_of(0, {0, 2})};  // a, c
  CHECK(precision_at_k(lists, truth, 2) == doctest::Approx(0.5));
  CHECK(recall_at_k(lists, truth, 2) == doctest::Approx(0.5));
  CHECK(ndcg_at_k(lists, truth, 2) == doctest::Approx(0.61315).epsilon(1e-5));
}

TEST_CASE("metric corner cases") {
  GroundTruth truth(2);
  truth[0] = {0, 1, 2};
  truth[1] = {3, 4};

  // every recommended item relevant
  std::vector<RankedList> perfect = {list_of(0, {0, 1}), list_of(1, {3, 4})};
  CHECK(precision_at_k(perfect, truth, 2) == doctest::Approx(1.0));
  CHECK(ndcg_at_k(perfect, truth, 2) == doctest::Approx(1.0));

  // disjoint lists score zero
  std::vector<RankedList> miss = {list_of(0, {5, 6}), list_of(1, {7, 8})};
  CHECK(precision_at_k(miss, truth, 2) == doctest::Approx(0.0));
  CHECK(recall_at_k(miss, truth, 2) == doctest::Approx(0.0));
  CHECK(ndcg_at_k(miss, truth, 2) == doctest::Approx(0.0));

  // k covering the whole catalog with no filter retrieves everything
  std::vector<RankedList> everything = {list_of(0, {5, 0, 1, 2}), list_of(1, {3, 4, 5, 6})};
  CHECK(recall_at_k(everything, truth, 4) == doctest::Approx(1.0));

  // users without ground truth are excluded from the averages
  GroundTruth sparse(2);
  sparse[1] = {0};
  std::vector<RankedList> lists = {list_of(0, {1}), list_of(1, {0})};
  CHECK(recall_at_k(lists, sparse, 1) == doctest::Approx(1.0));
  CHECK(evaluate(lists, sparse, {1}).evaluated_users == 1);

  CHECK_THROWS_AS(precision_at_k(lists, sparse, 0), Error);
}

TEST_CASE("uncapped idcg penalizes small ground truth; capped restores 1.0") {
  GroundTruth truth(1);
  truth[0] = {0};
  const std::vector<RankedList> lists = {list_of(0, {0, 1, 2})};
  const double uncapped = ndcg_at_k(lists, truth, 3);
  const double denominator = 1.0 + 1.0 / std::log2(3.0) + 0.5;
  CHECK(uncapped == doctest::Approx(1.0 / denominator));
  MetricOptions capped;
  capped.capped_idcg = true;
  CHECK(ndcg_at_k(lists, truth, 3, capped) == doctest::Approx(1.0));
}

TEST_CASE("backfilled slots can be treated as misses") {
  GroundTruth truth(1);
  truth[0] = {0, 1};
  RankedList list;
  list.user = 0;
  list.items.push_back({0, 1.0f, 0.0f, false});
  list.items.push_back({1, 0.9f, 2.0f, true});  // hit, but backfilled
  const std::vector<RankedList> lists = {list};
  CHECK(recall_at_k(lists, truth, 2) == doctest::Approx(1.0));
  MetricOptions strict;
  strict.backfill_as_miss = true;
  CHECK(recall_at_k(lists, truth, 2, strict) == doctest::Approx(0.5));
}

TEST_CASE("metrics match the brute-force oracle on random instances") {
  RngStream rng(37);
  for (int round = 0; round < 30; ++round) {
    const std::uint32_t n_users = 1 + rng.next_below(5);
    const std::uint32_t n_items = 1 + rng.next_below(8);
    GroundTruth truth(n_users);
    std::vector<RankedList> lists;
    for (std::uint32_t u = 0; u < n_users; ++u) {
      for (std::uint32_t i = 0; i < n_items; ++i) {
        if (rng.next_unit() < 0.4) truth[u].push_back(i);
      }
      std::vector<std::uint32_t> order(n_items);
      std::iota(order.begin(), order.end(), 0u);
      rng.shuffle(order);
      RankedList list;
      list.user = u;
      const std::size_t len = rng.next_below(n_items + 1);
      for (std::size_t r = 0; r < len; ++r) list.items.push_back({order[r], 0, 0, false});
      lists.push_back(list);
    }
    const int k = 1 + static_cast<int>(rng.next_below(8));
    const auto oracle = testsupport::brute_force_metrics(lists, truth, k);
    CHECK(precision_at_k(lists, truth, k) == oracle.precision);
    CHECK(recall_at_k(lists, truth, k) == oracle.recall);
    CHECK(ndcg_at_k(lists, truth, k) == oracle.ndcg);
  }
}

TEST_CASE("per user, precision * k never exceeds recall * |GT|") {
  RngStream rng(41);
  for (int round = 0; round < 40; ++round) {
    GroundTruth truth(1);
    const std::uint32_t n_items = 2 + rng.next_below(7);
    for (std::uint32_t i = 0; i < n_items; ++i) {
      if (rng.next_unit() < 0.5) truth[0].push_back(i);
    }
    if (truth[0].empty()) continue;
    std::vector<std::uint32_t> order(n_items);
    std::iota(order.begin(), order.end(), 0u);
    rng.shuffle(order);
    RankedList list;
    list.user = 0;
    for (const std::uint32_t i : order) list.items.push_back({i, 0, 0, false});
    const std::vector<RankedList> lists = {list};
    const int k = 1 + static_cast<int>(rng.next_below(6));
    const double lhs = precision_at_k(lists, truth, k) * k;
    const double rhs = recall_at_k(lists, truth, k) * static_cast<double>(truth[0].size());
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("recommendations file and metrics report formats") {
  testsupport::TempDir dir("ranking");
  RankedList list;
  list.user = 3;
  list.items.push_back({7, 0.5f, 0.25f, false});
  list.items.push_back({2, 0.25f, 1.5f, true});
  write_recommendations(dir.file("recs.tsv"), {list});
  const std::string text = testsupport::read_text(dir.file("recs.tsv"));
  CHECK(text == "3\t1\t7\t0.5\t0.25\t0\n3\t2\t2\t0.25\t1.5\t1\n");

  GroundTruth truth(4);
  truth[3] = {7};
  const MetricsReport report = evaluate({list}, truth, {1, 2});
  const std::string formatted = format_metrics_report(report);
  CHECK(formatted.find("precision@1\t1.000000") != std::string::npos);
  CHECK(formatted.find("recall@2\t1.000000") != std::string::npos);
  CHECK(formatted.find("ndcg@1\t") != std::string::npos);
  CHECK(formatted.find("evaluated_users\t1") != std::string::npos);
}
