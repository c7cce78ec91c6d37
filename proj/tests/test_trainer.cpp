#include <doctest.h>

#include "pane/trainer.hpp"
#include "support/synthetic.hpp"

using namespace pane;
using namespace pane::trainer;
using datasets::Sign;

namespace {

graph::SignedBipartiteGraph small_graph() {
  testsupport::BlockSpec spec;
  spec.users_per_block = 8;
  spec.items_per_block = 16;
  spec.cohorts_per_block = 2;
  spec.negatives_per_user = 4;
  return testsupport::make_block_dataset(5, spec).train;
}

HyperParams small_hp(int epochs) {
  HyperParams hp;
  hp.embedding_dim = 8;
  hp.epochs = epochs;
  hp.batch_size = 128;
  hp.neg_samples_per_edge = 1;
  hp.seed = 99;
  return hp;
}

}  // namespace

TEST_CASE("hyperparameter validation") {
  HyperParams hp;
  hp.feedback_coeff = 0.5;
  CHECK_THROWS_AS(hp.validate(), Error);
  hp = HyperParams{};
  hp.temperature = 0.0;
  CHECK_THROWS_AS(hp.validate(), Error);
  hp = HyperParams{};
  hp.edge_drop_prob = 1.2;
  CHECK_THROWS_AS(hp.validate(), Error);
  hp = HyperParams{};
  hp.dropout_rate = 1.0;
  CHECK_THROWS_AS(hp.validate(), Error);
  CHECK_NOTHROW(HyperParams{}.validate());
}

TEST_CASE("training is bitwise reproducible for a fixed seed") {
  const auto g = small_graph();
  const HyperParams hp = small_hp(3);
  TrainOptions opts;
  opts.variant = Variant::full;

  const TrainResult a = train(g, hp, opts);
  const TrainResult b = train(g, hp, opts);
  REQUIRE(a.log.size() == b.log.size());
  for (std::size_t e = 0; e < a.log.size(); ++e) {
    CHECK(a.log[e].total == b.log[e].total);
    CHECK(a.log[e].ranking == b.log[e].ranking);
    CHECK(a.log[e].contrastive == b.log[e].contrastive);
  }
  CHECK((a.params.interest0 - b.params.interest0).cwiseAbs().maxCoeff() == 0.0f);
  CHECK((a.params.disinterest0 - b.params.disinterest0).cwiseAbs().maxCoeff() == 0.0f);
  CHECK((a.params.mlp_w1 - b.params.mlp_w1).cwiseAbs().maxCoeff() == 0.0f);
}

TEST_CASE("variant b never touches the disinterest embeddings") {
  const auto g = small_graph();
  const HyperParams hp = small_hp(3);
  TrainOptions opts;
  opts.variant = Variant::b;
  const TrainResult result = train(g, hp, opts);

  RngStream init_rng = derive_stream(hp.seed, StreamPurpose::init);
  const auto fresh = model::init_params<float>(g.n_nodes(), hp.embedding_dim, init_rng);
  CHECK((result.params.disinterest0 - fresh.disinterest0).cwiseAbs().maxCoeff() == 0.0f);
  CHECK((result.params.interest0 - fresh.interest0).cwiseAbs().maxCoeff() > 0.0f);
  for (const EpochLog& e : result.log) CHECK(e.contrastive == 0.0);
}

TEST_CASE("variant a never touches the interest path") {
  const auto g = small_graph();
  const HyperParams hp = small_hp(2);
  TrainOptions opts;
  opts.variant = Variant::a;
  const TrainResult result = train(g, hp, opts);

  RngStream init_rng = derive_stream(hp.seed, StreamPurpose::init);
  const auto fresh = model::init_params<float>(g.n_nodes(), hp.embedding_dim, init_rng);
  CHECK((result.params.interest0 - fresh.interest0).cwiseAbs().maxCoeff() == 0.0f);
  CHECK((result.params.mlp_w1 - fresh.mlp_w1).cwiseAbs().maxCoeff() == 0.0f);
  CHECK((result.params.disinterest0 - fresh.disinterest0).cwiseAbs().maxCoeff() > 0.0f);
}

TEST_CASE("a positives-only dataset trains under every variant that uses them") {
  std::vector<datasets::SignedEdge> edges;
  for (std::uint32_t u = 0; u < 6; ++u) {
    for (std::uint32_t i = 0; i < 4; ++i) edges.push_back({u, (u + i) % 8, Sign::positive});
  }
  const auto g = graph::build(edges, 6, 8);
  const HyperParams hp = small_hp(2);
  for (const Variant v : {Variant::b, Variant::c, Variant::d, Variant::full}) {
    TrainOptions opts;
    opts.variant = v;
    const TrainResult result = train(g, hp, opts);
    CHECK(result.epochs_run == 2);
    CHECK(std::isfinite(result.log.back().total));
  }
}

TEST_CASE("exploding learning rate aborts with a numeric diagnostic") {
  const auto g = small_graph();
  HyperParams hp = small_hp(4);
  hp.learning_rate = 1e30;
  TrainOptions opts;
  opts.variant = Variant::full;
  try {
    train(g, hp, opts);
    FAIL("expected a numeric abort");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::numeric);
    CHECK(std::string(e.what()).find("non-finite") != std::string::npos);
  }
}

TEST_CASE("step-per-epoch mode runs one update per epoch and stays deterministic") {
  const auto g = small_graph();
  const HyperParams hp = small_hp(3);
  TrainOptions opts;
  opts.variant = Variant::c;
  opts.step_per_epoch = true;
  const TrainResult a = train(g, hp, opts);
  const TrainResult b = train(g, hp, opts);
  CHECK(a.log.back().total == b.log.back().total);
  CHECK((a.params.interest0 - b.params.interest0).cwiseAbs().maxCoeff() == 0.0f);
}

TEST_CASE("per-epoch distortion stays reproducible") {
  const auto g = small_graph();
  const HyperParams hp = small_hp(3);
  TrainOptions opts;
  opts.variant = Variant::d;
  opts.distort_per_epoch = true;
  const TrainResult a = train(g, hp, opts);
  const TrainResult b = train(g, hp, opts);
  CHECK((a.params.disinterest0 - b.params.disinterest0).cwiseAbs().maxCoeff() == 0.0f);
}

TEST_CASE("early stopping halts on a converged task") {
  testsupport::BlockSpec spec;
  spec.users_per_block = 10;
  spec.items_per_block = 20;
  spec.cohorts_per_block = 2;
  spec.negatives_per_user = 4;
  const auto data = testsupport::make_block_dataset(7, spec);

  HyperParams hp = small_hp(200);
  TrainOptions opts;
  opts.variant = Variant::c;
  opts.early_stop = true;
  opts.early_stop_patience = 5;
  const TrainResult result = train(data.train, hp, opts);
  CHECK(result.epochs_run < 200);
}

TEST_CASE("periodic checkpoints fire on the requested cadence") {
  const auto g = small_graph();
  const HyperParams hp = small_hp(5);
  TrainOptions opts;
  opts.variant = Variant::c;
  opts.checkpoint_every = 2;
  std::vector<int> epochs_seen;
  train(g, hp, opts, [&](int epoch, const model::Params<float>&) {
    epochs_seen.push_back(epoch);
  });
  CHECK(epochs_seen == std::vector<int>{2, 4});
}
