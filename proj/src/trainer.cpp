#include "pane/trainer.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <sstream>

#include "pane/optimizer.hpp"
#include "pane/ranking.hpp"

namespace pane::trainer {

void HyperParams::validate() const {
  if (embedding_dim < 1) fail(ErrorCategory::config, "embedding_dim must be >= 1");
  if (gnn_layers < 0) fail(ErrorCategory::config, "gnn_layers must be >= 0");
  if (!(edge_drop_prob >= 0.0 && edge_drop_prob <= 1.0)) {
    fail(ErrorCategory::config, "edge_drop_prob must lie in [0, 1]");
  }
  if (!(feedback_coeff >= 1.0)) {
    fail(ErrorCategory::config, "feedback_coeff must be >= 1 (1 only for ablations)");
  }
  if (!(temperature > 0.0)) fail(ErrorCategory::config, "temperature must be > 0");
  if (contrastive_weight < 0.0 || reg_weight < 0.0) {
    fail(ErrorCategory::config, "loss coefficients must be >= 0");
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    fail(ErrorCategory::config, "dropout_rate must lie in [0, 1)");
  }
  if (batch_size < 1) fail(ErrorCategory::config, "batch_size must be >= 1");
  if (epochs < 0) fail(ErrorCategory::config, "epochs must be >= 0");
  if (neg_samples_per_edge < 1) fail(ErrorCategory::config, "neg_samples_per_edge must be >= 1");
  if (!(learning_rate > 0.0)) fail(ErrorCategory::config, "learning_rate must be > 0");
}

namespace {

void sample_side(const graph::Adjacency& side, std::uint32_t n_items, int per_edge,
                 RngStream& rng, std::vector<loss::Triple>& out) {
  for (std::uint32_t u = 0; u < side.user_items.size(); ++u) {
    const auto& neighbors = side.user_items[u];
    if (neighbors.empty()) continue;
    if (neighbors.size() == n_items) {
      std::cerr << "warning: user " << u
                << " is adjacent to every item on one side; skipping its edges\n";
      continue;
    }
    for (const std::uint32_t item : neighbors) {
      for (int s = 0; s < per_edge; ++s) {
        std::uint32_t j;
        do {
          j = rng.next_below(n_items);
        } while (std::binary_search(neighbors.begin(), neighbors.end(), j));
        out.push_back({u, item, j});
      }
    }
  }
}

std::vector<loss::Batch> cut_batches(std::vector<loss::Triple>& triples, int batch_size,
                                     RngStream& rng) {
  rng.shuffle(triples);
  std::vector<loss::Batch> batches;
  for (std::size_t start = 0; start < triples.size(); start += batch_size) {
    const std::size_t stop = std::min(triples.size(), start + batch_size);
    batches.emplace_back(triples.begin() + start, triples.begin() + stop);
  }
  return batches;
}

std::string describe_batch(const loss::Batch& batch) {
  std::ostringstream out;
  const std::size_t show = std::min<std::size_t>(batch.size(), 16);
  for (std::size_t i = 0; i < show; ++i) {
    out << " (" << batch[i].user << "," << batch[i].observed << "," << batch[i].sampled << ")";
  }
  if (batch.size() > show) out << " ... " << batch.size() << " triples total";
  return out.str();
}

double validation_recall(const model::Params<float>& params,
                         const graph::SignedBipartiteGraph& graph,
                         const ranking::GroundTruth& truth, const HyperParams& hp,
                         const TrainOptions& options) {
  model::ForwardOptions fo;
  fo.layers = hp.gnn_layers;
  fo.train_mode = false;
  fo.global_attention = options.global_attention;
  const loss::TermSwitches sw = loss::TermSwitches::for_variant(options.variant);
  fo.need_interest = sw.positive_side;
  fo.need_disinterest = true;
  const model::ForwardResult<float> emb =
      model::forward<float>(params, graph, nullptr, fo, nullptr);

  ranking::RecommendOptions ro;
  ro.list_size = 10;
  std::vector<ranking::RankedList> lists;
  for (std::uint32_t u = 0; u < graph.n_users; ++u) {
    if (truth[u].empty()) continue;
    lists.push_back(
        ranking::recommend(u, ranking::score_user(emb, graph, u, options.variant), ro));
  }
  return ranking::recall_at_k(lists, truth, 10);
}

}  // namespace

EpochBatches sample_batches(const graph::SignedBipartiteGraph& graph, int neg_samples_per_edge,
                            int batch_size, RngStream& rng) {
  std::vector<loss::Triple> positive;
  std::vector<loss::Triple> negative;
  sample_side(graph.positive, graph.n_items, neg_samples_per_edge, rng, positive);
  sample_side(graph.negative, graph.n_items, neg_samples_per_edge, rng, negative);

  EpochBatches epoch;
  epoch.positive = cut_batches(positive, batch_size, rng);
  epoch.negative = cut_batches(negative, batch_size, rng);
  return epoch;
}

std::string format_epoch_log(const std::vector<EpochLog>& log) {
  std::ostringstream out;
  out.precision(8);
  for (const EpochLog& e : log) {
    out << e.epoch << '\t' << e.total << '\t' << e.ranking << '\t' << e.contrastive << '\t'
        << e.regularization << '\t' << e.wall_ms << '\n';
  }
  return out.str();
}

TrainResult train(const graph::SignedBipartiteGraph& graph, const HyperParams& hp,
                  const TrainOptions& options, const CheckpointSink& periodic) {
  hp.validate();
  const loss::TermSwitches switches = loss::TermSwitches::for_variant(options.variant);

  // Early stopping carves a 5% validation holdout from the training positives.
  const graph::SignedBipartiteGraph* train_graph = &graph;
  graph::SignedBipartiteGraph holdout_graph;
  ranking::GroundTruth validation_truth;
  if (options.early_stop) {
    std::vector<datasets::SignedEdge> kept;
    validation_truth.assign(graph.n_users, {});
    RngStream rng = derive_stream(hp.seed, StreamPurpose::split);
    for (std::uint32_t u = 0; u < graph.n_users; ++u) {
      for (const std::uint32_t i : graph.positive.user_items[u]) {
        if (rng.next_unit() < 0.05) {
          validation_truth[u].push_back(i);
        } else {
          kept.push_back({u, i, datasets::Sign::positive});
        }
      }
      for (const std::uint32_t i : graph.negative.user_items[u]) {
        kept.push_back({u, i, datasets::Sign::negative});
      }
    }
    holdout_graph = graph::build(kept, graph.n_users, graph.n_items);
    train_graph = &holdout_graph;
  }

  RngStream init_rng = derive_stream(hp.seed, StreamPurpose::init);
  TrainResult result;
  result.params =
      model::init_params<float>(train_graph->n_nodes(), hp.embedding_dim, init_rng);

  graph::DistortedGraph distorted;
  if (switches.contrastive) {
    distorted = graph::distort(*train_graph, hp.edge_drop_prob, hp.seed);
  }

  optimizer::AdamState<float> adam = optimizer::AdamState<float>::zeros_like(result.params);
  optimizer::AdamConfig<float> adam_cfg;
  adam_cfg.learning_rate = static_cast<float>(hp.learning_rate);

  loss::StepInputs<float> inputs;
  inputs.graph = train_graph;
  inputs.coeff.feedback_coeff = static_cast<float>(hp.feedback_coeff);
  inputs.coeff.temperature = static_cast<float>(hp.temperature);
  inputs.coeff.contrastive_weight = static_cast<float>(hp.contrastive_weight);
  inputs.coeff.reg_weight = static_cast<float>(hp.reg_weight);
  inputs.switches = switches;

  const model::ForwardOptions fwd_options =
      loss::forward_options_for(inputs, hp.gnn_layers, /*train_mode=*/true,
                                options.global_attention);

  double best_recall = -1.0;
  int epochs_since_best = 0;
  model::Params<float> best_params = result.params;
  std::uint64_t step_counter = 0;

  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    if (switches.contrastive && options.distort_per_epoch) {
      distorted = graph::distort(*train_graph, hp.edge_drop_prob,
                                 hp.seed + static_cast<std::uint64_t>(epoch) + 1);
    }
    inputs.distorted = switches.contrastive ? &distorted : nullptr;

    RngStream sampling_rng = derive_stream(hp.seed, StreamPurpose::sampling,
                                           static_cast<std::uint64_t>(epoch));
    EpochBatches batches =
        sample_batches(*train_graph, hp.neg_samples_per_edge, hp.batch_size, sampling_rng);

    if (options.step_per_epoch) {
      // Literal schedule: one update over the whole epoch's training sets.
      loss::Batch all_pos;
      loss::Batch all_neg;
      for (const auto& b : batches.positive) all_pos.insert(all_pos.end(), b.begin(), b.end());
      for (const auto& b : batches.negative) all_neg.insert(all_neg.end(), b.begin(), b.end());
      batches.positive.clear();
      batches.negative.clear();
      if (!all_pos.empty()) batches.positive.push_back(std::move(all_pos));
      if (!all_neg.empty()) batches.negative.push_back(std::move(all_neg));
    }

    const std::size_t steps = batches.steps();
    EpochLog log;
    log.epoch = epoch;

    static const loss::Batch kEmpty;
    for (std::size_t step = 0; step < steps; ++step) {
      const loss::Batch& bp =
          batches.positive.empty() ? kEmpty : batches.positive[step % batches.positive.size()];
      const loss::Batch& bn =
          batches.negative.empty() ? kEmpty : batches.negative[step % batches.negative.size()];
      inputs.positive_batch = &bp;
      inputs.negative_batch = &bn;

      RngStream dropout_rng = derive_stream(hp.seed, StreamPurpose::dropout, step_counter++);
      const model::DropoutPlan<float> plan = model::make_dropout_plan<float>(
          train_graph->n_nodes(), hp.embedding_dim, hp.dropout_rate, options.global_attention,
          dropout_rng);

      loss::ParamGrads<float> grads = loss::ParamGrads<float>::zeros_like(result.params);
      const loss::LossValue<float> value =
          loss::evaluate_loss_grad<float>(result.params, inputs, fwd_options, &plan, grads);

      if (!std::isfinite(value.total)) {
        std::cerr << "non-finite loss at epoch " << epoch << " step " << step
                  << ": ranking=" << value.ranking << " contrastive=" << value.contrastive
                  << " reg=" << value.regularization << "\n positive batch:" << describe_batch(bp)
                  << "\n negative batch:" << describe_batch(bn) << '\n';
        fail(ErrorCategory::numeric, "training aborted: non-finite loss at epoch " +
                                         std::to_string(epoch) + " step " +
                                         std::to_string(step));
      }

      optimizer::adam_step<float>(result.params, grads, adam, adam_cfg);

      log.total += value.total;
      log.ranking += value.ranking;
      log.contrastive += value.contrastive;
      log.regularization += value.regularization;
    }

    if (steps > 0) {
      const double inv = 1.0 / static_cast<double>(steps);
      log.total *= inv;
      log.ranking *= inv;
      log.contrastive *= inv;
      log.regularization *= inv;
    }
    log.wall_ms = static_cast<long>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                        std::chrono::steady_clock::now() - t0)
                                        .count());
    result.log.push_back(log);
    result.epochs_run = epoch + 1;

    if (options.checkpoint_every > 0 && periodic && (epoch + 1) % options.checkpoint_every == 0) {
      periodic(epoch + 1, result.params);
    }

    if (options.early_stop) {
      const double recall =
          validation_recall(result.params, *train_graph, validation_truth, hp, options);
      if (recall > best_recall) {
        best_recall = recall;
        best_params = result.params;
        epochs_since_best = 0;
      } else if (++epochs_since_best >= options.early_stop_patience) {
        result.params = best_params;
        break;
      }
    }
  }

  if (options.early_stop && best_recall >= 0.0) result.params = best_params;
  return result;
}

}  // namespace pane::trainer
