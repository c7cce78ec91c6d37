#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pane/graph.hpp"
#include "pane/loss.hpp"
#include "pane/model.hpp"

namespace pane::trainer {

/// Every training knob. Defaults follow the reference configuration for the
/// explicit-rating datasets (the implicit-log setup differs only in
/// reg_weight = 0.01 and neg_samples_per_edge = 1).
struct HyperParams {
  int embedding_dim = 64;
  int gnn_layers = 4;
  double edge_drop_prob = 0.1;
  double feedback_coeff = 2.0;      // must be >= 1; > 1 outside ablations
  double filter_threshold = 0.5;
  double contrastive_weight = 0.1;  // lambda_1
  double reg_weight = 0.05;         // lambda_2
  double temperature = 0.8;         // tau
  double learning_rate = 5e-3;
  int batch_size = 1024;
  int epochs = 1000;
  int neg_samples_per_edge = 40;
  double dropout_rate = 0.5;
  std::uint64_t seed = 42;

  void validate() const;
};

struct TrainOptions {
  Variant variant = Variant::full;
  bool distort_per_epoch = false;  // default: distort once before the loop
  bool global_attention = false;   // one shared attention weight pair
  bool step_per_epoch = false;     // one update over all batches per epoch
  bool early_stop = false;
  int early_stop_patience = 50;
  int checkpoint_every = 0;  // epochs between periodic checkpoints; 0 = none
};

/// Per-edge training triples for one epoch, shuffled and cut into batches.
struct EpochBatches {
  std::vector<loss::Batch> positive;
  std::vector<loss::Batch> negative;

  std::size_t steps() const { return std::max(positive.size(), negative.size()); }
};

/// Draws neg_samples_per_edge triples per observed edge with the counterpart
/// item sampled uniformly outside the user's same-side neighbor set
/// (resampling on collision). Users adjacent to every item on a side are
/// skipped with a warning on stderr.
EpochBatches sample_batches(const graph::SignedBipartiteGraph& graph, int neg_samples_per_edge,
                            int batch_size, RngStream& rng);

struct EpochLog {
  int epoch = 0;
  double total = 0.0;
  double ranking = 0.0;
  double contrastive = 0.0;
  double regularization = 0.0;
  long wall_ms = 0;
};

std::string format_epoch_log(const std::vector<EpochLog>& log);

struct TrainResult {
  model::Params<float> params;
  std::vector<EpochLog> log;
  int epochs_run = 0;
};

using CheckpointSink = std::function<void(int epoch, const model::Params<float>&)>;

/// Full training loop: Glorot init, one distortion of the negative graph,
/// then per mini-batch pair a fresh forward pass, the total loss, and one
/// Adam step. Deterministic for a fixed seed. Throws ErrorCategory::numeric
/// with a dump of the offending batch when the loss stops being finite.
TrainResult train(const graph::SignedBipartiteGraph& graph, const HyperParams& hp,
                  const TrainOptions& options, const CheckpointSink& periodic = {});

}  // namespace pane::trainer
