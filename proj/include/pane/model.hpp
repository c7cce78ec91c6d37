#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "pane/common.hpp"
#include "pane/graph.hpp"
#include "pane/rng.hpp"

namespace pane::model {

template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

/// Trainable tensors. Rows of the embedding matrices are users first, then
/// items. The weight matrices belong to the two-layer MLP and the attention
/// layer of the interest path.
template <typename S>
struct Params {
  Mat<S> interest0;     // (n_users + n_items) x dim
  Mat<S> disinterest0;  // (n_users + n_items) x dim
  Mat<S> mlp_w1;        // dim x dim
  Mat<S> mlp_w2;        // dim x dim
  Mat<S> att_w1;        // dim x dim
  Mat<S> att_w2;        // dim x 1

  Eigen::Index dim() const { return interest0.cols(); }
  Eigen::Index n_nodes() const { return interest0.rows(); }
};

/// Glorot (uniform) initialization: entries drawn from
/// [-sqrt(6/(rows+cols)), +sqrt(6/(rows+cols))], deterministic per stream.
template <typename S>
Mat<S> glorot_init(Eigen::Index rows, Eigen::Index cols, RngStream& rng) {
  if (rows < 1 || cols < 1) fail(ErrorCategory::config, "glorot_init: empty shape");
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Mat<S> m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = static_cast<S>((2.0 * rng.next_unit() - 1.0) * limit);
    }
  }
  return m;
}

template <typename S>
Params<S> init_params(std::uint32_t n_nodes, int dim, RngStream& rng) {
  Params<S> p;
  p.interest0 = glorot_init<S>(n_nodes, dim, rng);
  p.disinterest0 = glorot_init<S>(n_nodes, dim, rng);
  p.mlp_w1 = glorot_init<S>(dim, dim, rng);
  p.mlp_w2 = glorot_init<S>(dim, dim, rng);
  p.att_w1 = glorot_init<S>(dim, dim, rng);
  p.att_w2 = glorot_init<S>(dim, 1, rng);
  return p;
}

/// One light-graph-convolution step: row a of the result is
/// sum_{b in N(a)} x_b / (sqrt(deg a) * sqrt(deg b)). Nodes without neighbors
/// get the zero row; no self-loops. The operator is symmetric, so it is its
/// own adjoint in the backward pass.
template <typename S>
Mat<S> lgc_step(const graph::Adjacency& side, std::uint32_t n_users, const Mat<S>& x) {
  Mat<S> y = Mat<S>::Zero(x.rows(), x.cols());
  for (std::uint32_t u = 0; u < side.user_items.size(); ++u) {
    const auto du = static_cast<S>(side.user_degree(u));
    for (const std::uint32_t i : side.user_items[u]) {
      const auto di = static_cast<S>(side.item_degree(i));
      const S coeff = S(1) / (std::sqrt(du) * std::sqrt(di));
      y.row(u) += coeff * x.row(n_users + i);
    }
  }
  for (std::uint32_t i = 0; i < side.item_users.size(); ++i) {
    const auto di = static_cast<S>(side.item_degree(i));
    for (const std::uint32_t u : side.item_users[i]) {
      const auto du = static_cast<S>(side.user_degree(u));
      const S coeff = S(1) / (std::sqrt(di) * std::sqrt(du));
      y.row(n_users + i) += coeff * x.row(u);
    }
  }
  return y;
}

template <typename S>
struct Propagation {
  Mat<S> mean;                 // (1/(K+1)) * sum of all layers
  std::vector<Mat<S>> layers;  // layer 0 is x0
};

/// K rounds of LGC followed by the mean over layers 0..K.
template <typename S>
Propagation<S> propagate(const graph::Adjacency& side, std::uint32_t n_users,
                         const Mat<S>& x0, int layer_count) {
  if (layer_count < 0) fail(ErrorCategory::config, "propagate: layer count must be >= 0");
  Propagation<S> out;
  out.layers.reserve(static_cast<std::size_t>(layer_count) + 1);
  out.layers.push_back(x0);
  out.mean = x0;
  for (int k = 0; k < layer_count; ++k) {
    out.layers.push_back(lgc_step<S>(side, n_users, out.layers.back()));
    out.mean += out.layers.back();
  }
  out.mean *= S(1) / static_cast<S>(layer_count + 1);
  return out;
}

/// Gradient with respect to x0 given the gradient with respect to the layer
/// mean. Uses d x^{(k)} = g/(K+1) + A^T d x^{(k+1)} with A symmetric.
template <typename S>
Mat<S> propagate_backward(const graph::Adjacency& side, std::uint32_t n_users,
                          const Mat<S>& grad_mean, int layer_count) {
  const S inv = S(1) / static_cast<S>(layer_count + 1);
  Mat<S> acc = inv * grad_mean;
  for (int k = 0; k < layer_count; ++k) {
    acc = lgc_step<S>(side, n_users, acc);
    acc += inv * grad_mean;
  }
  return acc;
}

/// Pre-drawn inverted-scaling dropout masks, applied to the MLP hidden
/// activation and the attention scores in train mode only. Keeping the masks
/// in a plan lets a backward pass (and a finite-difference probe) reuse the
/// exact masks of the forward pass.
template <typename S>
struct DropoutPlan {
  bool enabled = false;
  S keep_scale = S(1);  // 1/(1-rate)
  Mat<S> hidden_mask;   // n_nodes x dim, entries in {0,1}
  Vec<S> score_mask1;   // one entry per attention score
  Vec<S> score_mask2;
};

template <typename S>
DropoutPlan<S> make_dropout_plan(Eigen::Index n_nodes, Eigen::Index dim, double rate,
                                 bool global_attention, RngStream& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    fail(ErrorCategory::config, "dropout rate must lie in [0, 1)");
  }
  DropoutPlan<S> plan;
  if (rate == 0.0) return plan;
  plan.enabled = true;
  plan.keep_scale = static_cast<S>(1.0 / (1.0 - rate));
  plan.hidden_mask = Mat<S>::Zero(n_nodes, dim);
  for (Eigen::Index r = 0; r < n_nodes; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      plan.hidden_mask(r, c) = rng.next_unit() >= rate ? S(1) : S(0);
    }
  }
  const Eigen::Index scores = global_attention ? 1 : n_nodes;
  plan.score_mask1 = Vec<S>::Zero(scores);
  plan.score_mask2 = Vec<S>::Zero(scores);
  for (Eigen::Index r = 0; r < scores; ++r) {
    plan.score_mask1(r) = rng.next_unit() >= rate ? S(1) : S(0);
    plan.score_mask2(r) = rng.next_unit() >= rate ? S(1) : S(0);
  }
  return plan;
}

template <typename S>
struct MlpResult {
  Mat<S> pre1;            // x0 * w1
  Mat<S> hidden;          // relu(pre1)
  Mat<S> hidden_dropped;  // dropout(hidden) in train mode, else == hidden
  Mat<S> pre2;            // hidden_dropped * w2
  Mat<S> out;             // relu(pre2)
};

/// Two-layer MLP with ReLU activations transforming the initial interest
/// embeddings. ReLU subgradient at exactly zero is zero.
template <typename S>
MlpResult<S> mlp_transform(const Mat<S>& x0, const Mat<S>& w1, const Mat<S>& w2,
                           const DropoutPlan<S>* plan) {
  MlpResult<S> r;
  r.pre1 = x0 * w1;
  r.hidden = r.pre1.cwiseMax(S(0));
  if (plan && plan->enabled) {
    r.hidden_dropped = r.hidden.cwiseProduct(plan->hidden_mask) * plan->keep_scale;
  } else {
    r.hidden_dropped = r.hidden;
  }
  r.pre2 = r.hidden_dropped * w2;
  r.out = r.pre2.cwiseMax(S(0));
  return r;
}

template <typename S>
void mlp_backward(const MlpResult<S>& fwd, const Mat<S>& x0, const Mat<S>& w1,
                  const Mat<S>& w2, const DropoutPlan<S>* plan, const Mat<S>& d_out,
                  Mat<S>& d_x0, Mat<S>& d_w1, Mat<S>& d_w2) {
  const Mat<S> d_pre2 =
      d_out.cwiseProduct((fwd.pre2.array() > S(0)).template cast<S>().matrix());
  d_w2 += fwd.hidden_dropped.transpose() * d_pre2;
  Mat<S> d_hidden = d_pre2 * w2.transpose();
  if (plan && plan->enabled) {
    d_hidden = d_hidden.cwiseProduct(plan->hidden_mask) * plan->keep_scale;
  }
  const Mat<S> d_pre1 =
      d_hidden.cwiseProduct((fwd.pre1.array() > S(0)).template cast<S>().matrix());
  d_w1 += x0.transpose() * d_pre1;
  d_x0 += d_pre1 * w1.transpose();
}

template <typename S>
struct AttentionResult {
  Mat<S> tanh1;            // tanh(z_prop * w1)
  Mat<S> tanh2;            // tanh(z_mlp * w1)
  Vec<S> score1;           // tanh1 * w2, before dropout
  Vec<S> score2;
  Vec<S> score1_dropped;   // softmax inputs
  Vec<S> score2_dropped;
  Mat<S> alpha;            // n x 2, rows sum to 1
  Mat<S> fused;            // alpha1 .* z_prop + alpha2 .* z_mlp
};

/// Scores the propagated and the MLP-transformed interest embeddings and
/// fuses them with a two-way softmax. Per-node scores by default; the global
/// mode pools scores over rows before the softmax, yielding one shared pair
/// of weights.
template <typename S>
AttentionResult<S> attention_fuse(const Mat<S>& z_prop, const Mat<S>& z_mlp,
                                  const Mat<S>& w1, const Mat<S>& w2,
                                  const DropoutPlan<S>* plan, bool global) {
  AttentionResult<S> r;
  r.tanh1 = (z_prop * w1).array().tanh().matrix();
  r.tanh2 = (z_mlp * w1).array().tanh().matrix();
  Vec<S> s1 = r.tanh1 * w2;
  Vec<S> s2 = r.tanh2 * w2;
  if (global) {
    const S inv = S(1) / static_cast<S>(s1.size());
    const S m1 = s1.sum() * inv;
    const S m2 = s2.sum() * inv;
    s1 = Vec<S>::Constant(1, m1);
    s2 = Vec<S>::Constant(1, m2);
  }
  r.score1 = s1;
  r.score2 = s2;
  if (plan && plan->enabled) {
    r.score1_dropped = s1.cwiseProduct(plan->score_mask1) * plan->keep_scale;
    r.score2_dropped = s2.cwiseProduct(plan->score_mask2) * plan->keep_scale;
  } else {
    r.score1_dropped = s1;
    r.score2_dropped = s2;
  }

  const Eigen::Index n = z_prop.rows();
  r.alpha = Mat<S>(n, 2);
  r.fused = Mat<S>(n, z_prop.cols());
  for (Eigen::Index row = 0; row < n; ++row) {
    const Eigen::Index s = global ? 0 : row;
    const S a = r.score1_dropped(s);
    const S b = r.score2_dropped(s);
    const S m = a > b ? a : b;
    const S ea = std::exp(a - m);
    const S eb = std::exp(b - m);
    const S a1 = ea / (ea + eb);
    const S a2 = eb / (ea + eb);
    r.alpha(row, 0) = a1;
    r.alpha(row, 1) = a2;
    r.fused.row(row) = a1 * z_prop.row(row) + a2 * z_mlp.row(row);
  }
  return r;
}

template <typename S>
void attention_backward(const AttentionResult<S>& fwd, const Mat<S>& z_prop,
                        const Mat<S>& z_mlp, const Mat<S>& w1, const Mat<S>& w2,
                        const DropoutPlan<S>* plan, bool global, const Mat<S>& d_fused,
                        Mat<S>& d_z_prop, Mat<S>& d_z_mlp, Mat<S>& d_w1, Mat<S>& d_w2) {
  const Eigen::Index n = z_prop.rows();
  const Eigen::Index scores = global ? 1 : n;
  Vec<S> d_s1 = Vec<S>::Zero(scores);
  Vec<S> d_s2 = Vec<S>::Zero(scores);

  for (Eigen::Index row = 0; row < n; ++row) {
    const S a1 = fwd.alpha(row, 0);
    const S a2 = fwd.alpha(row, 1);
    const S d_a1 = d_fused.row(row).dot(z_prop.row(row));
    const S d_a2 = d_fused.row(row).dot(z_mlp.row(row));
    d_z_prop.row(row) += a1 * d_fused.row(row);
    d_z_mlp.row(row) += a2 * d_fused.row(row);
    // softmax backward over the two scores of this row
    const S g = a1 * d_a1 + a2 * d_a2;
    const Eigen::Index s = global ? 0 : row;
    d_s1(s) += a1 * (d_a1 - g);
    d_s2(s) += a2 * (d_a2 - g);
  }

  if (plan && plan->enabled) {
    d_s1 = d_s1.cwiseProduct(plan->score_mask1) * plan->keep_scale;
    d_s2 = d_s2.cwiseProduct(plan->score_mask2) * plan->keep_scale;
  }

  Vec<S> d_s1_rows;
  Vec<S> d_s2_rows;
  if (global) {
    const S inv = S(1) / static_cast<S>(n);
    d_s1_rows = Vec<S>::Constant(n, d_s1(0) * inv);
    d_s2_rows = Vec<S>::Constant(n, d_s2(0) * inv);
  } else {
    d_s1_rows = d_s1;
    d_s2_rows = d_s2;
  }

  // score = tanh(x * w1) * w2 per branch
  d_w2 += fwd.tanh1.transpose() * d_s1_rows + fwd.tanh2.transpose() * d_s2_rows;
  const Mat<S> d_tanh1 = d_s1_rows * w2.transpose();
  const Mat<S> d_tanh2 = d_s2_rows * w2.transpose();
  const Mat<S> d_pre1 =
      d_tanh1.cwiseProduct((Mat<S>::Ones(n, z_prop.cols()) - fwd.tanh1.cwiseProduct(fwd.tanh1)));
  const Mat<S> d_pre2 =
      d_tanh2.cwiseProduct((Mat<S>::Ones(n, z_mlp.cols()) - fwd.tanh2.cwiseProduct(fwd.tanh2)));
  d_w1 += z_prop.transpose() * d_pre1 + z_mlp.transpose() * d_pre2;
  d_z_prop += d_pre1 * w1.transpose();
  d_z_mlp += d_pre2 * w1.transpose();
}

struct ForwardOptions {
  int layers = 4;
  bool train_mode = false;
  bool global_attention = false;
  bool need_interest = true;     // propagate on the positive graph + MLP + attention
  bool need_disinterest = true;  // propagate on the negative graph
  bool need_distorted = false;   // propagate on the distorted graph (train only)
};

/// Forward pass output: the embedding set (fused interest z, disinterest v,
/// distorted-view v_tilde, attention weights) plus the intermediates the
/// backward pass needs.
template <typename S>
struct ForwardResult {
  Mat<S> z_prop;  // interest embeddings propagated on the positive graph
  MlpResult<S> mlp;
  AttentionResult<S> attention;
  Mat<S> z;        // fused interest embeddings
  Mat<S> v;        // disinterest embeddings (negative graph)
  Mat<S> v_tilde;  // disinterest embeddings on the distorted graph
  bool has_interest = false;
  bool has_disinterest = false;
  bool has_v_tilde = false;

  const Mat<S>& z_mlp() const { return mlp.out; }
  const Mat<S>& alpha() const { return attention.alpha; }
};

/// Composes propagation, the MLP transform, and attention fusion. The
/// distorted view shares the initial disinterest embeddings. Deterministic in
/// eval mode (no dropout, no distorted view).
template <typename S>
ForwardResult<S> forward(const Params<S>& params, const graph::SignedBipartiteGraph& graph,
                         const graph::DistortedGraph* distorted, const ForwardOptions& options,
                         const DropoutPlan<S>* plan) {
  if (options.need_distorted && distorted == nullptr) {
    fail(ErrorCategory::config, "forward: distorted graph required but not provided");
  }
  const DropoutPlan<S>* active_plan = options.train_mode ? plan : nullptr;

  ForwardResult<S> r;
  if (options.need_interest) {
    r.z_prop = propagate<S>(graph.positive, graph.n_users, params.interest0, options.layers).mean;
    r.mlp = mlp_transform<S>(params.interest0, params.mlp_w1, params.mlp_w2, active_plan);
    r.attention = attention_fuse<S>(r.z_prop, r.mlp.out, params.att_w1, params.att_w2,
                                    active_plan, options.global_attention);
    r.z = r.attention.fused;
    r.has_interest = true;
  }
  if (options.need_disinterest) {
    r.v = propagate<S>(graph.negative, graph.n_users, params.disinterest0, options.layers).mean;
    r.has_disinterest = true;
  }
  if (options.need_distorted && options.train_mode) {
    r.v_tilde =
        propagate<S>(distorted->adj, graph.n_users, params.disinterest0, options.layers).mean;
    r.has_v_tilde = true;
  }
  return r;
}

// Checkpoint: magic "PANE", version u32, n_nodes, dim, n_users, n_items, then
// the six tensors row-major as IEEE-754 float32, little-endian.
struct Checkpoint {
  Params<float> params;
  std::uint32_t n_users = 0;
  std::uint32_t n_items = 0;
};

void save_checkpoint(const std::string& path, const Params<float>& params,
                     std::uint32_t n_users, std::uint32_t n_items);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace pane::model
