#pragma once

#include <cstdint>
#include <vector>

#include "pane/model.hpp"

namespace pane::loss {

using model::Mat;
using model::Vec;

/// One ranking example: an observed edge (user, observed) plus an item
/// sampled from outside the user's neighbor set on the same graph side.
struct Triple {
  std::uint32_t user = 0;
  std::uint32_t observed = 0;  // item index
  std::uint32_t sampled = 0;   // item index, not adjacent to user on this side
};

using Batch = std::vector<Triple>;

/// Numerically stable ln(sigmoid(x)) = -softplus(-x).
template <typename S>
S log_sigmoid(S x) {
  if (x >= S(0)) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

/// Which loss terms a variant trains. The regularizer follows the embedding
/// tensors that are actually in play, so e.g. variant b never touches the
/// disinterest embeddings at all.
struct TermSwitches {
  bool positive_side = true;  // B_p term of the ranking loss, interest path
  bool negative_side = true;  // B_n term, disinterest path
  bool contrastive = true;    // InfoNCE over the negative and distorted views

  static TermSwitches for_variant(Variant v) {
    switch (v) {
      case Variant::a: return {false, true, false};
      case Variant::b: return {true, false, false};
      case Variant::c: return {true, true, false};
      case Variant::d:
      case Variant::full: return {true, true, true};
    }
    return {};
  }
};

/// Dual feedback-aware pairwise ranking loss:
///   -sum_{B_p} ln sigmoid(z_u.z_i - z_u.z_j)
///   -sum_{B_n} ln sigmoid(v_u.v_j - b * v_u.v_i)
/// The feedback coefficient b scales the observed score on the negative side,
/// enforcing positive feedback > negative feedback > no feedback.
template <typename S>
S db_bpr_loss(const Batch& positive, const Batch& negative, const Mat<S>& z, const Mat<S>& v,
              std::uint32_t n_users, S feedback_coeff) {
  S total = S(0);
  for (const Triple& t : positive) {
    const auto obs = z.row(t.user).dot(z.row(n_users + t.observed));
    const auto smp = z.row(t.user).dot(z.row(n_users + t.sampled));
    total -= log_sigmoid<S>(obs - smp);
  }
  for (const Triple& t : negative) {
    const auto obs = feedback_coeff * v.row(t.user).dot(v.row(n_users + t.observed));
    const auto smp = v.row(t.user).dot(v.row(n_users + t.sampled));
    total -= log_sigmoid<S>(smp - obs);
  }
  return total;
}

/// Same value, accumulating gradients with respect to the fused interest and
/// disinterest embedding matrices.
template <typename S>
S db_bpr_loss_grad(const Batch& positive, const Batch& negative, const Mat<S>& z,
                   const Mat<S>& v, std::uint32_t n_users, S feedback_coeff, Mat<S>* d_z,
                   Mat<S>* d_v) {
  S total = S(0);
  for (const Triple& t : positive) {
    const Eigen::Index iu = t.user;
    const Eigen::Index io = n_users + t.observed;
    const Eigen::Index is = n_users + t.sampled;
    const S x = z.row(iu).dot(z.row(io)) - z.row(iu).dot(z.row(is));
    total -= log_sigmoid<S>(x);
    // d(-ln sigmoid(x))/dx = sigmoid(x) - 1
    const S w = S(1) / (S(1) + std::exp(-x)) - S(1);
    d_z->row(iu) += w * (z.row(io) - z.row(is));
    d_z->row(io) += w * z.row(iu);
    d_z->row(is) -= w * z.row(iu);
  }
  for (const Triple& t : negative) {
    const Eigen::Index iu = t.user;
    const Eigen::Index io = n_users + t.observed;
    const Eigen::Index is = n_users + t.sampled;
    const S x = v.row(iu).dot(v.row(is)) - feedback_coeff * v.row(iu).dot(v.row(io));
    total -= log_sigmoid<S>(x);
    const S w = S(1) / (S(1) + std::exp(-x)) - S(1);
    d_v->row(iu) += w * (v.row(is) - feedback_coeff * v.row(io));
    d_v->row(is) += w * v.row(iu);
    d_v->row(io) -= w * feedback_coeff * v.row(iu);
  }
  return total;
}

namespace detail {

// InfoNCE over one node block: anchors are rows of `a` (negative-graph view),
// candidates rows of `b` (distorted view). Each anchor's denominator ranges
// over every candidate in the block.
template <typename S>
S infonce_block(const Eigen::Ref<const Mat<S>>& a, const Eigen::Ref<const Mat<S>>& b, S tau,
                Mat<S>* d_a, Mat<S>* d_b) {
  const Eigen::Index n = a.rows();
  if (n == 0) return S(0);
  Mat<S> logits = (a * b.transpose()) / tau;

  S total = S(0);
  Mat<S> softmax(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const S m = logits.row(r).maxCoeff();
    const Vec<S> e = (logits.row(r).array() - m).exp().matrix().transpose();
    const S sum = e.sum();
    total += m + std::log(sum) - logits(r, r);
    if (d_a != nullptr) softmax.row(r) = (e / sum).transpose();
  }
  if (d_a != nullptr) {
    softmax.diagonal().array() -= S(1);  // d total / d logits
    *d_a += (softmax * b) / tau;
    *d_b += (softmax.transpose() * a) / tau;
  }
  return total;
}

}  // namespace detail

/// Contrastive loss between the negative-graph and distorted-graph
/// disinterest embeddings: a user-block term plus an item-block term, each
/// with denominators over the entire block.
template <typename S>
S infonce_loss(const Mat<S>& v, const Mat<S>& v_tilde, std::uint32_t n_users, S tau) {
  if (!(tau > S(0))) fail(ErrorCategory::config, "temperature must be positive");
  const Eigen::Index n_items = v.rows() - n_users;
  return detail::infonce_block<S>(v.topRows(n_users), v_tilde.topRows(n_users), tau,
                                  nullptr, nullptr) +
         detail::infonce_block<S>(v.bottomRows(n_items), v_tilde.bottomRows(n_items), tau,
                                  nullptr, nullptr);
}

template <typename S>
S infonce_loss_grad(const Mat<S>& v, const Mat<S>& v_tilde, std::uint32_t n_users, S tau,
                    Mat<S>* d_v, Mat<S>* d_v_tilde) {
  if (!(tau > S(0))) fail(ErrorCategory::config, "temperature must be positive");
  const Eigen::Index n_items = v.rows() - n_users;
  Mat<S> d_vu = Mat<S>::Zero(n_users, v.cols());
  Mat<S> d_vtu = Mat<S>::Zero(n_users, v.cols());
  Mat<S> d_vi = Mat<S>::Zero(n_items, v.cols());
  Mat<S> d_vti = Mat<S>::Zero(n_items, v.cols());
  const S user_term = detail::infonce_block<S>(v.topRows(n_users), v_tilde.topRows(n_users),
                                               tau, &d_vu, &d_vtu);
  const S item_term = detail::infonce_block<S>(v.bottomRows(n_items),
                                               v_tilde.bottomRows(n_items), tau, &d_vi, &d_vti);
  d_v->topRows(n_users) += d_vu;
  d_v->bottomRows(n_items) += d_vi;
  d_v_tilde->topRows(n_users) += d_vtu;
  d_v_tilde->bottomRows(n_items) += d_vti;
  return user_term + item_term;
}

/// Squared Frobenius norm of the 0-th layer embeddings. The neural-network
/// weights are not regularized.
template <typename S>
S l2_reg(const Mat<S>& interest0, const Mat<S>& disinterest0) {
  return interest0.squaredNorm() + disinterest0.squaredNorm();
}

template <typename S>
struct LossValue {
  S total = S(0);
  S ranking = S(0);         // dual feedback-aware BPR
  S contrastive = S(0);     // InfoNCE
  S regularization = S(0);  // squared Frobenius norm of active embeddings
};

template <typename S>
struct LossCoefficients {
  S feedback_coeff = S(2);      // b
  S temperature = S(0.8);       // tau
  S contrastive_weight = S(0);  // lambda_1
  S reg_weight = S(0);          // lambda_2
};

template <typename S>
struct ParamGrads {
  Mat<S> interest0, disinterest0, mlp_w1, mlp_w2, att_w1, att_w2;

  static ParamGrads zeros_like(const model::Params<S>& p) {
    ParamGrads g;
    g.interest0 = Mat<S>::Zero(p.interest0.rows(), p.interest0.cols());
    g.disinterest0 = Mat<S>::Zero(p.disinterest0.rows(), p.disinterest0.cols());
    g.mlp_w1 = Mat<S>::Zero(p.mlp_w1.rows(), p.mlp_w1.cols());
    g.mlp_w2 = Mat<S>::Zero(p.mlp_w2.rows(), p.mlp_w2.cols());
    g.att_w1 = Mat<S>::Zero(p.att_w1.rows(), p.att_w1.cols());
    g.att_w2 = Mat<S>::Zero(p.att_w2.rows(), p.att_w2.cols());
    return g;
  }
};

/// Everything one optimization step consumes besides the parameters.
template <typename S>
struct StepInputs {
  const graph::SignedBipartiteGraph* graph = nullptr;
  const graph::DistortedGraph* distorted = nullptr;  // required when contrastive is on
  const Batch* positive_batch = nullptr;             // may be null/empty
  const Batch* negative_batch = nullptr;
  LossCoefficients<S> coeff;
  TermSwitches switches;
};

template <typename S>
model::ForwardOptions forward_options_for(const StepInputs<S>& in, int layers,
                                          bool train_mode, bool global_attention) {
  model::ForwardOptions o;
  o.layers = layers;
  o.train_mode = train_mode;
  o.global_attention = global_attention;
  o.need_interest = in.switches.positive_side;
  o.need_disinterest = in.switches.negative_side || in.switches.contrastive;
  o.need_distorted = in.switches.contrastive && train_mode;
  return o;
}

template <typename S>
LossValue<S> loss_from_forward(const model::ForwardResult<S>& fwd, const model::Params<S>& params,
                               const StepInputs<S>& in, std::uint32_t n_users) {
  static const Batch kEmpty;
  const Batch& bp = in.switches.positive_side && in.positive_batch ? *in.positive_batch : kEmpty;
  const Batch& bn = in.switches.negative_side && in.negative_batch ? *in.negative_batch : kEmpty;

  LossValue<S> value;
  value.ranking = db_bpr_loss<S>(bp, bn, fwd.z, fwd.v, n_users, in.coeff.feedback_coeff);
  if (in.switches.contrastive && fwd.has_v_tilde) {
    value.contrastive = infonce_loss<S>(fwd.v, fwd.v_tilde, n_users, in.coeff.temperature);
  }
  value.regularization =
      (in.switches.positive_side ? params.interest0.squaredNorm() : S(0)) +
      (in.switches.negative_side || in.switches.contrastive ? params.disinterest0.squaredNorm()
                                                            : S(0));
  value.total = value.ranking + in.coeff.contrastive_weight * value.contrastive +
                in.coeff.reg_weight * value.regularization;
  return value;
}

/// Pure loss evaluation: runs the forward pass and returns the loss
/// components only. This is the function the finite-difference probe drives.
template <typename S>
LossValue<S> evaluate_loss(const model::Params<S>& params, const StepInputs<S>& in,
                           const model::ForwardOptions& options,
                           const model::DropoutPlan<S>* plan) {
  const model::ForwardResult<S> fwd =
      model::forward<S>(params, *in.graph, in.distorted, options, plan);
  return loss_from_forward<S>(fwd, params, in, in.graph->n_users);
}

/// Reverse-mode differentiation of the total loss with respect to every
/// trainable tensor, reusing the dropout masks of the forward pass. Gradients
/// are accumulated into `grads` (call with zeros for plain gradients).
template <typename S>
LossValue<S> evaluate_loss_grad(const model::Params<S>& params, const StepInputs<S>& in,
                                const model::ForwardOptions& options,
                                const model::DropoutPlan<S>* plan, ParamGrads<S>& grads) {
  const graph::SignedBipartiteGraph& g = *in.graph;
  const std::uint32_t n_users = g.n_users;
  const model::ForwardResult<S> fwd = model::forward<S>(params, g, in.distorted, options, plan);
  const model::DropoutPlan<S>* active_plan = options.train_mode ? plan : nullptr;

  static const Batch kEmpty;
  const Batch& bp = in.switches.positive_side && in.positive_batch ? *in.positive_batch : kEmpty;
  const Batch& bn = in.switches.negative_side && in.negative_batch ? *in.negative_batch : kEmpty;

  LossValue<S> value;

  Mat<S> d_z = Mat<S>::Zero(params.n_nodes(), params.dim());
  Mat<S> d_v = Mat<S>::Zero(params.n_nodes(), params.dim());
  Mat<S> d_v_tilde = Mat<S>::Zero(params.n_nodes(), params.dim());

  value.ranking =
      db_bpr_loss_grad<S>(bp, bn, fwd.z, fwd.v, n_users, in.coeff.feedback_coeff, &d_z, &d_v);

  if (in.switches.contrastive && fwd.has_v_tilde) {
    Mat<S> d_v_cl = Mat<S>::Zero(params.n_nodes(), params.dim());
    Mat<S> d_vt_cl = Mat<S>::Zero(params.n_nodes(), params.dim());
    value.contrastive = infonce_loss_grad<S>(fwd.v, fwd.v_tilde, n_users, in.coeff.temperature,
                                             &d_v_cl, &d_vt_cl);
    d_v += in.coeff.contrastive_weight * d_v_cl;
    d_v_tilde += in.coeff.contrastive_weight * d_vt_cl;
  }

  // Interest path: fused z -> (attention, MLP, propagation) -> interest0.
  if (in.switches.positive_side) {
    Mat<S> d_z_prop = Mat<S>::Zero(params.n_nodes(), params.dim());
    Mat<S> d_z_mlp = Mat<S>::Zero(params.n_nodes(), params.dim());
    model::attention_backward<S>(fwd.attention, fwd.z_prop, fwd.mlp.out, params.att_w1,
                                 params.att_w2, active_plan, options.global_attention, d_z,
                                 d_z_prop, d_z_mlp, grads.att_w1, grads.att_w2);
    model::mlp_backward<S>(fwd.mlp, params.interest0, params.mlp_w1, params.mlp_w2, active_plan,
                           d_z_mlp, grads.interest0, grads.mlp_w1, grads.mlp_w2);
    grads.interest0 +=
        model::propagate_backward<S>(g.positive, n_users, d_z_prop, options.layers);
    grads.interest0 += S(2) * in.coeff.reg_weight * params.interest0;
    value.regularization += params.interest0.squaredNorm();
  }

  // Disinterest path: both the negative-graph and distorted-graph views share
  // the same 0-th layer embeddings.
  if (in.switches.negative_side || in.switches.contrastive) {
    grads.disinterest0 += model::propagate_backward<S>(g.negative, n_users, d_v, options.layers);
    if (fwd.has_v_tilde) {
      grads.disinterest0 +=
          model::propagate_backward<S>(in.distorted->adj, n_users, d_v_tilde, options.layers);
    }
    grads.disinterest0 += S(2) * in.coeff.reg_weight * params.disinterest0;
    value.regularization += params.disinterest0.squaredNorm();
  }

  value.total = value.ranking + in.coeff.contrastive_weight * value.contrastive +
                in.coeff.reg_weight * value.regularization;
  return value;
}

}  // namespace pane::loss
