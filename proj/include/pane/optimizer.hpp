#pragma once

#include "pane/loss.hpp"
#include "pane/model.hpp"

namespace pane::optimizer {

template <typename S>
struct AdamConfig {
  S learning_rate = S(5e-3);
  S beta1 = S(0.9);
  S beta2 = S(0.999);
  S epsilon = S(1e-8);
};

/// First/second moment accumulators, shaped like the parameters, plus the
/// step counter used for bias correction.
template <typename S>
struct AdamState {
  loss::ParamGrads<S> m;
  loss::ParamGrads<S> v;
  long step = 0;

  static AdamState zeros_like(const model::Params<S>& p) {
    return {loss::ParamGrads<S>::zeros_like(p), loss::ParamGrads<S>::zeros_like(p), 0};
  }
};

namespace detail {

template <typename S>
void update_tensor(model::Mat<S>& param, const model::Mat<S>& grad, model::Mat<S>& m,
                   model::Mat<S>& v, const AdamConfig<S>& cfg, S bias1, S bias2) {
  m = cfg.beta1 * m + (S(1) - cfg.beta1) * grad;
  v = cfg.beta2 * v + (S(1) - cfg.beta2) * grad.cwiseProduct(grad);
  const model::Mat<S> m_hat = m / bias1;
  const model::Mat<S> v_hat = v / bias2;
  param -= cfg.learning_rate * (m_hat.array() / (v_hat.array().sqrt() + cfg.epsilon)).matrix();
}

}  // namespace detail

/// Standard Adam with bias correction. A zero gradient leaves the parameters
/// unchanged (up to the epsilon guard) while still advancing the step count.
template <typename S>
void adam_step(model::Params<S>& params, const loss::ParamGrads<S>& grads, AdamState<S>& state,
               const AdamConfig<S>& cfg) {
  ++state.step;
  const S bias1 = S(1) - std::pow(cfg.beta1, static_cast<S>(state.step));
  const S bias2 = S(1) - std::pow(cfg.beta2, static_cast<S>(state.step));
  detail::update_tensor<S>(params.interest0, grads.interest0, state.m.interest0,
                           state.v.interest0, cfg, bias1, bias2);
  detail::update_tensor<S>(params.disinterest0, grads.disinterest0, state.m.disinterest0,
                           state.v.disinterest0, cfg, bias1, bias2);
  detail::update_tensor<S>(params.mlp_w1, grads.mlp_w1, state.m.mlp_w1, state.v.mlp_w1, cfg,
                           bias1, bias2);
  detail::update_tensor<S>(params.mlp_w2, grads.mlp_w2, state.m.mlp_w2, state.v.mlp_w2, cfg,
                           bias1, bias2);
  detail::update_tensor<S>(params.att_w1, grads.att_w1, state.m.att_w1, state.v.att_w1, cfg,
                           bias1, bias2);
  detail::update_tensor<S>(params.att_w2, grads.att_w2, state.m.att_w2, state.v.att_w2, cfg,
                           bias1, bias2);
}

}  // namespace pane::optimizer
