#include "pane/gradcheck.hpp"

#include <chrono>
#include <cmath>
#include <iostream>

#include "pane/loss.hpp"

namespace pane::gradcheck {

namespace {

using Matd = model::Mat<double>;

struct Scenario {
  graph::SignedBipartiteGraph graph;
  graph::DistortedGraph distorted;
  loss::Batch positive;
  loss::Batch negative;
  model::Params<double> params;
  model::DropoutPlan<double> plan;
  bool global_attention = false;
};

// Items outside the user's neighbor set on one side, uniformly.
std::uint32_t sample_outside(const std::vector<std::uint32_t>& neighbors, std::uint32_t n_items,
                             RngStream& rng) {
  std::uint32_t j;
  do {
    j = rng.next_below(n_items);
  } while (std::binary_search(neighbors.begin(), neighbors.end(), j));
  return j;
}

bool build_scenario(std::uint64_t seed, const Options& options, Scenario& out) {
  RngStream rng = derive_stream(seed, StreamPurpose::synthetic);
  const std::uint32_t n_users = 2 + rng.next_below(static_cast<std::uint32_t>(options.max_users - 1));
  const std::uint32_t n_items = 2 + rng.next_below(static_cast<std::uint32_t>(options.max_items - 1));

  std::vector<datasets::SignedEdge> edges;
  for (std::uint32_t u = 0; u < n_users; ++u) {
    for (std::uint32_t i = 0; i < n_items; ++i) {
      const double r = rng.next_unit();
      if (r < 0.35) {
        edges.push_back({u, i, datasets::Sign::positive});
      } else if (r < 0.60) {
        edges.push_back({u, i, datasets::Sign::negative});
      }
    }
  }
  out.graph = graph::build(edges, n_users, n_items);
  if (out.graph.positive.empty() || out.graph.negative.empty()) return false;
  out.distorted = graph::distort(out.graph, 0.3, seed);

  out.positive.clear();
  out.negative.clear();
  for (std::uint32_t u = 0; u < n_users; ++u) {
    const auto& pos = out.graph.positive.user_items[u];
    if (!pos.empty() && pos.size() < n_items) {
      for (const std::uint32_t i : pos) {
        out.positive.push_back({u, i, sample_outside(pos, n_items, rng)});
      }
    }
    const auto& neg = out.graph.negative.user_items[u];
    if (!neg.empty() && neg.size() < n_items) {
      for (const std::uint32_t i : neg) {
        out.negative.push_back({u, i, sample_outside(neg, n_items, rng)});
      }
    }
  }
  if (out.positive.empty() || out.negative.empty()) return false;

  RngStream init_rng = derive_stream(seed, StreamPurpose::init);
  out.params = model::init_params<double>(out.graph.n_nodes(), options.dim, init_rng);
  out.global_attention = (seed % 4) == 0;

  RngStream dropout_rng = derive_stream(seed, StreamPurpose::dropout);
  out.plan = model::make_dropout_plan<double>(out.graph.n_nodes(), options.dim, 0.5,
                                              out.global_attention, dropout_rng);
  return true;
}

// The difference quotient is only trustworthy when every ReLU pre-activation
// is either safely away from zero or exactly (and stably) zero.
bool kink_margins_ok(const Scenario& s, const model::ForwardOptions& fo, double margin) {
  const model::ForwardResult<double> fwd =
      model::forward<double>(s.params, s.graph, &s.distorted, fo, &s.plan);
  for (Eigen::Index r = 0; r < fwd.mlp.pre1.rows(); ++r) {
    for (Eigen::Index c = 0; c < fwd.mlp.pre1.cols(); ++c) {
      if (std::abs(fwd.mlp.pre1(r, c)) <= margin) return false;
      const double p2 = fwd.mlp.pre2(r, c);
      if (p2 != 0.0 && std::abs(p2) <= margin) return false;
    }
  }
  return true;
}

}  // namespace

Report run(const Options& options) {
  const auto t0 = std::chrono::steady_clock::now();
  Report report;

  std::uint64_t attempt = 0;
  while (report.configs_run < options.configs) {
    Scenario s;
    const std::uint64_t seed = options.seed + attempt++;
    if (attempt > 1000u * static_cast<std::uint64_t>(options.configs)) {
      fail(ErrorCategory::numeric, "gradcheck could not draw enough usable configurations");
    }
    if (!build_scenario(seed, options, s)) continue;

    loss::StepInputs<double> inputs;
    inputs.graph = &s.graph;
    inputs.distorted = &s.distorted;
    inputs.positive_batch = &s.positive;
    inputs.negative_batch = &s.negative;
    inputs.coeff = {2.0, 0.8, 0.1, 0.1};
    inputs.switches = {true, true, true};

    const model::ForwardOptions fo =
        loss::forward_options_for(inputs, options.layers, /*train_mode=*/true,
                                  s.global_attention);
    if (!kink_margins_ok(s, fo, 10.0 * options.step)) continue;

    loss::ParamGrads<double> grads = loss::ParamGrads<double>::zeros_like(s.params);
    loss::evaluate_loss_grad<double>(s.params, inputs, fo, &s.plan, grads);

    double worst = 0.0;
    const auto probe = [&](Matd& tensor, const Matd& analytic) {
      for (Eigen::Index r = 0; r < tensor.rows(); ++r) {
        for (Eigen::Index c = 0; c < tensor.cols(); ++c) {
          const double original = tensor(r, c);
          tensor(r, c) = original + options.step;
          const double up = loss::evaluate_loss<double>(s.params, inputs, fo, &s.plan).total;
          tensor(r, c) = original - options.step;
          const double down = loss::evaluate_loss<double>(s.params, inputs, fo, &s.plan).total;
          tensor(r, c) = original;
          const double numeric = (up - down) / (2.0 * options.step);
          const double scale = std::max({1.0, std::abs(analytic(r, c)), std::abs(numeric)});
          worst = std::max(worst, std::abs(analytic(r, c) - numeric) / scale);
        }
      }
    };
    probe(s.params.interest0, grads.interest0);
    probe(s.params.disinterest0, grads.disinterest0);
    probe(s.params.mlp_w1, grads.mlp_w1);
    probe(s.params.mlp_w2, grads.mlp_w2);
    probe(s.params.att_w1, grads.att_w1);
    probe(s.params.att_w2, grads.att_w2);

    if (options.verbose) {
      std::cerr << "gradcheck config " << report.configs_run << " (seed " << seed
                << "): max rel error " << worst << '\n';
    }
    report.max_rel_error = std::max(report.max_rel_error, worst);
    ++report.configs_run;
  }

  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace pane::gradcheck
