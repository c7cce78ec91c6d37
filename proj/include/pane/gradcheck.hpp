#pragma once

#include <cstdint>

namespace pane::gradcheck {

struct Options {
  int configs = 20;          // random model/graph configurations to probe
  std::uint64_t seed = 7;
  double step = 1e-3;        // central-difference half-step
  double tolerance = 1e-4;   // reported pass/fail bound on the relative error
  int max_users = 6;
  int max_items = 6;
  int dim = 3;
  int layers = 2;
  bool verbose = false;
};

struct Report {
  double max_rel_error = 0.0;
  int configs_run = 0;
  double seconds = 0.0;
  bool passed(const Options& options) const { return max_rel_error < options.tolerance; }
};

/// Compares the reverse-mode gradients of the total loss against 64-bit
/// central finite differences on random desk-scale configurations, all loss
/// terms active and dropout masks held fixed. The error of a coordinate is
/// |analytic - numeric| / max(1, |analytic|, |numeric|), so near-zero
/// coordinates are held to the same bound as an absolute tolerance.
///
/// Configurations whose ReLU pre-activations sit within ten half-steps of a
/// kink are redrawn: the difference quotient is not a valid derivative probe
/// across a kink, while the analytic gradient is exact there.
Report run(const Options& options);

}  // namespace pane::gradcheck
