#pragma once

#include <stdexcept>
#include <string>

namespace pane {

/// Machine-parseable failure categories. The CLI prints them as
/// `error:<category>: <message>` on a single line and exits nonzero.
enum class ErrorCategory {
  io,         // file missing / unreadable / unwritable
  format,     // malformed input data
  config,     // invalid hyperparameter or option value
  dimension,  // shape mismatch between artifacts
  numeric,    // non-finite values during training
  usage,      // bad command-line invocation
};

const char* to_string(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

[[noreturn]] inline void fail(ErrorCategory category, const std::string& message) {
  throw Error(category, message);
}

/// Model configurations from the ablation grid. `a` trains on the negative
/// graph only, `b` on the positive graph only, `c` on both, `d` adds the
/// contrastive term, and `full` additionally applies the disinterest-score
/// filter when ranking.
enum class Variant { a, b, c, d, full };

Variant parse_variant(const std::string& text);
const char* to_string(Variant variant);

}  // namespace pane
