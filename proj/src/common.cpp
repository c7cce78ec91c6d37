#include "pane/common.hpp"

namespace pane {

const char* to_string(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::io: return "io";
    case ErrorCategory::format: return "format";
    case ErrorCategory::config: return "config";
    case ErrorCategory::dimension: return "dimension";
    case ErrorCategory::numeric: return "numeric";
    case ErrorCategory::usage: return "usage";
  }
  return "unknown";
}

Variant parse_variant(const std::string& text) {
  if (text == "a" || text == "A") return Variant::a;
  if (text == "b" || text == "B") return Variant::b;
  if (text == "c" || text == "C") return Variant::c;
  if (text == "d" || text == "D") return Variant::d;
  if (text == "full") return Variant::full;
  fail(ErrorCategory::config, "unknown variant '" + text + "' (expected a|b|c|d|full)");
}

const char* to_string(Variant variant) {
  switch (variant) {
    case Variant::a: return "a";
    case Variant::b: return "b";
    case Variant::c: return "c";
    case Variant::d: return "d";
    case Variant::full: return "full";
  }
  return "full";
}

}  // namespace pane
