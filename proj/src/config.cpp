#include "pane/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace pane::config {

namespace {

double parse_double(const std::string& key, const std::string& value) {
  if (value == "inf" || value == "+inf") return std::numeric_limits<double>::infinity();
  double out = 0.0;
  const char* begin = value.data();
  const char* end = begin + value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{} || ptr != end) {
    fail(ErrorCategory::config, "bad numeric value for " + key + ": '" + value + "'");
  }
  return out;
}

long long parse_int(const std::string& key, const std::string& value) {
  long long out = 0;
  const char* begin = value.data();
  const char* end = begin + value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{} || ptr != end) {
    fail(ErrorCategory::config, "bad integer value for " + key + ": '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes") return true;
  if (value == "0" || value == "false" || value == "no") return false;
  fail(ErrorCategory::config, "bad boolean value for " + key + ": '" + value + "'");
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  std::stringstream stream(value);
  std::string part;
  while (std::getline(stream, part, ',')) {
    if (!part.empty()) out.push_back(static_cast<int>(parse_int(key, part)));
  }
  if (out.empty()) fail(ErrorCategory::config, key + " requires at least one value");
  return out;
}

std::string format_double(double v) {
  if (std::isinf(v)) return "inf";
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

void RunConfig::apply(const std::string& key, const std::string& value) {
  if (key == "embedding_dim") hp.embedding_dim = static_cast<int>(parse_int(key, value));
  else if (key == "gnn_layers") hp.gnn_layers = static_cast<int>(parse_int(key, value));
  else if (key == "edge_drop_prob") hp.edge_drop_prob = parse_double(key, value);
  else if (key == "feedback_coeff") hp.feedback_coeff = parse_double(key, value);
  else if (key == "filter_threshold") hp.filter_threshold = parse_double(key, value);
  else if (key == "contrastive_weight") hp.contrastive_weight = parse_double(key, value);
  else if (key == "reg_weight") hp.reg_weight = parse_double(key, value);
  else if (key == "temperature") hp.temperature = parse_double(key, value);
  else if (key == "learning_rate") hp.learning_rate = parse_double(key, value);
  else if (key == "batch_size") hp.batch_size = static_cast<int>(parse_int(key, value));
  else if (key == "epochs") hp.epochs = static_cast<int>(parse_int(key, value));
  else if (key == "neg_samples_per_edge")
    hp.neg_samples_per_edge = static_cast<int>(parse_int(key, value));
  else if (key == "dropout_rate") hp.dropout_rate = parse_double(key, value);
  else if (key == "seed") hp.seed = static_cast<std::uint64_t>(parse_int(key, value));
  else if (key == "variant") train.variant = parse_variant(value);
  else if (key == "distort_per_epoch") train.distort_per_epoch = parse_bool(key, value);
  else if (key == "global_attention") train.global_attention = parse_bool(key, value);
  else if (key == "step_per_epoch") train.step_per_epoch = parse_bool(key, value);
  else if (key == "early_stop") train.early_stop = parse_bool(key, value);
  else if (key == "early_stop_patience")
    train.early_stop_patience = static_cast<int>(parse_int(key, value));
  else if (key == "checkpoint_every")
    train.checkpoint_every = static_cast<int>(parse_int(key, value));
  else if (key == "train_edges") train_edges = value;
  else if (key == "test_edges") test_edges = value;
  else if (key == "out_dir") out_dir = value;
  else if (key == "eval_k") eval_k = parse_int_list(key, value);
  else if (key == "filter_keep") {
    if (value == "below") filter_keep = ranking::FilterKeep::below;
    else if (value == "above") filter_keep = ranking::FilterKeep::above;
    else fail(ErrorCategory::config, "filter_keep must be below or above");
  } else if (key == "capped_idcg") capped_idcg = parse_bool(key, value);
  else if (key == "backfill") backfill = parse_bool(key, value);
  else fail(ErrorCategory::config, "unknown config key '" + key + "'");
}

std::string RunConfig::to_text() const {
  std::ostringstream out;
  out << "backfill=" << (backfill ? 1 : 0) << '\n';
  out << "batch_size=" << hp.batch_size << '\n';
  out << "capped_idcg=" << (capped_idcg ? 1 : 0) << '\n';
  out << "checkpoint_every=" << train.checkpoint_every << '\n';
  out << "contrastive_weight=" << format_double(hp.contrastive_weight) << '\n';
  out << "distort_per_epoch=" << (train.distort_per_epoch ? 1 : 0) << '\n';
  out << "dropout_rate=" << format_double(hp.dropout_rate) << '\n';
  out << "early_stop=" << (train.early_stop ? 1 : 0) << '\n';
  out << "early_stop_patience=" << train.early_stop_patience << '\n';
  out << "edge_drop_prob=" << format_double(hp.edge_drop_prob) << '\n';
  out << "embedding_dim=" << hp.embedding_dim << '\n';
  out << "epochs=" << hp.epochs << '\n';
  out << "eval_k=";
  for (std::size_t i = 0; i < eval_k.size(); ++i) out << (i ? "," : "") << eval_k[i];
  out << '\n';
  out << "feedback_coeff=" << format_double(hp.feedback_coeff) << '\n';
  out << "filter_keep=" << (filter_keep == ranking::FilterKeep::below ? "below" : "above")
      << '\n';
  out << "filter_threshold=" << format_double(hp.filter_threshold) << '\n';
  out << "global_attention=" << (train.global_attention ? 1 : 0) << '\n';
  out << "gnn_layers=" << hp.gnn_layers << '\n';
  out << "learning_rate=" << format_double(hp.learning_rate) << '\n';
  out << "neg_samples_per_edge=" << hp.neg_samples_per_edge << '\n';
  out << "out_dir=" << out_dir << '\n';
  out << "reg_weight=" << format_double(hp.reg_weight) << '\n';
  out << "seed=" << hp.seed << '\n';
  out << "step_per_epoch=" << (train.step_per_epoch ? 1 : 0) << '\n';
  out << "temperature=" << format_double(hp.temperature) << '\n';
  out << "test_edges=" << test_edges << '\n';
  out << "train_edges=" << train_edges << '\n';
  out << "variant=" << to_string(train.variant) << '\n';
  return out.str();
}

void RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCategory::io, "cannot open config file '" + path + "'");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCategory::config,
           path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    apply(line.substr(0, eq), line.substr(eq + 1));
  }
}

void RunConfig::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) fail(ErrorCategory::io, "cannot write config file '" + path + "'");
  out << to_text();
  if (!out) fail(ErrorCategory::io, "failed writing config file '" + path + "'");
}

}  // namespace pane::config
