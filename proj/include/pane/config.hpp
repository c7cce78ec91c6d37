#pragma once

#include <string>
#include <vector>

#include "pane/ranking.hpp"
#include "pane/trainer.hpp"

namespace pane::config {

/// Everything a run needs, serializable as flat `key=value` lines so a run
/// can be reproduced from its persisted config and seed alone. Precedence of
/// sources is flags > file > defaults.
struct RunConfig {
  trainer::HyperParams hp;
  trainer::TrainOptions train;

  std::string train_edges;
  std::string test_edges;
  std::string out_dir;

  std::vector<int> eval_k = {5, 10, 15};
  ranking::FilterKeep filter_keep = ranking::FilterKeep::below;
  bool capped_idcg = false;
  bool backfill = true;

  /// Applies one key=value assignment; unknown keys raise
  /// ErrorCategory::config naming the key.
  void apply(const std::string& key, const std::string& value);

  /// Serializes every field, one `key=value` per line, sorted by key.
  std::string to_text() const;

  void load_file(const std::string& path);
  void save_file(const std::string& path) const;
};

}  // namespace pane::config
