#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "pane/common.hpp"

namespace pane::datasets {

/// One raw interaction after id re-indexing. `value` is a star rating or a
/// watch ratio; it is always finite and non-negative.
struct RatingRecord {
  std::uint32_t user = 0;
  std::uint32_t item = 0;
  double value = 0.0;
  std::optional<std::int64_t> timestamp;
};

enum class ColumnRole { user, item, value, timestamp, ignore };

/// Byte layout of a raw rating file: field delimiter plus the role of each
/// column, in order. Extra trailing columns are ignored.
struct FormatSpec {
  std::string delimiter = "::";
  std::vector<ColumnRole> columns = {ColumnRole::user, ColumnRole::item,
                                     ColumnRole::value, ColumnRole::timestamp};
  bool skip_header = false;

  /// The public MovieLens layout: user::item::rating::timestamp.
  static FormatSpec ml_1m() { return FormatSpec{}; }

  /// Headered CSV for watch-ratio logs: user,item,watch_ratio.
  static FormatSpec watch_ratio_csv() {
    FormatSpec spec;
    spec.delimiter = ",";
    spec.skip_header = true;
    spec.columns = {ColumnRole::user, ColumnRole::item, ColumnRole::value};
    return spec;
  }
};

/// Bijection between raw ids (opaque strings) and dense indices assigned in
/// order of first appearance.
struct IdMap {
  std::vector<std::string> raw_ids;  // dense index -> raw id
  std::unordered_map<std::string, std::uint32_t> to_dense;

  std::uint32_t size() const { return static_cast<std::uint32_t>(raw_ids.size()); }
};

struct RatingTable {
  std::vector<RatingRecord> records;  // deduplicated, stable order
  IdMap users;
  IdMap items;
};

/// Parses a rating file, re-indexes ids densely, and deduplicates repeated
/// (user, item) pairs keeping the latest timestamp (last occurrence when
/// timestamps are missing or tie). Malformed lines raise ErrorCategory::format
/// with the offending line number.
RatingTable load_ratings(const std::string& path, const FormatSpec& format);

/// Drops users and items with fewer than `min_count` interactions (one pass
/// over the input counts) and re-indexes the survivors. min_count == 0 is the
/// identity.
RatingTable filter_min_interactions(const RatingTable& table, std::size_t min_count);

enum class Sign : std::int8_t { negative = -1, positive = +1 };

struct SignedEdge {
  std::uint32_t user = 0;
  std::uint32_t item = 0;
  Sign sign = Sign::positive;

  friend bool operator==(const SignedEdge&, const SignedEdge&) = default;
};

enum class BinarizationKind { star_threshold, watch_ratio_threshold };

struct BinarizationRule {
  BinarizationKind kind = BinarizationKind::star_threshold;
  double threshold = 3.5;

  static BinarizationRule stars(double threshold = 3.5) {
    return {BinarizationKind::star_threshold, threshold};
  }
  static BinarizationRule watch_ratio(double threshold = 2.0) {
    return {BinarizationKind::watch_ratio_threshold, threshold};
  }
};

/// Maps every record to exactly one signed edge: positive iff
/// value > rule.threshold (strict), negative otherwise. Order is preserved.
std::vector<SignedEdge> binarize(const std::vector<RatingRecord>& records,
                                 const BinarizationRule& rule);

struct SplitSpec {
  enum class Kind { k_fold, fixed_files };
  Kind kind = Kind::k_fold;
  int folds = 5;
  int fold_index = 0;
  std::uint64_t seed = 0;
  std::string train_path;  // fixed_files only
  std::string test_path;   // fixed_files only
};

struct SplitResult {
  std::vector<SignedEdge> train;
  std::vector<SignedEdge> test;
};

/// Deterministic k-fold partition: the shuffled edge list is dealt round-robin
/// into `folds` folds, fold `fold_index` becomes the test set. Every edge lands
/// in exactly one fold; input order is preserved within each half.
SplitResult kfold_split(const std::vector<SignedEdge>& edges, int folds, int fold_index,
                        std::uint64_t seed);

// Canonical on-disk formats: one edge per line `user\titem\tsign` with
// sign in {1,-1}; id maps as `raw_id\tdense_idx`.
void write_edge_file(const std::string& path, const std::vector<SignedEdge>& edges);
std::vector<SignedEdge> read_edge_file(const std::string& path);
void write_id_map(const std::string& path, const IdMap& map);
IdMap read_id_map(const std::string& path);

}  // namespace pane::datasets
