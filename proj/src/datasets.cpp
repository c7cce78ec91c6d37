#include "pane/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>

#include "pane/rng.hpp"

namespace pane::datasets {

namespace {

std::vector<std::string> split_fields(const std::string& line, const std::string& delimiter) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delimiter, start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + delimiter.size();
  }
  return fields;
}

double parse_value(const std::string& text, const std::string& path, std::size_t line_no) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    fail(ErrorCategory::format,
         path + ":" + std::to_string(line_no) + ": non-numeric value '" + text + "'");
  }
  if (!(value == value) || value < 0.0 || value > 1e300) {
    fail(ErrorCategory::format,
         path + ":" + std::to_string(line_no) + ": value out of range '" + text + "'");
  }
  return value;
}

std::int64_t parse_timestamp(const std::string& text, const std::string& path,
                             std::size_t line_no) {
  std::int64_t ts = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, ts);
  if (ec != std::errc{} || ptr != end) {
    fail(ErrorCategory::format,
         path + ":" + std::to_string(line_no) + ": non-numeric timestamp '" + text + "'");
  }
  return ts;
}

std::uint32_t intern(IdMap& map, const std::string& raw) {
  const auto it = map.to_dense.find(raw);
  if (it != map.to_dense.end()) return it->second;
  const auto dense = static_cast<std::uint32_t>(map.raw_ids.size());
  map.raw_ids.push_back(raw);
  map.to_dense.emplace(raw, dense);
  return dense;
}

// Later record wins only when it carries a strictly newer timestamp, or when
// timestamps cannot decide (missing or equal): dedup keeps the latest
// timestamp, falling back to last occurrence.
bool replaces(const RatingRecord& later, const RatingRecord& earlier) {
  if (later.timestamp && earlier.timestamp) return *later.timestamp >= *earlier.timestamp;
  return true;
}

}  // namespace

RatingTable load_ratings(const std::string& path, const FormatSpec& format) {
  std::ifstream in(path);
  if (!in) fail(ErrorCategory::io, "cannot open rating file '" + path + "'");
  if (format.delimiter.empty()) fail(ErrorCategory::config, "format delimiter is empty");

  RatingTable table;
  std::unordered_map<std::uint64_t, std::size_t> seen;  // (user,item) -> record slot

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && format.skip_header) continue;
    if (line.empty()) continue;

    const std::vector<std::string> fields = split_fields(line, format.delimiter);
    if (fields.size() < format.columns.size()) {
      fail(ErrorCategory::format, path + ":" + std::to_string(line_no) + ": expected " +
                                      std::to_string(format.columns.size()) +
                                      " fields, got " + std::to_string(fields.size()));
    }

    RatingRecord record;
    std::string raw_user;
    std::string raw_item;
    bool have_user = false;
    bool have_item = false;
    bool have_value = false;
    for (std::size_t c = 0; c < format.columns.size(); ++c) {
      switch (format.columns[c]) {
        case ColumnRole::user:
          raw_user = fields[c];
          have_user = !raw_user.empty();
          break;
        case ColumnRole::item:
          raw_item = fields[c];
          have_item = !raw_item.empty();
          break;
        case ColumnRole::value:
          record.value = parse_value(fields[c], path, line_no);
          have_value = true;
          break;
        case ColumnRole::timestamp:
          if (!fields[c].empty()) record.timestamp = parse_timestamp(fields[c], path, line_no);
          break;
        case ColumnRole::ignore:
          break;
      }
    }
    if (!have_user || !have_item || !have_value) {
      fail(ErrorCategory::format,
           path + ":" + std::to_string(line_no) + ": missing user, item, or value field");
    }

    record.user = intern(table.users, raw_user);
    record.item = intern(table.items, raw_item);

    const std::uint64_t key =
        (static_cast<std::uint64_t>(record.user) << 32) | record.item;
    const auto it = seen.find(key);
    if (it == seen.end()) {
      seen.emplace(key, table.records.size());
      table.records.push_back(record);
    } else if (replaces(record, table.records[it->second])) {
      table.records[it->second] = record;  // keep first-occurrence position
    }
  }
  return table;
}

RatingTable filter_min_interactions(const RatingTable& table, std::size_t min_count) {
  if (min_count <= 1) return table;

  std::vector<std::size_t> user_count(table.users.size(), 0);
  std::vector<std::size_t> item_count(table.items.size(), 0);
  for (const RatingRecord& r : table.records) {
    ++user_count[r.user];
    ++item_count[r.item];
  }

  RatingTable out;
  for (const RatingRecord& r : table.records) {
    if (user_count[r.user] < min_count || item_count[r.item] < min_count) continue;
    RatingRecord kept = r;
    kept.user = intern(out.users, table.users.raw_ids[r.user]);
    kept.item = intern(out.items, table.items.raw_ids[r.item]);
    out.records.push_back(kept);
  }
  return out;
}

std::vector<SignedEdge> binarize(const std::vector<RatingRecord>& records,
                                 const BinarizationRule& rule) {
  if (!(rule.threshold == rule.threshold) || rule.threshold > 1e300 || rule.threshold < -1e300) {
    fail(ErrorCategory::config, "binarization threshold is not finite");
  }
  std::vector<SignedEdge> edges;
  edges.reserve(records.size());
  for (const RatingRecord& r : records) {
    edges.push_back({r.user, r.item,
                     r.value > rule.threshold ? Sign::positive : Sign::negative});
  }
  return edges;
}

SplitResult kfold_split(const std::vector<SignedEdge>& edges, int folds, int fold_index,
                        std::uint64_t seed) {
  if (folds < 2) fail(ErrorCategory::config, "k-fold split requires folds >= 2");
  if (fold_index < 0 || fold_index >= folds) {
    fail(ErrorCategory::config, "fold_index " + std::to_string(fold_index) +
                                    " out of range for folds=" + std::to_string(folds));
  }

  std::vector<std::uint32_t> order(edges.size());
  std::iota(order.begin(), order.end(), 0u);
  RngStream rng = derive_stream(seed, StreamPurpose::split);
  rng.shuffle(order);

  // Shuffled position p lands in fold p % folds: folds partition the edges and
  // differ in size by at most one.
  std::vector<bool> in_test(edges.size(), false);
  for (std::size_t p = 0; p < order.size(); ++p) {
    if (static_cast<int>(p % static_cast<std::size_t>(folds)) == fold_index) {
      in_test[order[p]] = true;
    }
  }

  SplitResult result;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    (in_test[e] ? result.test : result.train).push_back(edges[e]);
  }
  return result;
}

void write_edge_file(const std::string& path, const std::vector<SignedEdge>& edges) {
  std::ofstream out(path);
  if (!out) fail(ErrorCategory::io, "cannot write edge file '" + path + "'");
  for (const SignedEdge& e : edges) {
    out << e.user << '\t' << e.item << '\t' << (e.sign == Sign::positive ? 1 : -1) << '\n';
  }
  if (!out) fail(ErrorCategory::io, "failed writing edge file '" + path + "'");
}

std::vector<SignedEdge> read_edge_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCategory::io, "cannot open edge file '" + path + "'");

  std::vector<SignedEdge> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    SignedEdge edge;
    long long sign = 0;
    const char* p = line.data();
    const char* end = p + line.size();
    auto r1 = std::from_chars(p, end, edge.user);
    if (r1.ec != std::errc{} || r1.ptr == end || *r1.ptr != '\t') {
      fail(ErrorCategory::format, path + ":" + std::to_string(line_no) + ": bad edge line");
    }
    auto r2 = std::from_chars(r1.ptr + 1, end, edge.item);
    if (r2.ec != std::errc{} || r2.ptr == end || *r2.ptr != '\t') {
      fail(ErrorCategory::format, path + ":" + std::to_string(line_no) + ": bad edge line");
    }
    auto r3 = std::from_chars(r2.ptr + 1, end, sign);
    if (r3.ec != std::errc{} || r3.ptr != end || (sign != 1 && sign != -1)) {
      fail(ErrorCategory::format,
           path + ":" + std::to_string(line_no) + ": sign must be 1 or -1");
    }
    edge.sign = sign == 1 ? Sign::positive : Sign::negative;
    edges.push_back(edge);
  }
  return edges;
}

void write_id_map(const std::string& path, const IdMap& map) {
  std::ofstream out(path);
  if (!out) fail(ErrorCategory::io, "cannot write id map '" + path + "'");
  for (std::size_t dense = 0; dense < map.raw_ids.size(); ++dense) {
    out << map.raw_ids[dense] << '\t' << dense << '\n';
  }
  if (!out) fail(ErrorCategory::io, "failed writing id map '" + path + "'");
}

IdMap read_id_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCategory::io, "cannot open id map '" + path + "'");

  IdMap map;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    const std::size_t tab = line.rfind('\t');
    if (tab == std::string::npos) {
      fail(ErrorCategory::format, path + ":" + std::to_string(line_no) + ": bad id map line");
    }
    const std::string raw = line.substr(0, tab);
    std::uint32_t dense = 0;
    const char* p = line.data() + tab + 1;
    const char* end = line.data() + line.size();
    const auto r = std::from_chars(p, end, dense);
    if (r.ec != std::errc{} || r.ptr != end || dense != map.raw_ids.size()) {
      fail(ErrorCategory::format,
           path + ":" + std::to_string(line_no) + ": dense indices must be 0,1,2,...");
    }
    map.raw_ids.push_back(raw);
    map.to_dense.emplace(raw, dense);
  }
  return map;
}

}  // namespace pane::datasets
