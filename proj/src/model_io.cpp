#include <cstring>
#include <fstream>

#include "pane/model.hpp"

namespace pane::model {

namespace {

constexpr char kMagic[4] = {'P', 'A', 'N', 'E'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ofstream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::ifstream& in, const std::string& path) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) {
    fail(ErrorCategory::format, "truncated checkpoint '" + path + "'");
  }
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f32(std::ofstream& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(out, bits);
}

float get_f32(std::ifstream& in, const std::string& path) {
  const std::uint32_t bits = get_u32(in, path);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

void put_matrix(std::ofstream& out, const Mat<float>& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) put_f32(out, m(r, c));
  }
}

Mat<float> get_matrix(std::ifstream& in, Eigen::Index rows, Eigen::Index cols,
                      const std::string& path) {
  Mat<float> m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = get_f32(in, path);
  }
  return m;
}

}  // namespace

void save_checkpoint(const std::string& path, const Params<float>& params,
                     std::uint32_t n_users, std::uint32_t n_items) {
  if (params.n_nodes() != static_cast<Eigen::Index>(n_users) + n_items) {
    fail(ErrorCategory::dimension, "checkpoint: params hold " +
                                       std::to_string(params.n_nodes()) + " rows, expected " +
                                       std::to_string(n_users + n_items));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCategory::io, "cannot write checkpoint '" + path + "'");
  out.write(kMagic, 4);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(params.n_nodes()));
  put_u32(out, static_cast<std::uint32_t>(params.dim()));
  put_u32(out, n_users);
  put_u32(out, n_items);
  put_matrix(out, params.interest0);
  put_matrix(out, params.disinterest0);
  put_matrix(out, params.mlp_w1);
  put_matrix(out, params.mlp_w2);
  put_matrix(out, params.att_w1);
  put_matrix(out, params.att_w2);
  if (!out) fail(ErrorCategory::io, "failed writing checkpoint '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCategory::io, "cannot open checkpoint '" + path + "'");

  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    fail(ErrorCategory::format, "'" + path + "' is not a checkpoint (bad magic)");
  }
  const std::uint32_t version = get_u32(in, path);
  if (version != kVersion) {
    fail(ErrorCategory::format, "unsupported checkpoint version " + std::to_string(version));
  }
  const std::uint32_t n_nodes = get_u32(in, path);
  const std::uint32_t dim = get_u32(in, path);

  Checkpoint cp;
  cp.n_users = get_u32(in, path);
  cp.n_items = get_u32(in, path);
  if (cp.n_users + cp.n_items != n_nodes) {
    fail(ErrorCategory::format, "checkpoint counts disagree: " + std::to_string(cp.n_users) +
                                    " users + " + std::to_string(cp.n_items) + " items != " +
                                    std::to_string(n_nodes) + " nodes");
  }
  cp.params.interest0 = get_matrix(in, n_nodes, dim, path);
  cp.params.disinterest0 = get_matrix(in, n_nodes, dim, path);
  cp.params.mlp_w1 = get_matrix(in, dim, dim, path);
  cp.params.mlp_w2 = get_matrix(in, dim, dim, path);
  cp.params.att_w1 = get_matrix(in, dim, dim, path);
  cp.params.att_w2 = get_matrix(in, dim, 1, path);
  return cp;
}

}  // namespace pane::model
