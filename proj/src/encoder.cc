// Copyright 2026 The pairre Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pairre/encoder.h"

#include <cmath>
#include <cstring>
#include <fstream>

#include "binary_io.h"
#include "pairre/error.h"

namespace pairre {

using binary::ReadF64;
using binary::ReadU32;
using binary::ReadU64;
using binary::WriteF64;
using binary::WriteU32;
using binary::WriteU64;

namespace {

// Sinusoidal position code parameters.
constexpr double kPositionBase = 10.0;
constexpr double kPositionScale = 6.0;
constexpr double kPositionMaxFrequency = 0.3;

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform in [-1, 1) from a hash.
double HashUniform(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-52 - 1.0;
}

}  // namespace

void EncodedDocument::Validate(double tolerance) const {
  const int n = size();
  if (A.rows() != n || A.cols() != n) {
    throw DimensionError("attention is " + std::to_string(A.rows()) + "x" +
                         std::to_string(A.cols()) + " but H has " +
                         std::to_string(n) + " rows");
  }
  for (const auto &starts : mention_starts) {
    for (int row : starts) {
      if (row < 0 || row >= n) {
        throw DimensionError("mention row " + std::to_string(row) +
                             " outside [0, " + std::to_string(n) + ")");
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    if ((A.row(i).array() < 0.0).any()) {
      throw Error("attention row " + std::to_string(i) + " has negative entries");
    }
    double sum = A.row(i).sum();
    if (std::abs(sum - 1.0) > tolerance) {
      throw Error("attention row " + std::to_string(i) + " sums to " +
                  std::to_string(sum));
    }
  }
}

WindowPlan PlanWindows(int n, int width, int overlap) {
  if (width <= overlap || overlap < 0) {
    throw ConfigError("window width " + std::to_string(width) +
                      " must exceed overlap " + std::to_string(overlap));
  }
  WindowPlan plan;
  for (int begin = 0;; begin += width - overlap) {
    int end = std::min(begin + width, n);
    plan.windows.push_back({begin, end});
    if (end >= n) break;
  }
  return plan;
}

Eigen::VectorXd TokenEmbedding(int token, int dim, std::uint64_t seed) {
  Eigen::VectorXd v(dim);
  const double scale = std::sqrt(3.0 / dim);  // unit expected norm
  std::uint64_t base = SplitMix64(seed ^ SplitMix64(static_cast<std::uint64_t>(token)));
  for (int j = 0; j < dim; ++j) v[j] = scale * HashUniform(SplitMix64(base + j));
  return v;
}

Eigen::VectorXd PositionCode(int position, int dim) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
  const double scale = kPositionScale * std::sqrt(2.0 / dim);
  for (int k = 0; 2 * k < dim; ++k) {
    double freq = kPositionMaxFrequency * std::pow(kPositionBase, -2.0 * k / dim);
    v[2 * k] = scale * std::sin(position * freq);
    if (2 * k + 1 < dim) v[2 * k + 1] = scale * std::cos(position * freq);
  }
  return v;
}

void MockEncodeTokens(const std::vector<int> &tokens, int dim, std::uint64_t seed,
                      Eigen::MatrixXd *H, Eigen::MatrixXd *A) {
  if (dim <= 0) throw ConfigError("embedding dimension must be positive");
  const int n = static_cast<int>(tokens.size());
  // Attention is scored on content plus position; values carry content
  // only, so positional codes do not drown the token signal in H.
  Eigen::MatrixXd content(n, dim), keyed(n, dim);
  for (int i = 0; i < n; ++i) {
    content.row(i) = TokenEmbedding(tokens[i], dim, seed).transpose();
    keyed.row(i) = content.row(i) + PositionCode(i, dim).transpose();
  }
  Eigen::MatrixXd scores = keyed * keyed.transpose() / std::sqrt(static_cast<double>(dim));
  A->resize(n, n);
  for (int i = 0; i < n; ++i) {
    double mx = scores.row(i).maxCoeff();
    Eigen::RowVectorXd e = (scores.row(i).array() - mx).exp();
    A->row(i) = e / e.sum();
  }
  *H = content + (*A) * content;
}

EncodedDocument MockEncode(const MarkedDocument &doc, int dim, std::uint64_t seed) {
  EncodedDocument enc;
  MockEncodeTokens(doc.tokens, dim, seed, &enc.H, &enc.A);
  enc.mention_starts = doc.mention_starts;
  return enc;
}

EncodedDocument EncodeWindows(const MarkedDocument &doc, int width, int overlap,
                              int dim, std::uint64_t seed) {
  const int n = doc.size();
  WindowPlan plan = PlanWindows(n, width, overlap);
  if (plan.windows.size() == 1) return MockEncode(doc, dim, seed);

  EncodedDocument enc;
  enc.H = Eigen::MatrixXd::Zero(n, dim);
  enc.A = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd coverage = Eigen::VectorXd::Zero(n);
  for (const auto &w : plan.windows) {
    std::vector<int> tokens(doc.tokens.begin() + w.begin, doc.tokens.begin() + w.end);
    Eigen::MatrixXd H, A;
    MockEncodeTokens(tokens, dim, seed, &H, &A);
    const int len = w.end - w.begin;
    enc.H.middleRows(w.begin, len) += H;
    enc.A.block(w.begin, w.begin, len, len) += A;
    coverage.segment(w.begin, len).array() += 1.0;
  }
  for (int i = 0; i < n; ++i) {
    enc.H.row(i) /= coverage[i];
    enc.A.row(i) /= enc.A.row(i).sum();
  }
  enc.mention_starts = doc.mention_starts;
  return enc;
}

void SaveEncoding(const EncodedDocument &enc, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out.write("PREN", 4);
  WriteU32(out, kEncodingVersion);
  WriteU64(out, enc.size());
  WriteU64(out, enc.dim());
  for (int i = 0; i < enc.size(); ++i) {
    for (int j = 0; j < enc.dim(); ++j) WriteF64(out, enc.H(i, j));
  }
  for (int i = 0; i < enc.size(); ++i) {
    for (int j = 0; j < enc.size(); ++j) WriteF64(out, enc.A(i, j));
  }
  WriteU64(out, enc.mention_starts.size());
  for (const auto &starts : enc.mention_starts) {
    WriteU64(out, starts.size());
    for (int row : starts) WriteU64(out, static_cast<std::uint64_t>(row));
  }
  if (!out) throw Error("failed writing '" + path + "'");
}

EncodedDocument LoadEncoding(const std::string &path, const MarkedDocument *expected,
                             int expected_dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open encoding '" + path + "'");
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "PREN", 4) != 0) {
    throw ParseError("'" + path + "' is not an encoding file");
  }
  std::uint32_t version = ReadU32(in, path);
  if (version != kEncodingVersion) {
    throw ParseError("'" + path + "' has unsupported version " + std::to_string(version));
  }
  const std::uint64_t n = ReadU64(in, path);
  const std::uint64_t d = ReadU64(in, path);
  if (n > (1u << 20) || d > (1u << 16)) {
    throw ParseError("'" + path + "' header has implausible sizes");
  }
  if (expected != nullptr && static_cast<int>(n) != expected->size()) {
    throw DimensionError("encoding '" + path + "' has " + std::to_string(n) +
                         " tokens but the marked document has " +
                         std::to_string(expected->size()));
  }
  if (expected_dim > 0 && static_cast<int>(d) != expected_dim) {
    throw DimensionError("encoding '" + path + "' has dimension " + std::to_string(d) +
                         " but " + std::to_string(expected_dim) + " was expected");
  }
  EncodedDocument enc;
  enc.H.resize(n, d);
  enc.A.resize(n, n);
  for (std::uint64_t i = 0; i < n; ++i) {
    for (std::uint64_t j = 0; j < d; ++j) enc.H(i, j) = ReadF64(in, path);
  }
  for (std::uint64_t i = 0; i < n; ++i) {
    for (std::uint64_t j = 0; j < n; ++j) enc.A(i, j) = ReadF64(in, path);
  }
  const std::uint64_t entities = ReadU64(in, path);
  if (entities > n) throw ParseError("'" + path + "' mention table is corrupt");
  enc.mention_starts.resize(entities);
  for (auto &starts : enc.mention_starts) {
    std::uint64_t count = ReadU64(in, path);
    if (count > n) throw ParseError("'" + path + "' mention table is corrupt");
    for (std::uint64_t k = 0; k < count; ++k) {
      starts.push_back(static_cast<int>(ReadU64(in, path)));
    }
  }
  for (std::uint64_t i = 0; i < n; ++i) {
    if ((enc.A.row(i).array() < 0.0).any()) {
      throw Error("encoding '" + path + "': attention row " + std::to_string(i) +
                  " has negative entries");
    }
    double sum = enc.A.row(i).sum();
    double off = std::abs(sum - 1.0);
    if (off > 1e-6) {
      throw Error("encoding '" + path + "': attention row " + std::to_string(i) +
                  " sums to " + std::to_string(sum));
    }
    if (off > 1e-9) enc.A.row(i) /= sum;
  }
  enc.Validate(1e-9);
  if (expected != nullptr && enc.mention_starts != expected->mention_starts) {
    throw DimensionError("encoding '" + path +
                         "' mention table does not match the marked document");
  }
  return enc;
}

}  // namespace pairre
