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

#ifndef PAIRRE_ENCODER_H_
#define PAIRRE_ENCODER_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pairre/corpus.h"

namespace pairre {

// Token embeddings and last-layer token attention for one marked document.
struct EncodedDocument {
  Eigen::MatrixXd H;  // n x d, one row per marked token
  Eigen::MatrixXd A;  // n x n, row-stochastic
  std::vector<std::vector<int>> mention_starts;

  int size() const { return static_cast<int>(H.rows()); }
  int dim() const { return static_cast<int>(H.cols()); }

  // Throws DimensionError / Error if shapes disagree, a mention row is out
  // of range, or a row of A is negative or off the simplex by more than
  // `tolerance`.
  void Validate(double tolerance = 1e-9) const;
};

struct WindowPlan {
  struct Window {
    int begin;
    int end;
  };
  std::vector<Window> windows;
};

// Windows of width `width` advancing by width - overlap. The last window
// is truncated at n, so consecutive windows overlap by exactly `overlap`.
WindowPlan PlanWindows(int n, int width, int overlap);

inline constexpr int kDefaultWindowWidth = 512;
inline constexpr int kDefaultWindowOverlap = 128;

// Deterministic stand-in for a pretrained encoder. Each token has a
// hash-based content embedding. Attention scores compare content plus a
// sinusoidal position code, values carry content only, and
// H = content + A * content.
EncodedDocument MockEncode(const MarkedDocument &doc, int dim, std::uint64_t seed);

// Same as MockEncode on the raw token list, positions counted from 0.
void MockEncodeTokens(const std::vector<int> &tokens, int dim,
                      std::uint64_t seed, Eigen::MatrixXd *H, Eigen::MatrixXd *A);

// Content embedding of `token`; entries uniform with unit expected norm.
Eigen::VectorXd TokenEmbedding(int token, int dim, std::uint64_t seed);

// Position code added to the content embedding when scoring attention.
Eigen::VectorXd PositionCode(int position, int dim);

// Encodes overlapping windows independently and merges them: H rows are
// averaged over the windows covering a token; A rows are mapped to global
// columns, averaged the same way, and renormalized.
EncodedDocument EncodeWindows(const MarkedDocument &doc, int width, int overlap,
                              int dim, std::uint64_t seed);

// Binary encoding file, little-endian:
//   0  char[4]  magic "PREN"
//   4  u32      version (1)
//   8  u64      n
//   16 u64      d
//   24 f64[n*d] H, row-major
//   .. f64[n*n] A, row-major
//   .. u64      number of entities, then per entity: u64 count, u64[count]
//               start-marker rows
inline constexpr std::uint32_t kEncodingVersion = 1;

void SaveEncoding(const EncodedDocument &enc, const std::string &path);

// Loads and validates an encoding. Rows of A within 1e-9 of stochastic are
// kept bit-exact, rows within 1e-6 are renormalized, anything else is an
// error. When `expected` is given, n and the mention table must match it;
// when `expected_dim` > 0, d must match.
EncodedDocument LoadEncoding(const std::string &path,
                             const MarkedDocument *expected = nullptr,
                             int expected_dim = 0);

}  // namespace pairre

#endif  // PAIRRE_ENCODER_H_
