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

// Little-endian scalar I/O shared by the binary file formats.

#ifndef PAIRRE_SRC_BINARY_IO_H_
#define PAIRRE_SRC_BINARY_IO_H_

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include "pairre/error.h"

namespace pairre {
namespace binary {

template <typename U>
void WriteUnsigned(std::ostream &out, U v) {
  unsigned char b[sizeof(U)];
  for (size_t i = 0; i < sizeof(U); ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char *>(b), sizeof(U));
}

template <typename U>
U ReadUnsigned(std::istream &in, const std::string &path) {
  unsigned char b[sizeof(U)];
  if (!in.read(reinterpret_cast<char *>(b), sizeof(U))) {
    throw ParseError("'" + path + "' is truncated");
  }
  U v = 0;
  for (size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(b[i]) << (8 * i);
  return v;
}

inline void WriteU32(std::ostream &out, std::uint32_t v) { WriteUnsigned(out, v); }
inline void WriteU64(std::ostream &out, std::uint64_t v) { WriteUnsigned(out, v); }
inline void WriteF64(std::ostream &out, double v) {
  WriteUnsigned(out, std::bit_cast<std::uint64_t>(v));
}

inline std::uint32_t ReadU32(std::istream &in, const std::string &path) {
  return ReadUnsigned<std::uint32_t>(in, path);
}
inline std::uint64_t ReadU64(std::istream &in, const std::string &path) {
  return ReadUnsigned<std::uint64_t>(in, path);
}
inline double ReadF64(std::istream &in, const std::string &path) {
  return std::bit_cast<double>(ReadU64(in, path));
}

}  // namespace binary
}  // namespace pairre

#endif  // PAIRRE_SRC_BINARY_IO_H_
