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

#ifndef PAIRRE_BIND_H_
#define PAIRRE_BIND_H_

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pairre/autodiff.h"

namespace pairre {

// Fallback for parameter structs without variable-length members.
template <typename Vars, typename Params>
void ResizeLike(Vars &, const Params &) {}

// Records every tensor of a parameter struct on `tape`, as variables when
// `trainable` is set and as constants otherwise.
template <template <typename> class S>
S<ad::Var> BindToTape(ad::Tape &tape, const S<Eigen::MatrixXd> &params, bool trainable) {
  S<ad::Var> vars;
  ResizeLike(vars, params);
  std::vector<ad::Var *> slots;
  VisitFields(vars, [&](const std::string &, ad::Var &v) { slots.push_back(&v); });
  size_t i = 0;
  VisitFields(params, [&](const std::string &, const Eigen::MatrixXd &m) {
    *slots[i++] = trainable ? tape.Variable(m) : tape.Constant(m);
  });
  return vars;
}

}  // namespace pairre

#endif  // PAIRRE_BIND_H_
