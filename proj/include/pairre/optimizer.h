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

#ifndef PAIRRE_OPTIMIZER_H_
#define PAIRRE_OPTIMIZER_H_

#include <cstdint>

#include <Eigen/Dense>

namespace pairre {

// Linear warmup from 0 to `peak` over `warmup_steps`, then cosine decay to
// 0 at `total_steps`.
struct LrSchedule {
  double peak = 1e-4;
  std::int64_t warmup_steps = 0;
  std::int64_t total_steps = 1;

  double At(std::int64_t step) const;
};

struct AdamWConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.01;
};

struct AdamWState {
  Eigen::VectorXd first_moment;
  Eigen::VectorXd second_moment;
  std::int64_t updates = 0;

  static AdamWState Zeros(Eigen::Index size);
};

// One AdamW update with decoupled weight decay and bias-corrected moments.
void AdamWStep(Eigen::VectorXd &params, const Eigen::VectorXd &grad, AdamWState &state,
               double lr, const AdamWConfig &cfg);

}  // namespace pairre

#endif  // PAIRRE_OPTIMIZER_H_
