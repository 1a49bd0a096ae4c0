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

#include "pairre/optimizer.h"

#include <cmath>
#include <numbers>

#include "pairre/error.h"

namespace pairre {

double LrSchedule::At(std::int64_t step) const {
  if (step < 0) return 0.0;
  if (step < warmup_steps) {
    return peak * static_cast<double>(step) / static_cast<double>(warmup_steps);
  }
  if (step >= total_steps) return 0.0;
  const double decay_steps = static_cast<double>(total_steps - warmup_steps);
  const double progress = static_cast<double>(step - warmup_steps) / decay_steps;
  return peak * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

AdamWState AdamWState::Zeros(Eigen::Index size) {
  AdamWState state;
  state.first_moment = Eigen::VectorXd::Zero(size);
  state.second_moment = Eigen::VectorXd::Zero(size);
  return state;
}

void AdamWStep(Eigen::VectorXd &params, const Eigen::VectorXd &grad, AdamWState &state,
               double lr, const AdamWConfig &cfg) {
  if (grad.size() != params.size() || state.first_moment.size() != params.size()) {
    throw DimensionError("AdamW state does not match the parameter vector");
  }
  ++state.updates;
  state.first_moment = cfg.beta1 * state.first_moment + (1.0 - cfg.beta1) * grad;
  state.second_moment =
      cfg.beta2 * state.second_moment + (1.0 - cfg.beta2) * grad.cwiseAbs2();
  if (lr == 0.0) return;
  const double t = static_cast<double>(state.updates);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  params *= 1.0 - lr * cfg.weight_decay;
  params.array() -= lr * (state.first_moment.array() / c1) /
                    ((state.second_moment.array() / c2).sqrt() + cfg.epsilon);
}

}  // namespace pairre
