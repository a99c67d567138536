// Copyright 2026 The realm-desk Authors
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

#include "realm/arm/dynamics.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace realm::arm {
namespace {

void RequireFinite(const ArmState& state) {
  if (state.q.allFinite() && state.qdot.allFinite() &&
      std::isfinite(state.gripper_aperture) && std::isfinite(state.time)) {
    return;
  }
  std::ostringstream msg;
  msg << "arm::Step: non-finite state (q = [" << state.q.transpose()
      << "], qdot = [" << state.qdot.transpose()
      << "], gripper = " << state.gripper_aperture << ", t = " << state.time
      << ")";
  throw std::invalid_argument(msg.str());
}

}  // namespace

void ArmParams::Validate() const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("ArmParams: " + what);
  };
  if ((friction.array() < 0.0).any() || !friction.allFinite())
    fail("friction must be finite and non-negative");
  if ((armature.array() < 0.0).any() || !armature.allFinite())
    fail("armature must be finite and non-negative");
  if ((kp.array() <= 0.0).any()) fail("kp must be positive");
  if ((kd.array() < 0.0).any()) fail("kd must be non-negative");
  if ((link_inertia.array() <= 0.0).any()) fail("link_inertia must be positive");
  if ((limits.lower.array() > limits.upper.array()).any())
    fail("joint limits must satisfy lower <= upper");
  if (!(control_hz > 0.0)) fail("control_hz must be positive");
  if (substeps < 1) fail("substeps must be >= 1");
  if (coulomb_ratio < 0.0) fail("coulomb_ratio must be non-negative");
  if (!(gripper_slew > 0.0)) fail("gripper_slew must be positive");
}

ActionCommand ClampCommand(const ActionCommand& command,
                           const ArmParams& params) {
  return {params.limits.Clamp(command.joint_targets),
          std::clamp(command.gripper_target, 0.0, 1.0)};
}

ArmState Step(const ArmState& state, const ArmParams& params,
              const ActionCommand& command, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("arm::Step: dt must be positive and finite");
  }
  RequireFinite(state);
  const ActionCommand cmd = ClampCommand(command, params);

  ArmState next = state;
  for (int j = 0; j < kNumJoints; ++j) {
    const double inertia = params.link_inertia(j) + params.armature(j);
    const double viscous = params.friction(j);
    const double coulomb = params.coulomb_ratio * viscous;

    const double v_drive =
        state.qdot(j) + dt * params.kp(j) * (cmd.joint_targets(j) - state.q(j)) / inertia;
    const double v_damped = v_drive / (1.0 + dt * (params.kd(j) + viscous) / inertia);
    if (!std::isfinite(v_damped)) {
      throw std::invalid_argument("arm::Step: non-finite velocity (unstable parameters)");
    }
    const double stick = dt * coulomb / inertia;
    double v = 0.0;
    if (std::abs(v_damped) > stick) {
      v = v_damped - std::copysign(stick, v_damped);
    }
    double q = state.q(j) + dt * v;
    if (q < params.limits.lower(j)) {
      q = params.limits.lower(j);
      v = 0.0;
    } else if (q > params.limits.upper(j)) {
      q = params.limits.upper(j);
      v = 0.0;
    }
    next.q(j) = q;
    next.qdot(j) = v;
  }

  const double max_move = params.gripper_slew * dt;
  next.gripper_aperture = std::clamp(
      state.gripper_aperture +
          std::clamp(cmd.gripper_target - state.gripper_aperture, -max_move, max_move),
      0.0, 1.0);
  next.time = state.time + dt;
  return next;
}

std::vector<JointVector> ReplayTrajectory(
    const ArmState& initial, const ArmParams& params,
    std::span<const ActionCommand> commands, double control_hz, int substeps) {
  if (!(control_hz > 0.0)) throw std::invalid_argument("control_hz must be > 0");
  if (substeps < 1) throw std::invalid_argument("substeps must be >= 1");
  std::vector<JointVector> out;
  out.reserve(commands.size());
  const double dt = 1.0 / (control_hz * substeps);
  ArmState state = initial;
  for (const ActionCommand& command : commands) {
    for (int s = 0; s < substeps; ++s) state = Step(state, params, command, dt);
    out.push_back(state.q);
  }
  return out;
}

}  // namespace realm::arm
