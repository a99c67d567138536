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

#ifndef REALM_ARM_DYNAMICS_H_
#define REALM_ARM_DYNAMICS_H_

#include <span>
#include <vector>

#include "realm/arm/types.h"

namespace realm::arm {

// Clamps joint targets to the limits and the gripper target to [0, 1].
ActionCommand ClampCommand(const ActionCommand& command,
                           const ArmParams& params);

// One physics substep. Per joint j, with M = link_inertia + armature:
//   M qdd = kp (target - q) - kd qd - f qd - coulomb_ratio f sign(qd)
// integrated semi-implicitly: the stiffness term is explicit, damping and
// viscous friction are implicit in the new velocity, and Coulomb friction is
// applied as a velocity impulse that cannot reverse the sign of motion.
// Throws std::invalid_argument on a non-finite state or dt <= 0.
ArmState Step(const ArmState& state, const ArmParams& params,
              const ActionCommand& command, double dt);

// Open-loop replay: each command is held for `substeps` physics substeps of
// length 1 / (control_hz * substeps); q is sampled once per control tick.
std::vector<JointVector> ReplayTrajectory(
    const ArmState& initial, const ArmParams& params,
    std::span<const ActionCommand> commands, double control_hz, int substeps);

}  // namespace realm::arm

#endif  // REALM_ARM_DYNAMICS_H_
