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

#ifndef REALM_HARNESS_POLICY_H_
#define REALM_HARNESS_POLICY_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "realm/arm/types.h"
#include "realm/render/image.h"
#include "realm/world/scene.h"
#include "realm/world/task.h"

namespace realm::harness {

inline constexpr int kMaxChunk = 16;

struct NamedImage {
  std::string name;
  render::Image image;

  bool operator==(const NamedImage&) const = default;
};

struct Observation {
  int step = 0;
  arm::JointVector joint_pos = arm::JointVector::Zero();
  arm::JointVector joint_vel = arm::JointVector::Zero();
  double gripper = 1.0;
  std::vector<NamedImage> images;

  bool operator==(const Observation&) const = default;
};

// Ground truth handed to oracle policies that ask for it.
struct PrivilegedInfo {
  world::TaskSpec task;
  world::Scene scene;
  arm::ArmParams params;
};

struct EpisodeStart {
  std::string task_id;
  std::string instruction;
  uint64_t episode_seed = 0;
  std::optional<PrivilegedInfo> privileged;
};

struct Capabilities {
  bool wants_images = true;
  bool wants_privileged = false;
};

// Raised when a remote policy does not answer in time.
class PolicyTimeout : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised on malformed frames or messages that break the protocol.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a remote endpoint cannot be reached or drops the connection.
class ConnectionLost : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::string Id() const = 0;
  virtual Capabilities capabilities() const { return {}; }
  virtual void Reset(const EpisodeStart& start) = 0;
  // Returns 1 to kMaxChunk actions, all executed before the next call.
  virtual std::vector<arm::ActionCommand> Act(const Observation& obs) = 0;
  virtual void End(double /*progression*/) {}
};

// One instance per worker; policies are not shared across threads.
using PolicyFactory = std::function<std::unique_ptr<Policy>()>;

// Throws ProtocolError unless the chunk holds 1..kMaxChunk finite actions.
void ValidateChunk(const std::vector<arm::ActionCommand>& chunk);

}  // namespace realm::harness

#endif  // REALM_HARNESS_POLICY_H_
