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

#ifndef REALM_HARNESS_PROTOCOL_H_
#define REALM_HARNESS_PROTOCOL_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "realm/common/json_eigen.h"
#include "realm/harness/policy.h"
#include "realm/world/scene.h"

namespace realm::harness {

// Frames are a 4-byte big-endian body length followed by a UTF-8 JSON body.
// Bodies are serialized compactly with keys in sorted order.
inline constexpr int kProtocolVersion = 1;
inline constexpr uint32_t kMaxFrameBytes = 64u << 20;

std::string Base64Encode(std::span<const uint8_t> bytes);
// Throws ProtocolError on characters outside the alphabet or bad padding.
std::vector<uint8_t> Base64Decode(std::string_view text);

// Throws ProtocolError when the body exceeds kMaxFrameBytes.
std::string EncodeFrame(const Json& body);
uint32_t DecodeFrameLength(std::span<const uint8_t, 4> header);
// Parses one complete frame. Throws ProtocolError on a length mismatch, an
// oversized length or a body that is not a JSON object with a "type".
Json DecodeFrame(std::string_view frame);
Json ParseBody(std::string_view body);

struct CameraInfo {
  std::string name;
  int width = 0;
  int height = 0;

  bool operator==(const CameraInfo&) const = default;
};

std::vector<CameraInfo> CameraInfos(const world::Scene& scene);

struct HelloAck {
  int version = kProtocolVersion;
  std::string policy_id;
  Capabilities capabilities;
};

Json HelloMessage(const std::vector<CameraInfo>& cameras);
std::vector<CameraInfo> ParseHello(const Json& message);
Json HelloAckMessage(const HelloAck& ack);
HelloAck ParseHelloAck(const Json& message);

Json ResetMessage(const EpisodeStart& start);
EpisodeStart ParseReset(const Json& message);
Json ResetAckMessage();

Json ObserveMessage(const Observation& obs);
Observation ParseObserve(const Json& message);

Json ActMessage(const std::vector<arm::ActionCommand>& chunk);
// Validates 1..kMaxChunk actions of 8 finite reals.
std::vector<arm::ActionCommand> ParseAct(const Json& message);

Json EndMessage(double progression);
double ParseEnd(const Json& message);

Json EchoMessage(const Json& payload);
Json ErrorMessage(const std::string& message);

// Throws ProtocolError unless message["type"] == type; an "error" message
// is reported with its text.
void ExpectType(const Json& message, std::string_view type);

// Deterministic fixtures covering every message type, as (name, body).
std::vector<std::pair<std::string, Json>> GoldenMessages();
// Writes <name>.bin (the encoded frame) and <name>.json (the body) per
// fixture plus manifest.json.
void WriteGoldenFrames(const std::filesystem::path& dir);

}  // namespace realm::harness

#endif  // REALM_HARNESS_PROTOCOL_H_
