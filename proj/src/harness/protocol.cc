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

#include "realm/harness/protocol.h"

#include <array>
#include <cmath>
#include <fstream>

#include "realm/arm/params_io.h"
#include "realm/world/scene_io.h"
#include "realm/world/task.h"

namespace realm::harness {

namespace {

constexpr std::string_view kAlphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int Base64Value(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}

template <typename T>
T Field(const Json& message, const char* key) {
  if (!message.contains(key)) {
    throw ProtocolError("message '" + message.value("type", "?") + "' lacks field '" + key + "'");
  }
  try {
    return message.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ProtocolError("message field '" + std::string(key) + "' has the wrong type");
  }
}

arm::JointVector JointField(const Json& message, const char* key) {
  const Json& a = message.contains(key) ? message.at(key) : Json();
  if (!a.is_array() || a.size() != arm::kNumJoints) {
    throw ProtocolError("field '" + std::string(key) + "' must hold 7 numbers");
  }
  arm::JointVector v;
  for (int i = 0; i < arm::kNumJoints; ++i) {
    if (!a[i].is_number()) throw ProtocolError("field '" + std::string(key) + "' is not numeric");
    v(i) = a[i].get<double>();
  }
  return v;
}

}  // namespace

std::string Base64Encode(std::span<const uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kAlphabet[v >> 18];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  const size_t rest = bytes.size() - i;
  if (rest == 1) {
    const uint32_t v = bytes[i] << 16;
    out += kAlphabet[v >> 18];
    out += kAlphabet[(v >> 12) & 63];
    out += "==";
  } else if (rest == 2) {
    const uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out += kAlphabet[v >> 18];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

std::vector<uint8_t> Base64Decode(std::string_view text) {
  if (text.size() % 4 != 0) throw ProtocolError("base64 length is not a multiple of 4");
  std::vector<uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (size_t i = 0; i < text.size(); i += 4) {
    const bool last = i + 4 == text.size();
    int pad = 0;
    std::array<int, 4> v{};
    for (int k = 0; k < 4; ++k) {
      const char c = text[i + k];
      if (c == '=' && last && k >= 2) {
        ++pad;
        v[k] = 0;
        continue;
      }
      if (pad > 0) throw ProtocolError("base64 padding in the middle of a block");
      v[k] = Base64Value(c);
      if (v[k] < 0) throw ProtocolError("invalid base64 character");
    }
    const uint32_t n = (v[0] << 18) | (v[1] << 12) | (v[2] << 6) | v[3];
    out.push_back(static_cast<uint8_t>(n >> 16));
    if (pad < 2) out.push_back(static_cast<uint8_t>((n >> 8) & 0xff));
    if (pad < 1) out.push_back(static_cast<uint8_t>(n & 0xff));
    // Reject non-canonical encodings whose discarded bits are set.
    if ((pad == 1 && (v[2] & 3)) || (pad == 2 && (v[1] & 15))) {
      throw ProtocolError("non-canonical base64 padding bits");
    }
  }
  return out;
}

std::string EncodeFrame(const Json& body) {
  const std::string text = body.dump();
  if (text.size() > kMaxFrameBytes) {
    throw ProtocolError("frame body of " + std::to_string(text.size()) +
                        " bytes exceeds the 64 MiB limit");
  }
  const uint32_t n = static_cast<uint32_t>(text.size());
  std::string frame;
  frame.reserve(4 + text.size());
  frame += static_cast<char>(n >> 24);
  frame += static_cast<char>((n >> 16) & 0xff);
  frame += static_cast<char>((n >> 8) & 0xff);
  frame += static_cast<char>(n & 0xff);
  frame += text;
  return frame;
}

uint32_t DecodeFrameLength(std::span<const uint8_t, 4> h) {
  const uint32_t n = (uint32_t{h[0]} << 24) | (uint32_t{h[1]} << 16) | (uint32_t{h[2]} << 8) | h[3];
  if (n > kMaxFrameBytes) {
    throw ProtocolError("frame length " + std::to_string(n) + " exceeds the 64 MiB limit");
  }
  return n;
}

Json ParseBody(std::string_view body) {
  Json j = Json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw ProtocolError("frame body is not valid JSON");
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw ProtocolError("frame body must be a JSON object with a string 'type'");
  }
  return j;
}

Json DecodeFrame(std::string_view frame) {
  if (frame.size() < 4) throw ProtocolError("frame shorter than its header");
  std::array<uint8_t, 4> header;
  for (int i = 0; i < 4; ++i) header[i] = static_cast<uint8_t>(frame[i]);
  const uint32_t n = DecodeFrameLength(header);
  if (frame.size() - 4 != n) throw ProtocolError("frame length does not match its header");
  return ParseBody(frame.substr(4));
}

std::vector<CameraInfo> CameraInfos(const world::Scene& scene) {
  std::vector<CameraInfo> out;
  for (const auto& c : scene.cameras) {
    out.push_back({c.name, c.intrinsics.width, c.intrinsics.height});
  }
  return out;
}

Json HelloMessage(const std::vector<CameraInfo>& cameras) {
  Json cams = Json::array();
  for (const auto& c : cameras) {
    cams.push_back({{"name", c.name}, {"width", c.width}, {"height", c.height}});
  }
  return {{"type", "hello"}, {"version", kProtocolVersion}, {"cameras", cams}};
}

std::vector<CameraInfo> ParseHello(const Json& m) {
  ExpectType(m, "hello");
  std::vector<CameraInfo> out;
  const Json cams = m.value("cameras", Json::array());
  if (!cams.is_array()) throw ProtocolError("hello 'cameras' must be an array");
  for (const auto& c : cams) {
    out.push_back({Field<std::string>(c, "name"), Field<int>(c, "width"), Field<int>(c, "height")});
  }
  return out;
}

Json HelloAckMessage(const HelloAck& ack) {
  return {{"type", "hello_ack"},
          {"version", ack.version},
          {"policy", ack.policy_id},
          {"wants_images", ack.capabilities.wants_images},
          {"wants_privileged", ack.capabilities.wants_privileged}};
}

HelloAck ParseHelloAck(const Json& m) {
  ExpectType(m, "hello_ack");
  HelloAck ack;
  ack.version = Field<int>(m, "version");
  ack.policy_id = m.value("policy", std::string());
  ack.capabilities.wants_images = m.value("wants_images", true);
  ack.capabilities.wants_privileged = m.value("wants_privileged", false);
  return ack;
}

Json ResetMessage(const EpisodeStart& s) {
  Json j = {{"type", "reset"},
            {"task_id", s.task_id},
            {"instruction", s.instruction},
            {"episode_seed", s.episode_seed}};
  if (s.privileged) {
    j["privileged"] = {{"task", world::TaskSpecToJson(s.privileged->task)},
                       {"scene", world::SceneToJson(s.privileged->scene)},
                       {"arm_params", arm::ArmParamsToJson(s.privileged->params)}};
  }
  return j;
}

EpisodeStart ParseReset(const Json& m) {
  ExpectType(m, "reset");
  EpisodeStart s;
  s.task_id = Field<std::string>(m, "task_id");
  s.instruction = Field<std::string>(m, "instruction");
  s.episode_seed = Field<uint64_t>(m, "episode_seed");
  if (m.contains("privileged")) {
    const Json& p = m.at("privileged");
    try {
      s.privileged = PrivilegedInfo{world::TaskSpecFromJson(p.at("task")),
                                    world::SceneFromJson(p.at("scene")),
                                    arm::ArmParamsFromJson(p.at("arm_params"))};
    } catch (const std::exception& e) {
      throw ProtocolError(std::string("bad privileged state in reset: ") + e.what());
    }
  }
  return s;
}

Json ResetAckMessage() { return {{"type", "reset_ack"}}; }

Json ObserveMessage(const Observation& obs) {
  Json images = Json::array();
  for (const auto& im : obs.images) {
    images.push_back({{"name", im.name},
                      {"width", im.image.width},
                      {"height", im.image.height},
                      {"rgb8_base64", Base64Encode(im.image.pixels)}});
  }
  return {{"type", "observe"},
          {"step", obs.step},
          {"joint_pos", VectorToJson(obs.joint_pos)},
          {"joint_vel", VectorToJson(obs.joint_vel)},
          {"gripper", obs.gripper},
          {"images", images}};
}

Observation ParseObserve(const Json& m) {
  ExpectType(m, "observe");
  Observation obs;
  obs.step = Field<int>(m, "step");
  obs.joint_pos = JointField(m, "joint_pos");
  obs.joint_vel = JointField(m, "joint_vel");
  obs.gripper = Field<double>(m, "gripper");
  const Json images = m.value("images", Json::array());
  if (!images.is_array()) throw ProtocolError("observe 'images' must be an array");
  for (const auto& im : images) {
    NamedImage named;
    named.name = Field<std::string>(im, "name");
    named.image.width = Field<int>(im, "width");
    named.image.height = Field<int>(im, "height");
    named.image.pixels = Base64Decode(Field<std::string>(im, "rgb8_base64"));
    if (named.image.width <= 0 || named.image.height <= 0 ||
        named.image.pixels.size() !=
            static_cast<size_t>(named.image.width) * named.image.height * 3) {
      throw ProtocolError("image '" + named.name + "' size does not match width*height*3");
    }
    obs.images.push_back(std::move(named));
  }
  return obs;
}

Json ActMessage(const std::vector<arm::ActionCommand>& chunk) {
  Json actions = Json::array();
  for (const auto& a : chunk) actions.push_back(VectorToJson(a.ToVector()));
  return {{"type", "act"}, {"actions", actions}};
}

std::vector<arm::ActionCommand> ParseAct(const Json& m) {
  ExpectType(m, "act");
  const Json& actions = m.contains("actions") ? m.at("actions") : Json();
  if (!actions.is_array()) throw ProtocolError("act 'actions' must be an array");
  std::vector<arm::ActionCommand> chunk;
  for (const auto& a : actions) {
    if (!a.is_array() || a.size() != arm::kActionSize) {
      throw ProtocolError("each action must hold 8 numbers");
    }
    arm::ActionVector v;
    for (int i = 0; i < arm::kActionSize; ++i) {
      if (!a[i].is_number()) throw ProtocolError("action entries must be numbers");
      v(i) = a[i].get<double>();
    }
    chunk.push_back(arm::ActionCommand::FromVector(v));
  }
  ValidateChunk(chunk);
  return chunk;
}

Json EndMessage(double progression) { return {{"type", "end"}, {"progression", progression}}; }

double ParseEnd(const Json& m) {
  ExpectType(m, "end");
  return Field<double>(m, "progression");
}

Json EchoMessage(const Json& payload) { return {{"type", "echo"}, {"payload", payload}}; }

Json ErrorMessage(const std::string& message) {
  return {{"type", "error"}, {"message", message}};
}

void ExpectType(const Json& m, std::string_view type) {
  const std::string got = m.is_object() ? m.value("type", std::string()) : std::string();
  if (got == type) return;
  if (got == "error") throw ProtocolError("peer error: " + m.value("message", std::string()));
  throw ProtocolError("expected '" + std::string(type) + "' message, got '" + got + "'");
}

std::vector<std::pair<std::string, Json>> GoldenMessages() {
  std::vector<std::pair<std::string, Json>> out;
  out.emplace_back("hello", HelloMessage({{"external", 224, 224}, {"wrist", 224, 224}}));
  HelloAck ack;
  ack.policy_id = "echo";
  ack.capabilities = {true, false};
  out.emplace_back("hello_ack", HelloAckMessage(ack));
  out.emplace_back("reset", ResetMessage({"put_cube_in_bowl", "put the red cube in the blue bowl",
                                          1234567890123ULL, std::nullopt}));
  out.emplace_back("reset_ack", ResetAckMessage());

  Observation obs;
  obs.step = 3;
  obs.joint_pos << 0.0, -0.785, 0.0, -2.356, 0.0, 1.571, 0.785;
  obs.joint_vel << 0.5, -0.25, 0.125, 0.0, -1.5, 2.0, -0.0625;
  obs.gripper = 0.75;
  render::Image img(4, 2);
  for (size_t i = 0; i < img.pixels.size(); ++i) img.pixels[i] = static_cast<uint8_t>(i * 11);
  render::Image img2(2, 3);
  for (size_t i = 0; i < img2.pixels.size(); ++i) img2.pixels[i] = static_cast<uint8_t>(255 - i * 7);
  obs.images = {{"external", img}, {"wrist", img2}};
  out.emplace_back("observe", ObserveMessage(obs));
  obs.images.clear();
  out.emplace_back("observe_no_images", ObserveMessage(obs));

  arm::ActionCommand a;
  a.joint_targets << 0.0, -0.785, 0.0, -2.356, 0.0, 1.571, 0.785;
  a.gripper_target = 1.0;
  arm::ActionCommand b;
  b.joint_targets << 0.125, -0.5, 0.25, -2.0, -0.125, 1.25, 0.5;
  b.gripper_target = 0.0;
  out.emplace_back("act", ActMessage({a, b}));
  out.emplace_back("act_zero", ActMessage({arm::ActionCommand{arm::JointVector::Zero(), 0.0}}));
  out.emplace_back("end", EndMessage(0.6));
  out.emplace_back("echo", EchoMessage({{"text", "ping"}, {"values", {1, 2.5, -3}}}));
  out.emplace_back("error", ErrorMessage("protocol version mismatch"));
  return out;
}

void WriteGoldenFrames(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  Json manifest = Json::array();
  for (const auto& [name, body] : GoldenMessages()) {
    const std::string frame = EncodeFrame(body);
    std::ofstream bin(dir / (name + ".bin"), std::ios::binary);
    bin.write(frame.data(), static_cast<std::streamsize>(frame.size()));
    std::ofstream json(dir / (name + ".json"));
    json << body.dump(2) << '\n';
    if (!bin || !json) throw std::runtime_error("cannot write golden frame " + name);
    manifest.push_back({{"name", name}, {"type", body["type"]}, {"bytes", frame.size()}});
  }
  std::ofstream m(dir / "manifest.json");
  m << manifest.dump(2) << '\n';
  if (!m) throw std::runtime_error("cannot write golden manifest");
}

}  // namespace realm::harness
