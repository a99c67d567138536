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

#ifndef REALM_HARNESS_REMOTE_H_
#define REALM_HARNESS_REMOTE_H_

#include <atomic>
#include <chrono>
#include <string>
#include <vector>

#include "realm/harness/net.h"
#include "realm/harness/policy.h"
#include "realm/harness/protocol.h"

namespace realm::harness {

struct RemoteOptions {
  std::chrono::milliseconds timeout{10000};  // per request
  std::vector<CameraInfo> cameras;           // announced in hello
};

// Client side of the wire protocol. Connects and handshakes on
// construction. After a timeout or protocol error the connection is closed
// and re-established at the next Reset.
class RemotePolicy : public Policy {
 public:
  RemotePolicy(std::string url, RemoteOptions options);

  std::string Id() const override { return id_; }
  Capabilities capabilities() const override { return ack_.capabilities; }
  void Reset(const EpisodeStart& start) override;
  std::vector<arm::ActionCommand> Act(const Observation& obs) override;
  void End(double progression) override;

  // Sends an echo message and returns the echoed payload.
  Json Echo(const Json& payload);

 private:
  void Handshake();
  Json Request(const Json& message);

  std::string url_;
  Endpoint endpoint_;
  RemoteOptions options_;
  Connection conn_;
  HelloAck ack_;
  std::string id_;
};

struct ServeOptions {
  // Stop after serving this many connections; 0 serves until `stop`.
  int max_connections = 0;
};

// Runs one session on an accepted connection: handshake, then reset,
// observe, end and echo messages until the peer closes. Malformed frames and
// policy exceptions are answered with an error message and end the session.
void ServeConnection(Connection& conn, Policy& policy);

// Accepts connections and serves each on its own thread with a fresh policy
// from the factory.
void Serve(Listener& listener, const PolicyFactory& factory, const ServeOptions& options,
           const std::atomic<bool>* stop = nullptr);

}  // namespace realm::harness

#endif  // REALM_HARNESS_REMOTE_H_
