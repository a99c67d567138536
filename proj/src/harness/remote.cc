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

#include "realm/harness/remote.h"

#include <thread>
#include <utility>

namespace realm::harness {

RemotePolicy::RemotePolicy(std::string url, RemoteOptions options)
    : url_(std::move(url)), endpoint_(ParseEndpoint(url_)), options_(std::move(options)) {
  Handshake();
}

void RemotePolicy::Handshake() {
  conn_ = Connect(endpoint_, options_.timeout);
  conn_.Send(HelloMessage(options_.cameras));
  HelloAck ack;
  try {
    ack = ParseHelloAck(conn_.Receive(options_.timeout));
  } catch (...) {
    conn_.Close();
    throw;
  }
  if (ack.version != kProtocolVersion) {
    conn_.Close();
    throw ProtocolError("server speaks protocol version " + std::to_string(ack.version) +
                        ", expected " + std::to_string(kProtocolVersion));
  }
  ack_ = ack;
  id_ = ack.policy_id.empty() ? url_ : ack.policy_id;
}

Json RemotePolicy::Request(const Json& message) {
  if (!conn_.is_open()) Handshake();
  try {
    conn_.Send(message);
    return conn_.Receive(options_.timeout);
  } catch (...) {
    // A late or partial reply would desynchronize the stream.
    conn_.Close();
    throw;
  }
}

void RemotePolicy::Reset(const EpisodeStart& start) {
  if (!conn_.is_open()) Handshake();
  EpisodeStart s = start;
  if (!ack_.capabilities.wants_privileged) s.privileged.reset();
  const Json reply = Request(ResetMessage(s));
  try {
    ExpectType(reply, "reset_ack");
  } catch (...) {
    conn_.Close();
    throw;
  }
}

std::vector<arm::ActionCommand> RemotePolicy::Act(const Observation& obs) {
  const Json reply = Request(ObserveMessage(obs));
  try {
    return ParseAct(reply);
  } catch (...) {
    conn_.Close();
    throw;
  }
}

void RemotePolicy::End(double progression) {
  if (!conn_.is_open()) return;
  conn_.Send(EndMessage(progression));
}

Json RemotePolicy::Echo(const Json& payload) {
  const Json reply = Request(EchoMessage(payload));
  ExpectType(reply, "echo");
  return reply.value("payload", Json());
}

void ServeConnection(Connection& conn, Policy& policy) {
  auto fail = [&](const std::string& why) {
    try {
      conn.Send(ErrorMessage(why));
    } catch (const std::exception&) {
    }
    conn.Close();
  };
  try {
    const Json hello = conn.Receive(std::chrono::milliseconds(0));
    ParseHello(hello);
    const int version = hello.value("version", -1);
    if (version != kProtocolVersion) {
      fail("protocol version mismatch: got " + std::to_string(version) + ", expected " +
           std::to_string(kProtocolVersion));
      return;
    }
    conn.Send(HelloAckMessage({kProtocolVersion, policy.Id(), policy.capabilities()}));
    for (;;) {
      Json m;
      try {
        m = conn.Receive(std::chrono::milliseconds(0));
      } catch (const ConnectionLost&) {
        conn.Close();
        return;
      }
      const std::string type = m["type"].get<std::string>();
      if (type == "reset") {
        policy.Reset(ParseReset(m));
        conn.Send(ResetAckMessage());
      } else if (type == "observe") {
        std::vector<arm::ActionCommand> chunk = policy.Act(ParseObserve(m));
        ValidateChunk(chunk);
        conn.Send(ActMessage(chunk));
      } else if (type == "end") {
        policy.End(ParseEnd(m));
      } else if (type == "echo") {
        conn.Send(m);
      } else {
        fail("unexpected message type '" + type + "'");
        return;
      }
    }
  } catch (const ConnectionLost&) {
    conn.Close();
  } catch (const std::exception& e) {
    fail(e.what());
  }
}

void Serve(Listener& listener, const PolicyFactory& factory, const ServeOptions& options,
           const std::atomic<bool>* stop) {
  std::vector<std::thread> sessions;
  int accepted = 0;
  while (!(stop && stop->load()) &&
         (options.max_connections == 0 || accepted < options.max_connections)) {
    std::optional<Connection> conn = listener.Accept(std::chrono::milliseconds(200));
    if (!conn) continue;
    ++accepted;
    sessions.emplace_back([c = std::move(*conn), &factory]() mutable {
      std::unique_ptr<Policy> policy = factory();
      ServeConnection(c, *policy);
    });
  }
  for (auto& t : sessions) t.join();
}

}  // namespace realm::harness
