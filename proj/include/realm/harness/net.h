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

#ifndef REALM_HARNESS_NET_H_
#define REALM_HARNESS_NET_H_

#include <chrono>
#include <optional>
#include <string>

#include "realm/common/json_eigen.h"

namespace realm::harness {

struct Endpoint {
  std::string host;
  int port = 0;
};

// Parses "tcp://host:port". Throws std::invalid_argument otherwise.
Endpoint ParseEndpoint(const std::string& url);

// One framed TCP stream. Send and Receive throw ConnectionLost when the
// peer goes away, ProtocolError on bad frames and PolicyTimeout when no
// complete frame arrives in time.
class Connection {
 public:
  Connection() = default;
  explicit Connection(int fd) : fd_(fd) {}
  Connection(Connection&& other) noexcept;
  Connection& operator=(Connection&& other) noexcept;
  Connection(const Connection&) = delete;
  Connection& operator=(const Connection&) = delete;
  ~Connection();

  bool is_open() const { return fd_ >= 0; }
  void Close();

  void Send(const Json& body);
  // Sends raw bytes; used to exercise the peer's frame checks.
  void SendRaw(const std::string& bytes);
  // A non-positive timeout waits indefinitely.
  Json Receive(std::chrono::milliseconds timeout);

 private:
  void ReadExactly(char* out, size_t n, std::chrono::steady_clock::time_point deadline,
                   bool infinite);
  int fd_ = -1;
};

Connection Connect(const Endpoint& endpoint, std::chrono::milliseconds timeout);

class Listener {
 public:
  // Port 0 binds an ephemeral port.
  Listener(const std::string& host, int port);
  Listener(const Listener&) = delete;
  Listener& operator=(const Listener&) = delete;
  ~Listener();

  int port() const { return port_; }
  // Returns nullopt when no client connects within the timeout.
  std::optional<Connection> Accept(std::chrono::milliseconds timeout);

 private:
  int fd_ = -1;
  int port_ = 0;
};

}  // namespace realm::harness

#endif  // REALM_HARNESS_NET_H_
