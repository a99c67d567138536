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

#include <atomic>
#include <chrono>
#include <thread>

#include <gtest/gtest.h>
#include "harness_test_util.h"

namespace realm::harness {
namespace {

using std::chrono::milliseconds;
using test_util::Config;
using test_util::RunTask;
using test_util::Task;

// Serves policies from `factory` on an ephemeral port until destroyed.
class Server {
 public:
  explicit Server(PolicyFactory factory)
      : listener_("127.0.0.1", 0), factory_(std::move(factory)),
        thread_([this] { Serve(listener_, factory_, {}, &stop_); }) {}
  ~Server() {
    stop_ = true;
    thread_.join();
  }
  std::string url() const { return "tcp://127.0.0.1:" + std::to_string(listener_.port()); }
  int port() const { return listener_.port(); }

 private:
  Listener listener_;
  PolicyFactory factory_;
  std::atomic<bool> stop_{false};
  std::thread thread_;
};

RemoteOptions Options(milliseconds timeout = milliseconds(10000)) {
  RemoteOptions o;
  o.timeout = timeout;
  o.cameras = {{"external", 224, 224}, {"wrist", 224, 224}};
  return o;
}

Json Hello(int version) {
  Json h = HelloMessage({{"external", 224, 224}});
  h["version"] = version;
  return h;
}

TEST(Remote, EchoReturnsThePayloadUnchanged) {
  Server server([] { return std::make_unique<HoldPolicy>(); });
  RemotePolicy client(server.url(), Options());
  const Json payload = {{"text", "ping"}, {"values", {1, 2.5, -3e-12}}, {"nested", {{"a", nullptr}}}};
  EXPECT_EQ(client.Echo(payload), payload);
  EXPECT_EQ(client.Id(), "scripted:hold");
  EXPECT_FALSE(client.capabilities().wants_images);
}

TEST(Remote, ExpertOverTcpMatchesInProcess) {
  Server server([] { return std::make_unique<ExpertPolicy>(); });
  RemotePolicy client(server.url(), Options());
  EXPECT_TRUE(client.capabilities().wants_privileged);
  for (const char* id : {"put_mug_in_tray", "push_button", "close_drawer"}) {
    ExpertPolicy local;
    EXPECT_EQ(RunTask(Task(id), client, 5), RunTask(Task(id), local, 5)) << id;
  }
}

TEST(Remote, NoisyExpertOverTcpMatchesInProcess) {
  Server server([] { return std::make_unique<NoisyExpertPolicy>(0.05); });
  RemotePolicy client(server.url(), Options());
  NoisyExpertPolicy local(0.05);
  EXPECT_EQ(RunTask(Task("stack_block_on_box"), client, 8),
            RunTask(Task("stack_block_on_box"), local, 8));
}

TEST(Remote, StatelessRulesOverTcpMatchInProcess) {
  auto task = Task("pick_can");
  task.max_steps = 25;
  for (const char* name : {"hold", "zero"}) {
    Server server([name] { return MakeScriptedPolicy(name, Config().params); });
    RemotePolicy client(server.url(), Options());
    auto local = MakeScriptedPolicy(name, Config().params);
    const RolloutRecord first = RunTask(task, client, 1);
    EXPECT_EQ(first, RunTask(task, *local, 1)) << name;
    // No hidden state across sequential episodes on one connection.
    EXPECT_EQ(RunTask(task, client, 1), first) << name;
  }
}

TEST(Remote, ImagesCrossTheWireIntact) {
  class Recorder : public Policy {
   public:
    explicit Recorder(std::vector<Observation>* seen) : seen_(seen) {}
    std::string Id() const override { return "recorder"; }
    void Reset(const EpisodeStart&) override {}
    std::vector<arm::ActionCommand> Act(const Observation& obs) override {
      seen_->push_back(obs);
      return {{obs.joint_pos, obs.gripper}};
    }
    std::vector<Observation>* seen_;
  };
  std::vector<Observation> remote_seen, local_seen;
  Server server([&] { return std::make_unique<Recorder>(&remote_seen); });
  auto task = Task("put_cube_in_bowl");
  task.max_steps = 2;
  {
    RemotePolicy client(server.url(), Options());
    RunTask(task, client, 0);
  }
  Recorder local(&local_seen);
  RunTask(task, local, 0);
  ASSERT_EQ(local_seen.size(), 2u);
  ASSERT_EQ(local_seen[0].images.size(), 2u);
  for (int i = 0; i < 100 && remote_seen.size() < 2; ++i) std::this_thread::sleep_for(milliseconds(10));
  EXPECT_EQ(remote_seen, local_seen);
}

TEST(Remote, VersionMismatchIsRefusedAtHandshake) {
  Server server([] { return std::make_unique<HoldPolicy>(); });
  Connection conn = Connect(ParseEndpoint(server.url()), milliseconds(2000));
  conn.Send(Hello(2));
  const Json reply = conn.Receive(milliseconds(2000));
  EXPECT_EQ(reply["type"], "error");
  EXPECT_NE(reply["message"].get<std::string>().find("version"), std::string::npos);
  EXPECT_THROW(conn.Receive(milliseconds(2000)), ConnectionLost);
}

TEST(Remote, OversizedFrameIsRejected) {
  Server server([] { return std::make_unique<HoldPolicy>(); });
  Connection conn = Connect(ParseEndpoint(server.url()), milliseconds(2000));
  conn.Send(Hello(kProtocolVersion));
  EXPECT_EQ(conn.Receive(milliseconds(2000))["type"], "hello_ack");
  conn.SendRaw(std::string("\x04\x00\x00\x01", 4));
  const Json reply = conn.Receive(milliseconds(2000));
  EXPECT_EQ(reply["type"], "error");
  EXPECT_NE(reply["message"].get<std::string>().find("64 MiB"), std::string::npos);
  EXPECT_THROW(conn.Receive(milliseconds(2000)), ConnectionLost);
}

TEST(Remote, MalformedFrameClosesTheConnection) {
  Server server([] { return std::make_unique<HoldPolicy>(); });
  Connection conn = Connect(ParseEndpoint(server.url()), milliseconds(2000));
  conn.Send(Hello(kProtocolVersion));
  conn.Receive(milliseconds(2000));
  conn.SendRaw(std::string("\0\0\0\x05{oops", 9));
  EXPECT_EQ(conn.Receive(milliseconds(2000))["type"], "error");
  EXPECT_THROW(conn.Receive(milliseconds(2000)), ConnectionLost);
}

TEST(Remote, ClientRejectsOversizedReplies) {
  Listener listener("127.0.0.1", 0);
  std::thread fake([&] {
    auto conn = listener.Accept(milliseconds(5000));
    ASSERT_TRUE(conn);
    conn->Receive(milliseconds(5000));
    conn->SendRaw(std::string("\x7f\xff\xff\xff", 4));
    std::this_thread::sleep_for(milliseconds(100));
  });
  EXPECT_THROW(RemotePolicy("tcp://127.0.0.1:" + std::to_string(listener.port()), Options()),
               ProtocolError);
  fake.join();
}

TEST(Remote, SlowPolicyTimesOutAndTheNextEpisodeReconnects) {
  class Slow : public HoldPolicy {
   public:
    std::vector<arm::ActionCommand> Act(const Observation& obs) override {
      if (obs.step == 3) std::this_thread::sleep_for(milliseconds(400));
      return HoldPolicy::Act(obs);
    }
  };
  Server server([] { return std::make_unique<Slow>(); });
  RemotePolicy client(server.url(), Options(milliseconds(100)));
  auto task = Task("pick_can");
  task.max_steps = 10;
  const RolloutRecord r = RunTask(task, client, 0);
  EXPECT_EQ(r.status, EpisodeStatus::kPolicyTimeout);
  EXPECT_EQ(r.steps.size(), 3u);
  task.max_steps = 3;
  EXPECT_EQ(RunTask(task, client, 0).status, EpisodeStatus::kMaxSteps);
}

TEST(Remote, PolicyExceptionBecomesAProtocolError) {
  Server server([] { return std::make_unique<ExpertPolicy>(); });
  RemotePolicy client(server.url(), Options());
  // The expert refuses a reset without privileged state.
  EXPECT_THROW(client.Reset({"t", "i", 0, std::nullopt}), ProtocolError);
}

TEST(Remote, LostConnectionIsReported) {
  Listener listener("127.0.0.1", 0);
  std::thread fake([&] {
    auto conn = listener.Accept(milliseconds(5000));
    ASSERT_TRUE(conn);
    conn->Receive(milliseconds(5000));
    conn->Send(HelloAckMessage({kProtocolVersion, "flaky", {false, false}}));
    conn->Receive(milliseconds(5000));
    conn->Send(ResetAckMessage());
    conn->Receive(milliseconds(5000));
    conn->Close();
  });
  RemotePolicy client("tcp://127.0.0.1:" + std::to_string(listener.port()), Options());
  const RolloutRecord r = RunTask(Task("pick_can"), client, 0);
  fake.join();
  EXPECT_EQ(r.status, EpisodeStatus::kConnectionLost);
  EXPECT_TRUE(r.steps.empty());
}

TEST(Remote, UnreachableEndpointThrows) {
  int port = 0;
  {
    Listener probe("127.0.0.1", 0);
    port = probe.port();
  }
  EXPECT_THROW(RemotePolicy("tcp://127.0.0.1:" + std::to_string(port), Options()), ConnectionLost);
}

TEST(Endpoint, ParsesHostAndPort) {
  const Endpoint e = ParseEndpoint("tcp://localhost:8080");
  EXPECT_EQ(e.host, "localhost");
  EXPECT_EQ(e.port, 8080);
  EXPECT_THROW(ParseEndpoint("http://x:1"), std::invalid_argument);
  EXPECT_THROW(ParseEndpoint("tcp://x"), std::invalid_argument);
  EXPECT_THROW(ParseEndpoint("tcp://x:70000"), std::invalid_argument);
  EXPECT_THROW(ParseEndpoint("tcp://x:12a"), std::invalid_argument);
}

}  // namespace
}  // namespace realm::harness
