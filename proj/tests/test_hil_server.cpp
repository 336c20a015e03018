// Copyright 2026 The lanegame Authors
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

#include <chrono>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>

#include <unistd.h>

#include <gtest/gtest.h>

#include "lanegame/hil/server.hpp"
#include "support.hpp"

namespace lt = lanegame::testing;
namespace hil = lanegame::hil;
namespace fs = std::filesystem;
namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace
{

class ServerFixture : public ::testing::Test
{
protected:
  void SetUp() override
  {
    // ctest runs each case in its own process, possibly in parallel.
    const auto * info = ::testing::UnitTest::GetInstance()->current_test_info();
    www_ = fs::temp_directory_path() / ("lanegame_www_" + std::string(info->name()) + "_" +
                                        std::to_string(::getpid()));
    fs::create_directories(www_);
    std::ofstream(www_ / "index.html") << "<!doctype html><title>cockpit</title>\n";
    std::ofstream(www_ / "app.js") << "console.log(1);\n";

    auto cfg = lt::scenario("hil_case1");
    cfg.duration = 3.0;
    engine_ = std::make_unique<hil::SessionEngine>(cfg, hil::SessionOptions{}, [](const std::string &) {});
    hil::ServerOptions opt;
    opt.port = 0;
    opt.speed = 4.0;
    opt.www_root = www_.string();
    server_ = std::make_unique<hil::SessionServer>(*engine_, opt, [](const std::string &) {});
    thread_ = std::thread([this] { server_->run(); });
  }

  void TearDown() override
  {
    server_->stop();
    thread_.join();
    fs::remove_all(www_);
  }

  http::response<http::string_body> get(const std::string & target)
  {
    asio::io_context io;
    tcp::socket s(io);
    s.connect({asio::ip::make_address("127.0.0.1"), server_->port()});
    http::request<http::string_body> req{http::verb::get, target, 11};
    req.set(http::field::host, "localhost");
    http::write(s, req);
    beast::flat_buffer buf;
    http::response<http::string_body> res;
    http::read(s, buf, res);
    return res;
  }

  struct Client
  {
    asio::io_context io;
    websocket::stream<tcp::socket> ws{io};

    Client(std::uint16_t port, const std::string & target = "/session")
    {
      ws.next_layer().connect({asio::ip::make_address("127.0.0.1"), port});
      ws.handshake("localhost", target);
    }
    hil::Message read()
    {
      beast::flat_buffer buf;
      ws.read(buf);
      return hil::decode(beast::buffers_to_string(buf.data()));
    }
    void send(const hil::Message & m) { ws.write(asio::buffer(hil::encode(m))); }
  };

  fs::path www_;
  std::unique_ptr<hil::SessionEngine> engine_;
  std::unique_ptr<hil::SessionServer> server_;
  std::thread thread_;
};

}  // namespace

TEST(StaticFiles, ResolveRejectsTraversal)
{
  EXPECT_EQ(*hil::resolve_static("www", "/"), fs::path("www") / "index.html");
  EXPECT_EQ(*hil::resolve_static("www", "/js/app.js?v=2"), fs::path("www") / "js/app.js");
  EXPECT_FALSE(hil::resolve_static("www", "/../etc/passwd"));
  EXPECT_FALSE(hil::resolve_static("www", "relative"));
  EXPECT_FALSE(hil::resolve_static("www", "/a\\b"));
  EXPECT_EQ(hil::mime_type("x.html"), "text/html");
  EXPECT_EQ(hil::mime_type("x.js"), "application/javascript");
}

TEST_F(ServerFixture, ServesStaticFiles)
{
  auto res = get("/");
  EXPECT_EQ(res.result(), http::status::ok);
  EXPECT_NE(res.body().find("cockpit"), std::string::npos);
  EXPECT_EQ(res[http::field::content_type], "text/html");
  res = get("/app.js");
  EXPECT_EQ(res.result(), http::status::ok);
  EXPECT_EQ(res[http::field::content_type], "application/javascript");
  EXPECT_EQ(get("/missing.css").result(), http::status::not_found);
  EXPECT_EQ(get("/../secret").result(), http::status::bad_request);
}

TEST_F(ServerFixture, SessionLifecycle)
{
  Client c(server_->port());
  const auto config = c.read();
  ASSERT_TRUE(std::holds_alternative<hil::ConfigMessage>(config));
  EXPECT_EQ(std::get<hil::ConfigMessage>(config).scenario, "hil_case1");
  const auto first = c.read();
  ASSERT_TRUE(std::holds_alternative<hil::StateMessage>(first));
  EXPECT_EQ(std::get<hil::StateMessage>(first).t, 0.0);

  c.send(hil::ControlMessage{0.0, 1.0});
  c.send(hil::CommandMessage{hil::SessionCommand::start});
  double last_t = -1.0;
  int states = 0;
  hil::StateMessage m;
  do {
    const auto msg = c.read();
    ASSERT_TRUE(std::holds_alternative<hil::StateMessage>(msg));
    m = std::get<hil::StateMessage>(msg);
    EXPECT_GE(m.t, last_t);
    last_t = m.t;
    ++states;
  } while (!m.done);
  EXPECT_EQ(m.reason, "completed");
  EXPECT_NEAR(m.t, 3.0, 1e-9);
  EXPECT_GE(states, 55);
  // The accepted control reached the external vehicle.
  EXPECT_GT(m.vehicles[1].v_x, 9.0 + 2.0);
  c.ws.close(websocket::close_code::normal);
}

TEST_F(ServerFixture, SpectatorCannotDrive)
{
  Client driver(server_->port());
  driver.read();
  driver.read();
  Client watcher(server_->port());
  EXPECT_TRUE(std::holds_alternative<hil::ConfigMessage>(watcher.read()));
  watcher.read();
  watcher.send(hil::CommandMessage{hil::SessionCommand::start});
  // Round trip through the driver so the watcher's frame has been handled.
  driver.send(hil::CommandMessage{hil::SessionCommand::pause});
  const auto m = driver.read();
  ASSERT_TRUE(std::holds_alternative<hil::StateMessage>(m));
  EXPECT_EQ(std::get<hil::StateMessage>(m).t, 0.0);
  EXPECT_FALSE(engine_->running());
}

TEST_F(ServerFixture, DisconnectPauses)
{
  {
    Client c(server_->port());
    c.read();
    c.read();
    c.send(hil::CommandMessage{hil::SessionCommand::start});
    c.read();
    c.read();
    c.ws.close(websocket::close_code::normal);
  }
  for (int k = 0; k < 100 && engine_->running(); ++k) std::this_thread::sleep_for(std::chrono::milliseconds(10));
  EXPECT_FALSE(engine_->running());
  EXPECT_FALSE(engine_->done());
}

TEST_F(ServerFixture, UnknownWebSocketPathRefused)
{
  EXPECT_THROW(Client(server_->port(), "/other"), boost::system::system_error);
}
