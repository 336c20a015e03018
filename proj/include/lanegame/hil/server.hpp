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

#ifndef LANEGAME__HIL__SERVER_HPP_
#define LANEGAME__HIL__SERVER_HPP_

#include <chrono>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <utility>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "lanegame/hil/session.hpp"

namespace lanegame::hil
{

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

struct ServerOptions
{
  std::string address = "127.0.0.1";
  std::uint16_t port = 8700;  // 0 picks a free port
  double speed = 1.0;         // wall-clock pacing factor
  std::string www_root = "www";
};

inline std::string mime_type(const std::filesystem::path & p)
{
  const auto ext = p.extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html";
  if (ext == ".js" || ext == ".mjs") return "application/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  if (ext == ".ico") return "image/x-icon";
  return "application/octet-stream";
}

/// Map a request target onto a file below root. Empty on traversal attempts.
inline std::optional<std::filesystem::path> resolve_static(
  const std::filesystem::path & root, std::string_view target)
{
  std::string path(target.substr(0, target.find('?')));
  if (path.empty() || path.front() != '/') return std::nullopt;
  if (path.find("..") != std::string::npos || path.find('\\') != std::string::npos) return std::nullopt;
  if (path.back() == '/') path += "index.html";
  return root / path.substr(1);
}

class SessionServer;

namespace detail
{

class WsClient : public std::enable_shared_from_this<WsClient>
{
public:
  WsClient(tcp::socket socket, SessionServer & server) : ws_(std::move(socket)), server_(server) {}

  void accept(http::request<http::string_body> req);
  void send(std::string text)
  {
    queue_.push_back(std::move(text));
    if (queue_.size() == 1) write_next();
  }
  void close()
  {
    beast::error_code ec;
    ws_.next_layer().shutdown(tcp::socket::shutdown_both, ec);
    ws_.next_layer().close(ec);
  }

private:
  void read_next();
  void write_next()
  {
    ws_.text(true);
    ws_.async_write(asio::buffer(queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return;
      self->queue_.pop_front();
      if (!self->queue_.empty()) self->write_next();
    });
  }

  websocket::stream<tcp::socket> ws_;
  SessionServer & server_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
};

class HttpConnection : public std::enable_shared_from_this<HttpConnection>
{
public:
  HttpConnection(tcp::socket socket, SessionServer & server) : socket_(std::move(socket)), server_(server) {}
  void start() { read(); }

private:
  void read()
  {
    req_ = {};
    http::async_read(socket_, buffer_, req_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (!ec) self->handle();
    });
  }
  void handle();
  void reply(http::response<http::string_body> res)
  {
    auto sp = std::make_shared<http::response<http::string_body>>(std::move(res));
    http::async_write(socket_, *sp, [self = shared_from_this(), sp](beast::error_code ec, std::size_t) {
      if (ec) return;
      if (sp->keep_alive()) {
        self->read();
      } else {
        beast::error_code ignored;
        self->socket_.shutdown(tcp::socket::shutdown_send, ignored);
      }
    });
  }

  tcp::socket socket_;
  SessionServer & server_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
};

}  // namespace detail

/// WebSocket endpoint at /session plus static files; runs on one thread.
/// The first client to connect drives the external vehicle, later ones
/// only watch until the controller leaves.
class SessionServer
{
public:
  SessionServer(SessionEngine & engine, ServerOptions options, Logger log = stderr_logger)
  : engine_(engine), options_(std::move(options)), log_(std::move(log)), acceptor_(io_), timer_(io_)
  {
    if (!(options_.speed > 0.0)) throw ConfigError("server: speed must be > 0");
    const tcp::endpoint ep(asio::ip::make_address(options_.address), options_.port);
    acceptor_.open(ep.protocol());
    acceptor_.set_option(asio::socket_base::reuse_address(true));
    acceptor_.bind(ep);
    acceptor_.listen();
  }

  std::uint16_t port() const { return acceptor_.local_endpoint().port(); }
  asio::io_context & io() { return io_; }
  const ServerOptions & options() const { return options_; }
  SessionEngine & engine() { return engine_; }

  /// Blocks until stop().
  void run()
  {
    accept();
    period_ = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
      std::chrono::duration<double>(engine_.config().dt / options_.speed));
    deadline_ = std::chrono::steady_clock::now();
    schedule();
    io_.run();
  }

  /// Safe to call from any thread.
  void stop()
  {
    asio::post(io_, [this] {
      beast::error_code ec;
      acceptor_.close(ec);
      timer_.cancel();
      for (const auto & c : clients_) c->close();
      clients_.clear();
      io_.stop();
    });
  }

  // Called by connections (on the io thread).
  void on_open(const std::shared_ptr<detail::WsClient> & c)
  {
    clients_.insert(c);
    if (!controller_.lock()) controller_ = c;
    c->send(encode(engine_.config_message()));
    c->send(encode(engine_.state_message()));
  }

  void on_text(const std::shared_ptr<detail::WsClient> & c, std::string_view text)
  {
    const bool is_controller = controller_.lock() == c;
    // Commands change the run state; show it without waiting for a tick.
    if (engine_.handle_text(text, is_controller) == HandleResult::command) {
      broadcast(encode(engine_.state_message()));
    }
  }

  void on_close(const std::shared_ptr<detail::WsClient> & c)
  {
    clients_.erase(c);
    if (controller_.lock() == nullptr || controller_.lock() == c) {
      engine_.client_disconnected();
      controller_.reset();
      if (!clients_.empty()) controller_ = *clients_.begin();
    }
  }

  void log(const std::string & s) { log_(s); }

private:
  void accept()
  {
    acceptor_.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      std::make_shared<detail::HttpConnection>(std::move(socket), *this)->start();
      accept();
    });
  }

  // Sleep-until-deadline pacing; a late wakeup does not shift later ticks.
  void schedule()
  {
    deadline_ += period_;
    timer_.expires_at(deadline_);
    timer_.async_wait([this](beast::error_code ec) {
      if (ec) return;
      if (engine_.running()) {
        if (auto m = engine_.tick()) broadcast(encode(*m));
      } else {
        deadline_ = std::chrono::steady_clock::now();
      }
      schedule();
    });
  }

  void broadcast(const std::string & text)
  {
    for (const auto & c : clients_) c->send(text);
  }

  SessionEngine & engine_;
  ServerOptions options_;
  Logger log_;
  asio::io_context io_;
  tcp::acceptor acceptor_;
  asio::steady_timer timer_;
  std::chrono::steady_clock::duration period_{};
  std::chrono::steady_clock::time_point deadline_{};
  std::set<std::shared_ptr<detail::WsClient>> clients_;
  std::weak_ptr<detail::WsClient> controller_;
};

namespace detail
{

inline void WsClient::accept(http::request<http::string_body> req)
{
  ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
    if (ec) return;
    self->server_.on_open(self);
    self->read_next();
  });
}

inline void WsClient::read_next()
{
  ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
    if (ec) {
      self->server_.on_close(self);
      return;
    }
    const auto text = beast::buffers_to_string(self->buffer_.data());
    self->buffer_.consume(self->buffer_.size());
    // Frames may carry several newline-separated messages.
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      self->server_.on_text(self, line);
    }
    self->read_next();
  });
}

inline void HttpConnection::handle()
{
  const std::string target(req_.target());
  if (websocket::is_upgrade(req_)) {
    if (target.substr(0, target.find('?')) != "/session") {
      http::response<http::string_body> res{http::status::not_found, req_.version()};
      res.set(http::field::content_type, "text/plain");
      res.body() = "unknown websocket endpoint\n";
      res.keep_alive(false);
      res.prepare_payload();
      reply(std::move(res));
      return;
    }
    std::make_shared<WsClient>(std::move(socket_), server_)->accept(std::move(req_));
    return;
  }

  http::response<http::string_body> res{http::status::ok, req_.version()};
  res.keep_alive(req_.keep_alive());
  res.set(http::field::server, "lanegame");
  const auto file = req_.method() == http::verb::get || req_.method() == http::verb::head
                      ? resolve_static(server_.options().www_root, target)
                      : std::nullopt;
  std::ifstream in;
  if (file) in.open(*file, std::ios::binary);
  if (!file || !in || std::filesystem::is_directory(*file)) {
    res.result(file ? http::status::not_found : http::status::bad_request);
    res.set(http::field::content_type, "text/plain");
    res.body() = file ? "not found\n" : "bad request\n";
  } else {
    std::ostringstream ss;
    ss << in.rdbuf();
    res.set(http::field::content_type, mime_type(*file));
    res.body() = ss.str();
  }
  res.prepare_payload();
  if (req_.method() == http::verb::head) res.body().clear();
  reply(std::move(res));
}

}  // namespace detail

}  // namespace lanegame::hil

#endif  // LANEGAME__HIL__SERVER_HPP_
