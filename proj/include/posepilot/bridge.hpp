// Copyright 2026 The posepilot Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

#include <boost/asio/dispatch.hpp>
#include <boost/asio/io_context.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <nlohmann/json.hpp>

#include "posepilot/pose_ingest.hpp"
#include "posepilot/session.hpp"

namespace posepilot::bridge {

// Wire protocol: one JSON object per websocket text message on /session.
//
// client -> server
//   {"kind":"frame_in","seq":N,"t":secs,"keypoints":[[x,y,c] x 18] | null}
//   {"kind":"emergency","action":"hover" | "land" | "resume"}
// server -> client (seq counts outbound messages)
//   {"kind":"command_out","seq":N,"t":secs,"frame_seq":M,"command":"up"}
//   {"kind":"telemetry_out","seq":N, ...telemetry record...}
//   {"kind":"snapshot_event","seq":N,"t":secs,"snapshot_count":K}
//   {"kind":"error","seq":N,"code":"...","message":"..."}   then close

inline constexpr std::string_view kSessionPath = "/session";

class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(std::string code, const std::string& msg) : std::runtime_error(msg), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

class BindError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using ClientMessage = std::variant<FrameRecord, Emergency>;

inline ClientMessage parse_client_message(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError("malformed_json", e.what());
  }
  if (!doc.is_object()) throw ProtocolError("malformed_message", "message is not an object");

  std::string kind = doc.value("kind", std::string{});
  if (kind.empty()) kind = doc.contains("action") ? "emergency" : "frame_in";

  if (kind == "emergency") {
    const auto action = doc.find("action");
    if (action == doc.end() || !action->is_string()) {
      throw ProtocolError("malformed_message", "emergency needs a string \"action\"");
    }
    const auto e = emergency_from_string(action->get<std::string>());
    if (!e) throw ProtocolError("unknown_action", "unknown emergency action");
    return *e;
  }
  if (kind == "frame_in") {
    try {
      return parse_replay_line(text);
    } catch (const IngestError& e) {
      throw ProtocolError("malformed_frame", e.what());
    }
  }
  throw ProtocolError("unknown_kind", "unknown message kind \"" + kind + "\"");
}

inline nlohmann::json command_message(const StepRecord& r, double t) {
  return {{"kind", "command_out"}, {"t", t}, {"frame_seq", r.seq},
          {"command", std::string(to_string(r.action.command))}};
}

inline nlohmann::json telemetry_message(const Telemetry& tm) {
  auto j = to_json(tm);
  j["kind"] = "telemetry_out";
  return j;
}

inline nlohmann::json snapshot_message(double t, std::uint64_t count) {
  return {{"kind", "snapshot_event"}, {"t", t}, {"snapshot_count", count}};
}

inline nlohmann::json error_message(std::string_view code, std::string_view msg) {
  return {{"kind", "error"}, {"code", code}, {"message", msg}};
}

namespace detail {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

// One connected client: its own pipeline, simulator and tick timer, all
// serialized on the connection's strand.
class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket&& socket, const SessionConfig& config, std::shared_ptr<const RuleTable> rules)
      : ws_(std::move(socket)), timer_(ws_.get_executor()), session_(config, std::move(rules)) {}

  void run() {
    net::dispatch(ws_.get_executor(), beast::bind_front_handler(&Connection::read_request, shared_from_this()));
  }

 private:
  void read_request() {
    beast::get_lowest_layer(ws_).expires_after(std::chrono::seconds(30));
    http::async_read(ws_.next_layer(), buffer_, request_,
                     beast::bind_front_handler(&Connection::on_request, shared_from_this()));
  }

  void on_request(beast::error_code ec, std::size_t) {
    if (ec) return;
    const auto target = request_.target();
    if (!websocket::is_upgrade(request_) || std::string_view(target.data(), target.size()) != kSessionPath) {
      auto res = std::make_shared<http::response<http::string_body>>(http::status::not_found, request_.version());
      res->set(http::field::content_type, "text/plain");
      res->body() = "websocket endpoint is " + std::string(kSessionPath) + "\n";
      res->keep_alive(false);
      res->prepare_payload();
      http::async_write(ws_.next_layer(), *res, [self = shared_from_this(), res](beast::error_code, std::size_t) {
        beast::error_code ignored;
        self->ws_.next_layer().socket().shutdown(tcp::socket::shutdown_send, ignored);
      });
      return;
    }
    beast::get_lowest_layer(ws_).expires_never();
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(request_, beast::bind_front_handler(&Connection::on_accept, shared_from_this()));
  }

  void on_accept(beast::error_code ec) {
    if (ec) return;
    ws_.text(true);
    period_ = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(1.0 / session_.config().tick_rate));
    next_tick_ = std::chrono::steady_clock::now() + period_;
    schedule_tick();
    read();
  }

  void read() { ws_.async_read(buffer_, beast::bind_front_handler(&Connection::on_read, shared_from_this())); }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      stopped_ = true;
      timer_.cancel();
      return;
    }
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    try {
      handle(parse_client_message(text));
    } catch (const ProtocolError& e) {
      fail(e.code(), e.what());
      return;
    }
    read();
  }

  void handle(ClientMessage msg) {
    if (const auto* e = std::get_if<Emergency>(&msg)) {
      session_.emergency(*e);
      return;
    }
    auto& frame = std::get<FrameRecord>(msg);
    const auto seq = seq_of(frame);
    if (last_in_seq_ && seq <= *last_in_seq_) {
      throw ProtocolError("seq_not_increasing", "frame seq " + std::to_string(seq) + " does not increase");
    }
    last_in_seq_ = seq;
    if (pending_) session_.count_dropped();  // newest frame wins
    pending_ = std::move(frame);
  }

  void schedule_tick() {
    timer_.expires_at(next_tick_);
    timer_.async_wait(beast::bind_front_handler(&Connection::on_tick, shared_from_this()));
  }

  void on_tick(beast::error_code ec) {
    if (ec || stopped_) return;
    const double t = session_.simulator().time();
    if (pending_) {
      const auto rec = session_.process(*pending_);
      pending_.reset();
      if (!rec.action.is_silent()) send(command_message(rec, t));
      if (rec.action.fresh && rec.action.command == Command::Snapshot) {
        send(snapshot_message(t, session_.snapshot_count()));
      }
    }
    session_.advance(1.0 / session_.config().tick_rate);
    send(telemetry_message(session_.telemetry()));
    next_tick_ += period_;
    const auto now = std::chrono::steady_clock::now();
    if (next_tick_ < now) next_tick_ = now;  // fell behind; do not burst
    schedule_tick();
  }

  void fail(std::string_view code, std::string_view msg) {
    stopped_ = true;
    closing_ = true;
    timer_.cancel();
    send(error_message(code, msg));
  }

  void send(nlohmann::json msg) {
    msg["seq"] = out_seq_++;
    outbox_.push_back(msg.dump());
    if (outbox_.size() == 1) write();
  }

  void write() {
    ws_.async_write(net::buffer(outbox_.front()),
                    beast::bind_front_handler(&Connection::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) {
      stopped_ = true;
      timer_.cancel();
      return;
    }
    outbox_.pop_front();
    if (!outbox_.empty()) {
      write();
    } else if (closing_) {
      ws_.async_close(websocket::close_code::policy_error, [self = shared_from_this()](beast::error_code) {});
    }
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> request_;
  net::steady_timer timer_;
  Session session_;
  std::optional<FrameRecord> pending_;
  std::optional<std::uint64_t> last_in_seq_;
  std::deque<std::string> outbox_;
  std::uint64_t out_seq_ = 0;
  std::chrono::steady_clock::duration period_{};
  std::chrono::steady_clock::time_point next_tick_;
  bool stopped_ = false;
  bool closing_ = false;
};

}  // namespace detail

// Websocket service: every client on /session gets an isolated Session.
class BridgeServer {
 public:
  BridgeServer(SessionConfig config, const std::string& address, unsigned short port)
      : config_(std::move(config)), rules_(resolve_rules(config_)), acceptor_(ioc_) {
    config_.validate();
    namespace net = boost::asio;
    boost::system::error_code ec;
    const auto addr = net::ip::make_address(address, ec);
    if (ec) throw BindError("bad address " + address + ": " + ec.message());
    const net::ip::tcp::endpoint ep(addr, port);
    acceptor_.open(ep.protocol(), ec);
    if (!ec) acceptor_.set_option(net::socket_base::reuse_address(true), ec);
    if (!ec) acceptor_.bind(ep, ec);
    if (!ec) acceptor_.listen(net::socket_base::max_listen_connections, ec);
    if (ec) throw BindError("cannot listen on " + address + ":" + std::to_string(port) + ": " + ec.message());
  }

  BridgeServer(const BridgeServer&) = delete;
  BridgeServer& operator=(const BridgeServer&) = delete;
  ~BridgeServer() { stop(); }

  unsigned short port() const { return acceptor_.local_endpoint().port(); }
  boost::asio::io_context& context() { return ioc_; }

  // Starts accepting and runs the event loop on `threads` background threads.
  void start(unsigned threads = 1) {
    accept();
    for (unsigned i = 0; i < std::max(1u, threads); ++i) workers_.emplace_back([this] { ioc_.run(); });
  }

  // Runs the event loop on the calling thread until stop().
  void run() {
    accept();
    ioc_.run();
  }

  void stop() {
    ioc_.stop();
    for (auto& w : workers_) {
      if (w.joinable()) w.join();
    }
    workers_.clear();
  }

 private:
  void accept() {
    acceptor_.async_accept(boost::asio::make_strand(ioc_), [this](boost::beast::error_code ec,
                                                                  boost::asio::ip::tcp::socket socket) {
      if (!ec) std::make_shared<detail::Connection>(std::move(socket), config_, rules_)->run();
      if (acceptor_.is_open()) accept();
    });
  }

  SessionConfig config_;
  std::shared_ptr<const RuleTable> rules_;
  boost::asio::io_context ioc_;
  boost::asio::ip::tcp::acceptor acceptor_;
  std::vector<std::thread> workers_;
};

}  // namespace posepilot::bridge
