// Copyright 2026 The posepilot Authors
// SPDX-License-Identifier: Apache-2.0

// Minimal blocking websocket client for exercising the bridge in tests.
#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/asio/connect.hpp>
#include <boost/asio/io_context.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <nlohmann/json.hpp>

#include "posepilot/bridge.hpp"
#include "posepilot/pipeline.hpp"

namespace posepilot::testing {

class WsClient {
 public:
  explicit WsClient(unsigned short port, const std::string& path = "/session") : ws_(ioc_) {
    namespace net = boost::asio;
    net::ip::tcp::resolver resolver(ioc_);
    const auto results = resolver.resolve("127.0.0.1", std::to_string(port));
    boost::beast::get_lowest_layer(ws_).connect(results);
    ws_.handshake("127.0.0.1:" + std::to_string(port), path);
    ws_.text(true);
  }

  void send(const std::string& text) { ws_.write(boost::asio::buffer(text)); }
  void send(const nlohmann::json& j) { send(j.dump()); }

  void send_frame(const FrameRecord& r) {
    auto j = to_json(r);
    j["kind"] = "frame_in";
    send(j);
  }

  // Next message, or nullopt on timeout or once the server closed the socket.
  std::optional<nlohmann::json> read(std::chrono::milliseconds timeout = std::chrono::milliseconds(3000)) {
    if (closed_) return std::nullopt;
    boost::beast::flat_buffer buffer;
    bool done = false;
    boost::beast::error_code result;
    ws_.async_read(buffer, [&](boost::beast::error_code ec, std::size_t) {
      done = true;
      result = ec;
    });
    ioc_.restart();
    ioc_.run_for(timeout);
    if (!done) {
      boost::beast::get_lowest_layer(ws_).cancel();
      ioc_.restart();
      ioc_.run();
      return std::nullopt;
    }
    if (result) {
      closed_ = true;
      return std::nullopt;
    }
    return nlohmann::json::parse(boost::beast::buffers_to_string(buffer.data()));
  }

  // Reads until `pred` accepts a message; collects everything seen on the way.
  std::optional<nlohmann::json> read_until(const std::function<bool(const nlohmann::json&)>& pred,
                                           int max_messages = 500, std::vector<nlohmann::json>* seen = nullptr) {
    for (int i = 0; i < max_messages; ++i) {
      auto m = read();
      if (!m) return std::nullopt;
      if (seen) seen->push_back(*m);
      if (pred(*m)) return m;
    }
    return std::nullopt;
  }

  // Sends one frame and waits for the telemetry tick that processed it.
  // Returns every message received meanwhile.
  std::vector<nlohmann::json> step(const FrameRecord& r) {
    std::vector<nlohmann::json> seen;
    send_frame(r);
    const auto seq = seq_of(r);
    read_until(
        [seq](const nlohmann::json& m) {
          return m["kind"] == "telemetry_out" && m["frame_seq"].is_number() && m["frame_seq"] == seq;
        },
        500, &seen);
    return seen;
  }

  bool closed() const { return closed_; }

 private:
  boost::asio::io_context ioc_;
  boost::beast::websocket::stream<boost::beast::tcp_stream> ws_;
  bool closed_ = false;
};

// (frame_seq, command) pairs a lock-stepped client should see for `frames`.
inline std::vector<std::pair<std::uint64_t, std::string>> expected_commands(const std::vector<FrameRecord>& frames,
                                                                           const SessionConfig& cfg) {
  Session s(cfg);
  std::vector<std::pair<std::uint64_t, std::string>> out;
  for (const auto& f : frames) {
    const auto r = s.process(f);
    if (!r.action.is_silent()) out.emplace_back(r.seq, std::string(to_string(r.action.command)));
  }
  return out;
}

inline std::vector<std::pair<std::uint64_t, std::string>> commands_in(const std::vector<nlohmann::json>& msgs) {
  std::vector<std::pair<std::uint64_t, std::string>> out;
  for (const auto& m : msgs) {
    if (m["kind"] == "command_out") out.emplace_back(m["frame_seq"].get<std::uint64_t>(), m["command"].get<std::string>());
  }
  return out;
}

}  // namespace posepilot::testing
