// Copyright 2026 The posepilot Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "posepilot/pose_ingest.hpp"
#include "posepilot/session.hpp"

namespace posepilot {

// Pulls the next record; nullopt at end of stream. May throw IngestError.
using FrameSource = std::function<std::optional<FrameRecord>()>;

inline FrameSource vector_source(const std::vector<FrameRecord>& frames) {
  return [&frames, i = std::size_t{0}]() mutable -> std::optional<FrameRecord> {
    if (i == frames.size()) return std::nullopt;
    return frames[i++];
  };
}

// Reads replay JSONL, skipping blank lines. Errors name the 1-based line.
inline FrameSource jsonl_source(std::istream& in) {
  return [&in, line_no = std::size_t{0}]() mutable -> std::optional<FrameRecord> {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      try {
        return parse_replay_line(line);
      } catch (const IngestError& e) {
        throw IngestError(e.kind(), "line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    return std::nullopt;
  };
}

struct SessionResult {
  std::vector<StepRecord> commands;
  std::vector<Telemetry> telemetry;
  std::uint64_t frames_read = 0;
  std::uint64_t dropped = 0;
  std::optional<std::string> error;  // set when the source broke; logs are partial

  std::uint64_t emissions() const {
    std::uint64_t n = 0;
    for (const auto& r : commands) n += r.action.is_silent() ? 0 : 1;
    return n;
  }

  // Commands in the order they were first confirmed (one per confirmed run).
  std::vector<Command> confirmed_commands() const {
    std::vector<Command> out;
    for (const auto& r : commands) {
      if (r.action.fresh && r.action.kind == EmittedAction::Kind::Emit) out.push_back(r.action.command);
    }
    return out;
  }

  std::size_t distinct_commands() const {
    const auto c = confirmed_commands();
    return std::set<Command>(c.begin(), c.end()).size();
  }
};

// Runs frames through validate -> classify -> debounce -> simulator. Frames
// are bucketed into ticks of 1/tick_rate by timestamp; within a tick only the
// newest frame is processed and the older ones count as dropped. After each
// processed frame the vehicle is advanced to the next processed tick (one
// tick after the last frame).
inline SessionResult run_pipeline(const FrameSource& source, const SessionConfig& config,
                                  std::shared_ptr<const RuleTable> rules = nullptr) {
  config.validate();
  Session session(config, std::move(rules));
  SessionResult result;
  const double rate = config.tick_rate;
  auto tick_of = [rate](double t) { return static_cast<std::int64_t>(std::ceil(t * rate - 1e-9)); };

  std::optional<std::uint64_t> last_seq;
  std::optional<double> last_t;
  auto pull = [&]() -> std::optional<FrameRecord> {
    auto r = source();
    if (!r) return r;
    ++result.frames_read;
    const auto seq = seq_of(*r);
    const auto t = time_of(*r);
    if (last_seq && seq <= *last_seq) {
      throw IngestError(IngestError::Kind::MalformedInput,
                        "seq " + std::to_string(seq) + " does not increase");
    }
    if (last_t && t < *last_t) {
      throw IngestError(IngestError::Kind::MalformedInput, "timestamps go backwards at seq " + std::to_string(seq));
    }
    last_seq = seq;
    last_t = t;
    return r;
  };

  try {
    auto pending = pull();
    while (pending) {
      const auto tick = tick_of(time_of(*pending));
      auto next = pull();
      while (next && tick_of(time_of(*next)) == tick) {
        session.count_dropped();
        pending = std::move(next);
        next = pull();
      }
      result.commands.push_back(session.process(*pending));
      const auto ticks = next ? tick_of(time_of(*next)) - tick : 1;
      session.advance(static_cast<double>(ticks) / rate);
      result.telemetry.push_back(session.telemetry());
      pending = std::move(next);
    }
  } catch (const IngestError& e) {
    result.error = e.what();
  }
  result.dropped = session.dropped_frames();
  return result;
}

inline SessionResult run_pipeline(const std::vector<FrameRecord>& frames, const SessionConfig& config,
                                  std::shared_ptr<const RuleTable> rules = nullptr) {
  return run_pipeline(vector_source(frames), config, std::move(rules));
}

}  // namespace posepilot
