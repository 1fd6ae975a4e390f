// Copyright 2026 The posepilot Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <utility>

#include "posepilot/command.hpp"

namespace posepilot {

struct EmittedAction {
  enum class Kind : std::uint8_t { Silent, Emit, EmitHover };

  Kind kind = Kind::Silent;
  Command command = Command::Hover;  // meaningful for Emit; Hover for EmitHover
  bool fresh = false;                // first emission of a confirmed run

  static EmittedAction silent() { return {}; }
  static EmittedAction emit(Command c, bool fresh) { return {Kind::Emit, c, fresh}; }
  static EmittedAction hover(bool fresh) { return {Kind::EmitHover, Command::Hover, fresh}; }

  bool is_silent() const { return kind == Kind::Silent; }
  friend bool operator==(const EmittedAction&, const EmittedAction&) = default;
};

inline constexpr std::string_view to_string(EmittedAction::Kind k) {
  switch (k) {
    case EmittedAction::Kind::Silent: return "silent";
    case EmittedAction::Kind::Emit: return "emit";
    case EmittedAction::Kind::EmitHover: return "emit_hover";
  }
  return "?";
}

struct DebounceConfig {
  std::uint32_t threshold = 2;  // consecutive identical observations before emitting
  // Re-emit a held (non-snapshot) command every N steps after confirmation;
  // 0 disables re-emission entirely.
  std::uint32_t keepalive_interval = 1;
};

struct DebounceState {
  std::optional<Observation> last_observation;  // nullopt: nothing observed yet
  std::uint64_t consecutive_count = 0;
  std::optional<Command> last_emitted;          // Command::Hover after a hover

  friend bool operator==(const DebounceState&, const DebounceState&) = default;
};

inline DebounceState reset(const DebounceState&) { return {}; }

// Advances the debouncer by one observation. A command (or the absence of
// one) must be seen `threshold` times in a row before it is emitted.
// Snapshot is edge-triggered; everything else is re-emitted while held.
inline std::pair<DebounceState, EmittedAction> step(DebounceState state, const Observation& obs,
                                                    const DebounceConfig& cfg = {}) {
  if (cfg.threshold == 0) throw std::invalid_argument("debounce threshold must be >= 1");

  if (state.last_observation && *state.last_observation == obs) {
    ++state.consecutive_count;
  } else {
    state.last_observation = obs;
    state.consecutive_count = 1;
  }

  const std::uint64_t n = state.consecutive_count;
  if (n < cfg.threshold) return {std::move(state), EmittedAction::silent()};

  const bool fresh = n == cfg.threshold;
  if (!fresh) {
    if (obs == Command::Snapshot || cfg.keepalive_interval == 0) {
      return {std::move(state), EmittedAction::silent()};
    }
    if ((n - cfg.threshold) % cfg.keepalive_interval != 0) {
      return {std::move(state), EmittedAction::silent()};
    }
  }

  if (obs) {
    state.last_emitted = *obs;
    return {std::move(state), EmittedAction::emit(*obs, fresh)};
  }
  state.last_emitted = Command::Hover;
  return {std::move(state), EmittedAction::hover(fresh)};
}

// Stateful wrapper used by a session.
class Debouncer {
 public:
  explicit Debouncer(DebounceConfig cfg = {}) : cfg_(cfg) {
    if (cfg_.threshold == 0) throw std::invalid_argument("debounce threshold must be >= 1");
  }

  EmittedAction step(const Observation& obs) {
    auto [next, action] = posepilot::step(std::move(state_), obs, cfg_);
    state_ = std::move(next);
    return action;
  }

  void reset() { state_ = posepilot::reset(state_); }
  const DebounceState& state() const { return state_; }
  const DebounceConfig& config() const { return cfg_; }

 private:
  DebounceConfig cfg_;
  DebounceState state_;
};

}  // namespace posepilot
