// Copyright 2026 The posepilot Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "posepilot/command.hpp"
#include "posepilot/geometry.hpp"
#include "posepilot/pose_ingest.hpp"

namespace posepilot {

// Angle interval in degrees: [lo, hi), or [lo, hi] when closed_hi is set.
struct AngleInterval {
  double lo = 0.0;
  double hi = 180.0;
  bool closed_hi = false;

  bool contains(double a) const { return lo <= a && (closed_hi ? a <= hi : a < hi); }
  friend bool operator==(const AngleInterval&, const AngleInterval&) = default;
};

// Normalized distance tests. "s1 < 1" reads "S1 < Sr"; all comparisons are strict.
enum class DistancePredicate : std::uint8_t { S1Below, S1Above, S2Below, S2Above };

inline constexpr std::string_view to_string(DistancePredicate p) {
  switch (p) {
    case DistancePredicate::S1Below: return "s1<1";
    case DistancePredicate::S1Above: return "s1>1";
    case DistancePredicate::S2Below: return "s2<1";
    case DistancePredicate::S2Above: return "s2>1";
  }
  return "?";
}

inline bool holds(DistancePredicate p, const GestureFeatures& f) {
  switch (p) {
    case DistancePredicate::S1Below: return f.s1 < 1.0;
    case DistancePredicate::S1Above: return f.s1 > 1.0;
    case DistancePredicate::S2Below: return f.s2 < 1.0;
    case DistancePredicate::S2Above: return f.s2 > 1.0;
  }
  return false;
}

struct GestureRule {
  Command command = Command::Wait;
  std::optional<AngleInterval> alpha1;  // nullopt: angle not constrained
  std::optional<AngleInterval> alpha2;
  std::vector<DistancePredicate> distances;  // conjunction

  bool matches(const GestureFeatures& f) const {
    if (alpha1 && !alpha1->contains(f.alpha1)) return false;
    if (alpha2 && !alpha2->contains(f.alpha2)) return false;
    for (const auto p : distances) {
      if (!holds(p, f)) return false;
    }
    return true;
  }
  friend bool operator==(const GestureRule&, const GestureRule&) = default;
};

class RuleTableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Ordered rule list; the first matching rule wins.
class RuleTable {
 public:
  RuleTable() = default;
  explicit RuleTable(std::vector<GestureRule> rules) : rules_(std::move(rules)) {}

  const std::vector<GestureRule>& rules() const { return rules_; }
  std::size_t size() const { return rules_.size(); }
  const GestureRule& operator[](std::size_t i) const { return rules_[i]; }

  std::optional<Command> classify(const GestureFeatures& f) const {
    for (const auto& r : rules_) {
      if (r.matches(f)) return r.command;
    }
    return std::nullopt;
  }

  friend bool operator==(const RuleTable&, const RuleTable&) = default;

 private:
  std::vector<GestureRule> rules_;
};

inline RuleTable builtin_rule_table() {
  using P = DistancePredicate;
  const AngleInterval rest{0, 40};
  return RuleTable({
      {Command::Snapshot, std::nullopt, std::nullopt, {P::S1Below, P::S2Below}},
      {Command::Backward, rest, std::nullopt, {P::S2Below}},
      {Command::Forward, std::nullopt, rest, {P::S1Below}},
      {Command::Left, rest, AngleInterval{70, 100}, {P::S1Above}},
      {Command::Right, AngleInterval{70, 100}, rest, {P::S2Above}},
      {Command::Up, AngleInterval{80, 180}, AngleInterval{80, 180, true}, {P::S1Above, P::S2Above}},
      {Command::Down, AngleInterval{40, 80}, AngleInterval{40, 80}, {P::S1Above, P::S2Above}},
      {Command::TurnCW, AngleInterval{40, 85}, AngleInterval{85, 180}, {P::S1Above, P::S2Above}},
      {Command::TurnCCW, AngleInterval{85, 180}, AngleInterval{40, 85}, {P::S1Above, P::S2Above}},
      {Command::Wait, rest, rest, {P::S1Above, P::S2Above}},
  });
}

inline const RuleTable& default_rule_table() {
  static const RuleTable table = builtin_rule_table();
  return table;
}

inline std::optional<Command> classify_features(const GestureFeatures& f,
                                                const RuleTable& table = default_rule_table()) {
  return table.classify(f);
}

// Features plus the resulting observation; features are absent when the
// frame never got as far as geometry.
struct Classification {
  std::optional<GestureFeatures> features;
  Observation observation;
};

inline Classification classify_frame_detailed(const ValidatedFrame& frame, const RuleTable& table) {
  try {
    const auto f = extract_features(frame);
    return {f, table.classify(f)};
  } catch (const DegenerateVector&) {
    return {std::nullopt, std::nullopt};
  }
}

inline Observation classify_frame(const ValidatedFrame& frame,
                                  const RuleTable& table = default_rule_table()) {
  return classify_frame_detailed(frame, table).observation;
}

// --- rule-table file format -------------------------------------------------
//
// [{"command":"up","alpha1":[80,180],"alpha2":{"lo":80,"hi":180,"closed":true},
//   "predicates":["s1>1","s2>1"]}, ...]
//
// A two-element array is the half-open interval [lo,hi); the object form
// allows a closed upper bound. null means the angle is not constrained.

namespace detail {

inline std::optional<AngleInterval> interval_from_json(const nlohmann::json& j, const char* key) {
  if (j.is_null()) return std::nullopt;
  AngleInterval iv;
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    iv = {j[0].get<double>(), j[1].get<double>(), false};
  } else if (j.is_object() && j.contains("lo") && j.contains("hi")) {
    if (!j["lo"].is_number() || !j["hi"].is_number()) {
      throw RuleTableError(std::string(key) + ": lo/hi must be numbers");
    }
    iv = {j["lo"].get<double>(), j["hi"].get<double>(), j.value("closed", false)};
  } else {
    throw RuleTableError(std::string(key) + ": expected [lo,hi], {lo,hi,closed} or null");
  }
  if (!(0.0 <= iv.lo && iv.lo < iv.hi && iv.hi <= 180.0)) {
    throw RuleTableError(std::string(key) + ": need 0 <= lo < hi <= 180");
  }
  return iv;
}

inline nlohmann::json interval_to_json(const std::optional<AngleInterval>& iv) {
  if (!iv) return nullptr;
  if (iv->closed_hi) return {{"lo", iv->lo}, {"hi", iv->hi}, {"closed", true}};
  return nlohmann::json::array({iv->lo, iv->hi});
}

inline DistancePredicate predicate_from_string(const std::string& s) {
  for (const auto p : {DistancePredicate::S1Below, DistancePredicate::S1Above,
                       DistancePredicate::S2Below, DistancePredicate::S2Above}) {
    if (to_string(p) == s) return p;
  }
  throw RuleTableError("unknown predicate \"" + s + "\"");
}

}  // namespace detail

inline nlohmann::json rule_table_to_json(const RuleTable& table) {
  auto out = nlohmann::json::array();
  for (const auto& r : table.rules()) {
    auto preds = nlohmann::json::array();
    for (const auto p : r.distances) preds.push_back(std::string(to_string(p)));
    out.push_back({{"command", std::string(to_string(r.command))},
                   {"alpha1", detail::interval_to_json(r.alpha1)},
                   {"alpha2", detail::interval_to_json(r.alpha2)},
                   {"predicates", std::move(preds)}});
  }
  return out;
}

inline RuleTable rule_table_from_json(const nlohmann::json& doc) {
  if (!doc.is_array()) throw RuleTableError("rule table must be a JSON array");
  std::vector<GestureRule> rules;
  for (const auto& item : doc) {
    if (!item.is_object()) throw RuleTableError("rule must be an object");
    GestureRule r;
    const auto name = item.value("command", std::string{});
    const auto cmd = command_from_string(name);
    if (!cmd || *cmd == Command::Hover) throw RuleTableError("unknown command \"" + name + "\"");
    r.command = *cmd;
    r.alpha1 = detail::interval_from_json(item.value("alpha1", nlohmann::json()), "alpha1");
    r.alpha2 = detail::interval_from_json(item.value("alpha2", nlohmann::json()), "alpha2");
    const auto preds = item.value("predicates", nlohmann::json::array());
    if (!preds.is_array()) throw RuleTableError("predicates must be an array");
    for (const auto& p : preds) {
      if (!p.is_string()) throw RuleTableError("predicate must be a string");
      r.distances.push_back(detail::predicate_from_string(p.get<std::string>()));
    }
    rules.push_back(std::move(r));
  }
  if (rules.empty()) throw RuleTableError("rule table is empty");
  return RuleTable(std::move(rules));
}

inline RuleTable load_rule_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw RuleTableError("cannot open rule table " + path);
  try {
    return rule_table_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw RuleTableError("rule table " + path + ": " + e.what());
  }
}

}  // namespace posepilot
