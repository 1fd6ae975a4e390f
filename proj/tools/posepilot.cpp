// Copyright 2026 The posepilot Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/asio/signal_set.hpp>
#include <CLI11.hpp>

#include "posepilot/bridge.hpp"
#include "posepilot/posepilot.hpp"

namespace fs = std::filesystem;
using namespace posepilot;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitBind = 2;
constexpr int kExitConfig = 3;

struct Overrides {
  std::string config_path;
  std::string rules_path;
  double min_confidence = -1.0;
};

// BRIDGE_CONFIG, then --config, then individual flags.
SessionConfig base_config(const Overrides& o) {
  SessionConfig cfg;
  if (!o.config_path.empty()) {
    cfg = load_config(o.config_path);
  } else if (const char* env = std::getenv("BRIDGE_CONFIG"); env && *env) {
    cfg = load_config(env);
  }
  if (!o.rules_path.empty()) cfg.rule_table = o.rules_path;
  if (o.min_confidence >= 0.0) cfg.min_confidence = o.min_confidence;
  return cfg;
}

std::string read_all(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), {}};
}

// A file is either one estimator export (has "people") or replay JSONL.
std::vector<FrameRecord> load_frames(const std::string& text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    if (doc.is_object() && doc.contains("people")) return {parse_estimator_json(text, 1, 0.0)};
  } catch (const nlohmann::json::parse_error&) {
    // not a single document; fall through to JSONL
  } catch (const IngestError& e) {
    throw IngestError(e.kind(), std::string("line 1: ") + e.what());
  }
  std::istringstream in(text);
  auto source = jsonl_source(in);
  std::vector<FrameRecord> frames;
  while (auto r = source()) frames.push_back(std::move(*r));
  return frames;
}

int run_classify(const std::string& path, bool trace, const Overrides& o) {
  const auto cfg = base_config(o);
  const auto rules = resolve_rules(cfg);
  std::vector<FrameRecord> frames;
  try {
    frames = load_frames(read_all(path));
  } catch (const IngestError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }

  Session session(cfg, rules);
  if (trace) std::cout << "seq,alpha1,alpha2,s1,s2,command\n";
  for (const auto& f : frames) {
    const auto c = session.observe(f);
    const auto label = to_string(c.observation);
    if (!trace) {
      std::cout << label << "\n";
      continue;
    }
    std::cout << seq_of(f) << ",";
    if (c.features) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6f,", c.features->alpha1, c.features->alpha2,
                    c.features->s1, c.features->s2);
      std::cout << buf;
    } else {
      std::cout << ",,,,";
    }
    std::cout << label << "\n";
  }
  return kExitOk;
}

void write_lines(const fs::path& p, const auto& items) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  for (const auto& it : items) out << to_json(it).dump() << "\n";
}

int run_replay(const std::string& path, double rate, const std::string& sim, const std::string& out_dir,
               const Overrides& o) {
  auto cfg = base_config(o);
  cfg.tick_rate = rate;
  if (sim == "dynamic") {
    cfg.sim_mode = SimMode::Dynamic;
  } else if (sim == "kinematic") {
    cfg.sim_mode = SimMode::Kinematic;
  } else {
    throw ConfigError("--sim must be kinematic or dynamic");
  }
  cfg.validate();

  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open " << path << "\n";
    return kExitInput;
  }
  const auto result = run_pipeline(jsonl_source(in), cfg, resolve_rules(cfg));

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_lines(fs::path(out_dir) / "commands.jsonl", result.commands);
    write_lines(fs::path(out_dir) / "telemetry.jsonl", result.telemetry);
  }

  std::cout << "frames: " << result.frames_read << "\n"
            << "processed: " << result.commands.size() << "\n"
            << "emissions: " << result.emissions() << "\n"
            << "drops: " << result.dropped << "\n"
            << "distinct commands: " << result.distinct_commands();
  for (const auto c : result.confirmed_commands()) std::cout << " " << to_string(c);
  std::cout << "\n";
  if (!result.telemetry.empty()) {
    const auto& p = result.telemetry.back().state.position;
    std::cout << "final position: " << p.x << " " << p.y << " " << p.z << "\n";
  }
  if (result.error) {
    std::cerr << "error: " << *result.error << "\n";
    return kExitInput;
  }
  return kExitOk;
}

int run_serve(const std::string& address, unsigned short port, unsigned threads, const Overrides& o) {
  const auto cfg = base_config(o);
  std::unique_ptr<bridge::BridgeServer> server;
  try {
    server = std::make_unique<bridge::BridgeServer>(cfg, address, port);
  } catch (const bridge::BindError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBind;
  }
  boost::asio::signal_set signals(server->context(), SIGINT, SIGTERM);
  signals.async_wait([&](const boost::system::error_code&, int) { server->context().stop(); });
  std::cerr << "serving ws://" << address << ":" << server->port() << bridge::kSessionPath << "\n";
  server->start(threads);
  server->context().run();  // returns once a signal stops the context
  server->stop();
  return kExitOk;
}

int run_bench(std::size_t n, unsigned seed, const Overrides& o) {
  const auto cfg = base_config(o);
  const auto rules = resolve_rules(cfg);

  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> jitter(-2.0, 2.0);
  std::vector<FrameRecord> frames;
  frames.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& pose = fixtures::kGallery[(i / fixtures::kFramesPerGesture) % fixtures::kGallery.size()];
    auto f = fixtures::make_frame(pose, i + 1, static_cast<double>(i) / 30.0);
    for (auto& kp : f.keypoints) {
      kp.x += jitter(rng);
      kp.y += jitter(rng);
    }
    frames.emplace_back(std::move(f));
  }

  Session session(cfg, rules);
  Debouncer debouncer(cfg.debounce);
  std::vector<double> micros;
  micros.reserve(n);
  std::size_t emitted = 0;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& f : frames) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto action = debouncer.step(session.observe(f).observation);
    const auto t1 = std::chrono::steady_clock::now();
    emitted += action.is_silent() ? 0 : 1;
    micros.push_back(std::chrono::duration<double, std::micro>(t1 - t0).count());
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::sort(micros.begin(), micros.end());
  auto pct = [&](double q) { return micros[std::min(micros.size() - 1, static_cast<std::size_t>(q * micros.size()))]; };
  std::printf("frames: %zu\nemissions: %zu\np50_us: %.3f\np99_us: %.3f\nframes_per_s: %.0f\n", n, emitted,
              pct(0.50), pct(0.99), static_cast<double>(n) / total);
  return kExitOk;
}

int run_fixtures(const std::string& out_dir, const std::string& corpus, const std::string& presets) {
  fs::create_directories(out_dir);
  for (const auto& pose : fixtures::kGallery) {
    const auto p = fs::path(out_dir) / (std::string(to_string(pose.command)) + ".jsonl");
    std::ofstream out(p, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write " << p << "\n";
      return kExitInput;
    }
    for (const auto& r : fixtures::gesture_sequence(pose.command)) out << serialize_replay_line(r) << "\n";
  }
  if (!corpus.empty()) {
    std::ofstream out(corpus, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write " << corpus << "\n";
      return kExitInput;
    }
    for (const auto& r : fixtures::gallery_corpus()) out << serialize_replay_line(r) << "\n";
  }
  if (!presets.empty()) {
    std::ofstream out(presets, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write " << presets << "\n";
      return kExitInput;
    }
    out << fixtures::presets_json().dump(2) << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"posepilot: body-gesture teleoperation of a simulated quadrotor"};
  app.require_subcommand(1);

  Overrides ov;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", ov.config_path, "SessionConfig JSON (default: $BRIDGE_CONFIG)");
    sub->add_option("--rules", ov.rules_path, "Rule-table JSON replacing the built-in gesture rules");
    sub->add_option("--min-confidence", ov.min_confidence, "Keypoint confidence threshold in [0,1]");
  };

  std::string path;
  bool trace = false;
  auto* classify = app.add_subcommand("classify", "Classify every frame of a file (no debouncing)");
  classify->add_option("path", path, "Estimator JSON or replay JSONL, '-' for stdin")->required();
  classify->add_flag("--trace", trace, "Print CSV rows: seq,alpha1,alpha2,s1,s2,command");
  add_common(classify);

  double rate = 30.0;
  std::string sim = "kinematic";
  std::string out_dir;
  auto* replay = app.add_subcommand("replay", "Run a replay file through the full pipeline");
  replay->add_option("path", path, "Replay JSONL")->required();
  replay->add_option("--rate", rate, "Tick rate in Hz, 1..120")->capture_default_str();
  replay->add_option("--sim", sim, "Simulator mode: kinematic or dynamic")->capture_default_str();
  replay->add_option("--out", out_dir, "Directory for commands.jsonl and telemetry.jsonl");
  add_common(replay);

  std::string address = "127.0.0.1";
  unsigned short port = 8765;
  unsigned threads = 1;
  auto* serve = app.add_subcommand("serve", "Serve websocket sessions on /session");
  serve->add_option("--address", address, "Listen address")->capture_default_str();
  serve->add_option("--port", port, "TCP port")->capture_default_str();
  serve->add_option("--threads", threads, "Event-loop threads")->capture_default_str()->check(CLI::Range(1u, 64u));
  add_common(serve);

  std::size_t frames = 10000;
  unsigned seed = 7;
  auto* bench = app.add_subcommand("bench", "Measure classify+debounce latency on synthetic frames");
  bench->add_option("--frames", frames, "Number of frames (>= 1000)")
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{1000}, std::size_t{100000000}));
  bench->add_option("--seed", seed, "Jitter RNG seed")->capture_default_str();
  add_common(bench);

  std::string fixtures_dir = "fixtures";
  std::string corpus;
  std::string presets;
  auto* fix = app.add_subcommand("fixtures", "Write the canonical ten-gesture fixture files");
  fix->add_option("--out", fixtures_dir, "Output directory")->capture_default_str();
  fix->add_option("--corpus", corpus, "Also write all ten gestures back to back into this JSONL file");
  fix->add_option("--presets", presets, "Also write the preset skeletons as JSON for interactive clients");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*classify) return run_classify(path, trace, ov);
    if (*replay) return run_replay(path, rate, sim, out_dir, ov);
    if (*serve) return run_serve(address, port, threads, ov);
    if (*bench) return run_bench(frames, seed, ov);
    if (*fix) return run_fixtures(fixtures_dir, corpus, presets);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}
