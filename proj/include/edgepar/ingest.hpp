// Copyright 2026 The edgepar Authors
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

#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <locale>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "edgepar/clock.hpp"
#include "edgepar/detector.hpp"
#include "edgepar/error.hpp"
#include "edgepar/eval.hpp"
#include "edgepar/numfmt.hpp"
#include "edgepar/scheduler.hpp"
#include "edgepar/stream.hpp"

namespace edgepar {

// ---------------------------------------------------------------------------
// MOT CSV: frame,id,bb_left,bb_top,bb_width,bb_height,conf,x,y,z
// Frames are 1-based in the file and 0-based in memory. Trailing columns
// after bb_height may be omitted; a missing conf reads as -1.

inline constexpr std::string_view kDefaultMotLabel = "pedestrian";

struct MotRecord {
  FrameIndex index = 0;
  std::int64_t track_id = -1;
  BBox bbox;
  double raw_confidence = -1.0;
};

// Maps a raw MOT score into [0, 1]: -1 (unset) becomes 1, positive scores
// are divided by the file's largest positive score, anything else becomes 0.
inline double normalize_confidence(double raw, double max_positive) {
  if (raw == -1.0) return 1.0;
  if (!(raw > 0.0)) return 0.0;
  return raw / max_positive;
}

struct MotFile {
  std::vector<MotRecord> records;

  double max_positive_confidence() const {
    double m = 0.0;
    for (const auto& r : records) m = std::max(m, r.raw_confidence);
    return m;
  }

  GroundTruthSet to_ground_truth(
      std::string_view label = kDefaultMotLabel) const {
    GroundTruthSet gt;
    for (const auto& r : records) gt.add(r.index, {r.bbox, std::string(label)});
    return gt;
  }

  ReplayStore to_replay_store(std::string_view label = kDefaultMotLabel) const {
    ReplayStore store;
    const double max_conf = max_positive_confidence();
    for (const auto& r : records)
      store.add(r.index, {r.bbox, std::string(label),
                          normalize_confidence(r.raw_confidence, max_conf)});
    return store;
  }
};

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(numfmt::trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline MotFile parse_mot(std::istream& in) {
  MotFile file;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (numfmt::trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() < 6 || fields.size() > 10)
      throw ParseError("expected 6 to 10 comma-separated fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    std::vector<double> v;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      auto d = numfmt::parse_double(fields[i]);
      if (!d) throw ParseError("field " + std::to_string(i + 1) +
                                   " is not a number: '" +
                                   std::string(fields[i]) + "'",
                               line_no);
      v.push_back(*d);
    }
    if (v[0] < 1.0 || v[0] != std::floor(v[0]))
      throw ParseError("frame number must be a positive integer", line_no);
    MotRecord r;
    r.index = static_cast<FrameIndex>(v[0]) - 1;
    r.track_id = static_cast<std::int64_t>(v[1]);
    r.bbox = {v[2], v[3], v[4], v[5]};
    if (!r.bbox.valid())
      throw ParseError("bounding box width and height must be positive",
                       line_no);
    if (v.size() > 6) r.raw_confidence = v[6];
    file.records.push_back(r);
  }
  return file;
}

inline MotFile load_mot_annotations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open MOT file '" + path.string() + "'");
  try {
    return parse_mot(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Experiment configuration. Grammar is documented in docs/CONFIG.md.

struct ExperimentConfig {
  StreamConfig stream;
  ClockMode clock = ClockMode::Virtual;
  std::vector<WorkerProfile> workers;
  SchedulePolicy scheduler;
  std::optional<std::filesystem::path> ground_truth_path;
  std::optional<std::filesystem::path> detections_path;
  std::uint64_t seed = 0;
  std::filesystem::path output_path = "edgepar-out";

  friend bool operator==(const ExperimentConfig&,
                         const ExperimentConfig&) = default;
};

inline void validate(const ExperimentConfig& cfg) {
  validate(cfg.stream);
  if (cfg.workers.empty()) throw ConfigError("workers: at least one [worker] is required");
  for (std::size_t i = 0; i < cfg.workers.size(); ++i) {
    if (cfg.workers[i].worker_id != static_cast<int>(i))
      throw ConfigError("workers: ids must be 0..n-1 in listed order");
    validate(cfg.workers[i]);
  }
  validate(cfg.scheduler, cfg.workers.size());
}

namespace detail {

inline std::string_view feed_mode_key(FeedMode m) {
  return m == FeedMode::Paced ? "paced" : "saturation";
}
inline std::string_view clock_key(ClockMode m) {
  return m == ClockMode::Virtual ? "virtual" : "wall";
}
inline std::string_view latency_key(LatencyKind k) {
  switch (k) {
    case LatencyKind::Deterministic: return "deterministic";
    case LatencyKind::Exponential: return "exponential";
    case LatencyKind::Uniform: return "uniform";
  }
  return "deterministic";
}

class ConfigReader {
 public:
  ConfigReader(std::filesystem::path base_dir) : base_dir_(std::move(base_dir)) {}

  ExperimentConfig read(std::istream& in) {
    std::string raw;
    while (std::getline(in, raw)) {
      ++line_;
      const auto line = numfmt::trim(raw);
      if (line.empty() || line.front() == '#') continue;
      if (line.front() == '[') {
        if (line != "[worker]")
          fail("unknown section '" + std::string(line) + "'");
        finish_worker();
        worker_.emplace();
        worker_line_ = line_;
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) fail("expected 'key = value'");
      const std::string key(numfmt::trim(line.substr(0, eq)));
      const std::string value(numfmt::trim(line.substr(eq + 1)));
      if (key.empty()) fail("empty key");
      auto& section = worker_ ? *worker_ : top_;
      if (!section.emplace(key, Entry{value, line_}).second)
        fail("duplicate key '" + key + "'");
    }
    finish_worker();
    return build();
  }

 private:
  struct Entry {
    std::string value;
    std::size_t line;
  };
  using Section = std::map<std::string, Entry>;

  [[noreturn]] void fail(const std::string& msg, std::size_t line = 0) const {
    throw ConfigError("config line " + std::to_string(line ? line : line_) +
                      ": " + msg);
  }
  [[noreturn]] static void fail_field(const std::string& field,
                                      const std::string& msg,
                                      std::size_t line) {
    throw ConfigError("config line " + std::to_string(line) + ": " + field +
                      ": " + msg);
  }

  void finish_worker() {
    if (worker_) workers_.push_back({std::move(*worker_), worker_line_});
    worker_.reset();
  }

  static void reject_unknown(const Section& s,
                             std::initializer_list<std::string_view> known) {
    for (const auto& [key, entry] : s)
      if (std::find(known.begin(), known.end(), key) == known.end())
        fail_field(key, "unknown key", entry.line);
  }

  static double number(const Section& s, const std::string& key) {
    const auto& e = s.at(key);
    auto v = numfmt::parse_double(e.value);
    if (!v || !std::isfinite(*v)) fail_field(key, "expected a number", e.line);
    return *v;
  }

  template <typename Int>
  static Int integer(const Section& s, const std::string& key) {
    const auto& e = s.at(key);
    auto v = numfmt::parse_int<Int>(e.value);
    if (!v) fail_field(key, "expected an integer", e.line);
    return *v;
  }

  static const Entry& required(const Section& s, const std::string& key,
                               std::size_t section_line) {
    auto it = s.find(key);
    if (it == s.end()) fail_field(key, "missing required key", section_line);
    return it->second;
  }

  std::filesystem::path resolve(const std::string& p) const {
    std::filesystem::path path(p);
    if (path.is_relative() && !base_dir_.empty()) path = base_dir_ / path;
    return path.lexically_normal();
  }

  WorkerProfile build_worker(const Section& s, std::size_t section_line,
                             int id) const {
    reject_unknown(s, {"id", "mu_fps", "latency", "jitter", "bandwidth_bps",
                       "tdp_watts", "count"});
    WorkerProfile w;
    w.worker_id = id;
    if (s.count("id") && integer<int>(s, "id") != id)
      fail_field("id", "worker ids must be 0..n-1 in listed order",
                 s.at("id").line);
    required(s, "mu_fps", section_line);
    w.mu_fps = number(s, "mu_fps");
    if (auto it = s.find("latency"); it != s.end()) {
      const auto& v = it->second.value;
      if (v == "deterministic") w.latency = LatencyKind::Deterministic;
      else if (v == "exponential") w.latency = LatencyKind::Exponential;
      else if (v == "uniform") w.latency = LatencyKind::Uniform;
      else fail_field("latency", "unknown latency model '" + v + "'", it->second.line);
    }
    if (s.count("jitter")) {
      if (w.latency != LatencyKind::Uniform)
        fail_field("jitter", "only valid with latency = uniform", s.at("jitter").line);
      w.jitter = number(s, "jitter");
    }
    if (auto it = s.find("bandwidth_bps"); it != s.end() && it->second.value != "unlimited")
      w.bandwidth_bps = number(s, "bandwidth_bps");
    if (s.count("tdp_watts")) w.tdp_watts = number(s, "tdp_watts");
    try {
      validate(w);
    } catch (const ConfigError& e) {
      fail(e.what(), section_line);
    }
    return w;
  }

  ExperimentConfig build() const {
    const Section& s = top_;
    reject_unknown(s, {"lambda_fps", "total_frames", "mode", "payload_bytes",
                       "clock", "scheduler", "wrr_weights",
                       "proportional_window", "proportional_alpha", "seed",
                       "ground_truth", "detections", "output"});
    ExperimentConfig cfg;
    required(s, "lambda_fps", 1);
    cfg.stream.lambda_fps = number(s, "lambda_fps");
    required(s, "total_frames", 1);
    cfg.stream.total_frames = integer<std::int64_t>(s, "total_frames");
    if (auto it = s.find("mode"); it != s.end()) {
      if (it->second.value == "paced") cfg.stream.mode = FeedMode::Paced;
      else if (it->second.value == "saturation") cfg.stream.mode = FeedMode::Saturation;
      else fail_field("mode", "expected 'paced' or 'saturation'", it->second.line);
    }
    if (s.count("payload_bytes"))
      cfg.stream.payload_bytes = integer<std::uint64_t>(s, "payload_bytes");
    if (auto it = s.find("clock"); it != s.end()) {
      if (it->second.value == "virtual") cfg.clock = ClockMode::Virtual;
      else if (it->second.value == "wall") cfg.clock = ClockMode::Wall;
      else fail_field("clock", "expected 'virtual' or 'wall'", it->second.line);
    }
    try {
      validate(cfg.stream);
    } catch (const ConfigError& e) {
      fail(e.what(), 1);
    }

    const auto& sched = required(s, "scheduler", 1);
    auto kind = parse_policy_key(sched.value);
    if (!kind)
      fail_field("scheduler", "unknown policy '" + sched.value +
                                  "' (expected rr, wrr, fcfs or proportional)",
                 sched.line);
    cfg.scheduler.kind = *kind;
    if (s.count("wrr_weights")) {
      if (*kind != PolicyKind::WeightedRoundRobin)
        fail_field("wrr_weights", "only valid with scheduler = wrr",
                   s.at("wrr_weights").line);
      for (auto part : split_csv(s.at("wrr_weights").value)) {
        auto w = numfmt::parse_double(part);
        if (!w) fail_field("wrr_weights", "expected comma-separated numbers",
                           s.at("wrr_weights").line);
        cfg.scheduler.weights.push_back(*w);
      }
    } else if (*kind == PolicyKind::WeightedRoundRobin) {
      fail_field("wrr_weights", "missing required key", sched.line);
    }
    for (const char* key : {"proportional_window", "proportional_alpha"})
      if (s.count(key) && *kind != PolicyKind::Proportional)
        fail_field(key, "only valid with scheduler = proportional",
                   s.at(key).line);
    if (s.count("proportional_window"))
      cfg.scheduler.window_frames = integer<int>(s, "proportional_window");
    if (s.count("proportional_alpha"))
      cfg.scheduler.ewma_alpha = number(s, "proportional_alpha");

    if (s.count("seed")) cfg.seed = integer<std::uint64_t>(s, "seed");
    if (s.count("ground_truth"))
      cfg.ground_truth_path = resolve(s.at("ground_truth").value);
    if (s.count("detections"))
      cfg.detections_path = resolve(s.at("detections").value);
    if (s.count("output")) cfg.output_path = resolve(s.at("output").value);

    for (const auto& [section, line] : workers_) {
      std::int64_t count = 1;
      if (section.count("count")) {
        count = integer<std::int64_t>(section, "count");
        if (count < 1) fail_field("count", "must be at least 1", section.at("count").line);
        if (section.count("id"))
          fail_field("id", "cannot be combined with count", section.at("id").line);
      }
      for (std::int64_t c = 0; c < count; ++c)
        cfg.workers.push_back(
            build_worker(section, line, static_cast<int>(cfg.workers.size())));
    }
    if (cfg.workers.empty())
      fail("workers: at least one [worker] section is required");
    try {
      validate(cfg.scheduler, cfg.workers.size());
    } catch (const ConfigError& e) {
      fail(std::string("scheduler: ") + e.what(), sched.line);
    }
    return cfg;
  }

  std::filesystem::path base_dir_;
  std::size_t line_ = 0;
  Section top_;
  std::optional<Section> worker_;
  std::size_t worker_line_ = 0;
  std::vector<std::pair<Section, std::size_t>> workers_;
};

}  // namespace detail

// Relative paths in the file are resolved against `base_dir`.
inline ExperimentConfig parse_experiment_config(
    std::istream& in, const std::filesystem::path& base_dir = {}) {
  return detail::ConfigReader(base_dir).read(in);
}

inline ExperimentConfig load_experiment_config(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  return parse_experiment_config(in, path.parent_path());
}

// Inverse of parse_experiment_config: one [worker] section per worker, all
// reals in shortest round-trip form.
inline std::string serialize_config(const ExperimentConfig& cfg) {
  using numfmt::shortest;
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out << "lambda_fps = " << shortest(cfg.stream.lambda_fps) << '\n'
      << "total_frames = " << cfg.stream.total_frames << '\n'
      << "mode = " << detail::feed_mode_key(cfg.stream.mode) << '\n'
      << "payload_bytes = " << cfg.stream.payload_bytes << '\n'
      << "clock = " << detail::clock_key(cfg.clock) << '\n'
      << "scheduler = " << policy_key(cfg.scheduler.kind) << '\n';
  if (cfg.scheduler.kind == PolicyKind::WeightedRoundRobin) {
    out << "wrr_weights = ";
    for (std::size_t i = 0; i < cfg.scheduler.weights.size(); ++i)
      out << (i ? "," : "") << shortest(cfg.scheduler.weights[i]);
    out << '\n';
  }
  if (cfg.scheduler.kind == PolicyKind::Proportional)
    out << "proportional_window = " << cfg.scheduler.window_frames << '\n'
        << "proportional_alpha = " << shortest(cfg.scheduler.ewma_alpha) << '\n';
  out << "seed = " << cfg.seed << '\n';
  if (cfg.ground_truth_path)
    out << "ground_truth = " << cfg.ground_truth_path->string() << '\n';
  if (cfg.detections_path)
    out << "detections = " << cfg.detections_path->string() << '\n';
  out << "output = " << cfg.output_path.string() << '\n';
  for (const auto& w : cfg.workers) {
    out << "\n[worker]\n"
        << "id = " << w.worker_id << '\n'
        << "mu_fps = " << shortest(w.mu_fps) << '\n'
        << "latency = " << detail::latency_key(w.latency) << '\n';
    if (w.latency == LatencyKind::Uniform)
      out << "jitter = " << shortest(w.jitter) << '\n';
    out << "bandwidth_bps = "
        << (w.bandwidth_bps ? shortest(*w.bandwidth_bps) : "unlimited") << '\n';
    if (w.tdp_watts) out << "tdp_watts = " << shortest(*w.tdp_watts) << '\n';
  }
  return out.str();
}

}  // namespace edgepar
