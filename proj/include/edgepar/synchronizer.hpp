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

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "edgepar/clock.hpp"
#include "edgepar/detector.hpp"
#include "edgepar/error.hpp"
#include "edgepar/stream.hpp"

namespace edgepar {

enum class FrameStatus { Processed, Filled, FilledEmpty };

inline std::string_view status_key(FrameStatus s) {
  switch (s) {
    case FrameStatus::Processed: return "processed";
    case FrameStatus::Filled: return "filled";
    case FrameStatus::FilledEmpty: return "filled_empty";
  }
  return "processed";
}

inline std::optional<FrameStatus> parse_status_key(std::string_view key) {
  if (key == "processed") return FrameStatus::Processed;
  if (key == "filled") return FrameStatus::Filled;
  if (key == "filled_empty") return FrameStatus::FilledEmpty;
  return std::nullopt;
}

// Final per-frame outcome in stream order.
//   Processed:   source_index == index, worker and timestamps set.
//   Filled:      detections copied from source_index < index (a processed frame).
//   FilledEmpty: dropped with no processed predecessor; source_index == -1.
struct FrameResult {
  FrameIndex index = 0;
  FrameStatus status = FrameStatus::Processed;
  std::vector<Detection> detections;
  FrameIndex source_index = -1;
  std::optional<int> worker_id;
  std::optional<Seconds> dispatch_ts;
  std::optional<Seconds> completion_ts;

  friend bool operator==(const FrameResult&, const FrameResult&) = default;
};

struct ProcessedResult {
  FrameIndex index = 0;
  std::vector<Detection> detections;
  int worker_id = 0;
  Seconds dispatch_ts = 0.0;
  Seconds completion_ts = 0.0;
};

struct DropNotice {
  FrameIndex index = 0;
};

using SyncEvent = std::variant<ProcessedResult, DropNotice>;

// Reorder buffer restoring stream order over processed and dropped frames.
// Fill sources bind at emission: a dropped frame reuses the detections of the
// highest processed index below it, which is always known by then because
// emission is strictly in order.
class SequenceSynchronizer {
 public:
  void submit(SyncEvent event) {
    const FrameIndex index = std::visit([](const auto& e) { return e.index; },
                                        event);
    if (index < 0) throw ProtocolError("negative frame index");
    if (index < next_ || pending_.count(index) != 0)
      throw ProtocolError("frame " + std::to_string(index) +
                          " submitted more than once");
    pending_.emplace(index, std::move(event));
  }

  std::vector<FrameResult> drain_ready() {
    std::vector<FrameResult> out;
    for (auto it = pending_.begin();
         it != pending_.end() && it->first == next_;
         it = pending_.erase(it), ++next_) {
      out.push_back(resolve(it->first, std::move(it->second)));
    }
    return out;
  }

  // Index of the next frame the buffer will emit.
  FrameIndex next_index() const { return next_; }
  std::size_t pending() const { return pending_.size(); }

 private:
  FrameResult resolve(FrameIndex index, SyncEvent&& event) {
    FrameResult r;
    r.index = index;
    if (auto* p = std::get_if<ProcessedResult>(&event)) {
      r.status = FrameStatus::Processed;
      r.source_index = index;
      r.detections = std::move(p->detections);
      r.worker_id = p->worker_id;
      r.dispatch_ts = p->dispatch_ts;
      r.completion_ts = p->completion_ts;
      last_processed_ = index;
      last_detections_ = r.detections;
    } else if (last_processed_) {
      r.status = FrameStatus::Filled;
      r.source_index = *last_processed_;
      r.detections = last_detections_;
    } else {
      r.status = FrameStatus::FilledEmpty;
    }
    return r;
  }

  std::map<FrameIndex, SyncEvent> pending_;
  FrameIndex next_ = 0;
  std::optional<FrameIndex> last_processed_;
  std::vector<Detection> last_detections_;
};

}  // namespace edgepar
