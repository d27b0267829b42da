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

#include <deque>
#include <exception>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>
#include <variant>
#include <vector>

#include "edgepar/channel.hpp"
#include "edgepar/clock.hpp"
#include "edgepar/pipeline.hpp"

namespace edgepar {

// Capacity of the channel feeding the synchronizer; a full channel stalls the
// workers that are trying to report results.
inline constexpr std::size_t kWallSyncCapacity = 256;

// Real-time run: a source thread paces frames, one thread per worker sleeps
// for its modelled service time, and a synchronizer thread restores order.
// The calling thread is the dispatcher and owns all WorkerView state; workers
// report completions back to it over a channel.
inline RunResult simulate_wall(const ExperimentConfig& cfg,
                               const ReplayStore* store = nullptr) {
  validate(cfg);
  const std::size_t n = cfg.workers.size();
  const auto frames = emit_schedule(cfg.stream);
  const auto total = static_cast<std::int64_t>(frames.size());
  Clock clock(ClockMode::Wall);

  struct Job {
    Frame frame;
  };
  struct Completion {
    std::size_t worker;
    Seconds service_time;
  };
  struct SourceDone {};
  using Event = std::variant<Frame, Completion, SourceDone>;

  BoundedChannel<Event> events(frames.size() + n + 1);
  BoundedChannel<SyncEvent> to_sync(kWallSyncCapacity);
  std::vector<std::unique_ptr<BoundedChannel<Job>>> inboxes;
  for (std::size_t i = 0; i < n; ++i)
    inboxes.push_back(std::make_unique<BoundedChannel<Job>>(1));

  RunResult run;
  run.workers.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    run.workers[i].worker_id = cfg.workers[i].worker_id;

  // First exception from any thread; closing both channels unblocks the rest.
  std::mutex error_mu;
  std::exception_ptr error;
  auto fail = [&](std::exception_ptr e) {
    {
      std::lock_guard lock(error_mu);
      if (!error) error = e;
    }
    events.close();
    to_sync.close();
  };
  auto guarded = [&](auto body) {
    return [&fail, body]() mutable {
      try {
        body();
      } catch (...) {
        fail(std::current_exception());
      }
    };
  };

  std::vector<FrameResult> ordered;
  std::thread sync_thread(guarded([&] {
    SequenceSynchronizer sync;
    while (auto ev = to_sync.pop()) {
      sync.submit(std::move(*ev));
      for (auto& r : sync.drain_ready()) ordered.push_back(std::move(r));
    }
  }));

  std::vector<std::thread> worker_threads;
  for (std::size_t i = 0; i < n; ++i) {
    worker_threads.emplace_back(guarded([&, i] {
      const auto& profile = cfg.workers[i];
      LatencySampler sampler(profile, cfg.seed);
      auto& usage = run.workers[i];
      while (auto job = inboxes[i]->pop()) {
        const Seconds start = clock.now();
        auto outcome =
            simulate_process(profile, job->frame, start, sampler, store);
        std::this_thread::sleep_until(clock.wall_time(outcome.completion_ts));
        const Seconds done = clock.now();
        usage.busy_time += done - start;
        ++usage.processed;
        to_sync.push(ProcessedResult{job->frame.index,
                                     std::move(outcome.detections),
                                     profile.worker_id, start, done});
        events.push(Completion{i, done - start});
      }
    }));
  }

  std::thread source(guarded([&] {
    for (const auto& f : frames) {
      if (cfg.stream.mode == FeedMode::Paced)
        std::this_thread::sleep_until(clock.wall_time(f.arrival_ts));
      if (!events.push(f)) return;
    }
    events.push(SourceDone{});
  }));

  Dispatcher dispatcher(cfg.scheduler, n);
  auto views = make_views(n);
  std::deque<Frame> waiting;   // saturation backlog
  std::optional<Frame> held;   // FCFS hold slot under paced feeding
  std::int64_t decided = 0, in_flight = 0;
  const bool fcfs = cfg.scheduler.kind == PolicyKind::FCFS;
  constexpr Seconds kBusy = std::numeric_limits<Seconds>::infinity();

  auto assign = [&](const Frame& f, std::size_t w) {
    views[w].busy_until = kBusy;
    ++decided;
    ++in_flight;
    ++run.assigned;
    inboxes[w]->push(Job{f});
  };
  auto drop = [&](const Frame& f) {
    ++decided;
    ++run.drops.dropped;
    to_sync.push(DropNotice{f.index});
  };
  auto can_start = [&](const Frame& f) {
    const Seconds now = clock.now();
    if (auto t = dispatcher.designated_target(f, views))
      return views[*t].idle_at(now);
    for (const auto& v : views)
      if (v.idle_at(now)) return true;
    return false;
  };
  auto drain_waiting = [&] {
    while (!waiting.empty() && can_start(waiting.front())) {
      auto d = dispatcher.dispatch(waiting.front(), views, clock.now());
      assign(waiting.front(), *d.worker);
      waiting.pop_front();
    }
  };

  guarded([&] {
    while (decided < total || in_flight > 0) {
      auto ev = events.pop();
      if (!ev) break;
      if (auto* f = std::get_if<Frame>(&*ev)) {
        if (cfg.stream.mode == FeedMode::Saturation) {
          waiting.push_back(*f);
          drain_waiting();
          continue;
        }
        auto d = dispatcher.dispatch(*f, views, std::max(clock.now(), f->arrival_ts));
        if (!d.dropped()) {
          assign(*f, *d.worker);
        } else if (fcfs) {
          if (held) {
            ++run.drops.evicted;
            drop(*held);
          }
          held = *f;
        } else {
          drop(*f);
        }
      } else if (auto* c = std::get_if<Completion>(&*ev)) {
        --in_flight;
        views[c->worker].busy_until = clock.now();
        views[c->worker].observe(c->service_time, cfg.scheduler.ewma_alpha,
                                 static_cast<std::size_t>(cfg.scheduler.window_frames));
        if (held) {
          const Frame f = *held;
          held.reset();
          auto d = dispatcher.dispatch(f, views, std::max(clock.now(), f.arrival_ts));
          assign(f, *d.worker);
        }
        drain_waiting();
      }
    }
  })();

  source.join();
  for (auto& inbox : inboxes) inbox->close();
  for (auto& t : worker_threads) t.join();
  to_sync.close();
  sync_thread.join();

  if (error) std::rethrow_exception(error);
  run.results = std::move(ordered);
  if (static_cast<std::int64_t>(run.results.size()) != total)
    throw ProtocolError("wall-clock run finished with frames unresolved");
  detail::finalize(run);
  return run;
}

inline RunResult simulate(const ExperimentConfig& cfg,
                          const ReplayStore* store = nullptr) {
  return cfg.clock == ClockMode::Virtual ? simulate_virtual(cfg, store)
                                         : simulate_wall(cfg, store);
}

}  // namespace edgepar
