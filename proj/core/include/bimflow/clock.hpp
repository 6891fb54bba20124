// Copyright 2026 The bimflow Authors.
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

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>

namespace bimflow {

/// Millisecond time source. Mock runs use VirtualClock so that recorded
/// durations and backoff waits are reproducible.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::int64_t now_ms() = 0;
  virtual void sleep_for(std::chrono::milliseconds duration) = 0;
};

class SteadyClock final : public Clock {
 public:
  std::int64_t now_ms() override;
  void sleep_for(std::chrono::milliseconds duration) override;
};

class VirtualClock final : public Clock {
 public:
  std::int64_t now_ms() override { return now_.load(); }
  void sleep_for(std::chrono::milliseconds duration) override { now_ += duration.count(); }

 private:
  std::atomic<std::int64_t> now_{0};
};

std::shared_ptr<Clock> steady_clock();

}  // namespace bimflow
