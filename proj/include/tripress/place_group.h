// Copyright 2026 The Tripress Authors
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

#include <condition_variable>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace tripress {

// One long-lived activity per place. finish() forks `fn` at every place and
// returns only after all of them completed, which makes it a global barrier
// between pipeline phases.
class PlaceGroup {
 public:
  explicit PlaceGroup(std::vector<uint32_t> places);
  ~PlaceGroup();

  PlaceGroup(const PlaceGroup&) = delete;
  PlaceGroup& operator=(const PlaceGroup&) = delete;

  // Rethrows the failure of the lowest-numbered failing place, if any.
  void finish(const std::function<void(uint32_t place)>& fn);

  const std::vector<uint32_t>& places() const noexcept { return places_; }

 private:
  void worker(std::size_t slot);

  std::vector<uint32_t> places_;
  std::vector<std::thread> threads_;
  std::mutex mu_;
  std::condition_variable work_cv_;
  std::condition_variable done_cv_;
  const std::function<void(uint32_t)>* task_ = nullptr;
  uint64_t generation_ = 0;
  std::size_t pending_ = 0;
  std::vector<std::exception_ptr> errors_;
  bool stop_ = false;
};

}  // namespace tripress
