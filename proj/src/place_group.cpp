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

#include "tripress/place_group.h"

namespace tripress {

PlaceGroup::PlaceGroup(std::vector<uint32_t> places)
    : places_(std::move(places)), errors_(places_.size()) {
  // A single place runs inline on the caller's thread.
  if (places_.size() <= 1) return;
  threads_.reserve(places_.size());
  for (std::size_t slot = 0; slot < places_.size(); ++slot) {
    threads_.emplace_back([this, slot] { worker(slot); });
  }
}

PlaceGroup::~PlaceGroup() {
  {
    std::lock_guard lock(mu_);
    stop_ = true;
  }
  work_cv_.notify_all();
  for (auto& t : threads_) t.join();
}

void PlaceGroup::worker(std::size_t slot) {
  uint64_t seen = 0;
  while (true) {
    const std::function<void(uint32_t)>* task = nullptr;
    {
      std::unique_lock lock(mu_);
      work_cv_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
      task = task_;
    }
    std::exception_ptr err;
    try {
      (*task)(places_[slot]);
    } catch (...) {
      err = std::current_exception();
    }
    {
      std::lock_guard lock(mu_);
      errors_[slot] = err;
      if (--pending_ == 0) done_cv_.notify_all();
    }
  }
}

void PlaceGroup::finish(const std::function<void(uint32_t)>& fn) {
  if (threads_.empty()) {
    for (uint32_t p : places_) fn(p);
    return;
  }
  {
    std::unique_lock lock(mu_);
    task_ = &fn;
    pending_ = places_.size();
    std::fill(errors_.begin(), errors_.end(), nullptr);
    ++generation_;
  }
  work_cv_.notify_all();
  std::unique_lock lock(mu_);
  done_cv_.wait(lock, [&] { return pending_ == 0; });
  task_ = nullptr;
  for (auto& e : errors_) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace tripress
