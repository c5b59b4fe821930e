#pragma once

#include <chrono>
#include <condition_variable>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "almostoa/store.hpp"

namespace almostoa {

/// Opens Closed records once their embargo date arrives. Dates are compared in
/// the repository's zone, given as a fixed offset from UTC.
class EmbargoScheduler {
 public:
  explicit EmbargoScheduler(Store& store, std::chrono::minutes utc_offset = std::chrono::minutes{0})
      : store_(store), utc_offset_(utc_offset) {}
  ~EmbargoScheduler() { stop(); }

  EmbargoScheduler(const EmbargoScheduler&) = delete;
  EmbargoScheduler& operator=(const EmbargoScheduler&) = delete;

  /// Flips every record whose expiry is on or before the local date of `now`.
  /// Returns the ids this call flipped, ordered by (expiry, id). Losing a race
  /// to another tick or to an administrator is not an error.
  std::vector<EprintId> run_due_embargoes(Timestamp now);

  /// Background tick every `interval` until stop() or destruction.
  void start(Duration interval, std::function<Timestamp()> clock = system_now);
  void stop();

 private:
  Store& store_;
  std::chrono::minutes utc_offset_;
  std::mutex wake_mutex_;
  std::condition_variable_any wake_;
  std::jthread worker_;
};

}  // namespace almostoa
