#include "almostoa/scheduler.hpp"

#include <iostream>

#include "almostoa/errors.hpp"

namespace almostoa {

std::vector<EprintId> EmbargoScheduler::run_due_embargoes(Timestamp now) {
  std::vector<EprintId> flipped;
  for (const auto& entry : store_.due_embargoes(local_date(now, utc_offset_))) {
    try {
      if (store_.compare_and_set_access(entry.eprint_id, ClosedAccess{entry.expiry}, OpenAccess{},
                                        kSchedulerActor, now)) {
        flipped.push_back(entry.eprint_id);
      }
    } catch (const NotFound&) {
      // entry vanished between listing and flipping
    }
  }
  return flipped;
}

void EmbargoScheduler::start(Duration interval, std::function<Timestamp()> clock) {
  stop();
  worker_ = std::jthread([this, interval, clock = std::move(clock)](std::stop_token stop) {
    while (!stop.stop_requested()) {
      try {
        const auto flipped = run_due_embargoes(clock());
        for (const auto& id : flipped) {
          std::clog << "embargo expired, eprint " << id.str() << " is now open access\n";
        }
      } catch (const std::exception& e) {
        std::clog << "embargo tick failed: " << e.what() << '\n';
      }
      std::unique_lock lock{wake_mutex_};
      wake_.wait_for(lock, stop, interval, [] { return false; });
    }
  });
}

void EmbargoScheduler::stop() {
  if (worker_.joinable()) {
    worker_.request_stop();
    worker_.join();
  }
}

}  // namespace almostoa
