#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "almostoa/json_io.hpp"
#include "almostoa/request.hpp"
#include "almostoa/time.hpp"

namespace almostoa {

inline constexpr std::string_view kApprovedLabel = "Approved";
inline constexpr std::string_view kUnansweredLabel = "Ignored / unanswered";
inline constexpr std::string_view kRejectedLabel = "Rejected / denied";

/// Whole-percent display of k/n: rounded half-up, "< 1 %" for any positive
/// share below one percent, "n/a" when n is zero.
std::string percent_display(std::uint64_t k, std::uint64_t n);

/// 7864 -> "7 864"
std::string group_thousands(std::uint64_t n);

struct Period {
  Timestamp start;
  Timestamp end;  // inclusive
};

struct ResponseStats {
  Period period;
  Duration ignore_window{0};
  std::uint64_t total = 0;
  std::uint64_t approved = 0;
  std::uint64_t unanswered = 0;
  std::uint64_t rejected = 0;
  std::uint64_t fresh_pending = 0;
  /// (label, display) in table order: approved, unanswered, rejected.
  std::vector<std::pair<std::string, std::string>> rendered_rows;

  const std::string& row(std::string_view label) const;
};

/// Classifies every request created inside `period`. Throws InvalidPeriod when
/// start > end.
ResponseStats response_stats(std::span<const CopyRequest> requests, Period period, Duration ignore_window,
                             Timestamp now);

struct AccessStats {
  std::uint64_t total = 0;
  std::uint64_t closed = 0;
  /// "551 (7 %)", or "n/a" for an empty store.
  std::string closed_share_display;
};

AccessStats access_stats(std::uint64_t total, std::uint64_t closed);

std::string render_table(const ResponseStats& s);
std::string render_table(const AccessStats& s);
json to_json(const ResponseStats& s);
json to_json(const AccessStats& s);

}  // namespace almostoa
