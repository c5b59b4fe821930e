#include "almostoa/stats.hpp"

#include <algorithm>
#include <sstream>

#include "almostoa/errors.hpp"
#include "almostoa/workflow.hpp"

namespace almostoa {
namespace {

std::string pad(std::string_view s, std::size_t width) {
  std::string out{s};
  // UTF-8 continuation bytes take no column
  const auto columns = static_cast<std::size_t>(
      std::count_if(out.begin(), out.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
  if (columns < width) {
    out.append(width - columns, ' ');
  }
  return out;
}

}  // namespace

std::string percent_display(std::uint64_t k, std::uint64_t n) {
  if (n == 0) {
    return "n/a";
  }
  if (k > 0 && 100 * k < n) {
    return "< 1 %";
  }
  return std::to_string((200 * k + n) / (2 * n)) + " %";
}

std::string group_thousands(std::uint64_t n) {
  auto digits = std::to_string(n);
  std::string out;
  const auto lead = digits.size() % 3;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i != 0 && (i - lead) % 3 == 0) {
      out.push_back(' ');
    }
    out.push_back(digits[i]);
  }
  return out;
}

const std::string& ResponseStats::row(std::string_view label) const {
  for (const auto& [l, v] : rendered_rows) {
    if (l == label) {
      return v;
    }
  }
  throw NotFound("no row " + std::string{label});
}

ResponseStats response_stats(std::span<const CopyRequest> requests, Period period, Duration ignore_window,
                             Timestamp now) {
  if (period.start > period.end) {
    throw InvalidPeriod("period starts after it ends");
  }
  ResponseStats s;
  s.period = period;
  s.ignore_window = ignore_window;
  for (const auto& r : requests) {
    if (r.created_at < period.start || r.created_at > period.end) {
      continue;
    }
    ++s.total;
    switch (classify_response(r, now, ignore_window)) {
      case ResponseClass::Approved: ++s.approved; break;
      case ResponseClass::Rejected: ++s.rejected; break;
      case ResponseClass::Unanswered: ++s.unanswered; break;
      case ResponseClass::FreshPending: ++s.fresh_pending; break;
    }
  }
  const auto settled = s.approved + s.unanswered + s.rejected;
  s.rendered_rows = {{std::string{kApprovedLabel}, percent_display(s.approved, settled)},
                     {std::string{kUnansweredLabel}, percent_display(s.unanswered, settled)},
                     {std::string{kRejectedLabel}, percent_display(s.rejected, settled)}};
  return s;
}

AccessStats access_stats(std::uint64_t total, std::uint64_t closed) {
  AccessStats s{total, closed, "n/a"};
  if (total > 0) {
    s.closed_share_display = group_thousands(closed) + " (" + percent_display(closed, total) + ")";
  }
  return s;
}

std::string render_table(const ResponseStats& s) {
  std::ostringstream out;
  out << "Responses to requests created " << format_timestamp(s.period.start) << " to "
      << format_timestamp(s.period.end) << '\n';
  out << "Unanswered after " << format_duration(s.ignore_window) << '\n';
  out << pad("Author responses", 22) << "Share\n";
  for (const auto& [label, value] : s.rendered_rows) {
    out << pad(label, 22) << value << '\n';
  }
  out << "Requests: " << s.total << " (approved " << s.approved << ", unanswered " << s.unanswered
      << ", rejected " << s.rejected << ", pending within window " << s.fresh_pending << ")\n";
  return out.str();
}

std::string render_table(const AccessStats& s) {
  std::ostringstream out;
  out << pad("Number of articles", 20) << "Count\n";
  out << pad("Total", 20) << group_thousands(s.total) << '\n';
  out << pad("Closed Access", 20) << s.closed_share_display << '\n';
  return out.str();
}

json to_json(const ResponseStats& s) {
  json rows = json::array();
  for (const auto& [label, value] : s.rendered_rows) {
    rows.push_back(json{{"label", label}, {"display", value}});
  }
  return json{{"period", {{"start", format_timestamp(s.period.start)}, {"end", format_timestamp(s.period.end)}}},
              {"ignore_window", format_duration(s.ignore_window)},
              {"total", s.total},
              {"approved", s.approved},
              {"unanswered", s.unanswered},
              {"rejected", s.rejected},
              {"fresh_pending", s.fresh_pending},
              {"rendered_rows", rows},
              {"table", render_table(s)}};
}

json to_json(const AccessStats& s) {
  return json{{"total", s.total},
              {"closed", s.closed},
              {"closed_share_display", s.closed_share_display},
              {"table", render_table(s)}};
}

}  // namespace almostoa
