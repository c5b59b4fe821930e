#include "almostoa/fairness.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "almostoa/errors.hpp"

namespace almostoa {
namespace {

constexpr const char* kAdvisoryTail =
    " This is an advisory notice only; the request has not been blocked.";

bool inside(Timestamp t, Timestamp now, Duration window) { return t <= now && now - t <= window; }

std::string source_label(const VenueRef& v) {
  if (v.kind == VenueKind::BookChapter) {
    return "the book \"" + v.container_title + "\"";
  }
  std::string s = v.container_title;
  if (v.volume) {
    s += " " + *v.volume;
  }
  if (v.issue) {
    s += "(" + *v.issue + ")";
  }
  return "the journal issue " + s;
}

std::string plural(std::size_t n, std::string_view word) {
  return std::to_string(n) + " " + std::string{word} + (n == 1 ? "" : "s");
}

std::string spoken(Duration d) {
  const auto s = d.count();
  if (s % 86400 == 0) {
    return plural(static_cast<std::size_t>(s / 86400), "day");
  }
  if (s % 3600 == 0) {
    return plural(static_cast<std::size_t>(s / 3600), "hour");
  }
  return plural(static_cast<std::size_t>(s), "second");
}

Duration duration_field(const json& j, const char* key, Duration fallback) {
  auto it = j.find(key);
  if (it == j.end()) {
    return fallback;
  }
  if (it->is_number_integer()) {
    return days(it->get<long>());
  }
  auto d = parse_duration(it->get<std::string>());
  if (!d) {
    throw ConfigError(std::string{"bad duration for "} + key);
  }
  return *d;
}

std::optional<int> optional_int(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    return std::nullopt;
  }
  return it->get<int>();
}

}  // namespace

void validate(const JurisdictionProfile& p) {
  if ((p.deemed_fair_same_issue_limit && *p.deemed_fair_same_issue_limit < 1) ||
      (p.deemed_fair_same_book_limit && *p.deemed_fair_same_book_limit < 1) || p.high_volume_threshold < 1) {
    throw ConfigError("profile " + p.name + ": thresholds must be at least 1");
  }
  if (p.high_volume_window <= Duration{0} || p.same_source_window <= Duration{0}) {
    throw ConfigError("profile " + p.name + ": windows must be positive");
  }
}

std::vector<JurisdictionProfile> builtin_profiles() {
  JurisdictionProfile au;
  au.name = "AU";
  au.attestation_text =
      "I am requesting this document for the purpose of research or study, criticism or review, or "
      "reporting news, and I will use it according to these conditions.";
  au.deemed_fair_same_issue_limit = 1;
  au.deemed_fair_same_book_limit = 1;

  JurisdictionProfile ca;
  ca.name = "CA";
  ca.attestation_text =
      "I am requesting this document for the purpose of research, private study, criticism or news "
      "reporting, or for another use allowed by the Law, and I will use it according to these conditions.";

  JurisdictionProfile uk;
  uk.name = "UK";
  uk.attestation_text =
      "I am requesting this document for non-commercial research or private study, criticism or review, "
      "or reporting current events, and I will use it according to these conditions.";

  JurisdictionProfile us;
  us.name = "US";
  us.attestation_text =
      "I am requesting this document for purposes such as criticism, comment, news reporting, teaching, "
      "scholarship or research, and I will use it in a manner consistent with fair use.";
  return {au, ca, uk, us};
}

JurisdictionProfile builtin_profile(std::string_view name) {
  for (auto& p : builtin_profiles()) {
    if (p.name == name) {
      return p;
    }
  }
  throw ConfigError("no built-in jurisdiction profile named " + std::string{name});
}

JurisdictionProfile profile_from_json(const json& j) {
  const auto name = j.at("name").get<std::string>();
  JurisdictionProfile p;
  try {
    p = builtin_profile(name);
  } catch (const ConfigError&) {
    p.name = name;
  }
  p.attestation_text = j.value("attestation_text", p.attestation_text);
  if (j.contains("deemed_fair_same_issue_limit")) {
    p.deemed_fair_same_issue_limit = optional_int(j, "deemed_fair_same_issue_limit");
  }
  if (j.contains("deemed_fair_same_book_limit")) {
    p.deemed_fair_same_book_limit = optional_int(j, "deemed_fair_same_book_limit");
  }
  p.high_volume_threshold = j.value("high_volume_threshold", p.high_volume_threshold);
  p.high_volume_window = duration_field(j, "high_volume_window", p.high_volume_window);
  p.same_source_window = duration_field(j, "same_source_window", p.same_source_window);
  if (p.attestation_text.empty()) {
    throw ConfigError("profile " + name + " has no attestation text");
  }
  validate(p);
  return p;
}

json profile_to_json(const JurisdictionProfile& p) {
  json j{{"name", p.name},
         {"attestation_text", p.attestation_text},
         {"high_volume_threshold", p.high_volume_threshold},
         {"high_volume_window", format_duration(p.high_volume_window)},
         {"same_source_window", format_duration(p.same_source_window)}};
  j["deemed_fair_same_issue_limit"] =
      p.deemed_fair_same_issue_limit ? json(*p.deemed_fair_same_issue_limit) : json(nullptr);
  j["deemed_fair_same_book_limit"] =
      p.deemed_fair_same_book_limit ? json(*p.deemed_fair_same_book_limit) : json(nullptr);
  return j;
}

std::vector<JurisdictionProfile> load_profiles(const std::filesystem::path& path) {
  std::ifstream in{path};
  if (!in) {
    throw ConfigError("cannot read profiles file " + path.string());
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("profiles file " + path.string() + ": " + e.what());
  }
  const json& list = doc.is_array() ? doc : doc.at("profiles");
  std::vector<JurisdictionProfile> out;
  for (const auto& item : list) {
    out.push_back(profile_from_json(item));
  }
  return out;
}

std::vector<FairnessAlert> evaluate_request(const CopyRequest& candidate, std::span<const CopyRequest> history,
                                            const VenueLookup& venue_of, const JurisdictionProfile& profile,
                                            Timestamp now) {
  const auto venue = venue_of(candidate.eprint_id);
  if (!venue) {
    return {};
  }
  const bool book = venue->kind == VenueKind::BookChapter;
  const auto key = source_identity(*venue);
  const auto who = requester_identity(candidate.requester_address);
  const auto window = profile.same_source_window;
  const auto limit = static_cast<std::size_t>(book ? profile.same_book_limit() : profile.same_issue_limit());

  std::vector<const CopyRequest*> contributing;
  std::set<EprintId> distinct{candidate.eprint_id};
  for (const auto& r : history) {
    if (r.id == candidate.id || requester_identity(r.requester_address) != who ||
        !inside(r.created_at, now, window)) {
      continue;
    }
    auto other = r.eprint_id == candidate.eprint_id ? venue : venue_of(r.eprint_id);
    if (!other || source_identity(*other) != key) {
      continue;
    }
    contributing.push_back(&r);
    distinct.insert(r.eprint_id);
  }
  if (distinct.size() <= limit) {
    return {};
  }

  std::sort(contributing.begin(), contributing.end(), [](const CopyRequest* a, const CopyRequest* b) {
    return a->created_at != b->created_at ? a->created_at < b->created_at : a->id < b->id;
  });
  FairnessAlert alert;
  alert.kind = book ? AlertKind::SameBookMultiRequest : AlertKind::SameIssueMultiRequest;
  alert.eprint_id = candidate.eprint_id;
  alert.requester_address = candidate.requester_address;
  alert.window = window;
  for (const auto* r : contributing) {
    alert.evidence.push_back(r->id);
  }
  alert.evidence.push_back(candidate.id);
  alert.message = "Advisory: " + candidate.requester_address + " has requested " +
                  plural(distinct.size(), book ? "different chapter" : "different article") + " from " +
                  source_label(*venue) + " within " + spoken(window) + ". Supplying more than " +
                  plural(limit, book ? "chapter" : "article") + " from one " + (book ? "book" : "issue") +
                  " to the same person may not be fair dealing." + kAdvisoryTail;
  return {alert};
}

std::vector<FairnessAlert> scan_accepted_volume(std::span<const CopyRequest> history,
                                                const JurisdictionProfile& profile, Timestamp now) {
  std::map<EprintId, std::vector<const CopyRequest*>> approvals;
  for (const auto& r : history) {
    const auto* approved = std::get_if<Approved>(&r.decision);
    if (approved && inside(approved->at, now, profile.high_volume_window)) {
      approvals[r.eprint_id].push_back(&r);
    }
  }
  std::vector<FairnessAlert> out;
  for (auto& [id, list] : approvals) {
    if (list.size() < static_cast<std::size_t>(profile.high_volume_threshold)) {
      continue;
    }
    std::sort(list.begin(), list.end(), [](const CopyRequest* a, const CopyRequest* b) {
      const auto ta = std::get<Approved>(a->decision).at;
      const auto tb = std::get<Approved>(b->decision).at;
      return ta != tb ? ta < tb : a->id < b->id;
    });
    FairnessAlert alert;
    alert.kind = AlertKind::HighVolumeSameArticle;
    alert.eprint_id = id;
    alert.window = profile.high_volume_window;
    for (const auto* r : list) {
      alert.evidence.push_back(r->id);
    }
    alert.message = "Advisory: " + plural(list.size(), "request") + " for this document " +
                    (list.size() == 1 ? "was" : "were") + " approved within " +
                    spoken(profile.high_volume_window) +
                    ". Sending many copies of the same document in a short period may not be fair dealing." +
                    kAdvisoryTail;
    out.push_back(std::move(alert));
  }
  return out;
}

}  // namespace almostoa
