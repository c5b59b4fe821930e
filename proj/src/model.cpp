#include "almostoa/model.hpp"

#include <algorithm>
#include <cctype>

#include "almostoa/errors.hpp"
#include "almostoa/request.hpp"

namespace almostoa {

bool is_url_safe(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~';
  });
}

std::string normalize_for_matching(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (unsigned char c : s) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

std::string source_identity(const VenueRef& venue) {
  if (venue.kind == VenueKind::BookChapter) {
    return "book\x1f" + normalize_for_matching(venue.container_title);
  }
  return "issue\x1f" + normalize_for_matching(venue.container_title) + "\x1f" +
         normalize_for_matching(venue.volume.value_or("")) + "\x1f" +
         normalize_for_matching(venue.issue.value_or(""));
}

namespace {

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

void append_sentence(std::string& out, std::string_view text) {
  out += text;
  if (!text.empty() && text.back() != '.' && text.back() != '?' && text.back() != '!') {
    out += '.';
  }
}

}  // namespace

std::string render_citation(const EprintMetadata& m) {
  std::string out = m.creators.empty() ? std::string{} : m.creators.front();
  if (m.creators.size() > 1) {
    out += " et al.";
  }
  out += "(" + std::to_string(m.year) + "). ";
  append_sentence(out, m.title);
  out += ' ';

  const VenueRef& v = m.venue;
  std::string venue;
  if (v.kind == VenueKind::JournalArticle) {
    venue = v.container_title;
    if (v.volume || v.issue) {
      venue += ", ";
      venue += v.volume.value_or("");
      if (v.issue) {
        venue += "(" + *v.issue + ")";
      }
    }
  } else {
    venue = "In: " + v.container_title;
    if (v.chapter) {
      venue += ", chapter " + *v.chapter;
    }
  }
  if (v.pages) {
    venue += ": " + *v.pages;
  }
  append_sentence(out, venue);
  return out;
}

void validate_and_complete(EprintMetadata& m) {
  if (blank(m.title)) {
    throw ValidationError("title must not be empty");
  }
  if (m.creators.empty() || std::any_of(m.creators.begin(), m.creators.end(),
                                        [](const std::string& c) { return blank(c); })) {
    throw ValidationError("creators must be a nonempty list of names");
  }
  if (blank(m.venue.container_title)) {
    throw ValidationError(m.venue.kind == VenueKind::JournalArticle
                              ? "journal articles need a journal title"
                              : "book chapters need a book title");
  }
  m.citation_line = render_citation(m);
}

std::optional<Date> embargo_of(const AccessState& s) {
  if (const auto* c = std::get_if<ClosedAccess>(&s)) {
    return c->embargo_until;
  }
  return std::nullopt;
}

std::string describe(const AccessState& s) {
  if (is_open(s)) {
    return "open";
  }
  auto until = embargo_of(s);
  return until ? "closed until " + format_date(*until) : "closed";
}

std::string effective_notification_address(const Depositor& d, const std::string& manager_address) {
  if (d.active) {
    return d.contact_address;
  }
  if (d.fallback_address) {
    return *d.fallback_address;
  }
  return manager_address;
}

bool is_valid_email(std::string_view address) {
  if (address.size() < 3 || address.size() > 254) {
    return false;
  }
  const auto at = address.find('@');
  if (at == std::string_view::npos || at == 0 || address.find('@', at + 1) != std::string_view::npos) {
    return false;
  }
  const auto domain = address.substr(at + 1);
  if (domain.size() < 3 || domain.front() == '.' || domain.back() == '.' ||
      domain.find('.') == std::string_view::npos || domain.find("..") != std::string_view::npos) {
    return false;
  }
  return std::none_of(address.begin(), address.end(), [](unsigned char c) {
    return std::isspace(c) || std::iscntrl(c) || c == '<' || c == '>' || c == ',' || c == ';' ||
           c == '"' || c == '&' || c == '?' || c == '#' || c == '/' || c == '\\';
  });
}

std::string requester_identity(std::string_view address) {
  std::string out{address};
  const auto at = out.rfind('@');
  if (at == std::string::npos) {
    return out;
  }
  std::transform(out.begin() + static_cast<std::ptrdiff_t>(at), out.end(), out.begin() + static_cast<std::ptrdiff_t>(at),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view to_string(PurposeKind k) {
  switch (k) {
    case PurposeKind::Research: return "research";
    case PurposeKind::PrivateStudy: return "private_study";
    case PurposeKind::Criticism: return "criticism";
    case PurposeKind::NewsReporting: return "news_reporting";
    case PurposeKind::Other: return "other";
  }
  return "other";
}

std::optional<PurposeKind> parse_purpose_kind(std::string_view s) {
  for (auto k : {PurposeKind::Research, PurposeKind::PrivateStudy, PurposeKind::Criticism,
                 PurposeKind::NewsReporting, PurposeKind::Other}) {
    if (to_string(k) == s) {
      return k;
    }
  }
  return std::nullopt;
}

Purpose make_purpose(PurposeKind kind, std::string other_text) {
  if (kind == PurposeKind::Other) {
    if (blank(other_text)) {
      throw ValidationError("purpose 'other' requires a description");
    }
    return Purpose{kind, std::move(other_text)};
  }
  return Purpose{kind, {}};
}

std::string_view to_string(AlertKind k) {
  switch (k) {
    case AlertKind::HighVolumeSameArticle: return "HighVolumeSameArticle";
    case AlertKind::SameIssueMultiRequest: return "SameIssueMultiRequest";
    case AlertKind::SameBookMultiRequest: return "SameBookMultiRequest";
  }
  return "";
}

std::optional<AlertKind> parse_alert_kind(std::string_view s) {
  for (auto k : {AlertKind::HighVolumeSameArticle, AlertKind::SameIssueMultiRequest,
                 AlertKind::SameBookMultiRequest}) {
    if (to_string(k) == s) {
      return k;
    }
  }
  return std::nullopt;
}

std::string_view decision_name(const Decision& d) {
  if (std::holds_alternative<Approved>(d)) {
    return "approved";
  }
  if (std::holds_alternative<Rejected>(d)) {
    return "rejected";
  }
  return "pending";
}

std::optional<Timestamp> decided_at(const Decision& d) {
  if (const auto* a = std::get_if<Approved>(&d)) {
    return a->at;
  }
  if (const auto* r = std::get_if<Rejected>(&d)) {
    return r->at;
  }
  return std::nullopt;
}

}  // namespace almostoa
