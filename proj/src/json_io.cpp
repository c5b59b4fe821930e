#include "almostoa/json_io.hpp"

#include "almostoa/errors.hpp"

namespace almostoa {
namespace {

template <typename T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
  if (v) {
    j[key] = *v;
  }
}

std::optional<std::string> get_optional_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    return std::nullopt;
  }
  if (!it->is_string()) {
    throw ValidationError(std::string{key} + " must be a string");
  }
  std::string s = it->get<std::string>();
  if (s.empty()) {
    return std::nullopt;
  }
  return s;
}

Timestamp timestamp_from(const json& j) {
  auto t = parse_timestamp(j.get<std::string>());
  if (!t) {
    throw ValidationError("bad timestamp: " + j.get<std::string>());
  }
  return *t;
}

}  // namespace

std::string_view to_string(VenueKind k) {
  return k == VenueKind::JournalArticle ? "journal_article" : "book_chapter";
}

std::optional<VenueKind> parse_venue_kind(std::string_view s) {
  if (s == "journal_article") {
    return VenueKind::JournalArticle;
  }
  if (s == "book_chapter") {
    return VenueKind::BookChapter;
  }
  return std::nullopt;
}

void to_json(json& j, const VenueRef& v) {
  j = json{{"kind", to_string(v.kind)}, {"container_title", v.container_title}};
  put_optional(j, "volume", v.volume);
  put_optional(j, "issue", v.issue);
  put_optional(j, "chapter", v.chapter);
  put_optional(j, "pages", v.pages);
}

void from_json(const json& j, VenueRef& v) {
  auto kind = parse_venue_kind(j.value("kind", std::string{"journal_article"}));
  if (!kind) {
    throw ValidationError("venue kind must be journal_article or book_chapter");
  }
  v.kind = *kind;
  v.container_title = j.value("container_title", std::string{});
  v.volume = get_optional_string(j, "volume");
  v.issue = get_optional_string(j, "issue");
  v.chapter = get_optional_string(j, "chapter");
  v.pages = get_optional_string(j, "pages");
}

void to_json(json& j, const EprintMetadata& m) {
  j = json{{"title", m.title},
           {"creators", m.creators},
           {"year", m.year},
           {"venue", m.venue},
           {"citation_line", m.citation_line}};
  put_optional(j, "vor_identifier", m.vor_identifier);
}

void from_json(const json& j, EprintMetadata& m) {
  m.title = j.at("title").get<std::string>();
  m.creators = j.at("creators").get<std::vector<std::string>>();
  m.year = j.at("year").get<int>();
  m.venue = j.at("venue").get<VenueRef>();
  m.citation_line = j.value("citation_line", std::string{});
  m.vor_identifier = get_optional_string(j, "vor_identifier");
}

void to_json(json& j, const Depositor& d) {
  j = json{{"display_name", d.display_name}, {"contact_address", d.contact_address}, {"active", d.active}};
  put_optional(j, "fallback_address", d.fallback_address);
}

void from_json(const json& j, Depositor& d) {
  d.display_name = j.at("display_name").get<std::string>();
  d.contact_address = j.at("contact_address").get<std::string>();
  d.active = j.value("active", true);
  d.fallback_address = get_optional_string(j, "fallback_address");
}

void to_json(json& j, const DocumentPart& p) {
  j = json{{"label", p.label},
           {"content_digest", p.content_digest},
           {"byte_length", p.byte_length},
           {"media_type", p.media_type},
           {"storage_ref", p.storage_ref}};
}

void from_json(const json& j, DocumentPart& p) {
  p.label = j.at("label").get<std::string>();
  p.content_digest = j.at("content_digest").get<std::string>();
  p.byte_length = j.at("byte_length").get<std::int64_t>();
  p.media_type = j.at("media_type").get<std::string>();
  p.storage_ref = j.at("storage_ref").get<std::string>();
}

json access_to_json(const AccessState& s) {
  if (is_open(s)) {
    return json{{"kind", "open"}};
  }
  json j{{"kind", "closed"}};
  if (auto until = embargo_of(s)) {
    j["embargo_until"] = format_date(*until);
  }
  return j;
}

AccessState access_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "open") {
    return OpenAccess{};
  }
  if (kind != "closed") {
    throw ValidationError("access kind must be open or closed");
  }
  ClosedAccess c;
  if (auto s = get_optional_string(j, "embargo_until")) {
    auto d = parse_date(*s);
    if (!d) {
      throw ValidationError("embargo_until must be an ISO-8601 date: " + *s);
    }
    c.embargo_until = *d;
  }
  return c;
}

void to_json(json& j, const EprintRecord& r) {
  j = json{{"id", r.id.str()},
           {"metadata", r.metadata},
           {"depositor", r.depositor},
           {"access", access_to_json(r.access)},
           {"parts", r.parts},
           {"deposited_at", format_timestamp(r.deposited_at)}};
}

void from_json(const json& j, EprintRecord& r) {
  r.id = EprintId{j.at("id").get<std::string>()};
  r.metadata = j.at("metadata").get<EprintMetadata>();
  r.depositor = j.at("depositor").get<Depositor>();
  r.access = access_from_json(j.at("access"));
  r.parts = j.at("parts").get<std::vector<DocumentPart>>();
  r.deposited_at = timestamp_from(j.at("deposited_at"));
}

void to_json(json& j, const AccessAuditEntry& e) {
  j = json{{"state", access_to_json(e.state)}, {"actor", e.actor}, {"at", format_timestamp(e.at)}};
  if (e.previous) {
    j["previous"] = access_to_json(*e.previous);
  }
}

void from_json(const json& j, AccessAuditEntry& e) {
  e.state = access_from_json(j.at("state"));
  e.actor = j.at("actor").get<std::string>();
  e.at = timestamp_from(j.at("at"));
  if (j.contains("previous")) {
    e.previous = access_from_json(j.at("previous"));
  } else {
    e.previous.reset();
  }
}

void to_json(json& j, const Purpose& p) {
  j = json{{"kind", to_string(p.kind)}};
  if (p.kind == PurposeKind::Other) {
    j["text"] = p.other_text;
  }
}

void from_json(const json& j, Purpose& p) {
  auto kind = parse_purpose_kind(j.at("kind").get<std::string>());
  if (!kind) {
    throw ValidationError("unknown purpose");
  }
  p = make_purpose(*kind, j.value("text", std::string{}));
}

void to_json(json& j, const FairnessAlert& a) {
  j = json{{"kind", to_string(a.kind)},
           {"eprint_id", a.eprint_id.str()},
           {"evidence", a.evidence},
           {"window", format_duration(a.window)},
           {"message", a.message}};
  put_optional(j, "requester_address", a.requester_address);
}

void from_json(const json& j, FairnessAlert& a) {
  auto kind = parse_alert_kind(j.at("kind").get<std::string>());
  if (!kind) {
    throw ValidationError("unknown alert kind");
  }
  a.kind = *kind;
  a.eprint_id = EprintId{j.at("eprint_id").get<std::string>()};
  a.evidence = j.at("evidence").get<std::vector<std::string>>();
  a.window = parse_duration(j.at("window").get<std::string>()).value_or(Duration{0});
  a.message = j.at("message").get<std::string>();
  a.requester_address = get_optional_string(j, "requester_address");
}

json decision_to_json(const Decision& d) {
  json j{{"state", decision_name(d)}};
  if (auto at = decided_at(d)) {
    j["at"] = format_timestamp(*at);
  }
  return j;
}

Decision decision_from_json(const json& j) {
  const auto state = j.at("state").get<std::string>();
  if (state == "pending") {
    return Pending{};
  }
  if (state == "approved") {
    return Approved{timestamp_from(j.at("at"))};
  }
  if (state == "rejected") {
    return Rejected{timestamp_from(j.at("at"))};
  }
  throw ValidationError("unknown decision state: " + state);
}

void to_json(json& j, const CopyRequest& r) {
  j = json{{"id", r.id},
           {"eprint_id", r.eprint_id.str()},
           {"requester_address", r.requester_address},
           {"purpose", r.purpose},
           {"attested", r.attested},
           {"created_at", format_timestamp(r.created_at)},
           {"decision", decision_to_json(r.decision)},
           {"alerts_at_creation", r.alerts_at_creation}};
}

void from_json(const json& j, CopyRequest& r) {
  r.id = j.at("id").get<std::string>();
  r.eprint_id = EprintId{j.at("eprint_id").get<std::string>()};
  r.requester_address = j.at("requester_address").get<std::string>();
  r.purpose = j.at("purpose").get<Purpose>();
  r.attested = j.value("attested", true);
  r.created_at = timestamp_from(j.at("created_at"));
  r.decision = decision_from_json(j.at("decision"));
  r.alerts_at_creation = j.value("alerts_at_creation", std::vector<FairnessAlert>{});
}

void to_json(json& j, const DecisionToken& t) {
  j = json{{"value", t.value}, {"request_id", t.request_id}, {"issued_at", format_timestamp(t.issued_at)}};
}

void from_json(const json& j, DecisionToken& t) {
  t.value = j.at("value").get<std::string>();
  t.request_id = j.at("request_id").get<std::string>();
  t.issued_at = timestamp_from(j.at("issued_at"));
}

}  // namespace almostoa
