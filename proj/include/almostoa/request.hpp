#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "almostoa/model.hpp"
#include "almostoa/time.hpp"

namespace almostoa {

enum class PurposeKind { Research, PrivateStudy, Criticism, NewsReporting, Other };

struct Purpose {
  PurposeKind kind = PurposeKind::Research;
  std::string other_text;  // nonempty iff kind == Other

  friend bool operator==(const Purpose&, const Purpose&) = default;
};

/// "research", "private_study", "criticism", "news_reporting", "other"
std::string_view to_string(PurposeKind k);
std::optional<PurposeKind> parse_purpose_kind(std::string_view s);
/// Throws ValidationError when Other has no text.
Purpose make_purpose(PurposeKind kind, std::string other_text = {});

enum class AlertKind { HighVolumeSameArticle, SameIssueMultiRequest, SameBookMultiRequest };
std::string_view to_string(AlertKind k);
std::optional<AlertKind> parse_alert_kind(std::string_view s);

struct FairnessAlert {
  AlertKind kind = AlertKind::HighVolumeSameArticle;
  EprintId eprint_id;
  std::optional<std::string> requester_address;
  std::vector<std::string> evidence;  // contributing request ids
  Duration window{0};
  std::string message;

  friend bool operator==(const FairnessAlert&, const FairnessAlert&) = default;
};

struct Pending {
  friend bool operator==(const Pending&, const Pending&) = default;
};
struct Approved {
  Timestamp at;
  friend bool operator==(const Approved&, const Approved&) = default;
};
struct Rejected {
  Timestamp at;
  friend bool operator==(const Rejected&, const Rejected&) = default;
};
using Decision = std::variant<Pending, Approved, Rejected>;

std::string_view decision_name(const Decision& d);
std::optional<Timestamp> decided_at(const Decision& d);

struct CopyRequest {
  std::string id;
  EprintId eprint_id;
  std::string requester_address;
  Purpose purpose;
  bool attested = true;
  Timestamp created_at;
  Decision decision = Pending{};
  std::vector<FairnessAlert> alerts_at_creation;

  friend bool operator==(const CopyRequest&, const CopyRequest&) = default;
};

struct DecisionToken {
  std::string value;
  std::string request_id;
  Timestamp issued_at;

  friend bool operator==(const DecisionToken&, const DecisionToken&) = default;
};

/// Requester identity: the address with its domain case-folded.
std::string requester_identity(std::string_view address);

}  // namespace almostoa
