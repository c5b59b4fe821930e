#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "almostoa/time.hpp"

namespace almostoa {

/// Opaque, URL-safe eprint identifier. Allocated by the store, never reused.
class EprintId {
 public:
  EprintId() = default;
  explicit EprintId(std::string value) : value_(std::move(value)) {}

  const std::string& str() const { return value_; }
  bool empty() const { return value_.empty(); }

  friend bool operator==(const EprintId&, const EprintId&) = default;
  /// Numeric-aware: "9" sorts before "10".
  friend std::strong_ordering operator<=>(const EprintId& a, const EprintId& b) {
    if (auto c = a.value_.size() <=> b.value_.size(); c != 0) {
      return c;
    }
    return a.value_.compare(b.value_) <=> 0;
  }

 private:
  std::string value_;
};

bool is_url_safe(std::string_view s);

enum class VenueKind { JournalArticle, BookChapter };

struct VenueRef {
  VenueKind kind = VenueKind::JournalArticle;
  std::string container_title;
  std::optional<std::string> volume;
  std::optional<std::string> issue;
  std::optional<std::string> chapter;
  std::optional<std::string> pages;

  friend bool operator==(const VenueRef&, const VenueRef&) = default;
};

/// Whitespace-collapsed, case-folded key used to group requests by journal
/// issue (title, volume, issue) or by book (title).
std::string source_identity(const VenueRef& venue);
/// Lower-cases ASCII and collapses runs of whitespace to one space, trimmed.
std::string normalize_for_matching(std::string_view s);

struct EprintMetadata {
  std::string title;
  std::vector<std::string> creators;
  int year = 0;
  VenueRef venue;
  std::string citation_line;
  std::optional<std::string> vor_identifier;

  friend bool operator==(const EprintMetadata&, const EprintMetadata&) = default;
};

/// Canonical citation, e.g.
/// "Gömann, Anissa et al.(2009). Title. Tetrahedron, 65(7): 1450-1454."
std::string render_citation(const EprintMetadata& m);

/// Checks title, creators and venue, then fills in citation_line.
void validate_and_complete(EprintMetadata& m);

struct OpenAccess {
  friend bool operator==(const OpenAccess&, const OpenAccess&) = default;
};
struct ClosedAccess {
  std::optional<Date> embargo_until;  // absent: closed until an administrator changes it
  friend bool operator==(const ClosedAccess&, const ClosedAccess&) = default;
};
using AccessState = std::variant<OpenAccess, ClosedAccess>;

inline bool is_open(const AccessState& s) { return std::holds_alternative<OpenAccess>(s); }
inline bool is_closed(const AccessState& s) { return std::holds_alternative<ClosedAccess>(s); }
std::optional<Date> embargo_of(const AccessState& s);
std::string describe(const AccessState& s);

struct Depositor {
  std::string display_name;
  std::string contact_address;
  bool active = true;
  std::optional<std::string> fallback_address;

  friend bool operator==(const Depositor&, const Depositor&) = default;
};

/// Address that receives approval emails for this depositor.
std::string effective_notification_address(const Depositor& d, const std::string& manager_address);

struct DocumentPart {
  std::string label;
  std::string content_digest;  // "sha256:<hex>"
  std::int64_t byte_length = 0;
  std::string media_type;
  std::string storage_ref;

  friend bool operator==(const DocumentPart&, const DocumentPart&) = default;
};

struct AccessAuditEntry {
  std::optional<AccessState> previous;  // absent for the deposit itself
  AccessState state;
  std::string actor;
  Timestamp at;

  friend bool operator==(const AccessAuditEntry&, const AccessAuditEntry&) = default;
};

struct EprintRecord {
  EprintId id;
  EprintMetadata metadata;
  Depositor depositor;
  AccessState access;
  std::vector<DocumentPart> parts;
  Timestamp deposited_at;

  friend bool operator==(const EprintRecord&, const EprintRecord&) = default;
};

/// Syntactic check only: one '@', nonempty local part, dotted domain, no spaces.
bool is_valid_email(std::string_view address);

}  // namespace almostoa
