#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "almostoa/json_io.hpp"
#include "almostoa/model.hpp"
#include "almostoa/request.hpp"

namespace almostoa {

enum class AccessKind { Open, Closed };

inline AccessKind kind_of(const AccessState& s) { return is_open(s) ? AccessKind::Open : AccessKind::Closed; }

struct EprintFilter {
  std::optional<AccessKind> access_kind;
  /// Matches on source identity (journal issue or book), not on every field.
  std::optional<VenueRef> venue;
};

struct EmbargoEntry {
  EprintId eprint_id;
  Date expiry;

  friend bool operator==(const EmbargoEntry&, const EmbargoEntry&) = default;
};

enum class DecisionApply { Applied, AlreadyDecided, Conflict };

struct DecisionUpdate {
  DecisionApply result;
  CopyRequest request;  // state after the call
};

/// Actors with special meaning for access transitions.
inline constexpr std::string_view kSchedulerActor = "scheduler";
inline constexpr std::string_view kAdminActor = "admin";
inline constexpr std::string_view kDepositorActor = "depositor";

/// Eprints, their access audit trail, copy requests and decision tokens.
///
/// Every mutation is appended to an event log before it becomes visible; a
/// file-backed store replays `snapshot.json` and then `events.jsonl` when it
/// opens. Operations on one record are linearizable; operations on distinct
/// records only share the map lock in shared mode.
class Store {
 public:
  /// In-memory store; the event log is kept in memory too.
  Store();
  /// File-backed store rooted at `dir` (created if missing).
  explicit Store(std::filesystem::path dir);
  ~Store();
  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  bool persistent() const { return dir_.has_value(); }
  const std::optional<std::filesystem::path>& directory() const { return dir_; }

  EprintId deposit(EprintMetadata metadata, Depositor depositor, std::vector<DocumentPart> parts,
                   AccessState access, Timestamp now);
  EprintRecord get(const EprintId& id) const;
  std::vector<AccessAuditEntry> audit_log(const EprintId& id) const;

  /// Replaces the access state and returns the previous one. The scheduler may
  /// only open records; only the admin actor may close an open record.
  AccessState set_access_state(const EprintId& id, const AccessState& state, std::string_view actor,
                               Timestamp now);
  /// As set_access_state, but only if the current state equals `expected`.
  bool compare_and_set_access(const EprintId& id, const AccessState& expected,
                              const AccessState& desired, std::string_view actor, Timestamp now);

  /// Ordered by deposited_at, then id.
  std::vector<EprintRecord> list(const EprintFilter& filter = {}) const;
  std::size_t eprint_count() const;
  std::size_t closed_count() const;

  /// Live embargo entries, ordered by (expiry, id).
  std::vector<EmbargoEntry> embargoes() const;
  std::vector<EmbargoEntry> due_embargoes(Date on_or_before) const;

  DocumentPart store_document(std::string label, std::string media_type, std::string_view bytes);
  std::string read_document(const DocumentPart& part) const;

  std::string next_request_id();
  void add_request(const CopyRequest& request, const DecisionToken& token);
  CopyRequest get_request(const std::string& id) const;
  DecisionToken token_for_request(const std::string& id) const;
  std::optional<std::string> request_for_token(const std::string& token) const;
  /// Write-once decision: Pending -> Approved | Rejected.
  DecisionUpdate decide_request(const std::string& id, const Decision& decision);
  /// Ordered by created_at, then id.
  std::vector<CopyRequest> requests() const;
  std::size_t request_count() const;

  /// Writes snapshot.json covering every event so far. No-op in memory.
  void write_snapshot();
  /// The full event log, oldest first.
  std::vector<json> events() const;

 private:
  struct EprintEntry {
    mutable std::mutex mutex;
    EprintRecord record;
    std::vector<AccessAuditEntry> audit;
  };
  struct RequestEntry {
    mutable std::mutex mutex;
    CopyRequest request;
    DecisionToken token;
  };

  void load();
  void apply(const json& event);
  void append_event(json event);
  void apply_access(EprintEntry& e, const AccessState& state, std::string_view actor, Timestamp now);
  void index_embargo(const EprintId& id, const AccessState& state);
  std::shared_ptr<EprintEntry> find_eprint(const EprintId& id) const;
  std::shared_ptr<RequestEntry> find_request(const std::string& id) const;
  void note_id(const std::string& id, std::atomic<std::uint64_t>& counter, std::string_view prefix);

  std::optional<std::filesystem::path> dir_;

  mutable std::shared_mutex map_mutex_;
  std::map<EprintId, std::shared_ptr<EprintEntry>> eprints_;
  std::unordered_map<std::string, std::shared_ptr<RequestEntry>> requests_;
  std::unordered_map<std::string, std::string> token_to_request_;

  mutable std::mutex embargo_mutex_;
  std::set<std::pair<Date, EprintId>> embargo_queue_;
  std::map<EprintId, Date> embargo_by_id_;

  mutable std::mutex document_mutex_;
  std::unordered_map<std::string, std::string> memory_documents_;

  mutable std::mutex log_mutex_;
  std::ofstream log_;
  std::uint64_t seq_ = 0;
  std::vector<json> memory_log_;

  std::atomic<std::uint64_t> next_eprint_{1};
  std::atomic<std::uint64_t> next_request_{1};
  bool replaying_ = false;
};

}  // namespace almostoa
