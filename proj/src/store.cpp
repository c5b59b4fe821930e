#include "almostoa/store.hpp"

#include <algorithm>
#include <sstream>

#include "almostoa/digest.hpp"
#include "almostoa/errors.hpp"

namespace almostoa {
namespace fs = std::filesystem;

namespace {

constexpr const char* kEventsFile = "events.jsonl";
constexpr const char* kSnapshotFile = "snapshot.json";
constexpr const char* kDocumentsDir = "documents";
constexpr std::string_view kRequestPrefix = "req-";

bool record_before(const EprintRecord& a, const EprintRecord& b) {
  if (a.deposited_at != b.deposited_at) {
    return a.deposited_at < b.deposited_at;
  }
  return a.id < b.id;
}

bool request_before(const CopyRequest& a, const CopyRequest& b) {
  if (a.created_at != b.created_at) {
    return a.created_at < b.created_at;
  }
  if (a.id.size() != b.id.size()) {
    return a.id.size() < b.id.size();
  }
  return a.id < b.id;
}

void check_transition(const AccessState& from, const AccessState& to, std::string_view actor) {
  if (actor == kSchedulerActor && !is_open(to)) {
    throw ForbiddenTransition("the scheduler may only open records");
  }
  if (is_open(from) && is_closed(to) && actor != kAdminActor) {
    throw ForbiddenTransition("only an administrator may close an open record");
  }
}

}  // namespace

Store::Store() = default;

Store::Store(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(*dir_ / kDocumentsDir, ec);
  if (ec) {
    throw StorageError("cannot create store directory " + dir_->string() + ": " + ec.message());
  }
  load();
  log_.open(*dir_ / kEventsFile, std::ios::app | std::ios::binary);
  if (!log_) {
    throw StorageError("cannot open event log in " + dir_->string());
  }
}

Store::~Store() = default;

void Store::note_id(const std::string& id, std::atomic<std::uint64_t>& counter, std::string_view prefix) {
  if (id.size() <= prefix.size() || id.compare(0, prefix.size(), prefix) != 0) {
    return;
  }
  try {
    const auto n = std::stoull(id.substr(prefix.size()));
    if (n >= counter.load()) {
      counter.store(n + 1);
    }
  } catch (const std::exception&) {
    // foreign id format; nothing to advance
  }
}

void Store::load() {
  replaying_ = true;
  std::uint64_t snapshot_seq = 0;
  const auto snapshot_path = *dir_ / kSnapshotFile;
  if (fs::exists(snapshot_path)) {
    std::ifstream in{snapshot_path};
    json snap;
    try {
      in >> snap;
    } catch (const json::exception& e) {
      throw StorageError(std::string{"corrupt snapshot: "} + e.what());
    }
    snapshot_seq = snap.at("seq").get<std::uint64_t>();
    for (const auto& item : snap.at("eprints")) {
      auto entry = std::make_shared<EprintEntry>();
      entry->record = item.at("record").get<EprintRecord>();
      entry->audit = item.at("audit").get<std::vector<AccessAuditEntry>>();
      index_embargo(entry->record.id, entry->record.access);
      note_id(entry->record.id.str(), next_eprint_, "");
      eprints_.emplace(entry->record.id, entry);
    }
    for (const auto& item : snap.at("requests")) {
      auto entry = std::make_shared<RequestEntry>();
      entry->request = item.at("request").get<CopyRequest>();
      entry->token = item.at("token").get<DecisionToken>();
      token_to_request_.emplace(entry->token.value, entry->request.id);
      note_id(entry->request.id, next_request_, kRequestPrefix);
      requests_.emplace(entry->request.id, entry);
    }
    next_eprint_ = std::max<std::uint64_t>(next_eprint_, snap.value("next_eprint", 1ULL));
    next_request_ = std::max<std::uint64_t>(next_request_, snap.value("next_request", 1ULL));
    seq_ = snapshot_seq;
  }

  std::ifstream in{*dir_ / kEventsFile, std::ios::binary};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    json event;
    try {
      event = json::parse(line);
    } catch (const json::exception&) {
      if (in.peek() == std::char_traits<char>::eof()) {
        break;  // torn final append
      }
      throw StorageError("corrupt event log at line " + std::to_string(line_no));
    }
    const auto seq = event.at("seq").get<std::uint64_t>();
    if (seq <= snapshot_seq) {
      continue;
    }
    apply(event);
    seq_ = seq;
  }
  replaying_ = false;
}

void Store::apply(const json& event) {
  const auto type = event.at("type").get<std::string>();
  if (type == "eprint_deposited") {
    auto entry = std::make_shared<EprintEntry>();
    entry->record = event.at("record").get<EprintRecord>();
    entry->audit.push_back(AccessAuditEntry{std::nullopt, entry->record.access,
                                            std::string{kDepositorActor}, entry->record.deposited_at});
    index_embargo(entry->record.id, entry->record.access);
    note_id(entry->record.id.str(), next_eprint_, "");
    eprints_.emplace(entry->record.id, std::move(entry));
  } else if (type == "access_changed") {
    auto entry = find_eprint(EprintId{event.at("eprint_id").get<std::string>()});
    auto at = parse_timestamp(event.at("at").get<std::string>());
    apply_access(*entry, access_from_json(event.at("state")), event.at("actor").get<std::string>(),
                 at.value_or(Timestamp{}));
  } else if (type == "request_created") {
    auto entry = std::make_shared<RequestEntry>();
    entry->request = event.at("request").get<CopyRequest>();
    entry->token = event.at("token").get<DecisionToken>();
    token_to_request_.emplace(entry->token.value, entry->request.id);
    note_id(entry->request.id, next_request_, kRequestPrefix);
    requests_.emplace(entry->request.id, std::move(entry));
  } else if (type == "request_decided") {
    auto entry = find_request(event.at("request_id").get<std::string>());
    entry->request.decision = decision_from_json(event.at("decision"));
  } else {
    throw StorageError("unknown event type: " + type);
  }
}

void Store::append_event(json event) {
  if (replaying_) {
    return;
  }
  std::lock_guard lock{log_mutex_};
  event["seq"] = ++seq_;
  if (dir_) {
    log_ << event.dump() << '\n';
    log_.flush();
    if (!log_) {
      throw StorageError("event log write failed");
    }
  } else {
    memory_log_.push_back(std::move(event));
  }
}

void Store::index_embargo(const EprintId& id, const AccessState& state) {
  std::lock_guard lock{embargo_mutex_};
  if (auto it = embargo_by_id_.find(id); it != embargo_by_id_.end()) {
    embargo_queue_.erase({it->second, id});
    embargo_by_id_.erase(it);
  }
  if (auto until = embargo_of(state)) {
    embargo_by_id_.emplace(id, *until);
    embargo_queue_.emplace(*until, id);
  }
}

void Store::apply_access(EprintEntry& e, const AccessState& state, std::string_view actor, Timestamp now) {
  e.audit.push_back(AccessAuditEntry{e.record.access, state, std::string{actor}, now});
  e.record.access = state;
  index_embargo(e.record.id, state);
}

std::shared_ptr<Store::EprintEntry> Store::find_eprint(const EprintId& id) const {
  auto it = eprints_.find(id);
  if (it == eprints_.end()) {
    throw NotFound("no eprint with id " + id.str());
  }
  return it->second;
}

std::shared_ptr<Store::RequestEntry> Store::find_request(const std::string& id) const {
  auto it = requests_.find(id);
  if (it == requests_.end()) {
    throw NotFound("no request with id " + id);
  }
  return it->second;
}

EprintId Store::deposit(EprintMetadata metadata, Depositor depositor, std::vector<DocumentPart> parts,
                        AccessState access, Timestamp now) {
  validate_and_complete(metadata);
  if (parts.empty()) {
    throw ValidationError("an eprint needs at least one document part");
  }
  for (const auto& p : parts) {
    if (p.byte_length < 1) {
      throw ValidationError("document part '" + p.label + "' is empty");
    }
  }
  if (!is_valid_email(depositor.contact_address)) {
    throw ValidationError("depositor contact address is not a valid email address");
  }
  if (depositor.fallback_address && !is_valid_email(*depositor.fallback_address)) {
    throw ValidationError("depositor fallback address is not a valid email address");
  }

  std::unique_lock lock{map_mutex_};
  EprintId id{std::to_string(next_eprint_++)};
  auto entry = std::make_shared<EprintEntry>();
  entry->record = EprintRecord{id, std::move(metadata), std::move(depositor), access, std::move(parts), now};
  entry->audit.push_back(AccessAuditEntry{std::nullopt, access, std::string{kDepositorActor}, now});
  append_event(json{{"type", "eprint_deposited"}, {"record", entry->record}});
  index_embargo(id, access);
  eprints_.emplace(id, std::move(entry));
  return id;
}

EprintRecord Store::get(const EprintId& id) const {
  std::shared_lock lock{map_mutex_};
  auto entry = find_eprint(id);
  std::lock_guard entry_lock{entry->mutex};
  return entry->record;
}

std::vector<AccessAuditEntry> Store::audit_log(const EprintId& id) const {
  std::shared_lock lock{map_mutex_};
  auto entry = find_eprint(id);
  std::lock_guard entry_lock{entry->mutex};
  return entry->audit;
}

AccessState Store::set_access_state(const EprintId& id, const AccessState& state, std::string_view actor,
                                    Timestamp now) {
  std::shared_lock lock{map_mutex_};
  auto entry = find_eprint(id);
  std::lock_guard entry_lock{entry->mutex};
  AccessState previous = entry->record.access;
  check_transition(previous, state, actor);
  append_event(json{{"type", "access_changed"},
                    {"eprint_id", id.str()},
                    {"previous", access_to_json(previous)},
                    {"state", access_to_json(state)},
                    {"actor", actor},
                    {"at", format_timestamp(now)}});
  apply_access(*entry, state, actor, now);
  return previous;
}

bool Store::compare_and_set_access(const EprintId& id, const AccessState& expected, const AccessState& desired,
                                   std::string_view actor, Timestamp now) {
  std::shared_lock lock{map_mutex_};
  auto entry = find_eprint(id);
  std::lock_guard entry_lock{entry->mutex};
  if (entry->record.access != expected) {
    return false;
  }
  check_transition(expected, desired, actor);
  append_event(json{{"type", "access_changed"},
                    {"eprint_id", id.str()},
                    {"previous", access_to_json(expected)},
                    {"state", access_to_json(desired)},
                    {"actor", actor},
                    {"at", format_timestamp(now)}});
  apply_access(*entry, desired, actor, now);
  return true;
}

std::vector<EprintRecord> Store::list(const EprintFilter& filter) const {
  const std::optional<std::string> venue_key =
      filter.venue ? std::optional{source_identity(*filter.venue)} : std::nullopt;
  std::vector<EprintRecord> out;
  std::shared_lock lock{map_mutex_};
  for (const auto& [id, entry] : eprints_) {
    std::lock_guard entry_lock{entry->mutex};
    const auto& r = entry->record;
    if (filter.access_kind && kind_of(r.access) != *filter.access_kind) {
      continue;
    }
    if (venue_key && source_identity(r.metadata.venue) != *venue_key) {
      continue;
    }
    out.push_back(r);
  }
  std::sort(out.begin(), out.end(), record_before);
  return out;
}

std::size_t Store::eprint_count() const {
  std::shared_lock lock{map_mutex_};
  return eprints_.size();
}

std::size_t Store::closed_count() const {
  std::shared_lock lock{map_mutex_};
  std::size_t n = 0;
  for (const auto& [id, entry] : eprints_) {
    std::lock_guard entry_lock{entry->mutex};
    n += is_closed(entry->record.access) ? 1 : 0;
  }
  return n;
}

std::vector<EmbargoEntry> Store::embargoes() const {
  std::lock_guard lock{embargo_mutex_};
  std::vector<EmbargoEntry> out;
  for (const auto& [date, id] : embargo_queue_) {
    out.push_back({id, date});
  }
  return out;
}

std::vector<EmbargoEntry> Store::due_embargoes(Date on_or_before) const {
  std::lock_guard lock{embargo_mutex_};
  std::vector<EmbargoEntry> out;
  for (const auto& [date, id] : embargo_queue_) {
    if (date > on_or_before) {
      break;
    }
    out.push_back({id, date});
  }
  return out;
}

DocumentPart Store::store_document(std::string label, std::string media_type, std::string_view bytes) {
  if (bytes.empty()) {
    throw ValidationError("document '" + label + "' is empty");
  }
  DocumentPart part;
  const auto hex = sha256_hex(bytes);
  part.label = std::move(label);
  part.media_type = std::move(media_type);
  part.content_digest = "sha256:" + hex;
  part.byte_length = static_cast<std::int64_t>(bytes.size());
  std::lock_guard lock{document_mutex_};
  if (dir_) {
    const auto rel = fs::path{kDocumentsDir} / hex;
    const auto path = *dir_ / rel;
    if (!fs::exists(path)) {
      const auto tmp = path.string() + ".tmp";
      std::ofstream out{tmp, std::ios::binary};
      out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
      out.close();
      if (!out) {
        throw StorageError("cannot write document " + path.string());
      }
      fs::rename(tmp, path);
    }
    part.storage_ref = rel.generic_string();
  } else {
    memory_documents_.try_emplace(hex, bytes);
    part.storage_ref = "mem:" + hex;
  }
  return part;
}

std::string Store::read_document(const DocumentPart& part) const {
  std::lock_guard lock{document_mutex_};
  if (part.storage_ref.rfind("mem:", 0) == 0) {
    auto it = memory_documents_.find(part.storage_ref.substr(4));
    if (it == memory_documents_.end()) {
      throw StorageError("document missing: " + part.storage_ref);
    }
    return it->second;
  }
  fs::path path{part.storage_ref};
  if (path.is_relative() && dir_) {
    path = *dir_ / path;
  }
  std::ifstream in{path, std::ios::binary};
  if (!in) {
    throw StorageError("document missing: " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string Store::next_request_id() {
  return std::string{kRequestPrefix} + std::to_string(next_request_++);
}

void Store::add_request(const CopyRequest& request, const DecisionToken& token) {
  std::unique_lock lock{map_mutex_};
  if (requests_.contains(request.id)) {
    throw StorageError("duplicate request id " + request.id);
  }
  if (token_to_request_.contains(token.value)) {
    throw StorageError("duplicate token");
  }
  append_event(json{{"type", "request_created"}, {"request", request}, {"token", token}});
  auto entry = std::make_shared<RequestEntry>();
  entry->request = request;
  entry->token = token;
  token_to_request_.emplace(token.value, request.id);
  requests_.emplace(request.id, std::move(entry));
}

CopyRequest Store::get_request(const std::string& id) const {
  std::shared_lock lock{map_mutex_};
  auto entry = find_request(id);
  std::lock_guard entry_lock{entry->mutex};
  return entry->request;
}

DecisionToken Store::token_for_request(const std::string& id) const {
  std::shared_lock lock{map_mutex_};
  auto entry = find_request(id);
  std::lock_guard entry_lock{entry->mutex};
  return entry->token;
}

std::optional<std::string> Store::request_for_token(const std::string& token) const {
  std::shared_lock lock{map_mutex_};
  auto it = token_to_request_.find(token);
  if (it == token_to_request_.end()) {
    return std::nullopt;
  }
  return it->second;
}

DecisionUpdate Store::decide_request(const std::string& id, const Decision& decision) {
  if (std::holds_alternative<Pending>(decision)) {
    throw ValidationError("a decision must approve or reject");
  }
  std::shared_lock lock{map_mutex_};
  auto entry = find_request(id);
  std::lock_guard entry_lock{entry->mutex};
  auto& current = entry->request.decision;
  if (!std::holds_alternative<Pending>(current)) {
    const bool same = current.index() == decision.index();
    return {same ? DecisionApply::AlreadyDecided : DecisionApply::Conflict, entry->request};
  }
  append_event(json{{"type", "request_decided"}, {"request_id", id}, {"decision", decision_to_json(decision)}});
  current = decision;
  return {DecisionApply::Applied, entry->request};
}

std::vector<CopyRequest> Store::requests() const {
  std::vector<CopyRequest> out;
  {
    std::shared_lock lock{map_mutex_};
    out.reserve(requests_.size());
    for (const auto& [id, entry] : requests_) {
      std::lock_guard entry_lock{entry->mutex};
      out.push_back(entry->request);
    }
  }
  std::sort(out.begin(), out.end(), request_before);
  return out;
}

std::size_t Store::request_count() const {
  std::shared_lock lock{map_mutex_};
  return requests_.size();
}

void Store::write_snapshot() {
  if (!dir_) {
    return;
  }
  std::unique_lock lock{map_mutex_};
  json snap;
  {
    std::lock_guard log_lock{log_mutex_};
    snap["seq"] = seq_;
  }
  snap["next_eprint"] = next_eprint_.load();
  snap["next_request"] = next_request_.load();
  snap["eprints"] = json::array();
  for (const auto& [id, entry] : eprints_) {
    snap["eprints"].push_back(json{{"record", entry->record}, {"audit", entry->audit}});
  }
  snap["requests"] = json::array();
  for (const auto& [id, entry] : requests_) {
    snap["requests"].push_back(json{{"request", entry->request}, {"token", entry->token}});
  }
  const auto tmp = *dir_ / (std::string{kSnapshotFile} + ".tmp");
  {
    std::ofstream out{tmp, std::ios::binary};
    out << snap.dump() << '\n';
    if (!out) {
      throw StorageError("cannot write snapshot");
    }
  }
  fs::rename(tmp, *dir_ / kSnapshotFile);
}

std::vector<json> Store::events() const {
  if (!dir_) {
    std::lock_guard lock{log_mutex_};
    return memory_log_;
  }
  std::lock_guard lock{log_mutex_};
  std::vector<json> out;
  std::ifstream in{*dir_ / kEventsFile, std::ios::binary};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception&) {
      break;
    }
  }
  return out;
}

}  // namespace almostoa
