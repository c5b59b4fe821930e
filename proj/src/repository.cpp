#include "almostoa/repository.hpp"

#include <fstream>

#include "almostoa/errors.hpp"

namespace almostoa {
namespace fs = std::filesystem;

namespace {

Duration duration_setting(const json& j, const char* key, Duration fallback) {
  auto it = j.find(key);
  if (it == j.end()) {
    return fallback;
  }
  if (it->is_number_integer()) {
    return Duration{it->get<long>()};
  }
  auto d = parse_duration(it->get<std::string>());
  if (!d) {
    throw ConfigError(std::string{"bad duration for "} + key);
  }
  return *d;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path{p};
  return path.is_relative() && !base.empty() ? base / path : path;
}

void upsert(std::vector<JurisdictionProfile>& list, JurisdictionProfile p) {
  for (auto& existing : list) {
    if (existing.name == p.name) {
      existing = std::move(p);
      return;
    }
  }
  list.push_back(std::move(p));
}

}  // namespace

RepositoryConfig RepositoryConfig::load(const fs::path& file) {
  std::ifstream in{file};
  if (!in) {
    throw ConfigError("cannot read config file " + file.string());
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config file " + file.string() + ": " + e.what());
  }
  return from_json(j, file.parent_path());
}

RepositoryConfig RepositoryConfig::from_json(const json& j, const fs::path& base_dir) {
  RepositoryConfig c;
  try {
    c.repo_name = j.value("repo_name", c.repo_name);
    c.base_url = j.value("base_url", c.base_url);
    while (!c.base_url.empty() && c.base_url.back() == '/') {
      c.base_url.pop_back();
    }
    c.admin_address = j.value("admin_address", c.admin_address);
    c.manager_address = j.value("manager_address", c.manager_address);
    c.admin_secret = j.value("admin_secret", c.admin_secret);
    c.jurisdiction = j.value("jurisdiction", c.jurisdiction);
    if (j.contains("profiles_file")) {
      for (auto& p : load_profiles(resolve(base_dir, j.at("profiles_file").get<std::string>()))) {
        upsert(c.profiles, std::move(p));
      }
    }
    if (j.contains("profiles")) {
      for (const auto& p : j.at("profiles")) {
        upsert(c.profiles, profile_from_json(p));
      }
    }
    if (j.contains("templates_dir")) {
      c.templates_dir = resolve(base_dir, j.at("templates_dir").get<std::string>());
    }
    if (j.contains("ui_dir")) {
      c.ui_dir = resolve(base_dir, j.at("ui_dir").get<std::string>());
    }
    c.utc_offset = std::chrono::minutes{j.value("utc_offset_minutes", 0)};
    c.ignore_window = duration_setting(j, "ignore_window", c.ignore_window);
    c.scheduler_interval = duration_setting(j, "scheduler_interval", c.scheduler_interval);
    c.fairness_enabled = j.value("fairness_enabled", c.fairness_enabled);
  } catch (const json::exception& e) {
    throw ConfigError(std::string{"config: "} + e.what());
  }
  if (!is_valid_email(c.admin_address) || !is_valid_email(c.manager_address)) {
    throw ConfigError("config needs valid admin_address and manager_address");
  }
  if (c.ignore_window <= Duration{0} || c.scheduler_interval <= Duration{0}) {
    throw ConfigError("ignore_window and scheduler_interval must be positive");
  }
  (void)c.profile();
  return c;
}

const JurisdictionProfile& RepositoryConfig::profile() const {
  for (const auto& p : profiles) {
    if (p.name == jurisdiction) {
      return p;
    }
  }
  throw ConfigError("no jurisdiction profile named " + jurisdiction);
}

Repository::Repository(RepositoryConfig config, std::optional<fs::path> store_dir,
                       std::unique_ptr<TokenSource> tokens)
    : config_(std::move(config)), tokens_(std::move(tokens)) {
  if (!tokens_) {
    tokens_ = std::make_unique<SecureTokenSource>();
  }
  if (store_dir) {
    store_ = std::make_unique<Store>(*store_dir);
    outbox_ = std::make_unique<OutboxTransport>(*store_dir / "outbox.jsonl");
  } else {
    store_ = std::make_unique<Store>();
    outbox_ = std::make_unique<OutboxTransport>();
  }
  WorkflowSettings settings;
  settings.render.repo_name = config_.repo_name;
  settings.render.base_url = config_.base_url;
  settings.render.admin_address = config_.admin_address;
  settings.render.templates =
      config_.templates_dir ? MailTemplates::load(*config_.templates_dir) : MailTemplates::defaults();
  settings.manager_address = config_.manager_address;
  settings.profile = config_.profile();
  settings.fairness_enabled = config_.fairness_enabled;
  workflow_ = std::make_unique<RequestWorkflow>(*store_, *outbox_, *tokens_, std::move(settings));
  scheduler_ = std::make_unique<EmbargoScheduler>(*store_, config_.utc_offset);
}

EprintId Repository::deposit(EprintMetadata metadata, Depositor depositor, const std::vector<Document>& documents,
                             AccessState access, Timestamp now) {
  std::vector<DocumentPart> parts;
  parts.reserve(documents.size());
  for (const auto& d : documents) {
    parts.push_back(store_->store_document(d.label, d.media_type, d.bytes));
  }
  return store_->deposit(std::move(metadata), std::move(depositor), std::move(parts), access, now);
}

ResponseStats Repository::response_stats(Period period, Timestamp now) const {
  return response_stats(period, config_.ignore_window, now);
}

ResponseStats Repository::response_stats(Period period, Duration ignore_window, Timestamp now) const {
  const auto requests = store_->requests();
  return almostoa::response_stats(requests, period, ignore_window, now);
}

AccessStats Repository::access_stats() const {
  return almostoa::access_stats(store_->eprint_count(), store_->closed_count());
}

}  // namespace almostoa
