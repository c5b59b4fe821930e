#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "almostoa/fairness.hpp"
#include "almostoa/mail.hpp"
#include "almostoa/scheduler.hpp"
#include "almostoa/stats.hpp"
#include "almostoa/store.hpp"
#include "almostoa/tokens.hpp"
#include "almostoa/workflow.hpp"

namespace almostoa {

struct RepositoryConfig {
  std::string repo_name = "Repository";
  std::string base_url = "http://localhost:8080";
  std::string admin_address = "repository-admin@example.org";
  std::string manager_address = "repository-manager@example.org";
  std::string admin_secret;
  std::string jurisdiction = "CA";
  std::vector<JurisdictionProfile> profiles = builtin_profiles();
  std::optional<std::filesystem::path> templates_dir;
  std::optional<std::filesystem::path> ui_dir;
  std::chrono::minutes utc_offset{0};
  Duration ignore_window = days(30);
  Duration scheduler_interval = std::chrono::hours{1};
  bool fairness_enabled = true;

  /// Relative paths in the file resolve against the file's directory.
  static RepositoryConfig load(const std::filesystem::path& file);
  static RepositoryConfig from_json(const json& j, const std::filesystem::path& base_dir = {});

  const JurisdictionProfile& profile() const;
};

/// Everything a running repository needs: store, outbox, token source,
/// workflow and embargo scheduler, wired from one configuration.
class Repository {
 public:
  /// `store_dir` empty: in-memory store and outbox.
  explicit Repository(RepositoryConfig config, std::optional<std::filesystem::path> store_dir = std::nullopt,
                      std::unique_ptr<TokenSource> tokens = nullptr);

  const RepositoryConfig& config() const { return config_; }
  Store& store() { return *store_; }
  const Store& store() const { return *store_; }
  OutboxTransport& outbox() { return *outbox_; }
  RequestWorkflow& workflow() { return *workflow_; }
  EmbargoScheduler& scheduler() { return *scheduler_; }

  /// Deposit with document bytes; each document becomes one DocumentPart.
  struct Document {
    std::string label;
    std::string media_type;
    std::string bytes;
  };
  EprintId deposit(EprintMetadata metadata, Depositor depositor, const std::vector<Document>& documents,
                   AccessState access, Timestamp now);

  ResponseStats response_stats(Period period, Timestamp now) const;
  ResponseStats response_stats(Period period, Duration ignore_window, Timestamp now) const;
  AccessStats access_stats() const;

 private:
  RepositoryConfig config_;
  std::unique_ptr<Store> store_;
  std::unique_ptr<OutboxTransport> outbox_;
  std::unique_ptr<TokenSource> tokens_;
  std::unique_ptr<RequestWorkflow> workflow_;
  std::unique_ptr<EmbargoScheduler> scheduler_;
};

}  // namespace almostoa
