#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "almostoa/json_io.hpp"
#include "almostoa/model.hpp"
#include "almostoa/request.hpp"

namespace almostoa {

enum class MailKind { AuthorNotification, Delivery, DeclineNotice };
std::string_view to_string(MailKind k);
std::optional<MailKind> parse_mail_kind(std::string_view s);

struct Attachment {
  std::string filename;
  std::string media_type;
  std::string bytes;
};

struct MailMessage {
  MailKind kind = MailKind::AuthorNotification;
  std::string message_id;
  std::string request_id;
  std::string from_address;
  std::string to_address;
  std::string subject;
  std::string body;
  std::vector<Attachment> attachments;
};

/// Notifications and declines carry no attachments; deliveries carry at least one.
void validate(const MailMessage& m);

/// Subject and body templates with {{name}} placeholders. A template file holds
/// "Subject: ..." on its first line, a blank line, then the body. A body line
/// consisting only of {{alert_lines}} expands to zero or more lines.
struct MailTemplate {
  std::string subject;
  std::string body;

  static MailTemplate parse(std::string_view text);
};

struct MailTemplates {
  MailTemplate author_notification;
  MailTemplate delivery;
  MailTemplate decline;

  static MailTemplates defaults();
  /// Reads author_notification.txt, delivery.txt and decline.txt from `dir`;
  /// files that are absent keep their default.
  static MailTemplates load(const std::filesystem::path& dir);
};

/// Replaces {{name}} with values[name]; unknown placeholders are left intact.
std::string fill(std::string_view tpl, const std::map<std::string, std::string>& values,
                 std::span<const std::string> alert_lines = {});

struct RenderContext {
  std::string repo_name;
  std::string base_url;
  std::string admin_address;
  MailTemplates templates = MailTemplates::defaults();

  std::string eprint_url(const EprintId& id) const;
  std::string respond_url(std::string_view token, std::string_view action) const;
};

std::string purpose_phrase(const Purpose& p);

MailMessage render_author_notification(const CopyRequest& request, const EprintRecord& eprint,
                                       std::span<const FairnessAlert> alerts, std::string_view token,
                                       std::string_view to_address, const RenderContext& ctx);
/// `documents` holds the bytes of eprint.parts, in order.
MailMessage render_delivery(const CopyRequest& request, const EprintRecord& eprint,
                            std::span<const std::string> documents, const RenderContext& ctx);
MailMessage render_decline(const CopyRequest& request, const EprintRecord& eprint, const RenderContext& ctx);

std::string notification_message_id(const std::string& request_id);
std::string delivery_message_id(const std::string& request_id);
std::string decline_message_id(const std::string& request_id);

struct DeliveryReceipt {
  std::string message_id;
  Timestamp accepted_at;
};

class MailTransport {
 public:
  virtual ~MailTransport() = default;
  /// Records or sends `message`. A message_id that was already accepted is not
  /// sent again; the original receipt is returned. Throws TransportError.
  virtual DeliveryReceipt send(const MailMessage& message, Timestamp at) = 0;
  virtual bool contains(const std::string& message_id) const = 0;
};

struct OutboxAttachment {
  std::string filename;
  std::string media_type;
  std::string digest;
  std::int64_t length = 0;
};

/// One line of the outbox file.
struct OutboxRecord {
  MailKind kind = MailKind::AuthorNotification;
  std::string from;
  std::string to;
  std::string subject;
  std::string body;
  std::vector<OutboxAttachment> attachments;
  Timestamp timestamp;
  std::string message_id;
  std::string request_id;
};

json to_json(const OutboxRecord& r);
OutboxRecord outbox_record_from_json(const json& j);
OutboxRecord to_outbox_record(const MailMessage& m, Timestamp at);

/// Default transport: appends each message to a newline-delimited JSON file
/// (or keeps it in memory) in send order.
class OutboxTransport final : public MailTransport {
 public:
  OutboxTransport();
  explicit OutboxTransport(std::filesystem::path file);

  DeliveryReceipt send(const MailMessage& message, Timestamp at) override;
  bool contains(const std::string& message_id) const override;

  std::vector<OutboxRecord> records() const;
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::optional<std::filesystem::path> file_;
  std::ofstream out_;
  std::vector<OutboxRecord> records_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

/// Parses an outbox file written by OutboxTransport.
std::vector<OutboxRecord> read_outbox(const std::filesystem::path& file);

}  // namespace almostoa
