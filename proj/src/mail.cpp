#include "almostoa/mail.hpp"

#include <cctype>
#include <sstream>

#include "almostoa/digest.hpp"
#include "almostoa/errors.hpp"

namespace almostoa {
namespace fs = std::filesystem;

namespace {

constexpr std::string_view kAlertLines = "{{alert_lines}}";

constexpr const char* kDefaultNotification =
    R"(Subject: {{repo_name}}: Request for "{{title}}"

This document has been requested by {{requester}} for the purpose of research, private study, criticism or news reporting, or for another use allowed by the Law. Please can you respond.
{{citation}}
<{{eprint_url}}>
Note. Accepting a large number of requests for the same document in a short period, or requests for more than one article in the same journal issue or more than one chapter in a book may result in copyright infringement.
{{alert_lines}}
Click here to send the requested document.
<{{accept_url}}>
Click here to reject the request.
<{{reject_url}}>
{{repo_name}}
{{base_url}}
{{admin_address}}
)";

constexpr const char* kDefaultDelivery =
    R"(Subject: {{repo_name}}: Requested document "{{title}}"

The author has approved your request for a copy of the following document, which is attached to this message.
{{citation}}
<{{eprint_url}}>
This copy is supplied for the purpose you stated when requesting it ({{purpose}}). Please do not redistribute it.
{{repo_name}}
{{base_url}}
{{admin_address}}
)";

constexpr const char* kDefaultDecline =
    R"(Subject: {{repo_name}}: Request for "{{title}}" declined

Your request for a copy of "{{title}}" has been declined by the author.
{{repo_name}}
{{base_url}}
{{admin_address}}
)";

std::string read_file(const fs::path& p) {
  std::ifstream in{p, std::ios::binary};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> common_values(const CopyRequest& request, const EprintRecord& eprint,
                                                 const RenderContext& ctx) {
  return {{"repo_name", ctx.repo_name},
          {"base_url", ctx.base_url},
          {"admin_address", ctx.admin_address},
          {"title", eprint.metadata.title},
          {"citation", eprint.metadata.citation_line},
          {"eprint_url", ctx.eprint_url(eprint.id)},
          {"eprint_id", eprint.id.str()},
          {"requester", request.requester_address},
          {"purpose", purpose_phrase(request.purpose)}};
}

std::string file_name_for(const DocumentPart& part, std::size_t index) {
  std::string name;
  for (char c : part.label) {
    name.push_back((std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_') ? c : '_');
  }
  if (name.empty()) {
    name = "part" + std::to_string(index + 1);
  }
  return name;
}

}  // namespace

std::string_view to_string(MailKind k) {
  switch (k) {
    case MailKind::AuthorNotification: return "AuthorNotification";
    case MailKind::Delivery: return "Delivery";
    case MailKind::DeclineNotice: return "DeclineNotice";
  }
  return "";
}

std::optional<MailKind> parse_mail_kind(std::string_view s) {
  for (auto k : {MailKind::AuthorNotification, MailKind::Delivery, MailKind::DeclineNotice}) {
    if (to_string(k) == s) {
      return k;
    }
  }
  return std::nullopt;
}

void validate(const MailMessage& m) {
  if (m.message_id.empty()) {
    throw ValidationError("message has no id");
  }
  if (!is_valid_email(m.from_address) || !is_valid_email(m.to_address)) {
    throw ValidationError("message " + m.message_id + " has an invalid address");
  }
  if (m.kind == MailKind::Delivery ? m.attachments.empty() : !m.attachments.empty()) {
    throw ValidationError(m.kind == MailKind::Delivery ? "a delivery needs at least one attachment"
                                                       : "only deliveries carry attachments");
  }
}

MailTemplate MailTemplate::parse(std::string_view text) {
  constexpr std::string_view kPrefix = "Subject:";
  const auto eol = text.find('\n');
  std::string_view first = text.substr(0, eol);
  if (first.substr(0, kPrefix.size()) != kPrefix) {
    throw ConfigError("mail template must start with a Subject: line");
  }
  MailTemplate t;
  std::string_view subject = first.substr(kPrefix.size());
  while (!subject.empty() && subject.front() == ' ') {
    subject.remove_prefix(1);
  }
  t.subject = std::string{subject};
  if (eol == std::string_view::npos) {
    return t;
  }
  std::string_view rest = text.substr(eol + 1);
  if (!rest.empty() && rest.front() == '\n') {
    rest.remove_prefix(1);
  }
  t.body = std::string{rest};
  return t;
}

MailTemplates MailTemplates::defaults() {
  return {MailTemplate::parse(kDefaultNotification), MailTemplate::parse(kDefaultDelivery),
          MailTemplate::parse(kDefaultDecline)};
}

MailTemplates MailTemplates::load(const fs::path& dir) {
  auto t = defaults();
  auto maybe = [&](const char* name, MailTemplate& slot) {
    const auto p = dir / name;
    if (fs::exists(p)) {
      slot = MailTemplate::parse(read_file(p));
    }
  };
  maybe("author_notification.txt", t.author_notification);
  maybe("delivery.txt", t.delivery);
  maybe("decline.txt", t.decline);
  return t;
}

std::string fill(std::string_view tpl, const std::map<std::string, std::string>& values,
                 std::span<const std::string> alert_lines) {
  std::string out;
  std::size_t line_start = 0;
  while (line_start < tpl.size()) {
    auto eol = tpl.find('\n', line_start);
    const bool has_newline = eol != std::string_view::npos;
    std::string_view line = tpl.substr(line_start, has_newline ? eol - line_start : std::string_view::npos);
    line_start = has_newline ? eol + 1 : tpl.size();

    if (line == kAlertLines) {
      for (const auto& a : alert_lines) {
        out += a;
        out += '\n';
      }
      continue;
    }
    std::size_t pos = 0;
    while (pos < line.size()) {
      const auto open = line.find("{{", pos);
      if (open == std::string_view::npos) {
        out += line.substr(pos);
        break;
      }
      const auto close = line.find("}}", open + 2);
      if (close == std::string_view::npos) {
        out += line.substr(pos);
        break;
      }
      out += line.substr(pos, open - pos);
      const std::string key{line.substr(open + 2, close - open - 2)};
      if (auto it = values.find(key); it != values.end()) {
        out += it->second;
      } else {
        out += line.substr(open, close + 2 - open);
      }
      pos = close + 2;
    }
    if (has_newline) {
      out += '\n';
    }
  }
  return out;
}

std::string RenderContext::eprint_url(const EprintId& id) const { return base_url + "/eprints/" + id.str(); }

std::string RenderContext::respond_url(std::string_view token, std::string_view action) const {
  return base_url + "/respond?token=" + std::string{token} + "&action=" + std::string{action};
}

std::string purpose_phrase(const Purpose& p) {
  switch (p.kind) {
    case PurposeKind::Research: return "research";
    case PurposeKind::PrivateStudy: return "private study";
    case PurposeKind::Criticism: return "criticism";
    case PurposeKind::NewsReporting: return "news reporting";
    case PurposeKind::Other: return "other: " + p.other_text;
  }
  return "";
}

std::string notification_message_id(const std::string& request_id) { return request_id + ".notification"; }
std::string delivery_message_id(const std::string& request_id) { return request_id + ".delivery"; }
std::string decline_message_id(const std::string& request_id) { return request_id + ".decline"; }

MailMessage render_author_notification(const CopyRequest& request, const EprintRecord& eprint,
                                       std::span<const FairnessAlert> alerts, std::string_view token,
                                       std::string_view to_address, const RenderContext& ctx) {
  auto values = common_values(request, eprint, ctx);
  values["accept_url"] = ctx.respond_url(token, "accept");
  values["reject_url"] = ctx.respond_url(token, "reject");
  std::vector<std::string> alert_lines;
  alert_lines.reserve(alerts.size());
  for (const auto& a : alerts) {
    alert_lines.push_back(a.message);
  }
  MailMessage m;
  m.kind = MailKind::AuthorNotification;
  m.message_id = notification_message_id(request.id);
  m.request_id = request.id;
  m.from_address = ctx.admin_address;
  m.to_address = std::string{to_address};
  m.subject = fill(ctx.templates.author_notification.subject, values);
  m.body = fill(ctx.templates.author_notification.body, values, alert_lines);
  return m;
}

MailMessage render_delivery(const CopyRequest& request, const EprintRecord& eprint,
                            std::span<const std::string> documents, const RenderContext& ctx) {
  const auto values = common_values(request, eprint, ctx);
  MailMessage m;
  m.kind = MailKind::Delivery;
  m.message_id = delivery_message_id(request.id);
  m.request_id = request.id;
  m.from_address = ctx.admin_address;
  m.to_address = request.requester_address;
  m.subject = fill(ctx.templates.delivery.subject, values);
  m.body = fill(ctx.templates.delivery.body, values);
  for (std::size_t i = 0; i < eprint.parts.size() && i < documents.size(); ++i) {
    m.attachments.push_back({file_name_for(eprint.parts[i], i), eprint.parts[i].media_type, documents[i]});
  }
  return m;
}

MailMessage render_decline(const CopyRequest& request, const EprintRecord& eprint, const RenderContext& ctx) {
  const auto values = common_values(request, eprint, ctx);
  MailMessage m;
  m.kind = MailKind::DeclineNotice;
  m.message_id = decline_message_id(request.id);
  m.request_id = request.id;
  m.from_address = ctx.admin_address;
  m.to_address = request.requester_address;
  m.subject = fill(ctx.templates.decline.subject, values);
  m.body = fill(ctx.templates.decline.body, values);
  return m;
}

json to_json(const OutboxRecord& r) {
  json attachments = json::array();
  for (const auto& a : r.attachments) {
    attachments.push_back(
        json{{"filename", a.filename}, {"media_type", a.media_type}, {"digest", a.digest}, {"length", a.length}});
  }
  return json{{"kind", to_string(r.kind)},
              {"from", r.from},
              {"to", r.to},
              {"subject", r.subject},
              {"body", r.body},
              {"attachments", attachments},
              {"timestamp", format_timestamp(r.timestamp)},
              {"message_id", r.message_id},
              {"request_id", r.request_id}};
}

OutboxRecord outbox_record_from_json(const json& j) {
  OutboxRecord r;
  auto kind = parse_mail_kind(j.at("kind").get<std::string>());
  if (!kind) {
    throw ValidationError("unknown message kind in outbox");
  }
  r.kind = *kind;
  r.from = j.at("from").get<std::string>();
  r.to = j.at("to").get<std::string>();
  r.subject = j.at("subject").get<std::string>();
  r.body = j.at("body").get<std::string>();
  for (const auto& a : j.at("attachments")) {
    r.attachments.push_back({a.at("filename").get<std::string>(), a.at("media_type").get<std::string>(),
                             a.at("digest").get<std::string>(), a.at("length").get<std::int64_t>()});
  }
  r.timestamp = parse_timestamp(j.at("timestamp").get<std::string>()).value_or(Timestamp{});
  r.message_id = j.at("message_id").get<std::string>();
  r.request_id = j.value("request_id", std::string{});
  return r;
}

OutboxRecord to_outbox_record(const MailMessage& m, Timestamp at) {
  OutboxRecord r;
  r.kind = m.kind;
  r.from = m.from_address;
  r.to = m.to_address;
  r.subject = m.subject;
  r.body = m.body;
  for (const auto& a : m.attachments) {
    r.attachments.push_back(
        {a.filename, a.media_type, content_digest(a.bytes), static_cast<std::int64_t>(a.bytes.size())});
  }
  r.timestamp = at;
  r.message_id = m.message_id;
  r.request_id = m.request_id;
  return r;
}

std::vector<OutboxRecord> read_outbox(const fs::path& file) {
  std::vector<OutboxRecord> out;
  std::ifstream in{file, std::ios::binary};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    try {
      out.push_back(outbox_record_from_json(json::parse(line)));
    } catch (const json::exception&) {
      break;  // torn final append
    }
  }
  return out;
}

OutboxTransport::OutboxTransport() = default;

OutboxTransport::OutboxTransport(fs::path file) : file_(std::move(file)) {
  if (fs::exists(*file_)) {
    records_ = read_outbox(*file_);
    for (std::size_t i = 0; i < records_.size(); ++i) {
      by_id_.emplace(records_[i].message_id, i);
    }
  }
  out_.open(*file_, std::ios::app | std::ios::binary);
  if (!out_) {
    throw TransportError("cannot open outbox " + file_->string());
  }
}

DeliveryReceipt OutboxTransport::send(const MailMessage& message, Timestamp at) {
  validate(message);
  std::lock_guard lock{mutex_};
  if (auto it = by_id_.find(message.message_id); it != by_id_.end()) {
    return {message.message_id, records_[it->second].timestamp};
  }
  auto record = to_outbox_record(message, at);
  if (file_) {
    out_ << to_json(record).dump() << '\n';
    out_.flush();
    if (!out_) {
      out_.clear();
      throw TransportError("outbox write failed for " + message.message_id);
    }
  }
  by_id_.emplace(record.message_id, records_.size());
  records_.push_back(std::move(record));
  return {message.message_id, at};
}

bool OutboxTransport::contains(const std::string& message_id) const {
  std::lock_guard lock{mutex_};
  return by_id_.contains(message_id);
}

std::vector<OutboxRecord> OutboxTransport::records() const {
  std::lock_guard lock{mutex_};
  return records_;
}

std::size_t OutboxTransport::size() const {
  std::lock_guard lock{mutex_};
  return records_.size();
}

}  // namespace almostoa
