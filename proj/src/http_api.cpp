#include "almostoa/http_api.hpp"

#include <algorithm>
#include <cctype>

#include "httplib.h"

#include "almostoa/errors.hpp"

namespace almostoa {
namespace {

HttpResponse json_response(int status, const json& body) { return {status, "application/json", body.dump()}; }

HttpResponse error_response(int status, std::string_view kind, std::string_view message) {
  return json_response(status, json{{"error", kind}, {"message", message}});
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= path.size()) {
    auto next = path.find('/', pos);
    if (next == std::string::npos) {
      next = path.size();
    }
    if (next > pos) {
      out.push_back(path.substr(pos, next - pos));
    }
    pos = next + 1;
  }
  return out;
}

std::optional<Timestamp> bound(const std::map<std::string, std::string>& q, const char* key, bool end_of_day) {
  auto it = q.find(key);
  if (it == q.end() || it->second.empty()) {
    return std::nullopt;
  }
  if (it->second.size() == 10) {
    auto d = parse_date(it->second);
    if (!d) {
      throw InvalidPeriod(std::string{"bad date for "} + key);
    }
    return end_of_day ? Timestamp{*d} + std::chrono::hours{24} - std::chrono::seconds{1} : Timestamp{*d};
  }
  auto t = parse_timestamp(it->second);
  if (!t) {
    throw InvalidPeriod(std::string{"bad timestamp for "} + key);
  }
  return t;
}

std::string_view access_kind_name(const AccessState& s) { return is_open(s) ? "Open" : "Closed"; }

json purposes_json() {
  json out = json::array();
  for (auto k : {PurposeKind::Research, PurposeKind::PrivateStudy, PurposeKind::Criticism,
                 PurposeKind::NewsReporting, PurposeKind::Other}) {
    out.push_back(to_string(k));
  }
  return out;
}

}  // namespace

json public_view(const EprintRecord& record, const RepositoryConfig& config) {
  json view{{"id", record.id.str()},
            {"metadata", record.metadata},
            {"access_kind", access_kind_name(record.access)},
            {"requestable", is_closed(record.access)}};
  if (is_open(record.access)) {
    json links = json::array();
    for (std::size_t i = 0; i < record.parts.size(); ++i) {
      const auto& p = record.parts[i];
      links.push_back(json{{"label", p.label},
                           {"media_type", p.media_type},
                           {"byte_length", p.byte_length},
                           {"url", config.base_url + "/eprints/" + record.id.str() + "/documents/" +
                                       std::to_string(i + 1)}});
    }
    view["document_links"] = links;
  } else {
    view["request_form"] = json{{"action", "/eprints/" + record.id.str() + "/request"},
                                {"attestation_text", config.profile().attestation_text},
                                {"purposes", purposes_json()}};
  }
  return view;
}

HttpApi::HttpApi(Repository& repo, std::function<Timestamp()> clock)
    : repo_(repo), clock_(std::move(clock)), server_(std::make_unique<httplib::Server>()) {}

HttpApi::~HttpApi() = default;

HttpResponse HttpApi::handle(const HttpRequest& request) {
  try {
    const auto segments = split_path(request.path);
    const bool get = request.method == "GET";
    const bool post = request.method == "POST";
    if (!segments.empty() && segments[0] == "eprints") {
      if (segments.size() == 2 && get) {
        return get_eprint(segments[1]);
      }
      if (segments.size() == 4 && segments[2] == "documents" && get) {
        return get_document(segments[1], segments[3]);
      }
      if (segments.size() == 3 && segments[2] == "request" && post) {
        return post_request(segments[1], request.body);
      }
    } else if (segments.size() == 1 && segments[0] == "respond" && get) {
      return respond(request);
    } else if (segments.size() == 1 && segments[0] == "ui-config" && get) {
      return ui_config();
    } else if (!segments.empty() && segments[0] == "admin") {
      return admin(request, segments);
    }
    return error_response(404, "NotFound", "no such endpoint");
  } catch (const NotFound& e) {
    return error_response(404, "NotFound", e.what());
  } catch (const UnknownToken& e) {
    return error_response(404, "UnknownToken", e.what());
  } catch (const NotRequestable& e) {
    return error_response(409, "NotRequestable", e.what());
  } catch (const DecisionConflict& e) {
    return error_response(409, "DecisionConflict", e.what());
  } catch (const AttestationRequired& e) {
    return error_response(422, "AttestationRequired", e.what());
  } catch (const InvalidAddress& e) {
    return error_response(422, "InvalidAddress", e.what());
  } catch (const ValidationError& e) {
    return error_response(422, "ValidationError", e.what());
  } catch (const InvalidPeriod& e) {
    return error_response(400, "InvalidPeriod", e.what());
  } catch (const TransportError& e) {
    return error_response(503, "TransportError", e.what());
  } catch (const std::exception& e) {
    return error_response(500, "InternalError", e.what());
  }
}

HttpResponse HttpApi::get_eprint(const std::string& id) {
  return json_response(200, public_view(repo_.store().get(EprintId{id}), repo_.config()));
}

HttpResponse HttpApi::get_document(const std::string& id, const std::string& index) {
  const auto record = repo_.store().get(EprintId{id});
  if (!is_open(record.access)) {
    return error_response(403, "ClosedAccess", "this document is closed access; request a copy instead");
  }
  std::size_t n = 0;
  try {
    n = std::stoul(index);
  } catch (const std::exception&) {
    return error_response(404, "NotFound", "no such document");
  }
  if (n < 1 || n > record.parts.size()) {
    return error_response(404, "NotFound", "no such document");
  }
  const auto& part = record.parts[n - 1];
  return {200, part.media_type, repo_.store().read_document(part)};
}

HttpResponse HttpApi::post_request(const std::string& id, const std::string& body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception&) {
    return error_response(400, "BadRequest", "request body must be JSON");
  }
  if (!j.is_object() || !j.contains("email") || !j["email"].is_string() || !j.contains("attested") ||
      !j["attested"].is_boolean() || !j.contains("purpose")) {
    return error_response(400, "BadRequest", "body needs email (string), purpose and attested (boolean)");
  }
  Purpose purpose;
  const auto& p = j["purpose"];
  if (p.is_string()) {
    auto kind = parse_purpose_kind(p.get<std::string>());
    if (!kind) {
      return error_response(422, "ValidationError", "unknown purpose");
    }
    purpose = make_purpose(*kind, j.value("purpose_text", std::string{}));
  } else if (p.is_object()) {
    try {
      purpose = p.get<Purpose>();
    } catch (const json::exception&) {
      return error_response(400, "BadRequest", "purpose must be a string or {kind, text}");
    }
  } else {
    return error_response(400, "BadRequest", "purpose must be a string or {kind, text}");
  }

  const auto created = repo_.workflow().create_request(EprintId{id}, j["email"].get<std::string>(), purpose,
                                                        j["attested"].get<bool>(), clock_());
  return json_response(201, json{{"request_id", created.request_id},
                                 {"message",
                                  "Your request has been sent to the author. If the author approves it, a copy "
                                  "will be emailed to you."}});
}

HttpResponse HttpApi::respond(const HttpRequest& request) {
  auto token = request.query.find("token");
  auto action_param = request.query.find("action");
  if (token == request.query.end() || action_param == request.query.end() || token->second.empty()) {
    return error_response(400, "BadRequest", "token and action are required");
  }
  const auto action = parse_action(action_param->second);
  if (!action) {
    return error_response(400, "BadRequest", "action must be accept or reject");
  }
  const auto outcome = repo_.workflow().decide(token->second, *action, clock_());
  const bool approved = std::holds_alternative<Approved>(outcome.state_after);
  return json_response(200, json{{"outcome", approved ? "document sent" : "request declined"},
                                 {"state", decision_name(outcome.state_after)},
                                 {"delivered", outcome.delivered}});
}

HttpResponse HttpApi::ui_config() {
  const auto& config = repo_.config();
  return json_response(200, json{{"repo_name", config.repo_name},
                                 {"base_url", config.base_url},
                                 {"jurisdiction", config.profile().name},
                                 {"attestation_text", config.profile().attestation_text},
                                 {"purposes", purposes_json()}});
}

HttpResponse HttpApi::admin(const HttpRequest& request, const std::vector<std::string>& segments) {
  const auto& secret = repo_.config().admin_secret;
  auto header = request.headers.find(std::string{kAdminSecretHeader});
  if (secret.empty() || header == request.headers.end() || header->second != secret) {
    return error_response(401, "Unauthorized", "admin secret missing or wrong");
  }
  const auto now = clock_();
  const bool get = request.method == "GET";
  const bool post = request.method == "POST";
  if (segments.size() == 3 && segments[1] == "stats" && segments[2] == "responses" && get) {
    const auto from = bound(request.query, "from", false).value_or(Timestamp{});
    const auto to = bound(request.query, "to", true).value_or(now);
    auto window = repo_.config().ignore_window;
    if (auto it = request.query.find("window"); it != request.query.end()) {
      auto d = parse_duration(it->second);
      if (!d || *d <= Duration{0}) {
        return error_response(400, "BadRequest", "window must be a positive duration");
      }
      window = *d;
    }
    return json_response(200, to_json(repo_.response_stats({from, to}, window, now)));
  }
  if (segments.size() == 3 && segments[1] == "stats" && segments[2] == "access" && get) {
    return json_response(200, to_json(repo_.access_stats()));
  }
  if (segments.size() == 2 && segments[1] == "alerts" && get) {
    return json_response(200, json{{"alerts", repo_.workflow().alerts(now)}});
  }
  if (segments.size() == 3 && segments[1] == "scheduler" && segments[2] == "tick" && post) {
    json flipped = json::array();
    for (const auto& id : repo_.scheduler().run_due_embargoes(now)) {
      flipped.push_back(id.str());
    }
    return json_response(200, json{{"flipped", flipped}});
  }
  if (segments.size() == 4 && segments[1] == "requests" && segments[3] == "resend-notification" && post) {
    const auto receipt = repo_.workflow().resend_notification(segments[2], now);
    return json_response(200, json{{"message_id", receipt.message_id},
                                   {"accepted_at", format_timestamp(receipt.accepted_at)}});
  }
  return error_response(404, "NotFound", "no such endpoint");
}

void HttpApi::install_routes() {
  if (routes_installed_) {
    return;
  }
  routes_installed_ = true;
  auto bridge = [this](const httplib::Request& req, httplib::Response& res) {
    HttpRequest r;
    r.method = req.method;
    r.path = req.path;
    for (const auto& [k, v] : req.params) {
      r.query.emplace(k, v);
    }
    for (const auto& [k, v] : req.headers) {
      std::string key = k;
      std::transform(key.begin(), key.end(), key.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      r.headers.emplace(std::move(key), v);
    }
    r.body = req.body;
    const auto out = handle(r);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  if (const auto& ui = repo_.config().ui_dir) {
    server_->set_mount_point("/ui", ui->string());
  }
  server_->Get(".*", bridge);
  server_->Post(".*", bridge);
}

int HttpApi::bind(const std::string& host, int port) {
  install_routes();
  if (port == 0) {
    return server_->bind_to_any_port(host);
  }
  return server_->bind_to_port(host, port) ? port : -1;
}

bool HttpApi::serve() { return server_->listen_after_bind(); }

bool HttpApi::listen(const std::string& host, int port) { return bind(host, port) >= 0 && serve(); }

void HttpApi::stop() { server_->stop(); }

bool HttpApi::running() const { return server_->is_running(); }

}  // namespace almostoa
