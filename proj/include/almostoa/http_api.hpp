#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>

#include "almostoa/repository.hpp"

namespace httplib {
class Server;
}

namespace almostoa {

struct HttpRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::map<std::string, std::string> headers;  // keys lower-cased
  std::string body;
};

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

inline constexpr std::string_view kAdminSecretHeader = "x-admin-secret";

/// The repository's HTTP surface. `handle` is transport-independent; `listen`
/// binds it to a socket.
///
///   GET  /eprints/{id}                       public view, request form for Closed items
///   GET  /eprints/{id}/documents/{n}         file download, Open items only
///   POST /eprints/{id}/request               {email, purpose, attested} -> 201 {request_id}
///   GET  /respond?token=..&action=accept|reject
///   GET  /ui-config                          repository name and attestation text
///   GET  /admin/stats/responses?from&to[&window]
///   GET  /admin/stats/access
///   GET  /admin/alerts
///   POST /admin/scheduler/tick
///   POST /admin/requests/{id}/resend-notification
///
/// Admin routes need the X-Admin-Secret header.
class HttpApi {
 public:
  explicit HttpApi(Repository& repo, std::function<Timestamp()> clock = system_now);
  ~HttpApi();

  HttpResponse handle(const HttpRequest& request);

  /// Blocks until stop(). Serves config.ui_dir under /ui when set.
  bool listen(const std::string& host, int port);
  /// Binds without serving; port 0 picks a free one. Returns the port, or -1.
  int bind(const std::string& host, int port);
  /// Serves on the bound socket until stop().
  bool serve();
  void stop();
  bool running() const;

 private:
  HttpResponse get_eprint(const std::string& id);
  HttpResponse get_document(const std::string& id, const std::string& index);
  HttpResponse post_request(const std::string& id, const std::string& body);
  HttpResponse respond(const HttpRequest& request);
  HttpResponse ui_config();
  HttpResponse admin(const HttpRequest& request, const std::vector<std::string>& segments);

  Repository& repo_;
  std::function<Timestamp()> clock_;
  void install_routes();

  std::unique_ptr<httplib::Server> server_;
  bool routes_installed_ = false;
};

/// Redacted, requester-facing view of an eprint.
json public_view(const EprintRecord& record, const RepositoryConfig& config);

}  // namespace almostoa
