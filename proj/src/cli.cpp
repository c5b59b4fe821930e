#include "almostoa/cli.hpp"

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "almostoa/errors.hpp"
#include "almostoa/http_api.hpp"
#include "almostoa/ingest.hpp"
#include "almostoa/repository.hpp"
#include "almostoa/simulate.hpp"

namespace almostoa {
namespace {

HttpApi* g_server = nullptr;

void on_signal(int) {
  if (g_server != nullptr) {
    g_server->stop();
  }
}

Timestamp parse_bound(const std::string& text, bool end_of_day, const char* what) {
  if (text.size() == 10) {
    if (auto d = parse_date(text)) {
      return end_of_day ? Timestamp{*d} + std::chrono::hours{24} - std::chrono::seconds{1} : Timestamp{*d};
    }
  } else if (auto t = parse_timestamp(text)) {
    return *t;
  }
  throw ValidationError(std::string{"bad "} + what + ": " + text);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Repository operator tool: deposits, embargoes, copy requests and statistics", "almostoa"};
  app.require_subcommand(1);

  std::string store_path = "repository-store";
  std::string config_path;
  std::string now_text;
  app.add_option("--store-path", store_path, "Store directory")->capture_default_str();
  app.add_option("--config", config_path, "Repository configuration (JSON)");
  app.add_option("--now", now_text, "Virtual clock, ISO-8601 timestamp");

  auto* ingest_cmd = app.add_subcommand("ingest", "Deposit every record of a JSON-lines file");
  std::string ingest_path;
  ingest_cmd->add_option("file", ingest_path)->required();

  auto* simulate_cmd = app.add_subcommand("simulate", "Replay a request scenario on a virtual clock");
  std::string scenario_path;
  std::string log_path;
  simulate_cmd->add_option("scenario", scenario_path)->required();
  simulate_cmd->add_option("--log", log_path, "Write the resulting event log here");

  auto* stats_cmd = app.add_subcommand("stats", "Author response table");
  std::string from_text;
  std::string to_text;
  std::string window_text;
  bool stats_json = false;
  stats_cmd->add_option("--from", from_text, "Start date or timestamp (default: beginning)");
  stats_cmd->add_option("--to", to_text, "End date or timestamp (default: now)");
  stats_cmd->add_option("--window", window_text, "Unanswered after this long, e.g. 30d");
  stats_cmd->add_flag("--json", stats_json);

  auto* access_cmd = app.add_subcommand("access-stats", "Closed access share table");
  bool access_json = false;
  access_cmd->add_flag("--json", access_json);

  app.add_subcommand("tick", "Open every record whose embargo has expired");

  auto* resend_cmd = app.add_subcommand("resend", "Send an author notification again");
  std::string resend_id;
  resend_cmd->add_option("request_id", resend_id)->required();

  app.add_subcommand("alerts", "Fair dealing alerts");

  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service and the embargo scheduler");
  std::string host = "0.0.0.0";
  int port = 8080;
  if (const char* env = std::getenv("ALMOSTOA_PORT")) {
    port = std::atoi(env);
  }
  serve_cmd->add_option("--host", host)->capture_default_str();
  serve_cmd->add_option("--port", port, "Listen port (env ALMOSTOA_PORT)")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    const auto config = config_path.empty() ? RepositoryConfig{} : RepositoryConfig::load(config_path);
    std::optional<Timestamp> fixed_now;
    if (!now_text.empty()) {
      fixed_now = parse_bound(now_text, false, "--now");
    }
    auto now = [&] { return fixed_now.value_or(system_now()); };

    if (*simulate_cmd) {
      const auto scenario = Scenario::load(scenario_path);
      Repository repo{config, store_path, std::make_unique<SeededTokenSource>(scenario.seed)};
      const auto summary = simulate(repo, scenario);
      out << to_json(summary).dump(2) << '\n';
      if (!log_path.empty()) {
        std::ofstream log{log_path, std::ios::binary};
        for (const auto& e : repo.store().events()) {
          log << e.dump() << '\n';
        }
        if (!log) {
          throw StorageError("cannot write " + log_path);
        }
      }
      return 0;
    }

    Repository repo{config, store_path};
    if (*ingest_cmd) {
      const auto report = ingest_file(repo, ingest_path, now());
      for (const auto& e : report.errors) {
        err << ingest_path << ":" << e.line << ": " << e.message << '\n';
      }
      out << "deposited " << report.deposited.size() << ", failed " << report.errors.size() << '\n';
      return report.errors.empty() ? 0 : 2;
    }
    if (*stats_cmd) {
      Duration window = config.ignore_window;
      if (!window_text.empty()) {
        auto w = parse_duration(window_text);
        if (!w || *w <= Duration{0}) {
          throw ValidationError("--window must be a positive duration");
        }
        window = *w;
      }
      const Period period{from_text.empty() ? Timestamp{} : parse_bound(from_text, false, "--from"),
                          to_text.empty() ? now() : parse_bound(to_text, true, "--to")};
      const auto stats = repo.response_stats(period, window, now());
      out << (stats_json ? to_json(stats).dump(2) + "\n" : render_table(stats));
      return 0;
    }
    if (*access_cmd) {
      const auto stats = repo.access_stats();
      out << (access_json ? to_json(stats).dump(2) + "\n" : render_table(stats));
      return 0;
    }
    if (app.got_subcommand("tick")) {
      for (const auto& id : repo.scheduler().run_due_embargoes(now())) {
        out << id.str() << '\n';
      }
      return 0;
    }
    if (*resend_cmd) {
      const auto receipt = repo.workflow().resend_notification(resend_id, now());
      out << receipt.message_id << ' ' << format_timestamp(receipt.accepted_at) << '\n';
      return 0;
    }
    if (app.got_subcommand("alerts")) {
      for (const auto& a : repo.workflow().alerts(now())) {
        out << to_string(a.kind) << " eprint " << a.eprint_id.str() << " evidence";
        for (const auto& id : a.evidence) {
          out << ' ' << id;
        }
        out << '\n';
      }
      return 0;
    }
    if (*serve_cmd) {
      HttpApi api{repo, now};
      repo.scheduler().start(config.scheduler_interval, now);
      g_server = &api;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      err << "serving " << config.repo_name << " on " << host << ":" << port << '\n';
      const bool ok = api.listen(host, port);
      g_server = nullptr;
      repo.scheduler().stop();
      repo.store().write_snapshot();
      if (!ok) {
        err << "could not listen on " << host << ":" << port << '\n';
        return 1;
      }
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace almostoa
