// One PASS/FAIL line per acceptance criterion; exit status 1 if any fail.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "almostoa/errors.hpp"
#include "almostoa/http_api.hpp"
#include "almostoa/ingest.hpp"
#include "almostoa/simulate.hpp"
#include "../support.hpp"

using namespace almostoa;
using namespace almostoa::testing;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

const Purpose kResearch = make_purpose(PurposeKind::Research);

Scenario response_scenario(std::uint64_t seed, std::size_t accept, std::size_t reject, std::size_t silent) {
  Scenario sc;
  sc.seed = seed;
  sc.start = at("2009-01-01T00:00:00Z");
  sc.synthetic_eprints = 10;
  ScenarioRequest a;
  a.count = accept;
  a.decision = DecisionAction::Accept;
  ScenarioRequest r;
  r.count = reject;
  r.decision = DecisionAction::Reject;
  ScenarioRequest s;
  s.count = silent;
  sc.requests = {a, r, s};
  return sc;
}

Outcome response_arithmetic() {
  Outcome o;
  const auto t0 = Clock::now();
  const Period year{at("2009-01-01T00:00:00Z"), at("2009-12-31T23:59:59Z")};
  {
    auto repo = memory_repo(archipel_config(), 4);
    simulate(*repo, response_scenario(4, 27, 1, 72));
    // well past the 30-day window for every request
    const auto s = repo->response_stats(year, at("2009-03-15"));
    o.expect(s.row("Approved") == "27 %", "approved row " + s.row("Approved"));
    o.expect(s.row("Ignored / unanswered") == "72 %", "unanswered row " + s.row("Ignored / unanswered"));
    o.expect(s.row("Rejected / denied") == "1 %", "rejected row " + s.row("Rejected / denied"));
  }
  {
    auto repo = memory_repo(archipel_config(), 5);
    simulate(*repo, response_scenario(5, 141, 2, 157));
    const auto s = repo->response_stats(year, at("2009-04-15"));
    o.expect(s.total == 300, "expected 300 requests");
    o.expect(s.row("Rejected / denied") == "< 1 %", "rejected row " + s.row("Rejected / denied"));
  }
  const auto elapsed = seconds_since(t0);
  o.expect(elapsed < 5.0, "took " + std::to_string(elapsed) + " s");
  if (o.ok) {
    o.detail = "rows 27 % / 72 % / 1 % and < 1 % in " + std::to_string(elapsed) + " s";
  }
  return o;
}

std::string access_share_after_ingest(std::size_t total, std::size_t closed) {
  const auto dir = scratch_dir("access-share");
  {
    std::ofstream(dir / "article.pdf") << "%PDF-1.4 synthetic";
    std::ofstream lines{dir / "records.jsonl"};
    for (std::size_t i = 0; i < total; ++i) {
      json j{{"title", "Synthetic article " + std::to_string(i)},
             {"creators", {"Author, Number " + std::to_string(i)}},
             {"year", 2000 + static_cast<int>(i % 10)},
             {"venue_kind", "journal_article"},
             {"container_title", "Journal " + std::to_string(i % 97)},
             {"volume", std::to_string(i % 40)},
             {"issue", std::to_string(i % 12)},
             {"access", i < closed ? "closed" : "open"},
             {"depositor", {{"name", "Depositor"}, {"email", "depositor" + std::to_string(i % 300) + "@uni.edu"}}},
             {"documents", {"article.pdf"}}};
      lines << j.dump() << '\n';
    }
  }
  Repository repo{archipel_config(), dir / "store"};
  const auto report = ingest_file(repo, dir / "records.jsonl", at("2010-01-01"));
  std::string display = report.errors.empty() ? repo.access_stats().closed_share_display
                                              : "ingest errors: " + report.errors.front().message;
  std::filesystem::remove_all(dir);
  return display;
}

Outcome access_arithmetic() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto larger = access_share_after_ingest(7864, 551);
  const auto smaller = access_share_after_ingest(7515, 353);
  const auto elapsed = seconds_since(t0);
  o.expect(larger == "551 (7 %)", "got " + larger);
  o.expect(smaller == "353 (5 %)", "got " + smaller);
  o.expect(elapsed < 30.0, "took " + std::to_string(elapsed) + " s");
  if (o.ok) {
    o.detail = larger + ", " + smaller + " in " + std::to_string(elapsed) + " s";
  }
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in{p, std::ios::binary};
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
  return s;
}

std::string printable(const OutboxRecord& m) {
  std::string out = "From: " + m.from + "\nTo: " + m.to + "\nSubject: " + m.subject + "\n\n" + m.body;
  for (const auto& a : m.attachments) {
    out += "Attachment: " + a.filename + " (" + a.media_type + ", " + std::to_string(a.length) + " bytes)\n";
  }
  return out;
}

Outcome workflow_end_to_end() {
  Outcome o;
  for (const auto action : {DecisionAction::Accept, DecisionAction::Reject}) {
    auto repo = memory_repo();
    const auto id = repo->deposit(gomann_metadata(), gomann_depositor(), two_parts(), ClosedAccess{},
                                  at("2009-01-20"));
    auto& wf = repo->workflow();
    const auto created = wf.create_request(id, kRequester, kResearch, true, at("2009-01-28T16:18:00Z"));
    wf.decide(created.token, action, at("2009-01-29"));
    const auto records = repo->outbox().records();
    const bool accept = action == DecisionAction::Accept;
    const auto second = accept ? MailKind::Delivery : MailKind::DeclineNotice;
    o.expect(records.size() == 2 && records[0].kind == MailKind::AuthorNotification && records[1].kind == second,
             "outbox kinds differ");
    if (records.size() != 2) {
      continue;
    }
    for (const auto& r : records) {
      o.expect(r.request_id == created.request_id, "message for another request");
    }
    if (accept) {
      o.expect(records[1].attachments.size() == 2, "delivery lacks document parts");
    }
    auto localize = [&](std::string golden) {
      golden = replace_all(std::move(golden), "/eprints/4311", "/eprints/" + id.str());
      return replace_all(std::move(golden), "token=TOKEN", "token=" + created.token);
    };
    const auto golden_dir = source_path("tests/golden/");
    o.expect(printable(records[0]) == localize(slurp(golden_dir + "author_notification.txt")),
             "notification differs from golden file");
    o.expect(printable(records[1]) == localize(slurp(golden_dir + (accept ? "delivery.txt" : "decline.txt"))),
             std::string{accept ? "delivery" : "decline"} + " differs from golden file");
  }
  if (o.ok) {
    o.detail = "[AuthorNotification, Delivery] and [AuthorNotification, DeclineNotice], golden bodies match";
  }
  return o;
}

Outcome exactly_once() {
  Outcome o;
  auto repo = memory_repo(archipel_config(), 77);
  const auto id = repo->deposit(gomann_metadata(), gomann_depositor(), two_parts(), ClosedAccess{}, at("2009-01-01"));
  auto& wf = repo->workflow();
  std::size_t violations = 0;
  constexpr int kTrials = 1000;
  for (int trial = 0; trial < kTrials; ++trial) {
    const auto created = wf.create_request(id, "r" + std::to_string(trial) + "@example.org", kResearch, true,
                                           at("2009-02-01") + std::chrono::minutes{trial});
    const bool mixed = trial % 2 == 1;
    std::atomic<int> errors{0};
    std::atomic<bool> go{false};
    auto click = [&](DecisionAction a) {
      while (!go) {
        std::this_thread::yield();
      }
      try {
        wf.decide(created.token, a, at("2009-03-01"));
      } catch (const DecisionConflict&) {
        // expected for the losing opposite action
      } catch (...) {
        ++errors;
      }
    };
    std::thread t1{click, DecisionAction::Accept};
    std::thread t2{click, mixed ? DecisionAction::Reject : DecisionAction::Accept};
    go = true;
    t1.join();
    t2.join();
    const auto decision = repo->store().get_request(created.request_id).decision;
    int deliveries = 0;
    int declines = 0;
    for (const auto& r : repo->outbox().records()) {
      if (r.request_id == created.request_id) {
        deliveries += r.kind == MailKind::Delivery;
        declines += r.kind == MailKind::DeclineNotice;
      }
    }
    const bool terminal = !std::holds_alternative<Pending>(decision);
    const bool approved = std::holds_alternative<Approved>(decision);
    if (errors || !terminal || deliveries > 1 || deliveries + declines != 1 || (approved != (deliveries == 1))) {
      ++violations;
    }
  }
  o.expect(violations == 0, std::to_string(violations) + " violations");
  if (o.ok) {
    o.detail = std::to_string(kTrials) + " racing trials, 0 violations";
  }
  return o;
}

Outcome embargo_suite() {
  Outcome o;
  std::mt19937_64 rng{20090128};
  constexpr int kCases = 10000;
  std::size_t violations = 0;
  const auto base = on("2010-01-01");
  for (int c = 0; c < kCases; ++c) {
    Store store;
    const auto offset = std::chrono::minutes{static_cast<int>(rng() % 1441) - 720};
    EmbargoScheduler sched{store, offset};
    const auto parts = std::vector{store.store_document("a.pdf", "application/pdf", "%PDF")};
    struct Item {
      EprintId id;
      bool open;
      std::optional<Date> expiry;
    };
    std::vector<Item> items;
    const std::size_t n = 1 + rng() % 20;
    for (std::size_t i = 0; i < n; ++i) {
      Item it;
      it.open = rng() % 6 == 0;
      if (!it.open && rng() % 4 != 0) {
        it.expiry = base + std::chrono::days{static_cast<int>(rng() % 60)};
      }
      const AccessState access = it.open ? AccessState{OpenAccess{}} : AccessState{ClosedAccess{it.expiry}};
      it.id = store.deposit(gomann_metadata(), gomann_depositor(), parts, access, at("2009-06-01"));
      items.push_back(it);
    }
    std::vector<Timestamp> ticks(1 + rng() % 4);
    for (auto& t : ticks) {
      t = Timestamp{base} + std::chrono::seconds{static_cast<long>(rng() % (70 * 86400))};
    }
    Timestamp latest = ticks.front();
    bool case_ok = true;
    for (const auto t : ticks) {
      sched.run_due_embargoes(t);
      case_ok &= sched.run_due_embargoes(t).empty();  // same instant again: no-op
      latest = std::max(latest, t);
    }
    // brute-force oracle: open iff initially open or expiry on or before the latest local tick date
    const auto last_day = std::chrono::floor<std::chrono::days>(latest + offset);
    for (const auto& it : items) {
      const bool expected = it.open || (it.expiry && *it.expiry <= last_day);
      case_ok &= is_open(store.get(it.id).access) == expected;
      for (const auto& entry : store.audit_log(it.id)) {
        case_ok &= !(entry.actor == "scheduler" && is_closed(entry.state));
      }
    }
    violations += !case_ok;
  }
  o.expect(violations == 0, std::to_string(violations) + " violations");
  if (o.ok) {
    o.detail = std::to_string(kCases) + " generated cases, 0 violations";
  }
  return o;
}

Outcome fairness_monitor() {
  Outcome o;
  const auto au = builtin_profile("AU");
  const auto now = at("2009-05-01");
  {
    // one request per issue never alerts; a second article from one issue always does
    auto repo = memory_repo(archipel_config("AU"), 3);
    std::vector<EprintId> first_of_issue;
    std::vector<EprintId> second_of_issue;
    for (int i = 0; i < 5; ++i) {
      const auto issue = std::to_string(i + 1);
      first_of_issue.push_back(repo->deposit(article("A" + issue, "Tetrahedron", "65", issue), gomann_depositor(),
                                             one_pdf(), ClosedAccess{}, at("2009-01-01")));
      second_of_issue.push_back(repo->deposit(article("B" + issue, " tetrahedron", "65", issue), gomann_depositor(),
                                              one_pdf(), ClosedAccess{}, at("2009-01-01")));
    }
    auto& wf = repo->workflow();
    for (int i = 0; i < 5; ++i) {
      const auto r = wf.create_request(first_of_issue[i], kRequester, kResearch, true, now + std::chrono::hours{i});
      o.expect(repo->store().get_request(r.request_id).alerts_at_creation.empty(), "single request alerted");
    }
    for (int i = 0; i < 5; ++i) {
      const auto r = wf.create_request(second_of_issue[i], "requester@SOMEPLACE.ca", kResearch, true,
                                       now + days(i + 1));
      const auto alerts = repo->store().get_request(r.request_id).alerts_at_creation;
      o.expect(alerts.size() == 1 && alerts[0].kind == AlertKind::SameIssueMultiRequest,
               "second article of an issue did not alert");
    }
  }
  {
    std::vector<CopyRequest> history;
    for (int i = 0; i < 10; ++i) {
      CopyRequest r;
      r.id = "req-" + std::to_string(i + 1);
      r.eprint_id = EprintId{"1"};
      r.requester_address = "p" + std::to_string(i) + "@example.org";
      r.created_at = now - days(29);
      r.decision = Approved{now - days(i * 3)};
      history.push_back(r);
    }
    const auto ten = scan_accepted_volume(history, au, now);
    o.expect(ten.size() == 1 && ten[0].kind == AlertKind::HighVolumeSameArticle, "10 approvals did not alert");
    history.pop_back();
    o.expect(scan_accepted_volume(history, au, now).empty(), "9 approvals alerted");
  }
  {
    // differential: identical random traffic with the monitor on and off
    auto run = [](bool monitor) {
      auto config = archipel_config("AU");
      config.fairness_enabled = monitor;
      config.profiles[0].high_volume_threshold = 3;
      auto repo = memory_repo(config, 99);
      std::vector<EprintId> ids;
      for (int i = 0; i < 8; ++i) {
        ids.push_back(repo->deposit(article("T" + std::to_string(i), "J", "1", std::to_string(i % 3)),
                                    gomann_depositor(), one_pdf(), ClosedAccess{}, at("2009-01-01")));
      }
      std::mt19937_64 rng{8};
      std::vector<std::string> outcomes;
      auto& wf = repo->workflow();
      for (int i = 0; i < 300; ++i) {
        const auto t = at("2009-02-01") + std::chrono::hours{i * 3};
        try {
          const auto created = wf.create_request(ids[rng() % ids.size()], "u" + std::to_string(rng() % 4) + "@x.org",
                                                 kResearch, true, t);
          outcomes.push_back(created.request_id);
          if (rng() % 3 != 0) {
            const auto action = rng() % 4 ? DecisionAction::Accept : DecisionAction::Reject;
            outcomes.push_back(std::string{decision_name(wf.decide(created.token, action, t).state_after)});
          }
        } catch (const Error& e) {
          outcomes.push_back(e.what());
        }
      }
      auto requests = repo->store().requests();
      std::size_t alerts = 0;
      for (auto& r : requests) {
        alerts += r.alerts_at_creation.size();
        r.alerts_at_creation.clear();
      }
      std::vector<std::string> mail;
      for (const auto& m : repo->outbox().records()) {
        mail.push_back(std::string{to_string(m.kind)} + m.to + m.message_id +
                       (m.kind == MailKind::AuthorNotification ? "" : m.body));
      }
      return std::tuple{outcomes, requests, mail, alerts};
    };
    const auto [on_outcomes, on_requests, on_mail, on_alerts] = run(true);
    const auto [off_outcomes, off_requests, off_mail, off_alerts] = run(false);
    o.expect(on_alerts > 0, "differential run raised no alerts");
    o.expect(off_alerts == 0, "disabled monitor stored alerts");
    o.expect(on_outcomes == off_outcomes, "request outcomes changed with the monitor");
    o.expect(on_requests == off_requests, "stored requests differ beyond alerts");
    o.expect(on_mail == off_mail, "mail differs beyond notification text");
  }
  if (o.ok) {
    o.detail = "AU issue rule, 10 vs 9 approvals, differential run identical";
  }
  return o;
}

Outcome privacy_suite() {
  Outcome o;
  std::mt19937_64 rng{31337};
  auto token = [&](std::size_t len) {
    static const char* alphabet = "abcdefghijklmnopqrstuvwxyz0123456789_-";
    std::string s;
    for (std::size_t i = 0; i < len; ++i) {
      s.push_back(alphabet[rng() % 38]);
    }
    s.front() = 'a';
    s.back() = 'z';
    return s;
  };
  constexpr int kWorkflows = 1200;
  std::size_t violations = 0;
  auto repo = memory_repo(archipel_config(), 12);
  Timestamp clock = at("2009-02-01");
  HttpApi api{*repo, [&] { return clock; }};
  for (int w = 0; w < kWorkflows; ++w) {
    Depositor d{"Author " + token(6), token(4 + rng() % 12) + "@" + token(3 + rng() % 8) + ".edu", rng() % 5 != 0,
                std::nullopt};
    if (!d.active && rng() % 2) {
      d.fallback_address = token(5) + "@" + token(5) + ".org";
    }
    const auto id = repo->deposit(article("Paper " + token(8), "Journal " + token(3), "1", "2"), d, one_pdf(),
                                  ClosedAccess{}, clock);
    const std::string requester = token(3 + rng() % 10) + "@" + token(4) + ".net";
    std::vector<std::string> requester_facing;
    requester_facing.push_back(api.handle({"GET", "/eprints/" + id.str(), {}, {}, ""}).body);
    const auto created = api.handle({"POST", "/eprints/" + id.str() + "/request", {}, {},
                                     json{{"email", requester}, {"purpose", "research"}, {"attested", true}}.dump()});
    requester_facing.push_back(created.body);
    if (created.status != 201) {
      ++violations;
      continue;
    }
    const auto request_id = json::parse(created.body)["request_id"].get<std::string>();
    const auto tok = repo->store().token_for_request(request_id).value;
    const char* action = rng() % 2 ? "accept" : "reject";
    clock += std::chrono::minutes{1 + rng() % 90};
    requester_facing.push_back(api.handle({"GET", "/respond", {{"token", tok}, {"action", action}}, {}, ""}).body);
    requester_facing.push_back(
        api.handle({"GET", "/respond", {{"token", tok}, {"action", rng() % 2 ? "accept" : "reject"}}, {}, ""}).body);
    requester_facing.push_back(api.handle({"GET", "/respond", {{"token", token(43)}, {"action", action}}, {}, ""}).body);
    requester_facing.push_back(api.handle({"GET", "/ui-config", {}, {}, ""}).body);
    for (const auto& m : repo->outbox().records()) {
      if (m.request_id == request_id && m.to == requester) {
        requester_facing.push_back(printable(m));
      }
    }
    bool ok = true;
    for (const auto& text : requester_facing) {
      ok &= text.find(d.contact_address) == std::string::npos;
      if (d.fallback_address) {
        ok &= text.find(*d.fallback_address) == std::string::npos;
      }
    }
    violations += !ok;
  }
  o.expect(violations == 0, std::to_string(violations) + " violations");
  if (o.ok) {
    o.detail = std::to_string(kWorkflows) + " fuzzed workflows, 0 violations";
  }
  return o;
}

Outcome token_security() {
  Outcome o;
  SecureTokenSource source;
  constexpr std::size_t kIssued = 1'000'000;
  std::unordered_set<std::string> seen;
  seen.reserve(kIssued);
  std::size_t shortest = std::string::npos;
  bool alphabet_ok = true;
  for (std::size_t i = 0; i < kIssued; ++i) {
    auto t = source.next();
    shortest = std::min(shortest, t.size());
    alphabet_ok &= is_url_safe(t);
    seen.insert(std::move(t));
  }
  o.expect(seen.size() == kIssued, std::to_string(kIssued - seen.size()) + " duplicate tokens");
  // each token encodes kTokenBytes fresh random bytes; base64url keeps 6 bits per character
  const auto bits = std::min(kTokenBytes * 8, shortest * 6);
  o.expect(bits >= 128, "tokens carry only " + std::to_string(bits) + " bits");
  o.expect(alphabet_ok, "token is not URL-safe");

  auto repo = memory_repo();
  const auto id = repo->deposit(gomann_metadata(), gomann_depositor(), one_pdf(), ClosedAccess{}, at("2009-01-01"));
  auto& wf = repo->workflow();
  std::vector<CreatedRequest> created;
  for (int i = 0; i < 1000; ++i) {
    created.push_back(wf.create_request(id, "t" + std::to_string(i) + "@example.org", kResearch, true,
                                        at("2009-02-01") + std::chrono::minutes{i}));
  }
  std::mt19937_64 rng{5};
  std::vector<std::size_t> order(created.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::size_t decided = 0;
  for (const auto k : order) {
    wf.decide(created[k].token, k % 2 ? DecisionAction::Accept : DecisionAction::Reject, at("2009-03-01"));
    ++decided;
    std::size_t terminal = 0;
    for (const auto& r : repo->store().requests()) {
      terminal += !std::holds_alternative<Pending>(r.decision);
    }
    o.expect(terminal == decided, "a token changed another request");
    o.expect(!std::holds_alternative<Pending>(repo->store().get_request(created[k].request_id).decision),
             "a token did not change its own request");
    if (!o.ok) {
      break;
    }
  }
  if (o.ok) {
    o.detail = std::to_string(seen.size()) + " unique tokens of " + std::to_string(bits) +
               " bits, 1000 requests isolated";
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"response table arithmetic", response_arithmetic},
      {"closed access share arithmetic", access_arithmetic},
      {"request workflow end to end", workflow_end_to_end},
      {"exactly-once decisions under concurrency", exactly_once},
      {"embargo property suite", embargo_suite},
      {"fairness monitor", fairness_monitor},
      {"requester privacy", privacy_suite},
      {"token security", token_security},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string{"exception: "} + e.what()};
    }
    std::cout << (o.ok ? "PASS" : "FAIL") << "  " << name << ": " << o.detail << std::endl;
    failed += !o.ok;
  }
  return failed == 0 ? 0 : 1;
}
