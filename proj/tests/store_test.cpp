#include "doctest.h"

#include <thread>

#include "almostoa/errors.hpp"
#include "almostoa/store.hpp"
#include "support.hpp"

using namespace almostoa;
using namespace almostoa::testing;

namespace {

std::vector<DocumentPart> part(Store& s, const std::string& tag = "x") {
  return {s.store_document(tag + ".pdf", "application/pdf", "%PDF " + tag)};
}

/// Replays the audit trail from the deposit entry onwards.
AccessState replay(const std::vector<AccessAuditEntry>& audit) {
  REQUIRE_FALSE(audit.empty());
  REQUIRE_FALSE(audit.front().previous.has_value());
  AccessState s = audit.front().state;
  for (std::size_t i = 1; i < audit.size(); ++i) {
    REQUIRE(audit[i].previous.has_value());
    CHECK(*audit[i].previous == s);
    s = audit[i].state;
  }
  return s;
}

}  // namespace

TEST_CASE("deposit then get is identity apart from the generated id") {
  Store s;
  auto m = gomann_metadata();
  const auto parts = part(s);
  const auto now = at("2009-01-28T16:18:00Z");
  const auto id = s.deposit(m, gomann_depositor(), parts, ClosedAccess{}, now);
  const auto r = s.get(id);
  validate_and_complete(m);
  CHECK(r.id == id);
  CHECK(is_url_safe(id.str()));
  CHECK(r.metadata == m);
  CHECK(r.metadata.citation_line == kGomannCitation);
  CHECK(r.depositor == gomann_depositor());
  CHECK(r.parts == parts);
  CHECK(r.access == AccessState{ClosedAccess{}});
  CHECK(r.deposited_at == now);
}

TEST_CASE("deposit validation") {
  Store s;
  auto m = gomann_metadata();
  CHECK_THROWS_AS(s.deposit(m, gomann_depositor(), {}, ClosedAccess{}, at("2009-01-01")), ValidationError);
  m.title = "";
  CHECK_THROWS_AS(s.deposit(m, gomann_depositor(), part(s), ClosedAccess{}, at("2009-01-01")), ValidationError);
  auto bad = gomann_depositor();
  bad.contact_address = "nobody";
  CHECK_THROWS_AS(s.deposit(gomann_metadata(), bad, part(s), ClosedAccess{}, at("2009-01-01")), ValidationError);
  CHECK(s.eprint_count() == 0);
}

TEST_CASE("unknown ids are NotFound") {
  Store s;
  CHECK_THROWS_AS(s.get(EprintId{"404"}), NotFound);
  CHECK_THROWS_AS(s.set_access_state(EprintId{"404"}, OpenAccess{}, "admin", at("2009-01-01")), NotFound);
  CHECK_THROWS_AS(s.get_request("req-9"), NotFound);
}

TEST_CASE("ids are fresh for every deposit") {
  Store s;
  std::set<EprintId> ids;
  for (int i = 0; i < 50; ++i) {
    ids.insert(s.deposit(gomann_metadata(), gomann_depositor(), part(s), OpenAccess{}, at("2009-01-01")));
  }
  CHECK(ids.size() == 50);
}

TEST_CASE("access transitions are audited") {
  Store s;
  const auto id = s.deposit(gomann_metadata(), gomann_depositor(), part(s), ClosedAccess{on("2010-01-01")},
                            at("2009-01-01"));

  SUBCASE("Closed to Open by the scheduler") {
    const auto previous = s.set_access_state(id, OpenAccess{}, kSchedulerActor, at("2010-01-02"));
    CHECK(previous == AccessState{ClosedAccess{on("2010-01-01")}});
    const auto audit = s.audit_log(id);
    REQUIRE(audit.size() == 2);
    CHECK(audit[1].actor == "scheduler");
    CHECK(audit[1].at == at("2010-01-02"));
    CHECK(s.embargoes().empty());
  }
  SUBCASE("Open to Open is a no-op that is still audited") {
    s.set_access_state(id, OpenAccess{}, "admin", at("2009-02-01"));
    s.set_access_state(id, OpenAccess{}, "admin", at("2009-02-02"));
    const auto audit = s.audit_log(id);
    REQUIRE(audit.size() == 3);
    CHECK(*audit[2].previous == AccessState{OpenAccess{}});
    CHECK(audit[2].state == AccessState{OpenAccess{}});
  }
  SUBCASE("only the admin may close an open record") {
    s.set_access_state(id, OpenAccess{}, "depositor", at("2009-02-01"));
    CHECK_THROWS_AS(s.set_access_state(id, ClosedAccess{}, "depositor", at("2009-02-02")), ForbiddenTransition);
    CHECK_THROWS_AS(s.set_access_state(id, ClosedAccess{}, kSchedulerActor, at("2009-02-02")), ForbiddenTransition);
    CHECK(is_open(s.get(id).access));
    s.set_access_state(id, ClosedAccess{on("2011-01-01")}, "admin", at("2009-02-03"));
    CHECK(s.get(id).access == AccessState{ClosedAccess{on("2011-01-01")}});
    CHECK(s.embargoes() == std::vector<EmbargoEntry>{{id, on("2011-01-01")}});
  }
  SUBCASE("the scheduler never closes anything, even a closed record") {
    CHECK_THROWS_AS(s.set_access_state(id, ClosedAccess{}, kSchedulerActor, at("2009-02-02")), ForbiddenTransition);
  }
  CHECK(replay(s.audit_log(id)) == s.get(id).access);
}

TEST_CASE("compare and set only wins against the expected state") {
  Store s;
  const auto id = s.deposit(gomann_metadata(), gomann_depositor(), part(s), ClosedAccess{on("2010-01-01")},
                            at("2009-01-01"));
  CHECK_FALSE(s.compare_and_set_access(id, ClosedAccess{}, OpenAccess{}, kSchedulerActor, at("2010-01-02")));
  CHECK(s.compare_and_set_access(id, ClosedAccess{on("2010-01-01")}, OpenAccess{}, kSchedulerActor, at("2010-01-02")));
  CHECK_FALSE(s.compare_and_set_access(id, ClosedAccess{on("2010-01-01")}, OpenAccess{}, kSchedulerActor,
                                       at("2010-01-02")));
  CHECK(s.audit_log(id).size() == 2);
}

TEST_CASE("listing") {
  Store s;
  CHECK(s.list().empty());

  SUBCASE("filter by access kind over a store of 7 864 records") {
    const auto doc = part(s);
    for (int i = 0; i < 7864; ++i) {
      s.deposit(article("T" + std::to_string(i), "J", "1", "1"), gomann_depositor(), doc,
                i < 551 ? AccessState{ClosedAccess{}} : AccessState{OpenAccess{}}, at("2009-01-01"));
    }
    CHECK(s.list({AccessKind::Closed, std::nullopt}).size() == 551);
    CHECK(s.list({AccessKind::Open, std::nullopt}).size() == 7864 - 551);
    CHECK(s.closed_count() == 551);
  }

  SUBCASE("filter by issue identity matches a brute-force scan") {
    std::mt19937 rng{7};
    const char* journals[] = {"Tetrahedron", "tetrahedron ", "Nature"};
    const char* issues[] = {"7", "8"};
    for (int i = 0; i < 60; ++i) {
      auto m = article("A" + std::to_string(i), journals[rng() % 3], rng() % 4 == 0 ? "66" : "65", issues[rng() % 2]);
      s.deposit(m, gomann_depositor(), part(s), ClosedAccess{},
                at("2009-01-01") + std::chrono::hours{static_cast<int>(rng() % 100)});
    }
    const VenueRef wanted{VenueKind::JournalArticle, "Tetrahedron", "65", "7", std::nullopt, std::nullopt};
    std::vector<EprintId> expected;
    for (const auto& r : s.list()) {
      const auto& v = r.metadata.venue;
      std::string title = v.container_title;
      title.erase(title.find_last_not_of(' ') + 1);
      if ((title == "Tetrahedron" || title == "tetrahedron") && v.volume == "65" && v.issue == "7") {
        expected.push_back(r.id);
      }
    }
    std::vector<EprintId> got;
    for (const auto& r : s.list({std::nullopt, wanted})) {
      got.push_back(r.id);
    }
    CHECK_FALSE(expected.empty());
    CHECK(got == expected);
  }

  SUBCASE("order is deposited_at then id") {
    const auto late = s.deposit(gomann_metadata(), gomann_depositor(), part(s), OpenAccess{}, at("2009-05-01"));
    const auto early = s.deposit(gomann_metadata(), gomann_depositor(), part(s), OpenAccess{}, at("2009-01-01"));
    const auto early2 = s.deposit(gomann_metadata(), gomann_depositor(), part(s), OpenAccess{}, at("2009-01-01"));
    const auto all = s.list();
    REQUIRE(all.size() == 3);
    CHECK(all[0].id == early);
    CHECK(all[1].id == early2);
    CHECK(all[2].id == late);
  }
}

TEST_CASE("request decisions are write-once") {
  Store s;
  const auto id = s.deposit(gomann_metadata(), gomann_depositor(), part(s), ClosedAccess{}, at("2009-01-01"));
  CopyRequest r;
  r.id = s.next_request_id();
  r.eprint_id = id;
  r.requester_address = kRequester;
  r.created_at = at("2009-02-01");
  s.add_request(r, DecisionToken{"tok", r.id, r.created_at});
  CHECK(s.request_for_token("tok") == r.id);
  CHECK_FALSE(s.request_for_token("other"));

  CHECK(s.decide_request(r.id, Approved{at("2009-02-02")}).result == DecisionApply::Applied);
  CHECK(s.decide_request(r.id, Approved{at("2009-02-03")}).result == DecisionApply::AlreadyDecided);
  CHECK(s.decide_request(r.id, Rejected{at("2009-02-03")}).result == DecisionApply::Conflict);
  CHECK(s.get_request(r.id).decision == Decision{Approved{at("2009-02-02")}});
  CHECK_THROWS_AS(s.decide_request(r.id, Pending{}), ValidationError);
  CHECK_THROWS_AS(s.add_request(r, DecisionToken{"tok2", r.id, r.created_at}), StorageError);
}

TEST_CASE("a file-backed store replays to the same state") {
  const auto dir = scratch_dir("store");
  EprintId a;
  EprintId b;
  std::string request_id;
  {
    Store s{dir};
    a = s.deposit(gomann_metadata(), gomann_depositor(), part(s, "a"), ClosedAccess{on("2010-01-01")},
                  at("2009-01-01"));
    b = s.deposit(gomann_metadata(), gomann_depositor(), part(s, "b"), ClosedAccess{}, at("2009-01-02"));
    s.set_access_state(a, OpenAccess{}, kSchedulerActor, at("2010-01-02"));
    CopyRequest r;
    r.id = s.next_request_id();
    request_id = r.id;
    r.eprint_id = b;
    r.requester_address = kRequester;
    r.created_at = at("2009-02-01");
    s.add_request(r, DecisionToken{"tok", r.id, r.created_at});
    s.decide_request(r.id, Rejected{at("2009-02-05")});
  }
  auto check = [&](const Store& s) {
    CHECK(s.eprint_count() == 2);
    CHECK(is_open(s.get(a).access));
    CHECK(s.audit_log(a).size() == 2);
    CHECK(s.get(b).access == AccessState{ClosedAccess{}});
    CHECK(s.get_request(request_id).decision == Decision{Rejected{at("2009-02-05")}});
    CHECK(s.request_for_token("tok") == request_id);
    CHECK(s.embargoes().empty());
    CHECK(s.read_document(s.get(b).parts[0]) == "%PDF b");
  };
  {
    Store s{dir};
    check(s);
    s.write_snapshot();
    // ids keep advancing after a reopen
    CHECK(s.next_request_id() != request_id);
    const auto c = s.deposit(gomann_metadata(), gomann_depositor(), part(s, "c"), OpenAccess{}, at("2009-03-01"));
    CHECK(c != a);
    CHECK(c != b);
  }
  {
    Store s{dir};
    CHECK(s.eprint_count() == 3);
    CHECK(s.events().size() == 6);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("a torn final event line is ignored") {
  const auto dir = scratch_dir("torn");
  {
    Store s{dir};
    s.deposit(gomann_metadata(), gomann_depositor(), part(s), ClosedAccess{}, at("2009-01-01"));
  }
  {
    std::ofstream out{dir / "events.jsonl", std::ios::app};
    out << "{\"type\":\"eprint_dep";
  }
  Store s{dir};
  CHECK(s.eprint_count() == 1);
  std::filesystem::remove_all(dir);
}

TEST_CASE("concurrent writers on distinct records") {
  Store s;
  std::vector<EprintId> ids;
  for (int i = 0; i < 8; ++i) {
    ids.push_back(s.deposit(gomann_metadata(), gomann_depositor(), part(s), OpenAccess{}, at("2009-01-01")));
  }
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 200; ++i) {
        s.set_access_state(ids[t], i % 2 ? AccessState{OpenAccess{}} : AccessState{ClosedAccess{}}, "admin",
                           at("2009-01-02"));
        (void)s.list();
      }
    });
  }
  for (auto& t : threads) {
    t.join();
  }
  for (const auto& id : ids) {
    const auto audit = s.audit_log(id);
    CHECK(audit.size() == 201);
    CHECK(replay(audit) == s.get(id).access);
  }
  CHECK(s.events().size() == 8 + 8 * 200);
}
