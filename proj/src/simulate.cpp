#include "almostoa/simulate.hpp"

#include <algorithm>
#include <fstream>
#include <random>

#include "almostoa/errors.hpp"

namespace almostoa {
namespace {

Duration duration_of(const json& j, const char* key, Duration fallback) {
  auto it = j.find(key);
  if (it == j.end()) {
    return fallback;
  }
  if (it->is_number_integer()) {
    return Duration{it->get<long>()};
  }
  auto d = parse_duration(it->get<std::string>());
  if (!d) {
    throw ValidationError(std::string{"scenario: bad duration for "} + key);
  }
  return *d;
}

Purpose purpose_of(const json& j) {
  if (!j.contains("purpose")) {
    return Purpose{};
  }
  const auto& p = j.at("purpose");
  if (p.is_object()) {
    return p.get<Purpose>();
  }
  auto kind = parse_purpose_kind(p.get<std::string>());
  if (!kind) {
    throw ValidationError("scenario: unknown purpose " + p.get<std::string>());
  }
  return make_purpose(*kind, j.value("purpose_text", std::string{}));
}

struct PlannedEvent {
  Timestamp at;
  std::size_t order;
  std::size_t request;  // index into the expanded request list
  bool create;
};

}  // namespace

Scenario Scenario::from_json(const json& j) {
  Scenario s;
  try {
    s.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("start")) {
      auto t = parse_timestamp(j.at("start").get<std::string>());
      if (!t) {
        throw ValidationError("scenario: bad start timestamp");
      }
      s.start = *t;
    }
    s.spacing = duration_of(j, "spacing", s.spacing);
    if (s.spacing <= Duration{0}) {
      throw ValidationError("scenario: spacing must be positive");
    }
    s.synthetic_eprints = j.value("eprints", std::size_t{0});
    for (const auto& r : j.value("requests", json::array())) {
      ScenarioRequest req;
      req.eprint = r.value("eprint", req.eprint);
      req.requester = r.value("requester", req.requester);
      req.purpose = purpose_of(r);
      const auto decision = r.value("decision", std::string{"none"});
      if (decision != "none") {
        req.decision = parse_action(decision);
        if (!req.decision) {
          throw ValidationError("scenario: decision must be accept, reject or none");
        }
      }
      req.decision_delay = duration_of(r, "decision_delay", req.decision_delay);
      req.count = r.value("count", std::size_t{1});
      s.requests.push_back(std::move(req));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string{"scenario: "} + e.what());
  }
  return s;
}

Scenario Scenario::load(const std::filesystem::path& file) {
  std::ifstream in{file};
  if (!in) {
    throw ValidationError("cannot read scenario " + file.string());
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError(std::string{"scenario: "} + e.what());
  }
  return from_json(j);
}

json to_json(const SimulationSummary& s) {
  return json{{"requests", s.requests},   {"accepted", s.accepted},
              {"rejected", s.rejected},   {"undecided", s.undecided},
              {"first", format_timestamp(s.first)}, {"last", format_timestamp(s.last)},
              {"events", s.events}};
}

SimulationSummary simulate(Repository& repo, const Scenario& scenario) {
  std::mt19937_64 rng{scenario.seed};
  auto pick = [&rng](std::size_t n) { return static_cast<std::size_t>(rng() % n); };

  for (std::size_t k = 0; k < scenario.synthetic_eprints; ++k) {
    const auto n = std::to_string(k + 1);
    EprintMetadata m;
    m.title = "Simulated article " + n;
    m.creators = {"Author, Number " + n};
    m.year = 2009;
    m.venue.container_title = "Journal of Simulated Results";
    m.venue.volume = "1";
    m.venue.issue = n;
    m.venue.pages = "1-10";
    Depositor d{"Author " + n, "author" + n + "@repository.example", true, std::nullopt};
    repo.deposit(std::move(m), std::move(d), {{"Article " + n + ".pdf", "application/pdf", "%PDF simulated " + n}},
                 ClosedAccess{}, scenario.start);
  }

  std::vector<EprintId> closed;
  for (const auto& r : repo.store().list({AccessKind::Closed, std::nullopt})) {
    closed.push_back(r.id);
  }

  std::vector<const ScenarioRequest*> expanded;
  for (const auto& r : scenario.requests) {
    for (std::size_t i = 0; i < r.count; ++i) {
      expanded.push_back(&r);
    }
  }
  for (std::size_t i = expanded.size(); i > 1; --i) {
    std::swap(expanded[i - 1], expanded[pick(i)]);
  }

  std::vector<EprintId> targets;
  std::vector<std::string> requesters;
  std::vector<PlannedEvent> plan;
  for (std::size_t i = 0; i < expanded.size(); ++i) {
    const auto& r = *expanded[i];
    if (r.eprint == "*") {
      if (closed.empty()) {
        throw ValidationError("scenario: no closed eprints to request");
      }
      targets.push_back(closed[pick(closed.size())]);
    } else if (!r.eprint.empty() && r.eprint.front() == '#') {
      const auto k = std::stoul(r.eprint.substr(1));
      if (k >= closed.size()) {
        throw ValidationError("scenario: selector " + r.eprint + " is out of range");
      }
      targets.push_back(closed[k]);
    } else {
      targets.push_back(EprintId{r.eprint});
    }
    requesters.push_back(r.requester == "*" ? "reader" + std::to_string(rng() % 1000000) + "@example.net"
                                            : r.requester);
    const auto jitter = Duration{static_cast<long>(rng() % static_cast<std::uint64_t>(scenario.spacing.count()))};
    const auto created = scenario.start + scenario.spacing * static_cast<long>(i) + jitter;
    plan.push_back({created, plan.size(), i, true});
    if (r.decision) {
      plan.push_back({created + r.decision_delay, plan.size(), i, false});
    }
  }
  std::sort(plan.begin(), plan.end(), [](const PlannedEvent& a, const PlannedEvent& b) {
    return a.at != b.at ? a.at < b.at : a.order < b.order;
  });

  SimulationSummary summary;
  std::vector<std::string> tokens(expanded.size());
  for (const auto& e : plan) {
    const auto& r = *expanded[e.request];
    if (e.create) {
      tokens[e.request] =
          repo.workflow().create_request(targets[e.request], requesters[e.request], r.purpose, true, e.at).token;
      summary.first = summary.requests == 0 ? e.at : std::min(summary.first, e.at);
      ++summary.requests;
    } else {
      repo.workflow().decide(tokens[e.request], *r.decision, e.at);
      ++(*r.decision == DecisionAction::Accept ? summary.accepted : summary.rejected);
    }
    summary.last = std::max(summary.last, e.at);
  }
  summary.undecided = summary.requests - summary.accepted - summary.rejected;
  summary.events = repo.store().events().size();
  return summary;
}

}  // namespace almostoa
