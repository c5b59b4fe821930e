#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "almostoa/repository.hpp"

namespace almostoa {

/// One line of a scenario; expanded `count` times.
struct ScenarioRequest {
  std::string eprint = "*";     // "*" seeded choice, "#k" k-th closed eprint, else an id
  std::string requester = "*";  // "*" generates an address
  Purpose purpose;
  std::optional<DecisionAction> decision;  // none: the author never answers
  Duration decision_delay = days(1);
  std::size_t count = 1;
};

struct Scenario {
  std::uint64_t seed = 0;
  Timestamp start{};
  Duration spacing = std::chrono::hours{1};
  std::size_t synthetic_eprints = 0;  // closed eprints deposited at `start` before replay
  std::vector<ScenarioRequest> requests;

  static Scenario from_json(const json& j);
  static Scenario load(const std::filesystem::path& file);
};

struct SimulationSummary {
  std::size_t requests = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t undecided = 0;
  Timestamp first{};
  Timestamp last{};
  std::size_t events = 0;
};

json to_json(const SimulationSummary& s);

/// Replays the scenario on a virtual clock through the request workflow. For
/// reproducible logs the repository should draw tokens from a
/// SeededTokenSource with the scenario's seed.
SimulationSummary simulate(Repository& repo, const Scenario& scenario);

}  // namespace almostoa
