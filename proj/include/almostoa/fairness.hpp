#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "almostoa/json_io.hpp"
#include "almostoa/request.hpp"

namespace almostoa {

/// Fair-dealing thresholds and wording for one legal system. AU ships with the
/// deemed-fair limit of one article per issue and one chapter per book.
struct JurisdictionProfile {
  std::string name = "custom";
  std::string attestation_text;
  std::optional<int> deemed_fair_same_issue_limit;
  std::optional<int> deemed_fair_same_book_limit;
  int high_volume_threshold = 10;
  Duration high_volume_window = days(30);
  Duration same_source_window = days(30);

  /// Limit applied by the monitor; profiles without a statutory number warn
  /// from the second distinct item onwards.
  int same_issue_limit() const { return deemed_fair_same_issue_limit.value_or(1); }
  int same_book_limit() const { return deemed_fair_same_book_limit.value_or(1); }
};

/// Throws ConfigError unless thresholds >= 1 and windows > 0.
void validate(const JurisdictionProfile& p);
JurisdictionProfile builtin_profile(std::string_view name);
std::vector<JurisdictionProfile> builtin_profiles();
JurisdictionProfile profile_from_json(const json& j);
json profile_to_json(const JurisdictionProfile& p);
/// {"profiles": [...]} or a bare array.
std::vector<JurisdictionProfile> load_profiles(const std::filesystem::path& path);

using VenueLookup = std::function<std::optional<VenueRef>(const EprintId&)>;

/// Same-issue / same-book pattern check for a request about to be stored.
/// `history` must not contain the candidate.
std::vector<FairnessAlert> evaluate_request(const CopyRequest& candidate, std::span<const CopyRequest> history,
                                            const VenueLookup& venue_of, const JurisdictionProfile& profile,
                                            Timestamp now);

/// One HighVolumeSameArticle alert per eprint whose approvals inside the
/// window reach the threshold, ordered by eprint id.
std::vector<FairnessAlert> scan_accepted_volume(std::span<const CopyRequest> history,
                                                const JurisdictionProfile& profile, Timestamp now);

}  // namespace almostoa
