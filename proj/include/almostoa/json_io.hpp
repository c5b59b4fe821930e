#pragma once

// JSON encodings shared by the event log, the outbox, the ingestion format and
// the HTTP layer.

#include "json.hpp"

#include "almostoa/model.hpp"
#include "almostoa/request.hpp"

namespace almostoa {

using json = nlohmann::json;

void to_json(json& j, const VenueRef& v);
void from_json(const json& j, VenueRef& v);
void to_json(json& j, const EprintMetadata& m);
void from_json(const json& j, EprintMetadata& m);
void to_json(json& j, const Depositor& d);
void from_json(const json& j, Depositor& d);
void to_json(json& j, const DocumentPart& p);
void from_json(const json& j, DocumentPart& p);
void to_json(json& j, const EprintRecord& r);
void from_json(const json& j, EprintRecord& r);
void to_json(json& j, const AccessAuditEntry& e);
void from_json(const json& j, AccessAuditEntry& e);
void to_json(json& j, const Purpose& p);
void from_json(const json& j, Purpose& p);
void to_json(json& j, const FairnessAlert& a);
void from_json(const json& j, FairnessAlert& a);
void to_json(json& j, const CopyRequest& r);
void from_json(const json& j, CopyRequest& r);
void to_json(json& j, const DecisionToken& t);
void from_json(const json& j, DecisionToken& t);

json access_to_json(const AccessState& s);
AccessState access_from_json(const json& j);
json decision_to_json(const Decision& d);
Decision decision_from_json(const json& j);

std::string_view to_string(VenueKind k);
std::optional<VenueKind> parse_venue_kind(std::string_view s);

}  // namespace almostoa
