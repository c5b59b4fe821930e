#include "almostoa/workflow.hpp"

#include <algorithm>
#include <iostream>

#include "almostoa/errors.hpp"

namespace almostoa {

std::optional<DecisionAction> parse_action(std::string_view s) {
  if (s == "accept") {
    return DecisionAction::Accept;
  }
  if (s == "reject") {
    return DecisionAction::Reject;
  }
  return std::nullopt;
}

std::string_view to_string(ResponseClass c) {
  switch (c) {
    case ResponseClass::Approved: return "approved";
    case ResponseClass::Rejected: return "rejected";
    case ResponseClass::Unanswered: return "unanswered";
    case ResponseClass::FreshPending: return "fresh_pending";
  }
  return "";
}

ResponseClass classify_response(const CopyRequest& request, Timestamp now, Duration ignore_window) {
  const auto at = decided_at(request.decision);
  if (at && *at <= now) {
    return std::holds_alternative<Approved>(request.decision) ? ResponseClass::Approved
                                                               : ResponseClass::Rejected;
  }
  return now - request.created_at > ignore_window ? ResponseClass::Unanswered : ResponseClass::FreshPending;
}

RequestWorkflow::RequestWorkflow(Store& store, MailTransport& transport, TokenSource& tokens,
                                 WorkflowSettings settings)
    : store_(store), transport_(transport), tokens_(tokens), settings_(std::move(settings)) {
  validate(settings_.profile);
  if (!is_valid_email(settings_.manager_address)) {
    throw ConfigError("a valid repository manager address is required");
  }
  if (!is_valid_email(settings_.render.admin_address)) {
    throw ConfigError("a valid repository admin address is required");
  }
}

std::vector<FairnessAlert> RequestWorkflow::evaluate(const CopyRequest& candidate, Timestamp now) const {
  if (!settings_.fairness_enabled) {
    return {};
  }
  const auto history = store_.requests();
  const VenueLookup venue_of = [this](const EprintId& id) -> std::optional<VenueRef> {
    try {
      return store_.get(id).metadata.venue;
    } catch (const NotFound&) {
      return std::nullopt;
    }
  };
  auto alerts = evaluate_request(candidate, history, venue_of, settings_.profile, now);
  for (auto& a : scan_accepted_volume(history, settings_.profile, now)) {
    if (a.eprint_id == candidate.eprint_id) {
      alerts.push_back(std::move(a));
    }
  }
  return alerts;
}

MailMessage RequestWorkflow::notification_for(const CopyRequest& request, const EprintRecord& eprint,
                                              const std::string& token) const {
  const auto to = effective_notification_address(eprint.depositor, settings_.manager_address);
  return render_author_notification(request, eprint, request.alerts_at_creation, token, to, settings_.render);
}

CreatedRequest RequestWorkflow::create_request(const EprintId& eprint_id, const std::string& requester_address,
                                               const Purpose& purpose, bool attested, Timestamp now) {
  const auto eprint = store_.get(eprint_id);
  if (!is_closed(eprint.access)) {
    throw NotRequestable("eprint " + eprint_id.str() + " is open access; download it directly");
  }
  if (!attested) {
    throw AttestationRequired("the requester must accept the fair dealing conditions");
  }
  if (!is_valid_email(requester_address)) {
    throw InvalidAddress("not a valid email address: " + requester_address);
  }
  if (purpose.kind == PurposeKind::Other && purpose.other_text.empty()) {
    throw ValidationError("purpose 'other' requires a description");
  }

  CopyRequest request;
  request.id = store_.next_request_id();
  request.eprint_id = eprint_id;
  request.requester_address = requester_address;
  request.purpose = purpose;
  request.attested = true;
  request.created_at = now;
  request.alerts_at_creation = evaluate(request, now);

  DecisionToken token{tokens_.next(), request.id, now};
  store_.add_request(request, token);

  try {
    transport_.send(notification_for(request, eprint, token.value), now);
  } catch (const TransportError& e) {
    // The request stands; an operator can resend the notification.
    std::clog << "author notification for " << request.id << " not sent: " << e.what() << '\n';
  }
  return {request.id, token.value};
}

bool RequestWorkflow::send_outcome(const CopyRequest& request, Timestamp now) {
  const bool approved = std::holds_alternative<Approved>(request.decision);
  const auto message_id = approved ? delivery_message_id(request.id) : decline_message_id(request.id);
  std::lock_guard lock{outcome_mutex_};
  if (transport_.contains(message_id)) {
    return false;
  }
  const auto eprint = store_.get(request.eprint_id);
  if (approved) {
    std::vector<std::string> documents;
    documents.reserve(eprint.parts.size());
    for (const auto& part : eprint.parts) {
      documents.push_back(store_.read_document(part));
    }
    transport_.send(render_delivery(request, eprint, documents, settings_.render), now);
  } else {
    transport_.send(render_decline(request, eprint, settings_.render), now);
  }
  return true;
}

DecisionOutcome RequestWorkflow::decide(const std::string& token, DecisionAction action, Timestamp now) {
  const auto request_id = store_.request_for_token(token);
  if (!request_id) {
    throw UnknownToken("unknown or invalid decision link");
  }
  const Decision wanted = action == DecisionAction::Accept ? Decision{Approved{now}} : Decision{Rejected{now}};
  const auto update = store_.decide_request(*request_id, wanted);
  if (update.result == DecisionApply::Conflict) {
    throw DecisionConflict(std::string{"this request was already "} +
                           std::string{decision_name(update.request.decision)});
  }
  // A repeat only sends when an earlier attempt failed before reaching the outbox.
  const bool sent = send_outcome(update.request, now);
  return {update.request.decision, sent && action == DecisionAction::Accept};
}

DeliveryReceipt RequestWorkflow::resend_notification(const std::string& request_id, Timestamp now) {
  const auto request = store_.get_request(request_id);
  const auto token = store_.token_for_request(request_id);
  const auto eprint = store_.get(request.eprint_id);
  auto message = notification_for(request, eprint, token.value);
  for (int n = 2;; ++n) {
    const auto id = notification_message_id(request_id) + "." + std::to_string(n);
    if (!transport_.contains(id)) {
      message.message_id = id;
      break;
    }
  }
  return transport_.send(message, now);
}

std::vector<FairnessAlert> RequestWorkflow::alerts(Timestamp now) const {
  const auto history = store_.requests();
  std::vector<FairnessAlert> out;
  for (const auto& r : history) {
    out.insert(out.end(), r.alerts_at_creation.begin(), r.alerts_at_creation.end());
  }
  auto scanned = scan_accepted_volume(history, settings_.profile, now);
  out.insert(out.end(), std::make_move_iterator(scanned.begin()), std::make_move_iterator(scanned.end()));
  return out;
}

}  // namespace almostoa
