#pragma once

#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "almostoa/fairness.hpp"
#include "almostoa/mail.hpp"
#include "almostoa/store.hpp"
#include "almostoa/tokens.hpp"

namespace almostoa {

enum class DecisionAction { Accept, Reject };
std::optional<DecisionAction> parse_action(std::string_view s);

struct CreatedRequest {
  std::string request_id;
  std::string token;
};

struct DecisionOutcome {
  Decision state_after;
  bool delivered = false;  // this call put a delivery message in the outbox
};

enum class ResponseClass { Approved, Rejected, Unanswered, FreshPending };
std::string_view to_string(ResponseClass c);

/// Statistical view of a request at `now`. A pending request older than the
/// window counts as unanswered, but stays decidable. Decisions stamped after
/// `now` are not yet visible.
ResponseClass classify_response(const CopyRequest& request, Timestamp now, Duration ignore_window);

struct WorkflowSettings {
  RenderContext render;
  std::string manager_address;
  JurisdictionProfile profile;
  bool fairness_enabled = true;
};

/// The request-a-copy state machine: attested request, tokenized author
/// decision applied exactly once, then delivery or decline.
class RequestWorkflow {
 public:
  RequestWorkflow(Store& store, MailTransport& transport, TokenSource& tokens, WorkflowSettings settings);

  CreatedRequest create_request(const EprintId& eprint_id, const std::string& requester_address,
                                const Purpose& purpose, bool attested, Timestamp now);

  /// Idempotent for a repeated action; DecisionConflict for the opposite one.
  DecisionOutcome decide(const std::string& token, DecisionAction action, Timestamp now);

  /// Sends the author notification again, with the original token.
  DeliveryReceipt resend_notification(const std::string& request_id, Timestamp now);

  /// Alerts stored at creation time followed by a fresh high-volume scan.
  std::vector<FairnessAlert> alerts(Timestamp now) const;

  const WorkflowSettings& settings() const { return settings_; }

 private:
  std::vector<FairnessAlert> evaluate(const CopyRequest& candidate, Timestamp now) const;
  MailMessage notification_for(const CopyRequest& request, const EprintRecord& eprint,
                               const std::string& token) const;
  bool send_outcome(const CopyRequest& request, Timestamp now);

  Store& store_;
  MailTransport& transport_;
  TokenSource& tokens_;
  WorkflowSettings settings_;
  std::mutex outcome_mutex_;  // makes the outbox check and send one step
};

}  // namespace almostoa
