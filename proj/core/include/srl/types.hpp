#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace srl {

using Token = std::uint16_t;

// Token sequence. Empty encodes "no message" (a silent party).
using Message = std::vector<Token>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Appending past the absorbing end of a conversation.
struct AbsorbingStateError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct DataError : Error {
  using Error::Error;
};
struct NumericalError : Error {
  using Error::Error;
};

enum class TerminalReason : std::uint8_t {
  kOutcomeAchieved,
  kBusinessStopped,
  kCustomerStopped,
  kHorizonReached,
};

const char* to_string(TerminalReason r);
std::optional<TerminalReason> terminal_reason_from_string(const std::string& s);

// A suggestion put in front of the business: either a concrete non-empty
// message, or an explicit abstention.
struct SuggestedAction {
  std::optional<Message> message;  // nullopt = abstain

  static SuggestedAction respond(Message m) {
    if (m.empty()) throw std::invalid_argument("respond: suggestion must be non-empty");
    return SuggestedAction{std::move(m)};
  }
  static SuggestedAction abstain() { return SuggestedAction{std::nullopt}; }

  bool is_abstain() const { return !message.has_value(); }
  bool operator==(const SuggestedAction&) const = default;
};

// One conversation round. The open (latest) turn has only the customer side;
// a completed turn also records the suggestion shown to the business and the
// message the business actually sent (empty business message = it went
// silent, which ends the conversation).
struct Turn {
  Message customer;
  bool outcome = false;
  std::optional<Message> suggestion;  // nullopt on the open turn OR abstain once completed
  std::optional<Message> business;    // nullopt on the open turn
  bool completed = false;             // distinguishes open turn from completed abstain turn

  bool operator==(const Turn&) const = default;
};

// Full observable history: customer messages, outcome flags, suggestions and
// realized business messages, in order, with at most the final turn open.
struct ConversationState {
  std::vector<Turn> turns;
  std::optional<TerminalReason> terminal;

  bool is_terminal() const { return terminal.has_value(); }
  // Number of completed business rounds.
  int completed_turns() const;
  const Turn& latest() const;
  bool latest_outcome() const { return !turns.empty() && turns.back().outcome; }

  bool operator==(const ConversationState&) const = default;
};

struct MdpConfig {
  double discount = 0.9;
  int horizon_cap = 8;  // max business turns per episode
  int vocab_size = 12;
  int max_msg_len = 2;

  void validate() const;
};

// Reward revealed on entering `state`: 1 exactly when the latest outcome flag
// just flipped the conversation into its OutcomeAchieved end; everything
// after the absorbing end pays 0.
double reward(const ConversationState& state);

// Records the business half of a round: the suggestion that was shown and
// what was actually sent. An empty business message ends the conversation.
ConversationState append_business_reply(const ConversationState& state,
                                        const SuggestedAction& suggestion,
                                        const Message& business_msg);

// Appends the next customer message + outcome flag, opening a new turn or
// ending the conversation (outcome, silence, or the horizon cap).
ConversationState append_customer_turn(const ConversationState& state, const Message& customer_msg,
                                       bool outcome, const MdpConfig& cfg);

// Starts a conversation from the first customer message.
ConversationState initial_state(const Message& opener);

// One agent-level step: (s, a, r, s') where s' folds in both the business
// reply and, if the conversation continues, the next customer turn.
struct Transition {
  ConversationState state;
  SuggestedAction action;
  double reward = 0.0;
  ConversationState next_state;

  bool operator==(const Transition&) const = default;
};

struct Trajectory {
  std::string episode_id;
  std::string behavior_tag;
  std::vector<Transition> transitions;
  // log pi_0(a|s) of the behavior policy, one entry per transition, broken
  // out per generation event so downstream importance weighting is exact.
  std::vector<std::vector<double>> action_token_logprobs;
  std::vector<double> action_total_logprobs;
};

enum class ViolationKind : std::uint8_t {
  kChainBreak,
  kMisplacedOutcomeReward,
  kMultipleOutcomeRewards,
  kRewardMismatch,
  kNonTerminalEnd,
  kTerminalMidway,
  kLogprobArity,
};

struct Violation {
  ViolationKind kind;
  int index;  // transition index the rule failed at (-1 = whole trajectory)
  std::string detail;
};

// Structural check of the trajectory invariants. Returns all violations
// rather than failing on the first.
std::vector<Violation> validate(const Trajectory& trajectory);

std::string describe(const Violation& v);

}  // namespace srl
