#include "srl/types.hpp"

namespace srl {

const char* to_string(TerminalReason r) {
  switch (r) {
    case TerminalReason::kOutcomeAchieved: return "outcome_achieved";
    case TerminalReason::kBusinessStopped: return "business_stopped";
    case TerminalReason::kCustomerStopped: return "customer_stopped";
    case TerminalReason::kHorizonReached: return "horizon_reached";
  }
  return "?";
}

std::optional<TerminalReason> terminal_reason_from_string(const std::string& s) {
  if (s == "outcome_achieved") return TerminalReason::kOutcomeAchieved;
  if (s == "business_stopped") return TerminalReason::kBusinessStopped;
  if (s == "customer_stopped") return TerminalReason::kCustomerStopped;
  if (s == "horizon_reached") return TerminalReason::kHorizonReached;
  return std::nullopt;
}

int ConversationState::completed_turns() const {
  int n = 0;
  for (const auto& t : turns) n += t.completed ? 1 : 0;
  return n;
}

const Turn& ConversationState::latest() const {
  if (turns.empty()) throw std::invalid_argument("latest: empty conversation");
  return turns.back();
}

void MdpConfig::validate() const {
  if (discount < 0.0 || discount >= 1.0) throw ConfigError("discount must lie in [0,1)");
  if (horizon_cap < 1) throw ConfigError("horizon_cap must be >= 1");
  if (vocab_size < 1) throw ConfigError("vocab_size must be >= 1");
  if (max_msg_len < 1) throw ConfigError("max_msg_len must be >= 1");
}

namespace {

void check_well_formed(const ConversationState& s) {
  for (std::size_t i = 0; i < s.turns.size(); ++i) {
    const Turn& t = s.turns[i];
    if (!t.completed && i + 1 != s.turns.size())
      throw std::invalid_argument("malformed state: open turn before the latest");
    if (t.completed && !t.business.has_value())
      throw std::invalid_argument("malformed state: completed turn without a business message");
  }
  if (!s.turns.empty() && s.turns.back().outcome && !s.terminal.has_value())
    throw std::invalid_argument("malformed state: outcome flag set but state not terminal");
}

}  // namespace

double reward(const ConversationState& state) {
  check_well_formed(state);
  if (state.turns.empty()) return 0.0;
  // Outcome pays once, on the state where the flag first flips; the
  // conversation ends there, so any later (absorbing) continuation is 0.
  return state.turns.back().outcome ? 1.0 : 0.0;
}

ConversationState initial_state(const Message& opener) {
  if (opener.empty()) throw std::invalid_argument("initial_state: opener must be non-empty");
  ConversationState s;
  s.turns.push_back(Turn{opener, false, std::nullopt, std::nullopt, false});
  return s;
}

ConversationState append_business_reply(const ConversationState& state,
                                        const SuggestedAction& suggestion,
                                        const Message& business_msg) {
  if (state.is_terminal())
    throw AbsorbingStateError("append_business_reply: conversation already ended");
  if (state.turns.empty() || state.turns.back().completed)
    throw std::invalid_argument("append_business_reply: latest turn is not open");
  ConversationState next = state;
  Turn& t = next.turns.back();
  t.suggestion = suggestion.message;
  t.business = business_msg;
  t.completed = true;
  if (business_msg.empty()) next.terminal = TerminalReason::kBusinessStopped;
  return next;
}

ConversationState append_customer_turn(const ConversationState& state, const Message& customer_msg,
                                       bool outcome, const MdpConfig& cfg) {
  if (state.is_terminal())
    throw AbsorbingStateError("append_customer_turn: conversation already ended");
  if (state.turns.empty() || !state.turns.back().completed)
    throw std::invalid_argument("append_customer_turn: latest turn is still open");
  ConversationState next = state;
  next.turns.push_back(Turn{customer_msg, outcome, std::nullopt, std::nullopt, false});
  if (outcome) {
    next.terminal = TerminalReason::kOutcomeAchieved;
  } else if (customer_msg.empty()) {
    next.terminal = TerminalReason::kCustomerStopped;
  } else if (next.completed_turns() >= cfg.horizon_cap) {
    // The cap counts business rounds: once the cap-th reply has been
    // answered, no further suggestion may be produced.
    next.terminal = TerminalReason::kHorizonReached;
  }
  return next;
}

namespace {

void push(std::vector<Violation>& out, ViolationKind k, int idx, std::string detail) {
  out.push_back(Violation{k, idx, std::move(detail)});
}

}  // namespace

std::vector<Violation> validate(const Trajectory& trajectory) {
  std::vector<Violation> out;
  const auto& ts = trajectory.transitions;
  if (ts.empty()) {
    push(out, ViolationKind::kNonTerminalEnd, -1, "empty trajectory");
    return out;
  }
  for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
    if (!(ts[k].next_state == ts[k + 1].state))
      push(out, ViolationKind::kChainBreak, static_cast<int>(k + 1),
           "state does not chain from previous next_state");
    if (ts[k].next_state.is_terminal())
      push(out, ViolationKind::kTerminalMidway, static_cast<int>(k),
           "terminal state followed by more transitions");
  }
  if (!ts.back().next_state.is_terminal())
    push(out, ViolationKind::kNonTerminalEnd, static_cast<int>(ts.size()) - 1,
         "final next_state is not terminal");
  int reward_count = 0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const bool outcome_next = ts[k].next_state.latest_outcome();
    const double expected = outcome_next ? 1.0 : 0.0;
    if (ts[k].reward != expected)
      push(out, ViolationKind::kRewardMismatch, static_cast<int>(k),
           "reward disagrees with next_state outcome flag");
    if (ts[k].reward == 1.0) {
      ++reward_count;
      if (k + 1 != ts.size())
        push(out, ViolationKind::kMisplacedOutcomeReward, static_cast<int>(k),
             "unit reward before the final transition");
    }
  }
  if (reward_count > 1)
    push(out, ViolationKind::kMultipleOutcomeRewards, -1, "more than one unit of reward");
  if (!trajectory.action_total_logprobs.empty() &&
      trajectory.action_total_logprobs.size() != ts.size())
    push(out, ViolationKind::kLogprobArity, -1, "logprob count != transition count");
  return out;
}

std::string describe(const Violation& v) {
  const char* name = "?";
  switch (v.kind) {
    case ViolationKind::kChainBreak: name = "ChainBreak"; break;
    case ViolationKind::kMisplacedOutcomeReward: name = "MisplacedOutcomeReward"; break;
    case ViolationKind::kMultipleOutcomeRewards: name = "MultipleOutcomeRewards"; break;
    case ViolationKind::kRewardMismatch: name = "RewardMismatch"; break;
    case ViolationKind::kNonTerminalEnd: name = "NonTerminalEnd"; break;
    case ViolationKind::kTerminalMidway: name = "TerminalMidway"; break;
    case ViolationKind::kLogprobArity: name = "LogprobArity"; break;
  }
  return std::string(name) + "(" + std::to_string(v.index) + "): " + v.detail;
}

}  // namespace srl
