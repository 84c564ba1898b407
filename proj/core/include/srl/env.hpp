#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "srl/rng.hpp"
#include "srl/types.hpp"

namespace srl {

// Business-message classes used by the adoption and intent models. A message
// containing an offer token is an offer, else a probe token makes it a probe.
enum class MsgClass : std::uint8_t { kProbe = 0, kOffer = 1, kGeneric = 2 };
inline constexpr int kNumMsgClasses = 3;

// Latent customer intent levels.
enum class Intent : std::uint8_t { kCold = 0, kWarm = 1, kHot = 2 };
inline constexpr int kNumIntents = 3;

const char* to_string(MsgClass c);

// How the business reacts to a suggestion.
struct AdoptionProbs {
  double accept = 0.0;      // send the suggestion verbatim
  double edit = 0.0;        // send it with one token changed
  double influenced = 0.0;  // rewrite in the style of the suggestion's class
  double unrelated = 0.0;   // ignore the suggestion, send an own draft
  double stop = 0.0;        // go silent (ends the conversation)

  std::array<double, 5> as_array() const { return {accept, edit, influenced, unrelated, stop}; }
};

// Latent-intent customer model: initial distribution, per-business-class
// intent transition, and per-(intent, class) outcome probability.
struct IntentModel {
  std::array<double, kNumIntents> initial{};
  // transition[class][z][z']
  std::array<std::array<std::array<double, kNumIntents>, kNumIntents>, kNumMsgClasses> transition{};
  // outcome_prob[class][z']
  std::array<std::array<double, kNumIntents>, kNumMsgClasses> outcome_prob{};
};

struct EnvConfig {
  MdpConfig mdp;
  AdoptionProbs adoption;
  std::vector<Token> probe_tokens;
  std::vector<Token> offer_tokens;
  // Customer-side token sets used only for featurization.
  std::vector<Token> greet_tokens;
  std::vector<Token> browse_tokens;
  std::vector<Token> details_tokens;
  IntentModel intent;
  std::vector<Message> openers;
  // opener_probs[z][opener]
  std::vector<std::vector<double>> opener_probs;
  std::vector<Message> customer_msgs;
  // customer_probs[z][j] over customer_msgs plus one trailing silence column.
  std::vector<std::vector<double>> customer_probs;
  Message outcome_message;  // sent along with a positive outcome flag
  std::vector<Message> drafts;
  std::vector<double> draft_probs;
  // Canonical message per class, used by the influenced-rewrite branch.
  std::array<Message, kNumMsgClasses> canonical;
  std::uint64_t seed = 1;

  void validate() const;
  MsgClass classify(const Message& m) const;
  std::vector<double> draft_class_probs() const;  // drafts folded to classes
};

EnvConfig parse_env_config(const std::string& json_text);
EnvConfig load_env_config(const std::string& path);
std::string env_config_to_json(const EnvConfig& cfg);

// Small reference instance used throughout the test and experiment suite.
EnvConfig toy_shop_config();

// One live episode's worth of environment. Owns a deterministic RNG stream
// and the episode's hidden intent; clone with distinct seeds to parallelize.
class EnvInstance {
 public:
  explicit EnvInstance(EnvConfig cfg);
  EnvInstance(EnvConfig cfg, std::uint64_t seed);

  const EnvConfig& config() const { return cfg_; }

  // Fresh conversation: draws the hidden intent and the opener. Never terminal.
  ConversationState reset();

  // Business half of the kernel: what actually gets sent given a suggestion.
  // Empty result means the business went silent.
  Message business_respond(const ConversationState& state, const SuggestedAction& action);

  // Customer half of the kernel: advances hidden intent given the business
  // message class, then draws (message, outcome flag). Empty message with a
  // false flag means the customer went silent.
  std::pair<Message, bool> customer_respond(const ConversationState& state,
                                            const Message& business_msg);

  // Omniscient peek for environment debugging; learning code must not use it.
  Intent debug_intent() const { return intent_; }

 private:
  EnvConfig cfg_;
  Rng rng_;
  Intent intent_ = Intent::kCold;
};

// Convenience: run the full environment side of one agent step starting from
// a non-terminal state. Returns the successor state (business reply folded
// in, plus the customer turn when the conversation continues).
ConversationState env_step(EnvInstance& env, const ConversationState& state,
                           const SuggestedAction& action);

// Observation-class key of a state: openers, business message classes and
// customer messages at table granularity. Two states with equal keys are
// indistinguishable to the transition kernel and to every featurizer in this
// project, which is what makes the exact enumeration sound. Terminal states
// collapse to their reason.
std::string state_key(const EnvConfig& cfg, const ConversationState& state);

}  // namespace srl
