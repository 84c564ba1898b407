#include "srl/env.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "srl/serialize.hpp"

namespace srl {

namespace {

using nlohmann::json;

constexpr double kProbTol = 1e-12;

bool contains_any(const Message& m, const std::vector<Token>& set) {
  for (Token t : m)
    if (std::find(set.begin(), set.end(), t) != set.end()) return true;
  return false;
}

void check_row(const std::vector<double>& row, const std::string& what) {
  double sum = 0.0;
  for (double p : row) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw ConfigError(what + ": negative or non-finite entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kProbTol) throw ConfigError(what + ": row does not sum to 1");
}

void check_tokens(const std::vector<Token>& set, int vocab, const std::string& what) {
  for (Token t : set)
    if (t >= vocab) throw ConfigError(what + ": token id out of vocabulary");
}

void check_message(const Message& m, const MdpConfig& mdp, const std::string& what) {
  if (static_cast<int>(m.size()) > mdp.max_msg_len) throw ConfigError(what + ": message too long");
  check_tokens(m, mdp.vocab_size, what);
}

Message msg_from_json(const json& j) {
  Message m;
  for (const auto& v : j) m.push_back(static_cast<Token>(v.get<unsigned>()));
  return m;
}

std::vector<Token> tokens_from_json(const json& j) {
  std::vector<Token> out;
  for (const auto& v : j) out.push_back(static_cast<Token>(v.get<unsigned>()));
  return out;
}

}  // namespace

const char* to_string(MsgClass c) {
  switch (c) {
    case MsgClass::kProbe: return "probe";
    case MsgClass::kOffer: return "offer";
    case MsgClass::kGeneric: return "generic";
  }
  return "?";
}

MsgClass EnvConfig::classify(const Message& m) const {
  if (contains_any(m, offer_tokens)) return MsgClass::kOffer;
  if (contains_any(m, probe_tokens)) return MsgClass::kProbe;
  return MsgClass::kGeneric;
}

std::vector<double> EnvConfig::draft_class_probs() const {
  std::vector<double> out(kNumMsgClasses, 0.0);
  for (std::size_t i = 0; i < drafts.size(); ++i)
    out[static_cast<int>(classify(drafts[i]))] += draft_probs[i];
  return out;
}

void EnvConfig::validate() const {
  mdp.validate();
  const auto a = adoption.as_array();
  double sum = 0.0;
  for (double p : a) {
    if (!(p >= 0.0)) throw ConfigError("adoption: negative entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kProbTol) throw ConfigError("adoption: probabilities must sum to 1");

  check_tokens(probe_tokens, mdp.vocab_size, "probe_tokens");
  check_tokens(offer_tokens, mdp.vocab_size, "offer_tokens");
  check_tokens(greet_tokens, mdp.vocab_size, "greet_tokens");
  check_tokens(browse_tokens, mdp.vocab_size, "browse_tokens");
  check_tokens(details_tokens, mdp.vocab_size, "details_tokens");

  check_row(std::vector<double>(intent.initial.begin(), intent.initial.end()), "intent.initial");
  for (int k = 0; k < kNumMsgClasses; ++k) {
    for (int z = 0; z < kNumIntents; ++z) {
      check_row(std::vector<double>(intent.transition[k][z].begin(), intent.transition[k][z].end()),
                "intent.transition");
      const double po = intent.outcome_prob[k][z];
      if (!(po >= 0.0 && po <= 1.0)) throw ConfigError("intent.outcome_prob: not a probability");
    }
  }

  if (openers.empty()) throw ConfigError("openers: need at least one");
  for (const auto& m : openers) {
    if (m.empty()) throw ConfigError("openers: opener must be non-empty");
    check_message(m, mdp, "openers");
  }
  if (opener_probs.size() != kNumIntents) throw ConfigError("opener_probs: need one row per intent");
  for (const auto& row : opener_probs) {
    if (row.size() != openers.size()) throw ConfigError("opener_probs: row size mismatch");
    check_row(row, "opener_probs");
  }

  for (const auto& m : customer_msgs) {
    if (m.empty()) throw ConfigError("customer_msgs: must be non-empty (silence is implicit)");
    check_message(m, mdp, "customer_msgs");
  }
  if (customer_probs.size() != kNumIntents) throw ConfigError("customer_probs: need one row per intent");
  for (const auto& row : customer_probs) {
    if (row.size() != customer_msgs.size() + 1)
      throw ConfigError("customer_probs: row must cover messages plus silence");
    check_row(row, "customer_probs");
  }

  if (outcome_message.empty()) throw ConfigError("outcome_message: must be non-empty");
  check_message(outcome_message, mdp, "outcome_message");

  if (drafts.empty()) throw ConfigError("drafts: need at least one");
  if (draft_probs.size() != drafts.size()) throw ConfigError("draft_probs: size mismatch");
  for (const auto& m : drafts) {
    if (m.empty()) throw ConfigError("drafts: draft must be non-empty");
    check_message(m, mdp, "drafts");
  }
  check_row(draft_probs, "draft_probs");

  for (const auto& m : canonical) {
    if (m.empty()) throw ConfigError("canonical: message must be non-empty");
    check_message(m, mdp, "canonical");
  }
}

EnvInstance::EnvInstance(EnvConfig cfg) : EnvInstance(std::move(cfg), 0) { rng_ = Rng(cfg_.seed); }

EnvInstance::EnvInstance(EnvConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)), rng_(seed) {
  cfg_.validate();
}

ConversationState EnvInstance::reset() {
  intent_ = static_cast<Intent>(rng_.categorical(
      std::span<const double>(cfg_.intent.initial.data(), kNumIntents)));
  const auto& row = cfg_.opener_probs[static_cast<int>(intent_)];
  const std::size_t opener = rng_.categorical(row);
  return initial_state(cfg_.openers[opener]);
}

Message EnvInstance::business_respond(const ConversationState& state,
                                      const SuggestedAction& action) {
  if (state.is_terminal()) throw AbsorbingStateError("business_respond: conversation ended");
  if (state.turns.empty() || state.turns.back().completed)
    throw std::invalid_argument("business_respond: latest turn is not open");

  const auto a = cfg_.adoption.as_array();
  std::size_t behavior;
  if (action.is_abstain()) {
    // No suggestion on the table: the business writes its own draft, or
    // stops with the same probability it always had.
    const double stop = a[4];
    behavior = (rng_.uniform01() < stop) ? 4 : 3;
  } else {
    behavior = rng_.categorical(std::span<const double>(a.data(), 5));
  }

  switch (behavior) {
    case 0:  // accept verbatim
      return *action.message;
    case 1: {  // accept and edit one token
      Message m = *action.message;
      const std::size_t pos = static_cast<std::size_t>(rng_.below(m.size()));
      const Token old = m[pos];
      Token repl = static_cast<Token>(rng_.below(static_cast<std::uint64_t>(cfg_.mdp.vocab_size - 1)));
      if (repl >= old) ++repl;  // uniform over vocabulary minus the original
      m[pos] = repl;
      return m;
    }
    case 2:  // influenced rewrite: own words, the suggestion's class
      return cfg_.canonical[static_cast<int>(cfg_.classify(*action.message))];
    case 3: {  // unrelated own draft
      const std::size_t d = rng_.categorical(cfg_.draft_probs);
      return cfg_.drafts[d];
    }
    default:  // stop responding
      return Message{};
  }
}

std::pair<Message, bool> EnvInstance::customer_respond(const ConversationState& state,
                                                       const Message& business_msg) {
  if (state.is_terminal()) throw AbsorbingStateError("customer_respond: conversation ended");
  if (state.turns.empty() || !state.turns.back().completed)
    throw std::invalid_argument("customer_respond: latest turn not yet completed");
  if (business_msg.empty())
    throw std::invalid_argument("customer_respond: business silence ends the conversation");

  const int k = static_cast<int>(cfg_.classify(business_msg));
  const auto& trow = cfg_.intent.transition[k][static_cast<int>(intent_)];
  intent_ = static_cast<Intent>(
      rng_.categorical(std::span<const double>(trow.data(), kNumIntents)));

  const double po = cfg_.intent.outcome_prob[k][static_cast<int>(intent_)];
  if (rng_.uniform01() < po) return {cfg_.outcome_message, true};

  const auto& crow = cfg_.customer_probs[static_cast<int>(intent_)];
  const std::size_t j = rng_.categorical(crow);
  if (j == cfg_.customer_msgs.size()) return {Message{}, false};  // silence
  return {cfg_.customer_msgs[j], false};
}

ConversationState env_step(EnvInstance& env, const ConversationState& state,
                           const SuggestedAction& action) {
  const Message m = env.business_respond(state, action);
  ConversationState after_business = append_business_reply(state, action, m);
  if (after_business.is_terminal()) return after_business;
  auto [c, outcome] = env.customer_respond(after_business, m);
  return append_customer_turn(after_business, c, outcome, env.config().mdp);
}

std::string state_key(const EnvConfig& cfg, const ConversationState& state) {
  if (state.is_terminal()) return std::string("T:") + to_string(*state.terminal);
  std::string key = "k1";
  for (std::size_t i = 0; i < state.turns.size(); ++i) {
    const Turn& t = state.turns[i];
    // Customer event: opener index for the first turn, message-table index
    // afterwards; unknown messages fall back to their token spelling.
    key += '|';
    if (i == 0) {
      auto it = std::find(cfg.openers.begin(), cfg.openers.end(), t.customer);
      if (it == cfg.openers.end())
        key += "o?" + encode_message(t.customer);
      else
        key += "o" + std::to_string(it - cfg.openers.begin());
    } else {
      auto it = std::find(cfg.customer_msgs.begin(), cfg.customer_msgs.end(), t.customer);
      if (it == cfg.customer_msgs.end())
        key += "c?" + encode_message(t.customer);
      else
        key += "c" + std::to_string(it - cfg.customer_msgs.begin());
    }
    if (t.completed) {
      if (t.business->empty())
        key += "|bS";
      else
        key += std::string("|b") + to_string(cfg.classify(*t.business))[0];
    }
  }
  return key;
}

namespace {

json msg_to_json(const Message& m) {
  json j = json::array();
  for (Token t : m) j.push_back(t);
  return j;
}

}  // namespace

std::string env_config_to_json(const EnvConfig& cfg) {
  json j;
  j["version"] = 1;
  j["mdp"] = {{"discount", cfg.mdp.discount},
              {"horizon_cap", cfg.mdp.horizon_cap},
              {"vocab_size", cfg.mdp.vocab_size},
              {"max_msg_len", cfg.mdp.max_msg_len}};
  j["adoption"] = {{"accept", cfg.adoption.accept},
                   {"edit", cfg.adoption.edit},
                   {"influenced", cfg.adoption.influenced},
                   {"unrelated", cfg.adoption.unrelated},
                   {"stop", cfg.adoption.stop}};
  j["token_classes"] = {{"probe", cfg.probe_tokens},
                        {"offer", cfg.offer_tokens},
                        {"greet", cfg.greet_tokens},
                        {"browse", cfg.browse_tokens},
                        {"details", cfg.details_tokens}};
  json intent;
  intent["initial"] = cfg.intent.initial;
  const char* class_names[] = {"probe", "offer", "generic"};
  for (int k = 0; k < kNumMsgClasses; ++k) {
    json rows = json::array();
    for (int z = 0; z < kNumIntents; ++z) rows.push_back(cfg.intent.transition[k][z]);
    intent["transition"][class_names[k]] = rows;
    intent["outcome_prob"][class_names[k]] = cfg.intent.outcome_prob[k];
  }
  j["intent"] = intent;
  json openers = json::array();
  for (const auto& m : cfg.openers) openers.push_back(msg_to_json(m));
  j["openers"] = {{"messages", openers}, {"probs_by_intent", cfg.opener_probs}};
  json cmsgs = json::array();
  for (const auto& m : cfg.customer_msgs) cmsgs.push_back(msg_to_json(m));
  j["customer"] = {{"messages", cmsgs},
                   {"probs_by_intent", cfg.customer_probs},
                   {"outcome_message", msg_to_json(cfg.outcome_message)}};
  json drafts = json::array();
  for (const auto& m : cfg.drafts) drafts.push_back(msg_to_json(m));
  j["drafts"] = {{"messages", drafts}, {"probs", cfg.draft_probs}};
  j["canonical"] = {{"probe", msg_to_json(cfg.canonical[0])},
                    {"offer", msg_to_json(cfg.canonical[1])},
                    {"generic", msg_to_json(cfg.canonical[2])}};
  j["seed"] = cfg.seed;
  return j.dump(2);
}

EnvConfig parse_env_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("env config: invalid JSON: ") + e.what());
  }
  try {
    EnvConfig cfg;
    const auto& m = j.at("mdp");
    cfg.mdp.discount = m.at("discount").get<double>();
    cfg.mdp.horizon_cap = m.at("horizon_cap").get<int>();
    cfg.mdp.vocab_size = m.at("vocab_size").get<int>();
    cfg.mdp.max_msg_len = m.at("max_msg_len").get<int>();
    const auto& a = j.at("adoption");
    cfg.adoption = {a.at("accept").get<double>(), a.at("edit").get<double>(),
                    a.at("influenced").get<double>(), a.at("unrelated").get<double>(),
                    a.at("stop").get<double>()};
    const auto& tc = j.at("token_classes");
    cfg.probe_tokens = tokens_from_json(tc.at("probe"));
    cfg.offer_tokens = tokens_from_json(tc.at("offer"));
    cfg.greet_tokens = tokens_from_json(tc.at("greet"));
    cfg.browse_tokens = tokens_from_json(tc.at("browse"));
    cfg.details_tokens = tokens_from_json(tc.at("details"));
    const auto& in = j.at("intent");
    for (int z = 0; z < kNumIntents; ++z) cfg.intent.initial[z] = in.at("initial")[z].get<double>();
    const char* class_names[] = {"probe", "offer", "generic"};
    for (int k = 0; k < kNumMsgClasses; ++k) {
      for (int z = 0; z < kNumIntents; ++z) {
        for (int z2 = 0; z2 < kNumIntents; ++z2)
          cfg.intent.transition[k][z][z2] =
              in.at("transition").at(class_names[k])[z][z2].get<double>();
        cfg.intent.outcome_prob[k][z] = in.at("outcome_prob").at(class_names[k])[z].get<double>();
      }
    }
    for (const auto& o : j.at("openers").at("messages")) cfg.openers.push_back(msg_from_json(o));
    cfg.opener_probs = j.at("openers").at("probs_by_intent").get<std::vector<std::vector<double>>>();
    for (const auto& c : j.at("customer").at("messages")) cfg.customer_msgs.push_back(msg_from_json(c));
    cfg.customer_probs = j.at("customer").at("probs_by_intent").get<std::vector<std::vector<double>>>();
    cfg.outcome_message = msg_from_json(j.at("customer").at("outcome_message"));
    for (const auto& d : j.at("drafts").at("messages")) cfg.drafts.push_back(msg_from_json(d));
    cfg.draft_probs = j.at("drafts").at("probs").get<std::vector<double>>();
    cfg.canonical[0] = msg_from_json(j.at("canonical").at("probe"));
    cfg.canonical[1] = msg_from_json(j.at("canonical").at("offer"));
    cfg.canonical[2] = msg_from_json(j.at("canonical").at("generic"));
    cfg.seed = j.value("seed", std::uint64_t{1});
    cfg.validate();
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("env config: missing or malformed field: ") + e.what());
  }
}

EnvConfig load_env_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("env config: cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_env_config(ss.str());
}

EnvConfig toy_shop_config() {
  EnvConfig cfg;
  cfg.mdp = MdpConfig{0.9, 3, 12, 2};
  cfg.adoption = AdoptionProbs{0.55, 0.15, 0.15, 0.10, 0.05};
  cfg.probe_tokens = {1, 2};
  cfg.offer_tokens = {3, 4};
  cfg.greet_tokens = {0};
  cfg.browse_tokens = {7};
  cfg.details_tokens = {8};
  cfg.intent.initial = {0.50, 0.35, 0.15};
  // probe: moves customers up the funnel
  cfg.intent.transition[0] = {{{0.45, 0.55, 0.00}, {0.00, 0.50, 0.50}, {0.00, 0.05, 0.95}}};
  // offer: pays off on warm/hot, stalls cold customers
  cfg.intent.transition[1] = {{{0.90, 0.10, 0.00}, {0.10, 0.60, 0.30}, {0.00, 0.05, 0.95}}};
  // generic: mild drift
  cfg.intent.transition[2] = {{{0.85, 0.15, 0.00}, {0.10, 0.75, 0.15}, {0.00, 0.15, 0.85}}};
  cfg.intent.outcome_prob[0] = {0.00, 0.02, 0.10};
  cfg.intent.outcome_prob[1] = {0.02, 0.25, 0.65};
  cfg.intent.outcome_prob[2] = {0.00, 0.01, 0.05};
  cfg.openers = {{0}, {7}, {8}};
  cfg.opener_probs = {{0.60, 0.35, 0.05}, {0.30, 0.45, 0.25}, {0.15, 0.30, 0.55}};
  cfg.customer_msgs = {{7}, {8}};
  cfg.customer_probs = {{0.55, 0.15, 0.30}, {0.35, 0.50, 0.15}, {0.20, 0.72, 0.08}};
  cfg.outcome_message = {9};
  cfg.drafts = {{5}, {1}, {3}};
  cfg.draft_probs = {0.5, 0.3, 0.2};
  cfg.canonical = {Message{1}, Message{3}, Message{5}};
  cfg.seed = 1;
  cfg.validate();
  return cfg;
}

}  // namespace srl
