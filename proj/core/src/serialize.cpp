#include "srl/serialize.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace srl {

namespace {

using nlohmann::json;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

Token parse_token(const std::string& s) {
  if (s.empty()) throw DataError("state decode: empty token id");
  std::size_t pos = 0;
  const unsigned long v = std::stoul(s, &pos);
  if (pos != s.size() || v > 0xffff) throw DataError("state decode: bad token id '" + s + "'");
  return static_cast<Token>(v);
}

}  // namespace

std::string encode_message(const Message& m) {
  std::string out;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(m[i]);
  }
  return out;
}

Message decode_message(const std::string& text) {
  Message m;
  if (text.empty()) return m;
  for (const auto& part : split(text, '.')) m.push_back(parse_token(part));
  return m;
}

std::string encode_action(const SuggestedAction& action) {
  return action.is_abstain() ? "-" : encode_message(*action.message);
}

SuggestedAction decode_action(const std::string& text) {
  if (text == "-") return SuggestedAction::abstain();
  Message m = decode_message(text);
  if (m.empty()) throw DataError("action decode: empty respond message");
  return SuggestedAction::respond(std::move(m));
}

std::string encode_state(const ConversationState& state) {
  std::string out = "s" + std::to_string(kStateFormatVersion);
  for (const auto& t : state.turns) {
    out += "|c=" + encode_message(t.customer);
    out += ",o=";
    out += t.outcome ? '1' : '0';
    if (t.completed) {
      out += ",a=";
      out += t.suggestion.has_value() ? encode_message(*t.suggestion) : "-";
      out += ",m=" + encode_message(*t.business);
    }
  }
  if (state.terminal.has_value()) out += std::string("|T=") + to_string(*state.terminal);
  return out;
}

ConversationState decode_state(const std::string& text) {
  const auto segs = split(text, '|');
  if (segs.empty() || segs[0] != "s" + std::to_string(kStateFormatVersion))
    throw DataError("state decode: missing/unsupported version tag");
  ConversationState s;
  for (std::size_t i = 1; i < segs.size(); ++i) {
    const std::string& seg = segs[i];
    if (seg.rfind("T=", 0) == 0) {
      auto r = terminal_reason_from_string(seg.substr(2));
      if (!r) throw DataError("state decode: unknown terminal reason '" + seg + "'");
      s.terminal = *r;
      if (i + 1 != segs.size()) throw DataError("state decode: terminal tag not last");
      continue;
    }
    Turn t;
    bool have_c = false, have_o = false;
    for (const auto& field : split(seg, ',')) {
      if (field.rfind("c=", 0) == 0) {
        t.customer = decode_message(field.substr(2));
        have_c = true;
      } else if (field.rfind("o=", 0) == 0) {
        if (field != "o=0" && field != "o=1") throw DataError("state decode: bad outcome flag");
        t.outcome = field == "o=1";
        have_o = true;
      } else if (field.rfind("a=", 0) == 0) {
        const std::string v = field.substr(2);
        t.suggestion = (v == "-") ? std::optional<Message>{} : std::optional<Message>{decode_message(v)};
        t.completed = true;
      } else if (field.rfind("m=", 0) == 0) {
        t.business = decode_message(field.substr(2));
        t.completed = true;
      } else {
        throw DataError("state decode: unknown field '" + field + "'");
      }
    }
    if (!have_c || !have_o) throw DataError("state decode: turn missing c/o");
    if (t.completed && !t.business.has_value())
      throw DataError("state decode: completed turn missing business message");
    s.turns.push_back(std::move(t));
  }
  return s;
}

std::string episode_to_json_line(const EpisodeRecord& rec) {
  const Trajectory& tr = rec.trajectory;
  json j;
  j["v"] = kTrajectoryLogVersion;
  j["episode_id"] = tr.episode_id;
  j["behavior_tag"] = tr.behavior_tag;
  json ts = json::array();
  for (std::size_t k = 0; k < tr.transitions.size(); ++k) {
    const Transition& t = tr.transitions[k];
    json e;
    e["s"] = encode_state(t.state);
    e["a"] = encode_action(t.action);
    e["r"] = t.reward;
    e["ns"] = encode_state(t.next_state);
    if (k < tr.action_token_logprobs.size()) e["lp"] = tr.action_token_logprobs[k];
    if (k < tr.action_total_logprobs.size()) e["lps"] = tr.action_total_logprobs[k];
    ts.push_back(std::move(e));
  }
  j["transitions"] = std::move(ts);
  if (!rec.returns.empty()) j["returns"] = rec.returns;
  if (!rec.weights.empty()) j["weights"] = rec.weights;
  return j.dump();
}

EpisodeRecord episode_from_json_line(const std::string& line) {
  json j = json::parse(line);
  if (!j.contains("v")) throw DataError("trajectory log: missing version field");
  if (j["v"].get<int>() != kTrajectoryLogVersion)
    throw DataError("trajectory log: unsupported version");
  EpisodeRecord rec;
  Trajectory& tr = rec.trajectory;
  tr.episode_id = j.at("episode_id").get<std::string>();
  tr.behavior_tag = j.at("behavior_tag").get<std::string>();
  for (const auto& e : j.at("transitions")) {
    Transition t;
    t.state = decode_state(e.at("s").get<std::string>());
    t.action = decode_action(e.at("a").get<std::string>());
    t.reward = e.at("r").get<double>();
    t.next_state = decode_state(e.at("ns").get<std::string>());
    tr.transitions.push_back(std::move(t));
    if (e.contains("lp")) tr.action_token_logprobs.push_back(e["lp"].get<std::vector<double>>());
    if (e.contains("lps")) tr.action_total_logprobs.push_back(e["lps"].get<double>());
  }
  if (j.contains("returns")) rec.returns = j["returns"].get<std::vector<double>>();
  if (j.contains("weights")) rec.weights = j["weights"].get<std::vector<double>>();
  return rec;
}

void write_trajectory_log(std::ostream& os, const std::vector<Trajectory>& episodes) {
  for (const auto& tr : episodes) os << episode_to_json_line(EpisodeRecord{tr, {}, {}}) << '\n';
}

std::vector<Trajectory> read_trajectory_log(std::istream& is) {
  std::vector<Trajectory> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    out.push_back(episode_from_json_line(line).trajectory);
  }
  return out;
}

}  // namespace srl
