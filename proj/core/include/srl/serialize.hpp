#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "srl/types.hpp"

namespace srl {

inline constexpr int kStateFormatVersion = 1;
inline constexpr int kTrajectoryLogVersion = 1;

// Canonical flat encoding of a conversation state. Injective: two states
// differing anywhere (including a single past suggestion) encode differently,
// and decode(encode(s)) == s.
std::string encode_state(const ConversationState& state);
ConversationState decode_state(const std::string& text);

std::string encode_action(const SuggestedAction& action);
SuggestedAction decode_action(const std::string& text);

std::string encode_message(const Message& m);
Message decode_message(const std::string& text);

// One episode per line; line-delimited JSON with a mandatory version field.
// `returns` and `weights` are optional per-transition blocks used by the
// evaluation-dataset dump.
struct EpisodeRecord {
  Trajectory trajectory;
  std::vector<double> returns;  // empty unless dataset dump
  std::vector<double> weights;  // empty unless dataset dump
};

std::string episode_to_json_line(const EpisodeRecord& rec);
EpisodeRecord episode_from_json_line(const std::string& line);

void write_trajectory_log(std::ostream& os, const std::vector<Trajectory>& episodes);
std::vector<Trajectory> read_trajectory_log(std::istream& is);

}  // namespace srl
