#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "agora/errors.hpp"

namespace agora {

// ---------------------------------------------------------------------------
// Domain model shared by the simulator and every metric pass.
// ---------------------------------------------------------------------------

enum class TopicSource { llm, topicalchat_keywords, debate, human };
enum class RoleSource { llm_generated, personachat, human };

inline const char* to_string(TopicSource s) {
  switch (s) {
    case TopicSource::llm: return "llm";
    case TopicSource::topicalchat_keywords: return "topicalchat_keywords";
    case TopicSource::debate: return "debate";
    case TopicSource::human: return "human";
  }
  return "?";
}

inline const char* to_string(RoleSource s) {
  switch (s) {
    case RoleSource::llm_generated: return "llm_generated";
    case RoleSource::personachat: return "personachat";
    case RoleSource::human: return "human";
  }
  return "?";
}

inline TopicSource topic_source_from_string(const std::string& s) {
  if (s == "llm") return TopicSource::llm;
  if (s == "topicalchat_keywords") return TopicSource::topicalchat_keywords;
  if (s == "debate") return TopicSource::debate;
  if (s == "human") return TopicSource::human;
  throw ParseError("unknown topic source: " + s);
}

inline RoleSource role_source_from_string(const std::string& s) {
  if (s == "llm_generated") return RoleSource::llm_generated;
  if (s == "personachat") return RoleSource::personachat;
  if (s == "human") return RoleSource::human;
  throw ParseError("unknown role source: " + s);
}

// Persona text handed to one agent; agent_id is the i in "Person i".
struct SocialRole {
  int agent_id = 1;
  std::string description;
  RoleSource source = RoleSource::llm_generated;
};

struct Topic {
  std::string text;
  TopicSource source = TopicSource::llm;
};

// One recorded spoken turn. Silent attempts never become Utterances, so
// turn_index counts recorded utterances only.
struct Utterance {
  int turn_index = 1;  // 1-based
  int speaker_id = 1;
  std::string text;       // parsed message, protocol prefix removed
  std::string raw_reply;  // provider output before parsing
};

struct Conversation {
  std::string id;
  std::string model_id;
  Topic topic;
  std::vector<SocialRole> roles;  // ordered Person 1..G
  std::vector<Utterance> utterances;
  bool truncated = false;
  std::int64_t seed = 0;

  int group_size() const { return static_cast<int>(roles.size()); }
};

struct ExperimentGrid {
  std::vector<std::string> models;
  std::map<TopicSource, int> topic_sources;  // source -> topic count
  std::vector<RoleSource> role_sources;
  std::vector<int> group_sizes;
  std::int64_t seed = 0;
};

enum class Dimension { inter_sim, intra_sim, keyword_weight, sentiment, category_freq, role_code };

inline const char* to_string(Dimension d) {
  switch (d) {
    case Dimension::inter_sim: return "inter_sim";
    case Dimension::intra_sim: return "intra_sim";
    case Dimension::keyword_weight: return "keyword_weight";
    case Dimension::sentiment: return "sentiment";
    case Dimension::category_freq: return "category_freq";
    case Dimension::role_code: return "role_code";
  }
  return "?";
}

inline Dimension dimension_from_string(const std::string& s) {
  if (s == "inter_sim") return Dimension::inter_sim;
  if (s == "intra_sim") return Dimension::intra_sim;
  if (s == "keyword_weight") return Dimension::keyword_weight;
  if (s == "sentiment") return Dimension::sentiment;
  if (s == "category_freq") return Dimension::category_freq;
  if (s == "role_code") return Dimension::role_code;
  throw ParseError("unknown dimension: " + s);
}

// One scalar measurement plus the grouping labels the reporter slices by
// (model, topic_source, role_source, group_size, turn, category, ...).
struct MetricSample {
  Dimension dimension = Dimension::sentiment;
  double value = 0.0;
  std::map<std::string, std::string> keys;
};

inline bool sample_in_range(const MetricSample& s) {
  switch (s.dimension) {
    case Dimension::inter_sim:
    case Dimension::intra_sim:
    case Dimension::sentiment:
      return s.value >= -1.0 && s.value <= 1.0;
    case Dimension::keyword_weight:
    case Dimension::category_freq:
      return s.value >= 0.0 && s.value <= 1.0;
    case Dimension::role_code:
      return s.value >= 0.0 && s.value <= 9.0;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Protocol rules
// ---------------------------------------------------------------------------

// Utterance cap per group size. Sizes outside the supported set are
// rejected unless an explicit override is configured for the run.
inline int max_utterances_for(int group_size, std::optional<int> override = std::nullopt) {
  if (override.has_value()) return *override;
  switch (group_size) {
    case 2:
    case 3:
    case 4:
    case 5:
      return 30;
    case 8:
      return 50;
    case 12:
      return 70;
    case 16:
      return 90;
    case 24:
      return 120;
    case 32:
      return 150;
    default:
      throw UnsupportedGroupSize("unsupported group size " + std::to_string(group_size) +
                                 " and no max-utterance override configured");
  }
}

inline const std::vector<int>& supported_group_sizes() {
  static const std::vector<int> sizes = {2, 3, 4, 5, 8, 12, 16, 24, 32};
  return sizes;
}

// Cyclic turn-taking: attempt a is taken by Person (a mod G) + 1.
inline int speaker_for_attempt(std::int64_t attempt, int group_size) {
  return static_cast<int>(attempt % group_size) + 1;
}

// Structural validation for a conversation: contiguous 1-based turn
// indices, in-range speakers, non-empty texts, and the utterance cap.
// The speaker sequence is realized as a subsequence of the speaker cycle
// by construction (silent attempts skip), which validate() re-derives.
inline void validate_conversation(const Conversation& conv,
                                  std::optional<int> max_override = std::nullopt) {
  const int g = conv.group_size();
  if (g < 2) throw InvalidConversation("conversation needs at least 2 roles");
  const int cap = max_utterances_for(g, max_override);
  if (static_cast<int>(conv.utterances.size()) > cap)
    throw InvalidConversation("utterance count exceeds cap for group size " + std::to_string(g));
  std::int64_t attempt = 0;
  int expected_turn = 1;
  for (const auto& u : conv.utterances) {
    if (u.turn_index != expected_turn)
      throw InvalidConversation("turn_index not contiguous at turn " + std::to_string(u.turn_index));
    if (u.speaker_id < 1 || u.speaker_id > g)
      throw InvalidConversation("speaker_id out of range at turn " + std::to_string(u.turn_index));
    if (u.text.empty())
      throw InvalidConversation("empty utterance text at turn " + std::to_string(u.turn_index));
    // advance the cycle to this speaker, skipping silent attempts
    while (speaker_for_attempt(attempt, g) != u.speaker_id) ++attempt;
    ++attempt;
    ++expected_turn;
  }
}

}  // namespace agora
