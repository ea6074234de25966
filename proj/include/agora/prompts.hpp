#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "agora/core.hpp"
#include "agora/errors.hpp"
#include "agora/prompt_templates.hpp"

namespace agora {

namespace detail {

inline std::string replace_all(std::string text, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
  return text;
}

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

inline bool starts_with_ci(std::string_view text, std::string_view prefix) {
  if (text.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(text[i])) !=
        std::tolower(static_cast<unsigned char>(prefix[i])))
      return false;
  }
  return true;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Prompt rendering. Each renderer instantiates its template's placeholder
// sites and nothing else.
// ---------------------------------------------------------------------------

inline std::string render_topic_prompt() { return std::string(kTopicPrompt); }

// index is 0-based; the template names the persona "Person {index+1}".
inline std::string render_role_prompt(int index) {
  return detail::replace_all(std::string(kRolePromptTemplate), "{i+1}",
                             std::to_string(index + 1));
}

inline std::string render_utterance_prompt(const SocialRole& agent, const Topic& topic,
                                           const std::string& history, bool has_history) {
  std::string tmpl(has_history ? kUtterancePromptTemplate : kOpeningPromptTemplate);
  tmpl = detail::replace_all(std::move(tmpl), "{i}", std::to_string(agent.agent_id));
  tmpl = detail::replace_all(std::move(tmpl), "{Social Role}", agent.description);
  tmpl = detail::replace_all(std::move(tmpl), "{Topic}", topic.text);
  if (has_history) tmpl = detail::replace_all(std::move(tmpl), "{Chat History}", history);
  return tmpl;
}

// Transcript block fed back as {Chat History}. The default renders parsed
// messages; kRawPrefixed reproduces the displayed transcript form with the
// protocol prefix retained.
enum class HistoryStyle { kParsed, kRawPrefixed };

inline std::string format_history(const Conversation& conv,
                                  HistoryStyle style = HistoryStyle::kParsed) {
  std::string out;
  for (const auto& u : conv.utterances) {
    if (!out.empty()) out.push_back('\n');
    out += "Turn " + std::to_string(u.turn_index) + " - Person " +
           std::to_string(u.speaker_id) + ": ";
    out += style == HistoryStyle::kParsed ? u.text : "Speak: " + u.text;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reply parsing
// ---------------------------------------------------------------------------

enum class ReplyKind { speak, silent };

struct AgentReply {
  ReplyKind kind = ReplyKind::speak;
  std::string message;     // empty iff silent
  bool anomalous = false;  // neither protocol prefix matched
};

// Strips matching surrounding quote pairs, then applies the protocol
// prefixes: leading "Stay silent" -> silent, leading "Speak:" -> speak with
// the remainder, anything else -> speech kept verbatim but flagged.
inline AgentReply parse_agent_reply(const std::string& raw) {
  std::string text = detail::trim(raw);
  if (text.empty()) throw EmptyReply("reply is empty after trimming");
  while (text.size() >= 2 && (text.front() == '"' || text.front() == '\'') &&
         text.back() == text.front()) {
    text = detail::trim(text.substr(1, text.size() - 2));
  }
  if (text.empty()) throw EmptyReply("reply is empty after trimming");

  // first two tokens, edge punctuation removed
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size() && tokens.size() < 2) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) {
      std::string tok = text.substr(start, i - start);
      std::size_t b = 0, e = tok.size();
      while (b < e && std::ispunct(static_cast<unsigned char>(tok[b]))) ++b;
      while (e > b && std::ispunct(static_cast<unsigned char>(tok[e - 1]))) --e;
      tokens.push_back(detail::lower(tok.substr(b, e - b)));
    }
  }
  if (tokens.size() == 2 && tokens[0] == "stay" && tokens[1] == "silent") {
    return AgentReply{ReplyKind::silent, "", false};
  }

  if (detail::starts_with_ci(text, "speak:")) {
    std::string message = detail::trim(std::string_view(text).substr(6));
    if (!message.empty()) return AgentReply{ReplyKind::speak, message, false};
  }
  return AgentReply{ReplyKind::speak, text, true};
}

}  // namespace agora
