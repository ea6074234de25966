#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "agora/core.hpp"
#include "agora/embedding.hpp"
#include "agora/errors.hpp"

namespace agora {

struct KeywordWeight {
  std::string keyword;  // lowercase, deduplicated within an utterance
  double weight = 0.0;  // in [0,1]
};

// Per-utterance extraction result, at most K entries.
using KeywordExtraction = std::vector<KeywordWeight>;

class KeywordExtractor {
 public:
  virtual ~KeywordExtractor() = default;
  virtual KeywordExtraction extract(const std::string& text) = 0;
};

namespace detail {

inline std::vector<std::string> keyword_tokens(const std::string& text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      tokens.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(cur);
  return tokens;
}

inline const std::unordered_set<std::string>& function_words() {
  static const std::unordered_set<std::string> words = {
      "a",    "an",   "the",  "and",  "or",    "but",  "if",    "of",   "to",   "in",
      "on",   "at",   "by",   "for",  "with",  "from", "as",    "is",   "are",  "was",
      "were", "be",   "been", "am",   "i",     "you",  "he",    "she",  "it",   "we",
      "they", "me",   "him",  "her",  "us",    "them", "my",    "your", "his",  "its",
      "our",  "their", "this", "that", "these", "those", "not",  "no",   "so",   "too",
      "very", "near", "up",   "down", "out",   "about", "into", "over", "under", "do",
      "does", "did",  "have", "has",  "had",   "will",  "would", "can",  "could", "should"};
  return words;
}

}  // namespace detail

// Deterministic test extractor: content tokens in order of first
// appearance, weight 1/rank, capped at K.
class StubKeywordExtractor : public KeywordExtractor {
 public:
  explicit StubKeywordExtractor(int k = 5) : k_(k) {}

  KeywordExtraction extract(const std::string& text) override {
    if (detail::trim(text).empty()) throw EmptyText("cannot extract keywords from empty text");
    KeywordExtraction out;
    std::unordered_set<std::string> seen;
    for (const auto& tok : detail::keyword_tokens(text)) {
      if (detail::function_words().count(tok) || seen.count(tok)) continue;
      seen.insert(tok);
      out.push_back({tok, 1.0 / static_cast<double>(out.size() + 1)});
      if (static_cast<int>(out.size()) == k_) break;
    }
    return out;
  }

 private:
  int k_;
};

// Production extractor: candidate unigrams ranked by embedding similarity
// to the whole utterance, top-K kept. The embedder choice and K are part
// of run metadata since profiles depend on both.
class EmbeddingKeywordExtractor : public KeywordExtractor {
 public:
  EmbeddingKeywordExtractor(std::shared_ptr<Embedder> embedder, int k = 5)
      : embedder_(std::move(embedder)), k_(k) {}

  KeywordExtraction extract(const std::string& text) override {
    if (detail::trim(text).empty()) throw EmptyText("cannot extract keywords from empty text");
    std::vector<std::string> candidates;
    std::unordered_set<std::string> seen;
    for (const auto& tok : detail::keyword_tokens(text)) {
      if (detail::function_words().count(tok) || seen.count(tok)) continue;
      seen.insert(tok);
      candidates.push_back(tok);
    }
    if (candidates.empty()) return {};
    const EmbeddingVector doc = embedder_->embed(text);
    KeywordExtraction scored;
    for (const auto& c : candidates) {
      const double sim = cosine_raw(embedder_->embed(c), doc);
      scored.push_back({c, std::clamp((sim + 1.0) / 2.0, 0.0, 1.0)});
    }
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto& a, const auto& b) { return a.weight > b.weight; });
    if (static_cast<int>(scored.size()) > k_) scored.resize(static_cast<std::size_t>(k_));
    return scored;
  }

 private:
  static double cosine_raw(const EmbeddingVector& u, const EmbeddingVector& v) {
    double dot = 0, nu = 0, nv = 0;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
      dot += u.values[i] * v.values[i];
      nu += u.values[i] * u.values[i];
      nv += v.values[i] * v.values[i];
    }
    return dot / (std::sqrt(nu) * std::sqrt(nv));
  }

  std::shared_ptr<Embedder> embedder_;
  int k_;
};

// Extractions for one conversation, aligned with its utterances.
using ConversationExtractions = std::vector<KeywordExtraction>;

inline ConversationExtractions extract_conversation(const Conversation& conv,
                                                    KeywordExtractor& extractor) {
  ConversationExtractions out;
  out.reserve(conv.utterances.size());
  for (const auto& u : conv.utterances) out.push_back(extractor.extract(u.text));
  return out;
}

// Normalized global weight: the keyword's summed weight across all
// utterances (0 where absent) divided by the utterance count.
inline double keyword_global_weight(const ConversationExtractions& extractions,
                                    const std::string& keyword) {
  if (extractions.empty()) throw EmptyInput("conversation has no extractions");
  double sum = 0.0;
  bool present = false;
  for (const auto& utterance : extractions) {
    for (const auto& kw : utterance) {
      if (kw.keyword == keyword) {
        sum += kw.weight;
        present = true;
        break;
      }
    }
  }
  if (!present) throw KeywordAbsent("keyword '" + keyword + "' never extracted");
  return sum / static_cast<double>(extractions.size());
}

// first-appearance turn -> (mean global weight, contributing keyword count)
struct PersistenceProfile {
  std::map<int, std::pair<double, std::size_t>> by_turn;

  double total_weight() const {
    double t = 0;
    for (const auto& [_, mc] : by_turn) t += mc.first * static_cast<double>(mc.second);
    return t;
  }
};

// Each unique keyword per conversation contributes its global weight once,
// attributed to the turn where it first appeared; reappearances are not
// double-counted. Single pass per conversation: weight sums accumulate in
// utterance order, matching what keyword_global_weight computes pairwise.
inline PersistenceProfile persistence_profile(
    const std::vector<ConversationExtractions>& conversations) {
  if (conversations.empty()) throw EmptyInput("no conversations");
  std::map<int, std::pair<double, std::size_t>> sums;  // turn -> (weight sum, count)
  for (const auto& extractions : conversations) {
    if (extractions.empty()) continue;
    std::vector<std::string> order;           // keywords by first appearance
    std::map<std::string, int> first_turn;    // keyword -> 1-based turn
    std::map<std::string, double> weight_sum;
    for (std::size_t t = 0; t < extractions.size(); ++t) {
      for (const auto& kw : extractions[t]) {
        auto [it, inserted] = first_turn.try_emplace(kw.keyword, static_cast<int>(t) + 1);
        if (inserted) order.push_back(kw.keyword);
        weight_sum[kw.keyword] += kw.weight;
      }
    }
    const double n = static_cast<double>(extractions.size());
    for (const auto& kw : order) {
      auto& [sum, count] = sums[first_turn[kw]];
      sum += weight_sum[kw] / n;
      ++count;
    }
  }
  PersistenceProfile profile;
  for (const auto& [turn, sc] : sums)
    profile.by_turn[turn] = {sc.first / static_cast<double>(sc.second), sc.second};
  return profile;
}

// Restriction of the profile to keywords introduced by the opening turn.
inline std::pair<double, std::size_t> first_turn_weight(
    const std::vector<ConversationExtractions>& conversations) {
  const auto profile = persistence_profile(conversations);
  auto it = profile.by_turn.find(1);
  if (it == profile.by_turn.end()) return {0.0, 0};
  return it->second;
}

}  // namespace agora
