#pragma once

#include <map>
#include <string>
#include <vector>

#include "agora/categories.hpp"
#include "agora/census.hpp"
#include "agora/core.hpp"
#include "agora/corpus.hpp"
#include "agora/embedding.hpp"
#include "agora/keywords.hpp"
#include "agora/semantic.hpp"
#include "agora/sentiment.hpp"

namespace agora {

// Shared grouping keys attached to every sample measured on a
// conversation. "source" is the label the figure tables split by: the
// topic source for simulated conversations, the corpus name for ingested
// human ones.
inline std::map<std::string, std::string> conversation_keys(const Conversation& conv) {
  std::map<std::string, std::string> keys;
  keys["model"] = conv.model_id;
  keys["topic_source"] = to_string(conv.topic.source);
  if (!conv.roles.empty()) keys["role_source"] = to_string(conv.roles[0].source);
  keys["group_size"] = std::to_string(conv.group_size());
  if (conv.topic.source == TopicSource::human &&
      conv.model_id.rfind("human:", 0) == 0) {
    keys["source"] = conv.model_id.substr(6);
  } else {
    keys["source"] = to_string(conv.topic.source);
  }
  return keys;
}

struct SimilarityAnalysis {
  std::vector<MetricSample> samples;
  std::size_t skipped_too_short = 0;
};

inline SimilarityAnalysis similarity_samples(const std::vector<Conversation>& convs,
                                             Embedder& embedder) {
  SimilarityAnalysis out;
  for (const auto& conv : convs) {
    const auto keys = conversation_keys(conv);
    try {
      for (const auto& [turn, sim] : inter_agent_series(conv, embedder)) {
        MetricSample s{Dimension::inter_sim, sim, keys};
        s.keys["turn"] = std::to_string(turn);
        out.samples.push_back(std::move(s));
      }
    } catch (const TooShort&) {
      ++out.skipped_too_short;
    }
    try {
      for (const auto& [turn, sim] : intra_agent_series(conv, embedder)) {
        MetricSample s{Dimension::intra_sim, sim, keys};
        s.keys["turn"] = std::to_string(turn);
        out.samples.push_back(std::move(s));
      }
    } catch (const TooShort&) {
    }
  }
  return out;
}

// One sample per conversation per turn pair (i < j), for the pairwise
// similarity heatmaps.
inline std::vector<MetricSample> matrix_samples(const std::vector<Conversation>& convs,
                                                Embedder& embedder) {
  std::vector<MetricSample> out;
  for (const auto& conv : convs) {
    const auto keys = conversation_keys(conv);
    const int n =
        std::min<int>(kMatrixMaxTurns, static_cast<int>(conv.utterances.size()));
    std::vector<EmbeddingVector> vectors;
    vectors.reserve(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t)
      vectors.push_back(embedder.embed(conv.utterances[static_cast<std::size_t>(t)].text));
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        MetricSample s{Dimension::inter_sim,
                       cosine(vectors[static_cast<std::size_t>(i)],
                              vectors[static_cast<std::size_t>(j)]),
                       keys};
        s.keys["i"] = std::to_string(i + 1);
        s.keys["j"] = std::to_string(j + 1);
        out.push_back(std::move(s));
      }
    }
  }
  return out;
}

inline std::vector<MetricSample> sentiment_samples(const std::vector<Conversation>& convs,
                                                   const ValenceLexicon& lexicon) {
  std::vector<MetricSample> out;
  for (const auto& conv : convs) {
    const auto keys = conversation_keys(conv);
    for (const auto& u : conv.utterances) {
      MetricSample s{Dimension::sentiment, score_sentiment(u.text, lexicon).compound, keys};
      s.keys["turn"] = std::to_string(u.turn_index);
      out.push_back(std::move(s));
    }
  }
  return out;
}

// Every category in the lexicon yields a frequency sample per utterance,
// zeros included, so per-category means are taken over all utterances.
inline std::vector<MetricSample> category_samples(const std::vector<Conversation>& convs,
                                                  const CategoryLexicon& lexicon) {
  std::set<std::string> categories;
  for (const auto& [_, name] : lexicon.category_names) categories.insert(name);
  for (const auto& [_, ids] : lexicon.literals) categories.insert(ids.begin(), ids.end());
  for (const auto& [_, ids] : lexicon.stems) categories.insert(ids.begin(), ids.end());

  std::vector<MetricSample> out;
  for (const auto& conv : convs) {
    const auto keys = conversation_keys(conv);
    for (const auto& u : conv.utterances) {
      const auto profile = count_categories(u.text, lexicon);
      for (const auto& cat : categories) {
        MetricSample s{Dimension::category_freq, profile.frequency(cat), keys};
        s.keys["category"] = cat;
        out.push_back(std::move(s));
      }
    }
  }
  return out;
}

// One sample per (conversation, keyword): the keyword's normalized global
// weight, attributed to its first-appearance turn.
inline std::vector<MetricSample> keyword_samples(const std::vector<Conversation>& convs,
                                                 KeywordExtractor& extractor) {
  std::vector<MetricSample> out;
  for (const auto& conv : convs) {
    if (conv.utterances.empty()) continue;
    const auto keys = conversation_keys(conv);
    const auto extractions = extract_conversation(conv, extractor);
    std::map<std::string, int> first_turn;
    std::map<std::string, double> weight_sum;
    std::vector<std::string> order;
    for (std::size_t t = 0; t < extractions.size(); ++t) {
      for (const auto& kw : extractions[t]) {
        auto [it, inserted] = first_turn.try_emplace(kw.keyword, static_cast<int>(t) + 1);
        if (inserted) order.push_back(kw.keyword);
        weight_sum[kw.keyword] += kw.weight;
      }
    }
    const double n = static_cast<double>(extractions.size());
    for (const auto& kw : order) {
      MetricSample s{Dimension::keyword_weight, weight_sum[kw] / n, keys};
      s.keys["first_turn"] = std::to_string(first_turn[kw]);
      s.keys["keyword"] = kw;
      out.push_back(std::move(s));
    }
  }
  return out;
}

struct PreferenceAnalysis {
  std::vector<MetricSample> samples;
  std::size_t preferred = 0;
  std::size_t dispreferred = 0;
  std::size_t excluded = 0;
};

// Sentiment of each response plus prompt-response alignment, keyed by
// dataset and preference class. Pass a null embedder to skip alignment.
inline PreferenceAnalysis preference_samples(const std::vector<PreferenceRecord>& records,
                                             const ValenceLexicon& lexicon,
                                             Embedder* embedder, const std::string& dataset) {
  PreferenceAnalysis out;
  for (const auto& rec : records) {
    const auto cls = classify_preference(rec.score, rec.scale);
    switch (cls) {
      case PreferenceClass::preferred: ++out.preferred; break;
      case PreferenceClass::dispreferred: ++out.dispreferred; break;
      case PreferenceClass::excluded: ++out.excluded; break;
    }
    if (cls == PreferenceClass::excluded) continue;
    std::map<std::string, std::string> keys{{"dataset", dataset}, {"class", to_string(cls)}};
    out.samples.push_back(
        MetricSample{Dimension::sentiment, score_sentiment(rec.response, lexicon).compound,
                     keys});
    if (embedder && !rec.prompt.empty() && !rec.response.empty()) {
      out.samples.push_back(
          MetricSample{Dimension::inter_sim, prompt_response_similarity(rec, *embedder), keys});
    }
  }
  return out;
}

inline std::vector<MetricSample> role_code_samples(const std::vector<IscoJudgment>& judgments,
                                                   const std::map<std::string, std::string>&
                                                       role_models) {
  std::vector<MetricSample> out;
  for (const auto& j : judgments) {
    if (!j.final) continue;
    MetricSample s{Dimension::role_code, static_cast<double>(*j.final), {}};
    auto it = role_models.find(j.role_id);
    if (it != role_models.end()) s.keys["model"] = it->second;
    s.keys["judge"] = j.judge_model;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace agora
