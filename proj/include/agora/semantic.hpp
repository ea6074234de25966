#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "agora/core.hpp"
#include "agora/corpus.hpp"
#include "agora/embedding.hpp"
#include "agora/errors.hpp"

namespace agora {

inline double cosine(const EmbeddingVector& u, const EmbeddingVector& v) {
  if (u.dim() != v.dim())
    throw DimensionMismatch("cosine over dimensions " + std::to_string(u.dim()) + " and " +
                            std::to_string(v.dim()));
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.dim(); ++i) {
    dot += u.values[i] * v.values[i];
    nu += u.values[i] * u.values[i];
    nv += v.values[i] * v.values[i];
  }
  if (nu == 0.0 || nv == 0.0) throw ZeroVector("cosine of a zero vector is undefined");
  // clamp against rounding drift so downstream range checks hold
  return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

struct TurnSimilarity {
  int turn = 0;  // turn of the later utterance in the pair
  double similarity = 0.0;
};

// Similarity of each utterance to the immediately preceding one, any
// speaker: entries for t = 2..n.
inline std::vector<TurnSimilarity> inter_agent_series(const Conversation& conv,
                                                      Embedder& embedder) {
  if (conv.utterances.size() < 2)
    throw TooShort("inter-agent series needs at least 2 utterances");
  std::vector<TurnSimilarity> out;
  EmbeddingVector prev = embedder.embed(conv.utterances[0].text);
  for (std::size_t t = 1; t < conv.utterances.size(); ++t) {
    EmbeddingVector cur = embedder.embed(conv.utterances[t].text);
    out.push_back({conv.utterances[t].turn_index, cosine(cur, prev)});
    prev = std::move(cur);
  }
  return out;
}

// Similarity of each utterance to the same speaker's most recent prior
// utterance; speakers speaking for the first time contribute nothing.
inline std::vector<TurnSimilarity> intra_agent_series(const Conversation& conv,
                                                      Embedder& embedder) {
  std::vector<TurnSimilarity> out;
  std::map<int, EmbeddingVector> last_by_speaker;
  for (const auto& u : conv.utterances) {
    EmbeddingVector cur = embedder.embed(u.text);
    auto it = last_by_speaker.find(u.speaker_id);
    if (it != last_by_speaker.end())
      out.push_back({u.turn_index, cosine(cur, it->second)});
    last_by_speaker[u.speaker_id] = std::move(cur);
  }
  if (out.empty()) throw TooShort("no speaker spoke twice");
  return out;
}

// Mean pairwise cosine between turn positions over the first
// min(30, n) turns of each conversation. Diagonal is masked.
struct SimilarityMatrix {
  int size = 0;
  std::vector<std::vector<double>> entries;  // mean cosine; 0 where count == 0
  std::vector<std::vector<int>> counts;      // contributing conversations

  bool defined(int i, int j) const {
    return i != j && counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] > 0;
  }
};

inline constexpr int kMatrixMaxTurns = 30;

inline SimilarityMatrix turn_similarity_matrix(const std::vector<Conversation>& convs,
                                               Embedder& embedder,
                                               std::optional<int> group_filter = std::nullopt) {
  std::vector<const Conversation*> selected;
  for (const auto& c : convs)
    if (!group_filter || c.group_size() == *group_filter) selected.push_back(&c);
  if (selected.empty()) throw EmptyInput("no conversations to build a similarity matrix from");

  SimilarityMatrix m;
  m.size = kMatrixMaxTurns;
  m.entries.assign(kMatrixMaxTurns, std::vector<double>(kMatrixMaxTurns, 0.0));
  m.counts.assign(kMatrixMaxTurns, std::vector<int>(kMatrixMaxTurns, 0));

  for (const auto* conv : selected) {
    const int n = std::min<int>(kMatrixMaxTurns, static_cast<int>(conv->utterances.size()));
    std::vector<EmbeddingVector> vectors;
    vectors.reserve(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t)
      vectors.push_back(embedder.embed(conv->utterances[static_cast<std::size_t>(t)].text));
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double sim = cosine(vectors[static_cast<std::size_t>(i)],
                                  vectors[static_cast<std::size_t>(j)]);
        m.entries[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] += sim;
        m.entries[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] += sim;
        ++m.counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        ++m.counts[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
      }
    }
  }
  for (int i = 0; i < kMatrixMaxTurns; ++i)
    for (int j = 0; j < kMatrixMaxTurns; ++j)
      if (m.counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] > 0)
        m.entries[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] /=
            m.counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

inline double prompt_response_similarity(const PreferenceRecord& rec, Embedder& embedder) {
  if (rec.prompt.empty() || rec.response.empty())
    throw EmptyText("preference record with empty prompt or response");
  return cosine(embedder.embed(rec.prompt), embedder.embed(rec.response));
}

}  // namespace agora
