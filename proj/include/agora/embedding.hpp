#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "agora/errors.hpp"
#include "agora/gateway.hpp"
#include "agora/sha256.hpp"

namespace agora {

struct EmbeddingVector {
  std::vector<double> values;
  std::string source_model;

  std::size_t dim() const { return values.size(); }
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::string name() const = 0;
  virtual std::size_t dimension() const = 0;
  virtual std::vector<std::vector<double>> embed_batch(const std::vector<std::string>& texts) = 0;
};

// Deterministic stand-in for a sentence-embedding service: each text maps
// to a unit vector seeded by (seed, text). Identical text always yields
// the identical vector, distinct texts are near-orthogonal in expectation.
class StubEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit StubEmbeddingProvider(std::size_t dim = 1024, std::uint64_t seed = 42)
      : dim_(dim), seed_(seed) {}

  std::string name() const override { return "stub"; }
  std::size_t dimension() const override { return dim_; }

  std::vector<std::vector<double>> embed_batch(const std::vector<std::string>& texts) override {
    std::vector<std::vector<double>> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed_one(t));
    return out;
  }

 private:
  std::vector<double> embed_one(const std::string& text) const {
    std::mt19937_64 rng(sha256_prefix64(std::to_string(seed_) + "\x1f" + text));
    std::vector<double> v(dim_);
    double norm_sq = 0.0;
    for (auto& x : v) {
      // top 53 bits -> [0,1); avoids std::uniform_real_distribution, whose
      // output is not pinned across standard libraries
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      x = 2.0 * u - 1.0;
      norm_sq += x * x;
    }
    const double norm = std::sqrt(norm_sq);
    for (auto& x : v) x /= norm;
    return v;
  }

  std::size_t dim_;
  std::uint64_t seed_;
};

// Front door used by the metric passes: validates input, serves repeated
// texts from the disk cache, and stamps vectors with the provider name.
class Embedder {
 public:
  explicit Embedder(std::shared_ptr<EmbeddingProvider> provider,
                    std::optional<std::filesystem::path> cache_dir = std::nullopt)
      : provider_(std::move(provider)) {
    if (cache_dir) cache_.emplace(*cache_dir);
  }

  EmbeddingVector embed(const std::string& text) {
    if (text.empty()) throw EmptyText("cannot embed empty text");
    const std::string key =
        sha256_hex("embed\x1f" + provider_->name() + "\x1f" +
                   std::to_string(provider_->dimension()) + "\x1f" + text);
    if (cache_) {
      if (auto hit = cache_->get(key)) {
        return EmbeddingVector{hit->at("values").get<std::vector<double>>(),
                               hit->at("source_model").get<std::string>()};
      }
    }
    auto vectors = provider_->embed_batch({text});
    EmbeddingVector v{std::move(vectors.at(0)), provider_->name()};
    if (v.values.size() != provider_->dimension())
      throw DimensionMismatch("provider returned dimension " + std::to_string(v.values.size()) +
                              ", configured " + std::to_string(provider_->dimension()));
    for (double x : v.values)
      if (!std::isfinite(x)) throw ProviderError("non-finite embedding component");
    if (cache_) {
      cache_->put(key, nlohmann::json{{"schema_version", 1},
                                      {"source_model", v.source_model},
                                      {"values", v.values}});
    }
    return v;
  }

  std::size_t dimension() const { return provider_->dimension(); }
  const std::string provider_name() const { return provider_->name(); }

 private:
  std::shared_ptr<EmbeddingProvider> provider_;
  std::optional<DiskCache> cache_;
};

}  // namespace agora
