#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "agora/errors.hpp"
#include "agora/prompts.hpp"
#include "agora/sha256.hpp"

namespace agora {

// ---------------------------------------------------------------------------
// Request / response contract with external text-generation providers.
// ---------------------------------------------------------------------------

struct GenerationRequest {
  std::string model_id;
  std::string prompt;
  std::optional<double> temperature;      // nullopt = provider default
  std::optional<int> max_output_tokens;
  // Distinguishes repeated draws of the same prompt (topic/role/judge
  // sampling) so they cache independently yet replay on resume.
  std::string sample_tag;
};

struct GenerationResponse {
  std::string text;
  double latency_ms = 0.0;
  bool from_cache = false;
};

inline std::string cache_key(const GenerationRequest& req) {
  Sha256 h;
  auto field = [&h](std::string_view s) {
    h.update(s);
    h.update(std::string_view("\x1f", 1));
  };
  field(req.model_id);
  field(req.prompt);
  field(req.temperature ? std::to_string(*req.temperature) : "default");
  field(req.max_output_tokens ? std::to_string(*req.max_output_tokens) : "none");
  field(req.sample_tag);
  auto d = h.digest();
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(64);
  for (auto b : d) {
    out.push_back(hex[b >> 4]);
    out.push_back(hex[b & 0xf]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Providers
// ---------------------------------------------------------------------------

class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual std::string name() const = 0;
  // Returns generated text; throws AuthError / RateLimited / Timeout /
  // ProviderError. Must be safe for concurrent callers.
  virtual std::string generate(const GenerationRequest& req) = 0;
};

// Offline provider for tests and dry runs. Reply resolution order:
// scripted sequence, then substring rules, then a deterministic reply
// derived from the request digest, so identical runs produce identical
// transcripts regardless of scheduling.
class MockChatProvider : public ChatProvider {
 public:
  struct Rule {
    std::string contains;
    std::string reply;
  };

  MockChatProvider() = default;

  std::string name() const override { return "mock"; }

  void push_reply(std::string reply) {
    std::lock_guard lk(mu_);
    sequence_.push_back(std::move(reply));
  }

  void add_rule(std::string contains, std::string reply) {
    std::lock_guard lk(mu_);
    rules_.push_back(Rule{std::move(contains), std::move(reply)});
  }

  void set_latency(std::chrono::milliseconds d) { latency_ = d; }

  // First `n` calls throw RateLimited; exercises the retry path.
  void fail_first(int n) { failures_remaining_ = n; }

  int calls() const { return calls_.load(); }

  std::string generate(const GenerationRequest& req) override {
    calls_.fetch_add(1);
    if (latency_.count() > 0) std::this_thread::sleep_for(latency_);
    if (failures_remaining_.load() > 0 && failures_remaining_.fetch_sub(1) > 0)
      throw RateLimited("scripted transient failure");
    {
      std::lock_guard lk(mu_);
      if (next_ < sequence_.size()) return sequence_[next_++];
      for (const auto& r : rules_)
        if (req.prompt.find(r.contains) != std::string::npos) return r.reply;
    }
    return default_reply(req);
  }

  // Loads a scripted fixture: {"replies": [...], "rules": [{"contains":..,
  // "reply":..}]}. Both keys optional.
  static std::shared_ptr<MockChatProvider> from_fixture(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open mock fixture: " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("mock fixture " + path + ": " + e.what());
    }
    auto p = std::make_shared<MockChatProvider>();
    for (const auto& r : j.value("replies", nlohmann::json::array()))
      p->push_reply(r.get<std::string>());
    for (const auto& r : j.value("rules", nlohmann::json::array()))
      p->add_rule(r.at("contains").get<std::string>(), r.at("reply").get<std::string>());
    return p;
  }

 private:
  static std::string default_reply(const GenerationRequest& req) {
    const std::string digest =
        sha256_hex(req.model_id + "\x1f" + req.prompt + "\x1f" + req.sample_tag).substr(0, 8);
    const std::string& p = req.prompt;
    if (p.find("Randomly generate a diverse chat topic") != std::string::npos)
      return "What makes a neighborhood feel like home (" + digest + ")?";
    if (p.find("Generate a specific social identity") != std::string::npos) {
      std::string person = "Person 1";
      auto pos = p.find("'Person ");
      if (pos != std::string::npos) {
        auto end = p.find('\'', pos + 1);
        if (end != std::string::npos) person = p.substr(pos + 1, end - pos - 1);
      }
      static const char* occupations[] = {"teacher",  "farmer",   "nurse",  "cashier",
                                          "plumber",  "driver",   "clerk",  "engineer",
                                          "cleaner",  "waiter"};
      const auto pick = sha256_prefix64(digest) % 10;
      return person + " is a " + occupations[pick] + " from a mid-sized town (" + digest + ").";
    }
    if (p.find("expert in occupational classification") != std::string::npos)
      return std::to_string(sha256_prefix64(digest) % 10);
    return "Speak: I think we should talk about this a bit more (" + digest + ").";
  }

  std::mutex mu_;
  std::vector<std::string> sequence_;
  std::size_t next_ = 0;
  std::vector<Rule> rules_;
  std::chrono::milliseconds latency_{0};
  std::atomic<int> failures_remaining_{0};
  std::atomic<int> calls_{0};
};

// ---------------------------------------------------------------------------
// Disk cache: one file per request digest holding the raw response plus
// the request metadata. Writes go through a temp file + rename so readers
// never observe partial entries.
// ---------------------------------------------------------------------------

class DiskCache {
 public:
  explicit DiskCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  std::optional<nlohmann::json> get(const std::string& key) const {
    std::ifstream in(path_for(key));
    if (!in) return std::nullopt;
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception&) {
      return std::nullopt;  // treat a torn entry as a miss
    }
    return j;
  }

  void put(const std::string& key, const nlohmann::json& value) const {
    const auto final_path = path_for(key);
    const auto tmp_path = final_path.string() + ".tmp" + std::to_string(
        std::hash<std::thread::id>{}(std::this_thread::get_id()));
    {
      std::ofstream out(tmp_path, std::ios::trunc);
      if (!out) throw IoError("cannot write cache entry: " + tmp_path);
      out << value.dump();
    }
    std::filesystem::rename(tmp_path, final_path);
  }

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path path_for(const std::string& key) const {
    return dir_ / (key + ".json");
  }

  std::filesystem::path dir_;
};

// ---------------------------------------------------------------------------
// Rate limiting / bounded concurrency
// ---------------------------------------------------------------------------

class TokenBucket {
 public:
  // rate <= 0 disables limiting.
  explicit TokenBucket(double tokens_per_second, double burst = 1.0)
      : rate_(tokens_per_second),
        capacity_(burst < 1.0 ? 1.0 : burst),
        tokens_(capacity_),
        last_(clock::now()) {}

  void acquire() {
    if (rate_ <= 0) return;
    std::unique_lock lk(mu_);
    for (;;) {
      refill();
      if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        return;
      }
      const double need = 1.0 - tokens_;
      lk.unlock();
      std::this_thread::sleep_for(std::chrono::duration<double>(need / rate_));
      lk.lock();
    }
  }

 private:
  using clock = std::chrono::steady_clock;

  void refill() {
    const auto now = clock::now();
    const double elapsed = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    tokens_ = std::min(capacity_, tokens_ + elapsed * rate_);
  }

  double rate_;
  double capacity_;
  double tokens_;
  clock::time_point last_;
  std::mutex mu_;
};

class InFlightLimiter {
 public:
  explicit InFlightLimiter(int max_in_flight) : max_(max_in_flight) {}

  void acquire() {
    if (max_ <= 0) return;
    std::unique_lock lk(mu_);
    cv_.wait(lk, [this] { return active_ < max_; });
    ++active_;
  }

  void release() {
    if (max_ <= 0) return;
    {
      std::lock_guard lk(mu_);
      --active_;
    }
    cv_.notify_one();
  }

 private:
  int max_;
  int active_ = 0;
  std::mutex mu_;
  std::condition_variable cv_;
};

struct RetryPolicy {
  int max_attempts = 4;
  std::chrono::milliseconds initial_backoff{250};
  double multiplier = 2.0;
};

// ---------------------------------------------------------------------------
// Gateway: routes requests to the provider registered for the model,
// serving identical requests from cache and collapsing concurrent
// identical requests into a single live call.
// ---------------------------------------------------------------------------

class Gateway {
 public:
  struct ProviderLimits {
    int max_in_flight = 4;
    double requests_per_second = 0.0;  // 0 = unlimited
  };

  struct Stats {
    std::atomic<long> live_calls{0};
    std::atomic<long> cache_hits{0};
  };

  explicit Gateway(std::optional<std::filesystem::path> cache_dir = std::nullopt,
                   RetryPolicy retry = {})
      : retry_(retry) {
    if (cache_dir) cache_.emplace(*cache_dir);
  }

  void register_model(const std::string& model_id, std::shared_ptr<ChatProvider> provider) {
    register_model(model_id, std::move(provider), ProviderLimits{});
  }

  void register_model(const std::string& model_id, std::shared_ptr<ChatProvider> provider,
                      ProviderLimits limits) {
    std::lock_guard lk(mu_);
    auto& entry = providers_[provider->name()];
    if (!entry.provider) {
      entry.provider = std::move(provider);
      entry.limiter = std::make_unique<InFlightLimiter>(limits.max_in_flight);
      entry.bucket = std::make_unique<TokenBucket>(limits.requests_per_second,
                                                   limits.max_in_flight);
    }
    models_[model_id] = entry.provider->name();
  }

  bool has_model(const std::string& model_id) const {
    std::lock_guard lk(mu_);
    return models_.count(model_id) > 0;
  }

  GenerationResponse complete(const GenerationRequest& req) {
    if (req.prompt.empty()) throw EmptyReply("request prompt is empty");
    const std::string key = cache_key(req);

    if (cache_) {
      if (auto hit = cache_->get(key)) {
        stats_.cache_hits.fetch_add(1);
        return GenerationResponse{hit->at("text").get<std::string>(), 0.0, true};
      }
    }

    // single-flight: exactly one live call per key, concurrent callers wait
    std::shared_ptr<Flight> flight;
    bool leader = false;
    {
      std::lock_guard lk(flights_mu_);
      auto it = flights_.find(key);
      if (it == flights_.end()) {
        flight = std::make_shared<Flight>();
        flights_[key] = flight;
        leader = true;
      } else {
        flight = it->second;
      }
    }

    if (!leader) {
      std::unique_lock lk(flight->mu);
      flight->cv.wait(lk, [&] { return flight->done; });
      if (flight->error) std::rethrow_exception(flight->error);
      return GenerationResponse{flight->text, flight->latency_ms, true};
    }

    GenerationResponse resp;
    try {
      resp = dispatch(req, key);
    } catch (...) {
      finish_flight(key, flight, nullptr, 0.0, std::current_exception());
      throw;
    }
    finish_flight(key, flight, &resp.text, resp.latency_ms, nullptr);
    return resp;
  }

  const Stats& stats() const { return stats_; }

 private:
  struct Flight {
    std::mutex mu;
    std::condition_variable cv;
    bool done = false;
    std::string text;
    double latency_ms = 0.0;
    std::exception_ptr error;
  };

  struct ProviderEntry {
    std::shared_ptr<ChatProvider> provider;
    std::unique_ptr<InFlightLimiter> limiter;
    std::unique_ptr<TokenBucket> bucket;
  };

  ProviderEntry* entry_for(const std::string& model_id) {
    std::lock_guard lk(mu_);
    auto it = models_.find(model_id);
    if (it == models_.end())
      throw ProviderError("no provider configured for model '" + model_id + "'");
    return &providers_.at(it->second);
  }

  GenerationResponse dispatch(const GenerationRequest& req, const std::string& key) {
    ProviderEntry* entry = entry_for(req.model_id);
    auto backoff = retry_.initial_backoff;
    for (int attempt = 1;; ++attempt) {
      entry->bucket->acquire();
      entry->limiter->acquire();
      const auto t0 = std::chrono::steady_clock::now();
      try {
        stats_.live_calls.fetch_add(1);
        std::string text = entry->provider->generate(req);
        entry->limiter->release();
        const double ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        if (cache_) {
          cache_->put(key, nlohmann::json{{"schema_version", 1},
                                          {"model_id", req.model_id},
                                          {"prompt", req.prompt},
                                          {"temperature", req.temperature
                                               ? nlohmann::json(*req.temperature)
                                               : nlohmann::json()},
                                          {"max_output_tokens", req.max_output_tokens
                                               ? nlohmann::json(*req.max_output_tokens)
                                               : nlohmann::json()},
                                          {"sample_tag", req.sample_tag},
                                          {"text", text}});
        }
        return GenerationResponse{std::move(text), ms, false};
      } catch (const RateLimited&) {
        entry->limiter->release();
        if (attempt >= retry_.max_attempts) throw;
      } catch (const Timeout&) {
        entry->limiter->release();
        if (attempt >= retry_.max_attempts) throw;
      } catch (const ProviderError& e) {
        entry->limiter->release();
        if (e.status() < 500 || attempt >= retry_.max_attempts) throw;
      } catch (...) {
        entry->limiter->release();
        throw;
      }
      std::this_thread::sleep_for(backoff);
      backoff = std::chrono::milliseconds(
          static_cast<long>(static_cast<double>(backoff.count()) * retry_.multiplier));
    }
  }

  void finish_flight(const std::string& key, const std::shared_ptr<Flight>& flight,
                     const std::string* text, double latency_ms, std::exception_ptr error) {
    {
      std::lock_guard lk(flight->mu);
      flight->done = true;
      if (text) flight->text = *text;
      flight->latency_ms = latency_ms;
      flight->error = error;
    }
    flight->cv.notify_all();
    std::lock_guard lk(flights_mu_);
    flights_.erase(key);
  }

  mutable std::mutex mu_;
  std::unordered_map<std::string, ProviderEntry> providers_;  // provider name ->
  std::unordered_map<std::string, std::string> models_;       // model id -> provider name
  std::optional<DiskCache> cache_;
  RetryPolicy retry_;
  Stats stats_;

  std::mutex flights_mu_;
  std::unordered_map<std::string, std::shared_ptr<Flight>> flights_;
};

}  // namespace agora
