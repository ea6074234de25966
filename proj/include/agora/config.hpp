#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "agora/core.hpp"
#include "agora/errors.hpp"
#include "agora/sha256.hpp"

namespace agora {

// Run configuration: one JSON file defines providers, the experiment grid,
// data file locations and metric options; secrets stay in environment
// variables; CLI flags override individual fields.

struct ProviderConfig {
  std::string name;
  std::string type;  // "mock" | "http"
  std::optional<std::string> fixture;  // mock: scripted replies
  std::optional<std::string> endpoint;
  std::string key_env;  // env var holding the API key
  double requests_per_second = 0.0;
  int max_in_flight = 4;
};

struct ModelConfig {
  std::string id;
  std::string provider;
};

struct EmbedderConfig {
  std::string type = "stub";  // "stub" | "http"
  std::size_t dim = 1024;
  std::uint64_t seed = 42;
  std::optional<std::string> endpoint;
  std::string model;
  std::string key_env;
};

struct RunConfig {
  std::int64_t seed = 0;
  int workers = 1;
  std::filesystem::path store = "conversations.jsonl";
  std::optional<std::filesystem::path> cache_dir;
  std::optional<std::filesystem::path> checkpoint_dir;
  std::optional<double> temperature;  // nullopt = provider default
  std::optional<int> max_utterances_override;
  int silence_cycles = 3;

  std::map<std::string, ProviderConfig> providers;
  std::vector<ModelConfig> models;
  ExperimentGrid grid;

  std::optional<std::filesystem::path> debate_topics;
  std::optional<std::filesystem::path> keyword_pool;
  std::optional<std::filesystem::path> persona_pool;
  std::optional<std::filesystem::path> valence_lexicon;
  std::optional<std::filesystem::path> category_lexicon;
  std::optional<std::filesystem::path> reference_shares;

  EmbedderConfig embedder;
  int keywords_k = 5;

  std::string judge_model;

  std::string digest;  // sha256 of the raw config document
};

inline std::optional<std::string> env_value(const std::string& name) {
  const char* v = std::getenv(name.c_str());
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(raw);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }

  RunConfig cfg;
  cfg.digest = sha256_hex(raw);
  cfg.seed = j.value("seed", static_cast<std::int64_t>(0));
  cfg.workers = j.value("workers", 1);
  if (j.contains("store")) cfg.store = j["store"].get<std::string>();
  if (j.contains("cache_dir") && !j["cache_dir"].is_null())
    cfg.cache_dir = j["cache_dir"].get<std::string>();
  if (auto env = env_value("AGORA_CACHE_DIR")) cfg.cache_dir = *env;
  if (j.contains("checkpoint_dir") && !j["checkpoint_dir"].is_null())
    cfg.checkpoint_dir = j["checkpoint_dir"].get<std::string>();
  if (j.contains("temperature") && !j["temperature"].is_null())
    cfg.temperature = j["temperature"].get<double>();
  if (j.contains("max_utterances_override") && !j["max_utterances_override"].is_null())
    cfg.max_utterances_override = j["max_utterances_override"].get<int>();
  cfg.silence_cycles = j.value("silence_cycles", 3);

  // materialize value() results before items(): the proxy would otherwise
  // reference a destroyed temporary
  const nlohmann::json providers_json = j.value("providers", nlohmann::json::object());
  for (const auto& [name, p] : providers_json.items()) {
    ProviderConfig pc;
    pc.name = name;
    pc.type = p.value("type", "http");
    if (p.contains("fixture") && !p["fixture"].is_null())
      pc.fixture = p["fixture"].get<std::string>();
    if (p.contains("endpoint") && !p["endpoint"].is_null())
      pc.endpoint = p["endpoint"].get<std::string>();
    std::string default_env = "AGORA_API_KEY_" + name;
    for (char& c : default_env) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    pc.key_env = p.value("key_env", default_env);
    pc.requests_per_second = p.value("rps", 0.0);
    pc.max_in_flight = p.value("max_in_flight", 4);
    cfg.providers[name] = pc;
  }

  for (const auto& m : j.value("models", nlohmann::json::array())) {
    ModelConfig mc;
    mc.id = m.at("id").get<std::string>();
    mc.provider = m.value("provider", "mock");
    if (!cfg.providers.count(mc.provider))
      throw ConfigError("model '" + mc.id + "' references unknown provider '" + mc.provider +
                        "'");
    cfg.models.push_back(mc);
    cfg.grid.models.push_back(mc.id);
  }

  if (j.contains("grid")) {
    const auto& g = j["grid"];
    cfg.grid.seed = cfg.seed;
    for (const auto& s : g.value("group_sizes", nlohmann::json::array()))
      cfg.grid.group_sizes.push_back(s.get<int>());
    for (const auto& s : g.value("role_sources", nlohmann::json::array()))
      cfg.grid.role_sources.push_back(role_source_from_string(s.get<std::string>()));
    const nlohmann::json topic_sources_json =
        g.value("topic_sources", nlohmann::json::object());
    for (const auto& [src, count] : topic_sources_json.items())
      cfg.grid.topic_sources[topic_source_from_string(src)] = count.get<int>();
  }

  const auto& data = j.value("data", nlohmann::json::object());
  auto data_path = [&](const char* key) -> std::optional<std::filesystem::path> {
    if (!data.contains(key) || data[key].is_null()) return std::nullopt;
    std::filesystem::path p = data[key].get<std::string>();
    if (!std::filesystem::exists(p))
      throw ConfigError(std::string("config data.") + key + " does not exist: " + p.string());
    return p;
  };
  cfg.debate_topics = data_path("debate_topics");
  cfg.keyword_pool = data_path("keyword_pool");
  cfg.persona_pool = data_path("persona_pool");
  cfg.valence_lexicon = data_path("valence_lexicon");
  cfg.category_lexicon = data_path("category_lexicon");
  cfg.reference_shares = data_path("reference_shares");

  if (j.contains("metrics")) {
    const auto& m = j["metrics"];
    cfg.keywords_k = m.value("keywords_k", 5);
    if (m.contains("embedder")) {
      const auto& e = m["embedder"];
      cfg.embedder.type = e.value("type", "stub");
      cfg.embedder.dim = e.value("dim", static_cast<std::size_t>(1024));
      cfg.embedder.seed = e.value("seed", static_cast<std::uint64_t>(42));
      if (e.contains("endpoint") && !e["endpoint"].is_null())
        cfg.embedder.endpoint = e["endpoint"].get<std::string>();
      cfg.embedder.model = e.value("model", "");
      cfg.embedder.key_env = e.value("key_env", "AGORA_API_KEY_EMBEDDER");
    }
  }

  if (j.contains("judge")) cfg.judge_model = j["judge"].value("model", "");

  return cfg;
}

// one entry per line, blank lines and '#' comments skipped
inline std::vector<std::string> load_line_pool(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open pool file: " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    out.push_back(line);
  }
  return out;
}

}  // namespace agora
