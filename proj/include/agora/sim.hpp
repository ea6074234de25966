#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "agora/core.hpp"
#include "agora/corpus.hpp"
#include "agora/errors.hpp"
#include "agora/gateway.hpp"
#include "agora/prompts.hpp"
#include "agora/sha256.hpp"

namespace agora {

// ---------------------------------------------------------------------------
// Deterministic sampling helpers. uniform_int_distribution output is not
// pinned by the standard, so grids roll their own bounded draw to stay
// reproducible across toolchains.
// ---------------------------------------------------------------------------

namespace detail {

inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  // masked rejection sampling; unbiased and engine-output-exact
  std::uint64_t mask = n - 1;
  mask |= mask >> 1;
  mask |= mask >> 2;
  mask |= mask >> 4;
  mask |= mask >> 8;
  mask |= mask >> 16;
  mask |= mask >> 32;
  for (;;) {
    const std::uint64_t v = rng() & mask;
    if (v < n) return v;
  }
}

template <typename T>
std::vector<T> sample_without_replacement(const std::vector<T>& pool, std::size_t k,
                                          std::mt19937_64& rng) {
  std::vector<std::size_t> indices(pool.size());
  for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
  std::vector<T> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(bounded(rng, indices.size() - i));
    std::swap(indices[i], indices[j]);
    out.push_back(pool[indices[i]]);
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Topic and role sourcing
// ---------------------------------------------------------------------------

struct TopicBuildInputs {
  // generation path (source = llm)
  Gateway* gateway = nullptr;
  std::string model_id;
  std::optional<double> temperature;
  std::string sample_tag_prefix;  // namespaces the cached draws
  // keyword path
  std::vector<std::string> keyword_pool;
  // debate path
  std::optional<std::filesystem::path> debate_file;
};

inline std::vector<Topic> build_topics(TopicSource source, int count,
                                       const TopicBuildInputs& inputs, std::uint64_t rng_seed) {
  std::vector<Topic> out;
  switch (source) {
    case TopicSource::llm: {
      if (!inputs.gateway) throw ConfigError("llm topic source needs a gateway");
      for (int i = 0; i < count; ++i) {
        GenerationRequest req;
        req.model_id = inputs.model_id;
        req.prompt = render_topic_prompt();
        req.temperature = inputs.temperature;
        req.sample_tag = inputs.sample_tag_prefix + "/topic/" + std::to_string(rng_seed) + "/" +
                         std::to_string(i);
        auto resp = inputs.gateway->complete(req);
        std::string text = detail::trim(resp.text);
        if (text.empty()) throw ProviderError("empty topic from provider");
        out.push_back(Topic{std::move(text), TopicSource::llm});
      }
      break;
    }
    case TopicSource::topicalchat_keywords: {
      if (inputs.keyword_pool.empty()) throw EmptyPool("keyword pool is empty");
      if (inputs.keyword_pool.size() < 3)
        throw EmptyPool("keyword pool needs at least 3 distinct keywords");
      std::mt19937_64 rng(rng_seed);
      for (int i = 0; i < count; ++i) {
        auto kws = detail::sample_without_replacement(inputs.keyword_pool, 3, rng);
        out.push_back(Topic{kws[0] + ", " + kws[1] + ", " + kws[2],
                            TopicSource::topicalchat_keywords});
      }
      break;
    }
    case TopicSource::debate: {
      if (!inputs.debate_file || !std::filesystem::exists(*inputs.debate_file))
        throw MissingDebateFile("debate topics file not found");
      std::ifstream in(*inputs.debate_file);
      std::string line;
      while (std::getline(in, line)) {
        if (!detail::trim(line).empty())
          out.push_back(Topic{detail::trim(line), TopicSource::debate});
      }
      if (out.empty()) throw MissingDebateFile("debate topics file is empty");
      break;
    }
    case TopicSource::human:
      throw ConfigError("'human' is an ingestion tag, not a topic generator");
  }
  return out;
}

struct RoleBuildInputs {
  Gateway* gateway = nullptr;
  std::string model_id;
  std::optional<double> temperature;
  std::string sample_tag_prefix;
  std::vector<std::string> persona_pool;
};

inline std::vector<SocialRole> build_roles(RoleSource source, int group_size,
                                           const RoleBuildInputs& inputs,
                                           std::uint64_t rng_seed) {
  std::vector<SocialRole> out;
  switch (source) {
    case RoleSource::llm_generated: {
      if (!inputs.gateway) throw ConfigError("llm_generated role source needs a gateway");
      for (int i = 0; i < group_size; ++i) {
        GenerationRequest req;
        req.model_id = inputs.model_id;
        req.prompt = render_role_prompt(i);
        req.temperature = inputs.temperature;
        req.sample_tag = inputs.sample_tag_prefix + "/role/" + std::to_string(rng_seed) + "/" +
                         std::to_string(i);
        auto resp = inputs.gateway->complete(req);
        std::string text = detail::trim(resp.text);
        if (text.empty()) throw ProviderError("empty role description from provider");
        out.push_back(SocialRole{i + 1, std::move(text), RoleSource::llm_generated});
      }
      break;
    }
    case RoleSource::personachat: {
      if (inputs.persona_pool.empty()) throw EmptyPool("persona pool is empty");
      if (inputs.persona_pool.size() < static_cast<std::size_t>(group_size))
        throw EmptyPool("persona pool has " + std::to_string(inputs.persona_pool.size()) +
                        " personas, need " + std::to_string(group_size) + " distinct ones");
      std::mt19937_64 rng(rng_seed);
      auto personas = detail::sample_without_replacement(
          inputs.persona_pool, static_cast<std::size_t>(group_size), rng);
      for (int i = 0; i < group_size; ++i)
        out.push_back(SocialRole{i + 1, personas[static_cast<std::size_t>(i)],
                                 RoleSource::personachat});
      break;
    }
    case RoleSource::human:
      throw ConfigError("'human' is an ingestion tag, not a role generator");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Conversation protocol
// ---------------------------------------------------------------------------

struct ConversationSpec {
  std::string id;  // empty = derive from content digest
  std::string model_id;
  Topic topic;
  std::vector<SocialRole> roles;  // ordered Person 1..G
  int max_utterances = 30;
  std::int64_t seed = 0;

  int group_size() const { return static_cast<int>(roles.size()); }
};

inline std::string spec_digest(const ConversationSpec& spec) {
  Sha256 h;
  auto field = [&h](std::string_view s) {
    h.update(s);
    h.update(std::string_view("\x1f", 1));
  };
  field(spec.model_id);
  field(spec.topic.text);
  field(to_string(spec.topic.source));
  for (const auto& r : spec.roles) {
    field(std::to_string(r.agent_id));
    field(r.description);
    field(to_string(r.source));
  }
  field(std::to_string(spec.max_utterances));
  field(std::to_string(spec.seed));
  auto d = h.digest();
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (auto b : d) {
    out.push_back(hex[b >> 4]);
    out.push_back(hex[b & 0xf]);
  }
  return out;
}

enum class AttemptOutcome { spoke, silent, anomalous_spoke };

inline const char* to_string(AttemptOutcome o) {
  switch (o) {
    case AttemptOutcome::spoke: return "spoke";
    case AttemptOutcome::silent: return "silent";
    case AttemptOutcome::anomalous_spoke: return "anomalous-spoke";
  }
  return "?";
}

// Audit trail of every attempt in the cycle, spoken or not.
struct RunLog {
  struct Attempt {
    std::int64_t index = 0;
    int speaker_id = 1;
    AttemptOutcome outcome = AttemptOutcome::spoke;
  };
  std::vector<Attempt> attempts;
  std::optional<std::string> truncated_reason;  // "silence_cap"

  std::size_t spoke_count() const {
    std::size_t n = 0;
    for (const auto& a : attempts)
      if (a.outcome != AttemptOutcome::silent) ++n;
    return n;
  }
};

struct SimOptions {
  std::optional<double> temperature;
  int silence_cycles = 3;  // consecutive all-silent cycles before giving up
  HistoryStyle history_style = HistoryStyle::kParsed;
  std::optional<std::filesystem::path> checkpoint_dir;
};

namespace detail {

struct SimState {
  Conversation conv;
  RunLog log;
  std::int64_t attempt = 0;
  int consecutive_silent = 0;
};

inline std::filesystem::path checkpoint_path(const std::filesystem::path& dir,
                                             const std::string& id) {
  return dir / (id + ".checkpoint.json");
}

inline void write_checkpoint(const std::filesystem::path& dir, const SimState& st) {
  std::filesystem::create_directories(dir);
  nlohmann::json attempts = nlohmann::json::array();
  for (const auto& a : st.log.attempts)
    attempts.push_back({{"index", a.index},
                        {"speaker_id", a.speaker_id},
                        {"outcome", to_string(a.outcome)}});
  nlohmann::json j{{"conversation", conversation_to_json(st.conv)},
                   {"attempt", st.attempt},
                   {"consecutive_silent", st.consecutive_silent},
                   {"attempts", attempts}};
  const auto path = checkpoint_path(dir, st.conv.id);
  std::ofstream out(path, std::ios::trunc);
  if (out) out << j.dump();
}

inline bool load_checkpoint(const std::filesystem::path& dir, SimState& st) {
  const auto path = checkpoint_path(dir, st.conv.id);
  std::ifstream in(path);
  if (!in) return false;
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception&) {
    return false;  // unreadable checkpoint: start over
  }
  st.conv = conversation_from_json(j.at("conversation"));
  st.attempt = j.at("attempt").get<std::int64_t>();
  st.consecutive_silent = j.at("consecutive_silent").get<int>();
  st.log.attempts.clear();
  for (const auto& a : j.at("attempts")) {
    RunLog::Attempt at;
    at.index = a.at("index").get<std::int64_t>();
    at.speaker_id = a.at("speaker_id").get<int>();
    const std::string o = a.at("outcome").get<std::string>();
    at.outcome = o == "spoke" ? AttemptOutcome::spoke
                              : o == "silent" ? AttemptOutcome::silent
                                              : AttemptOutcome::anomalous_spoke;
    st.log.attempts.push_back(at);
  }
  return true;
}

}  // namespace detail

// Runs one conversation to completion: Person 1 opens with the no-history
// prompt and always records; later attempts cycle through the group with
// the history prompt, and silent replies are skipped without a turn. Stops
// at max_utterances, or truncates after silence_cycles fully silent cycles.
// Provider failures checkpoint the partial conversation before rethrowing
// so a rerun resumes mid-conversation.
inline std::pair<Conversation, RunLog> run_conversation(const ConversationSpec& spec,
                                                        Gateway& gateway,
                                                        const SimOptions& options = {}) {
  if (spec.roles.empty()) throw ConfigError("spec has no roles");
  for (std::size_t i = 0; i < spec.roles.size(); ++i) {
    if (spec.roles[i].agent_id != static_cast<int>(i) + 1)
      throw ConfigError("roles must be ordered Person 1..G");
    if (spec.roles[i].description.empty()) throw ConfigError("role description is empty");
  }
  if (spec.topic.text.empty()) throw ConfigError("topic text is empty");

  const int g = spec.group_size();
  detail::SimState st;
  st.conv.id = spec.id.empty() ? spec_digest(spec) : spec.id;
  st.conv.model_id = spec.model_id;
  st.conv.topic = spec.topic;
  st.conv.roles = spec.roles;
  st.conv.seed = spec.seed;

  if (options.checkpoint_dir) detail::load_checkpoint(*options.checkpoint_dir, st);

  const int silent_cap = options.silence_cycles * g;
  while (static_cast<int>(st.conv.utterances.size()) < spec.max_utterances) {
    const int speaker = speaker_for_attempt(st.attempt, g);
    const SocialRole& role = spec.roles[static_cast<std::size_t>(speaker - 1)];
    const bool has_history = st.attempt != 0;

    GenerationRequest req;
    req.model_id = spec.model_id;
    req.prompt = render_utterance_prompt(
        role, spec.topic, has_history ? format_history(st.conv, options.history_style) : "",
        has_history);
    req.temperature = options.temperature;
    req.sample_tag = "utt/" + st.conv.id + "/" + std::to_string(st.attempt);

    GenerationResponse resp;
    AgentReply reply;
    try {
      resp = gateway.complete(req);
      reply = parse_agent_reply(resp.text);
    } catch (...) {
      if (options.checkpoint_dir) detail::write_checkpoint(*options.checkpoint_dir, st);
      throw;
    }

    // The opening prompt offers no silent option, so a "Stay silent" reply
    // to it is off-protocol; keep it as flagged speech rather than losing
    // the opening turn.
    if (!has_history && reply.kind == ReplyKind::silent) {
      reply.kind = ReplyKind::speak;
      reply.message = detail::trim(resp.text);
      reply.anomalous = true;
    }

    RunLog::Attempt attempt{st.attempt, speaker, AttemptOutcome::spoke};
    if (reply.kind == ReplyKind::speak) {
      Utterance u;
      u.turn_index = static_cast<int>(st.conv.utterances.size()) + 1;
      u.speaker_id = speaker;
      u.text = reply.message;
      u.raw_reply = resp.text;
      st.conv.utterances.push_back(std::move(u));
      attempt.outcome = reply.anomalous ? AttemptOutcome::anomalous_spoke : AttemptOutcome::spoke;
      st.consecutive_silent = 0;
    } else {
      attempt.outcome = AttemptOutcome::silent;
      ++st.consecutive_silent;
    }
    st.log.attempts.push_back(attempt);
    ++st.attempt;

    if (st.consecutive_silent >= silent_cap) {
      st.conv.truncated = true;
      st.log.truncated_reason = "silence_cap";
      break;
    }
  }

  if (options.checkpoint_dir) {
    std::error_code ec;
    std::filesystem::remove(detail::checkpoint_path(*options.checkpoint_dir, st.conv.id), ec);
  }
  return {std::move(st.conv), std::move(st.log)};
}

// ---------------------------------------------------------------------------
// Grid runner
// ---------------------------------------------------------------------------

struct GridOptions {
  SimOptions sim;
  int workers = 1;
  std::optional<int> max_utterances_override;
  std::optional<std::filesystem::path> debate_file;
  std::vector<std::string> keyword_pool;
  std::vector<std::string> persona_pool;
  int conversation_retries = 1;  // extra tries per conversation before moving on
};

struct GridSummary {
  std::size_t planned = 0;
  std::size_t completed = 0;  // newly run this invocation
  std::size_t skipped = 0;    // already present in the store
  std::size_t failed = 0;
  std::map<std::string, std::size_t> per_cell;             // "model|role_source|G" -> count
  std::map<std::string, std::size_t> llm_roles_per_model;  // generated role texts
  std::size_t anomalous_replies = 0;
  std::size_t silent_attempts = 0;
  std::vector<std::string> failures;  // "<conversation id>: <error>"
};

// Executes models x topics x role_sources x group_sizes. Topics are drawn
// once per (model, role source) cell and shared across group sizes; roles
// are drawn fresh per conversation, only after the store-skip check so a
// resumed grid issues no work for conversations it already holds. The
// conversation id is the digest of the grid coordinates, which stays
// stable across reruns even when a provider samples differently.
inline GridSummary run_grid(const ExperimentGrid& grid, ConversationStore& store,
                            Gateway& gateway, const GridOptions& options = {}) {
  GridSummary summary;

  struct PlannedConversation {
    std::string id;
    std::string conv_tag;
    std::string model;
    RoleSource role_source = RoleSource::llm_generated;
    Topic topic;
    int group_size = 2;
    std::string cell;
  };
  std::vector<PlannedConversation> plan;

  for (const auto& model : grid.models) {
    for (const auto role_source : grid.role_sources) {
      const std::string cell_tag =
          "grid/" + std::to_string(grid.seed) + "/" + model + "/" + to_string(role_source);

      std::vector<Topic> topics;
      for (const auto& [topic_source, count] : grid.topic_sources) {
        TopicBuildInputs inputs;
        inputs.gateway = &gateway;
        inputs.model_id = model;
        inputs.temperature = options.sim.temperature;
        inputs.sample_tag_prefix = cell_tag;
        inputs.keyword_pool = options.keyword_pool;
        inputs.debate_file = options.debate_file;
        const std::uint64_t topic_seed =
            sha256_prefix64(cell_tag + "/topics/" + to_string(topic_source));
        auto batch = build_topics(topic_source, count, inputs, topic_seed);
        topics.insert(topics.end(), batch.begin(), batch.end());
      }

      for (std::size_t topic_idx = 0; topic_idx < topics.size(); ++topic_idx) {
        for (const int g : grid.group_sizes) {
          PlannedConversation planned;
          planned.conv_tag = cell_tag + "/" + std::to_string(topic_idx) + "/" +
                             std::to_string(g);
          planned.id = sha256_hex(planned.conv_tag);
          planned.model = model;
          planned.role_source = role_source;
          planned.topic = topics[topic_idx];
          planned.group_size = g;
          planned.cell = model + "|" + to_string(role_source) + "|" + std::to_string(g);
          plan.push_back(std::move(planned));
        }
      }
    }
  }

  summary.planned = plan.size();

  std::atomic<std::size_t> next{0};
  std::mutex summary_mu;
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= plan.size()) return;
      const auto& planned = plan[i];

      if (store.contains(planned.id)) {
        std::lock_guard lk(summary_mu);
        ++summary.skipped;
        ++summary.per_cell[planned.cell];
        if (planned.role_source == RoleSource::llm_generated)
          summary.llm_roles_per_model[planned.model] +=
              static_cast<std::size_t>(planned.group_size);
        continue;
      }

      bool done = false;
      std::string last_error;
      for (int attempt = 0; attempt <= options.conversation_retries && !done; ++attempt) {
        try {
          RoleBuildInputs role_inputs;
          role_inputs.gateway = &gateway;
          role_inputs.model_id = planned.model;
          role_inputs.temperature = options.sim.temperature;
          role_inputs.sample_tag_prefix = planned.conv_tag;
          role_inputs.persona_pool = options.persona_pool;

          ConversationSpec spec;
          spec.id = planned.id;
          spec.model_id = planned.model;
          spec.topic = planned.topic;
          spec.roles = build_roles(planned.role_source, planned.group_size, role_inputs,
                                   sha256_prefix64(planned.conv_tag + "/roles"));
          spec.max_utterances =
              max_utterances_for(planned.group_size, options.max_utterances_override);
          spec.seed = static_cast<std::int64_t>(sha256_prefix64(planned.conv_tag) >> 1);

          auto [conv, log] = run_conversation(spec, gateway, options.sim);
          store.append(conv);
          std::lock_guard lk(summary_mu);
          ++summary.completed;
          ++summary.per_cell[planned.cell];
          if (planned.role_source == RoleSource::llm_generated)
            summary.llm_roles_per_model[planned.model] +=
                static_cast<std::size_t>(planned.group_size);
          for (const auto& a : log.attempts) {
            if (a.outcome == AttemptOutcome::silent) ++summary.silent_attempts;
            if (a.outcome == AttemptOutcome::anomalous_spoke) ++summary.anomalous_replies;
          }
          done = true;
        } catch (const std::exception& e) {
          last_error = e.what();
        }
      }
      if (!done) {
        std::lock_guard lk(summary_mu);
        ++summary.failed;
        summary.failures.push_back(planned.id + ": " + last_error);
      }
    }
  };

  const int n_workers = std::max(1, options.workers);
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(n_workers));
    for (int i = 0; i < n_workers; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  return summary;
}

}  // namespace agora
