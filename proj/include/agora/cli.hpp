#pragma once

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "agora/analysis.hpp"
#include "agora/census.hpp"
#include "agora/config.hpp"
#include "agora/corpus.hpp"
#include "agora/gateway.hpp"
#include "agora/http_provider.hpp"
#include "agora/sim.hpp"
#include "agora/stats.hpp"
#include "agora/version.hpp"

namespace agora::cli {

// exit codes: 0 ok, 2 usage, 3 missing credentials/config, 4 data errors
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitConfig = 3;
inline constexpr int kExitData = 4;

namespace detail {

inline std::shared_ptr<ChatProvider> make_provider(const ProviderConfig& pc) {
  if (pc.type == "mock") {
    if (pc.fixture) return MockChatProvider::from_fixture(*pc.fixture);
    return std::make_shared<MockChatProvider>();
  }
  if (pc.type == "http") {
    if (!pc.endpoint) throw ConfigError("provider '" + pc.name + "' has no endpoint");
    auto key = env_value(pc.key_env);
    if (!key)
      throw CredentialsError("provider '" + pc.name + "' needs the " + pc.key_env +
                             " environment variable");
    return std::make_shared<HttpChatProvider>(pc.name, *pc.endpoint, *key);
  }
  throw ConfigError("provider '" + pc.name + "' has unknown type '" + pc.type + "'");
}

// Models not declared in the config fall back to the mock provider when
// one is configured; ad-hoc offline runs need no config at all.
inline std::unique_ptr<Gateway> make_gateway(const RunConfig& cfg,
                                             const std::vector<std::string>& model_ids) {
  auto gateway = std::make_unique<Gateway>(cfg.cache_dir);
  for (const auto& model : model_ids) {
    if (model.empty()) throw ConfigError("empty model id");
    const ModelConfig* mc = nullptr;
    for (const auto& m : cfg.models)
      if (m.id == model) mc = &m;
    std::string provider_name;
    if (mc) {
      provider_name = mc->provider;
    } else if (cfg.providers.count("mock")) {
      provider_name = "mock";
    } else {
      throw ConfigError("model '" + model + "' is not declared in config");
    }
    const auto& pc = cfg.providers.at(provider_name);
    Gateway::ProviderLimits limits;
    limits.max_in_flight = pc.max_in_flight;
    limits.requests_per_second = pc.requests_per_second;
    gateway->register_model(model, make_provider(pc), limits);
  }
  return gateway;
}

inline std::shared_ptr<Embedder> make_embedder(const EmbedderConfig& ec,
                                               std::optional<std::filesystem::path> cache_dir,
                                               const std::string& override_type) {
  EmbedderConfig cfg = ec;
  if (!override_type.empty()) cfg.type = override_type;
  std::shared_ptr<EmbeddingProvider> provider;
  if (cfg.type == "stub") {
    provider = std::make_shared<StubEmbeddingProvider>(cfg.dim, cfg.seed);
  } else if (cfg.type == "http") {
    if (!cfg.endpoint) throw ConfigError("http embedder needs an endpoint");
    auto key = env_value(cfg.key_env);
    if (!key)
      throw CredentialsError("http embedder needs the " + cfg.key_env +
                             " environment variable");
    provider = std::make_shared<HttpEmbeddingProvider>(cfg.model, *cfg.endpoint, *key, cfg.dim);
  } else {
    throw ConfigError("unknown embedder type '" + cfg.type + "'");
  }
  return std::make_shared<Embedder>(provider, cache_dir);
}

inline RunConfig config_or_default(const std::string& path) {
  if (!path.empty()) return load_config(path);
  RunConfig cfg;
  ProviderConfig mock;
  mock.name = "mock";
  mock.type = "mock";
  cfg.providers["mock"] = mock;
  return cfg;
}

inline ValenceLexicon valence_lexicon_for(const RunConfig& cfg, const std::string& flag_path) {
  std::filesystem::path path = !flag_path.empty()
                                   ? std::filesystem::path(flag_path)
                                   : cfg.valence_lexicon.value_or("data/vader_lexicon.txt");
  return load_valence_lexicon(path);
}

inline void write_pool(const std::vector<std::string>& pool,
                       const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write pool file: " + path.string());
  for (const auto& entry : pool) out << entry << '\n';
}

inline Provenance provenance_for(const RunConfig& cfg) {
  return Provenance{cfg.digest.empty() ? "unconfigured" : cfg.digest, cfg.seed};
}

}  // namespace detail

inline int run(std::vector<std::string> args) {
  CLI::App app{"agora: role-conditioned chatroom simulation and transcript measurement"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  std::string config_path;
  app.add_option("--config", config_path, "run configuration JSON")->envname("AGORA_CONFIG");
  // let `agora <cmd> --config ...` reach the parent option
  app.fallthrough();

  // ---- topics ----
  auto* topics_cmd = app.add_subcommand("topics", "generate or sample chat topics");
  std::string topics_source = "llm";
  int topics_count = 10;
  std::string topics_model;
  std::string topics_out = "topics.jsonl";
  std::string topics_debate, topics_keywords;
  std::uint64_t topics_seed = 0;
  topics_cmd->add_option("--source", topics_source,
                         "llm | topicalchat_keywords | debate");
  topics_cmd->add_option("--count", topics_count, "topics to draw");
  topics_cmd->add_option("--model", topics_model, "generator model id (llm source)");
  topics_cmd->add_option("--out", topics_out, "output JSONL");
  topics_cmd->add_option("--debate-file", topics_debate, "debate topics file");
  topics_cmd->add_option("--keywords", topics_keywords, "keyword pool file");
  topics_cmd->add_option("--seed", topics_seed, "sampling seed");

  // ---- roles ----
  auto* roles_cmd = app.add_subcommand("roles", "generate or sample social roles");
  std::string roles_source = "llm_generated";
  int roles_group = 2;
  std::string roles_model;
  std::string roles_out = "roles.jsonl";
  std::string roles_personas;
  std::uint64_t roles_seed = 0;
  roles_cmd->add_option("--source", roles_source, "llm_generated | personachat");
  roles_cmd->add_option("--group-size", roles_group, "number of agents");
  roles_cmd->add_option("--model", roles_model, "generator model id");
  roles_cmd->add_option("--out", roles_out, "output JSONL");
  roles_cmd->add_option("--personas", roles_personas, "persona pool file");
  roles_cmd->add_option("--seed", roles_seed, "sampling seed");

  // ---- simulate ----
  auto* sim_cmd = app.add_subcommand("simulate", "run the configured conversation grid");
  std::string sim_store;
  int sim_workers = 0;
  sim_cmd->add_option("--store", sim_store, "conversation store (JSONL, appended)");
  sim_cmd->add_option("--workers", sim_workers, "parallel conversations");

  // ---- ingest ----
  auto* ingest_cmd = app.add_subcommand("ingest", "convert a human corpus into the store format");
  std::string ingest_kind, ingest_path, ingest_out = "human.jsonl";
  std::string ingest_persona_out, ingest_keyword_out;
  ingest_cmd->add_option("--kind", ingest_kind, "personachat | topicalchat")->required();
  ingest_cmd->add_option("--path", ingest_path, "dataset file or root")->required();
  ingest_cmd->add_option("--out", ingest_out, "output store JSONL");
  ingest_cmd->add_option("--persona-pool-out", ingest_persona_out, "write persona pool here");
  ingest_cmd->add_option("--keyword-pool-out", ingest_keyword_out, "write keyword pool here");

  // ---- analyze ----
  auto* analyze_cmd = app.add_subcommand("analyze", "measure a transcript store");
  std::string analyze_kind;
  analyze_cmd
      ->add_option("kind", analyze_kind,
                   "similarity | matrix | keywords | sentiment | categories | prefs")
      ->required();
  std::string analyze_store, analyze_out = "analysis";
  std::string analyze_embedder;  // "" = config, "stub"/"http" override
  std::string analyze_valence, analyze_catlex;
  std::string prefs_path, prefs_scale = "prism", prefs_dataset;
  bool prefs_no_alignment = false;
  analyze_cmd->add_option("--store", analyze_store, "conversation store JSONL");
  analyze_cmd->add_option("--out", analyze_out, "output directory");
  analyze_cmd->add_option("--embedder", analyze_embedder, "stub | http (overrides config)");
  analyze_cmd->add_option("--valence-lexicon", analyze_valence, "valence lexicon file");
  analyze_cmd->add_option("--category-lexicon", analyze_catlex, "category .dic file");
  analyze_cmd->add_option("--prefs-path", prefs_path, "preference dataset JSONL (prefs)");
  analyze_cmd->add_option("--scale", prefs_scale, "prism | ultrafeedback (prefs)");
  analyze_cmd->add_option("--dataset", prefs_dataset, "dataset label for prefs samples");
  analyze_cmd->add_flag("--no-alignment", prefs_no_alignment,
                        "skip prompt-response alignment (prefs)");

  // ---- classify-roles ----
  auto* census_cmd = app.add_subcommand("classify-roles",
                                        "ISCO-code generated roles with a judge model");
  std::string census_store, census_out = "census";
  std::string census_judge;
  std::string census_manual, census_reference;
  bool census_all_roles = false;
  census_cmd->add_option("--store", census_store, "conversation store JSONL")->required();
  census_cmd->add_option("--out", census_out, "output directory");
  census_cmd->add_option("--judge-model", census_judge, "judge model id");
  census_cmd->add_option("--manual", census_manual, "manual labels TSV for agreement");
  census_cmd->add_option("--reference", census_reference, "reference shares TSV");
  census_cmd->add_flag("--all-roles", census_all_roles,
                       "classify every role, not only generated ones");

  // ---- report ----
  auto* report_cmd = app.add_subcommand("report", "emit per-figure tables from samples");
  std::string report_figure, report_samples = "analysis", report_out = "report";
  std::string report_reference;
  report_cmd->add_option("figure", report_figure, "fig1..fig7")->required();
  report_cmd->add_option("--samples", report_samples, "directory of samples_*.jsonl");
  report_cmd->add_option("--out", report_out, "output directory");
  report_cmd->add_option("--reference", report_reference, "reference shares TSV (fig1)");

  try {
    std::vector<const char*> argv;
    argv.push_back("agora");
    for (const auto& a : args) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help() << std::endl;
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    std::cout << kVersion << std::endl;
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitUsage;
  }

  try {
    RunConfig cfg = detail::config_or_default(config_path);

    // ---------------- topics ----------------
    if (topics_cmd->parsed()) {
      const TopicSource source = topic_source_from_string(topics_source);
      const std::string model =
          !topics_model.empty() ? topics_model
                                : (!cfg.models.empty() ? cfg.models[0].id : "mock-model");
      std::unique_ptr<Gateway> gateway;
      if (source == TopicSource::llm) gateway = detail::make_gateway(cfg, {model});
      TopicBuildInputs inputs;
      inputs.gateway = gateway.get();
      inputs.model_id = model;
      inputs.temperature = cfg.temperature;
      inputs.sample_tag_prefix = "cli";
      if (!topics_keywords.empty())
        inputs.keyword_pool = load_line_pool(topics_keywords);
      else if (cfg.keyword_pool)
        inputs.keyword_pool = load_line_pool(*cfg.keyword_pool);
      if (!topics_debate.empty())
        inputs.debate_file = topics_debate;
      else
        inputs.debate_file = cfg.debate_topics;
      const auto topics = build_topics(source, topics_count, inputs,
                                       topics_seed ? topics_seed
                                                   : static_cast<std::uint64_t>(cfg.seed));
      std::ofstream out(topics_out, std::ios::trunc);
      if (!out) throw IoError("cannot write " + topics_out);
      for (const auto& t : topics)
        out << nlohmann::json{{"text", t.text}, {"source", to_string(t.source)}}.dump() << '\n';
      std::cout << "wrote " << topics.size() << " topics -> " << topics_out << std::endl;
      return kExitOk;
    }

    // ---------------- roles ----------------
    if (roles_cmd->parsed()) {
      const RoleSource source = role_source_from_string(roles_source);
      const std::string model =
          !roles_model.empty() ? roles_model
                               : (!cfg.models.empty() ? cfg.models[0].id : "mock-model");
      std::unique_ptr<Gateway> gateway;
      if (source == RoleSource::llm_generated) gateway = detail::make_gateway(cfg, {model});
      RoleBuildInputs inputs;
      inputs.gateway = gateway.get();
      inputs.model_id = model;
      inputs.temperature = cfg.temperature;
      inputs.sample_tag_prefix = "cli";
      if (!roles_personas.empty())
        inputs.persona_pool = load_line_pool(roles_personas);
      else if (cfg.persona_pool)
        inputs.persona_pool = load_line_pool(*cfg.persona_pool);
      const auto roles = build_roles(source, roles_group, inputs,
                                     roles_seed ? roles_seed
                                                : static_cast<std::uint64_t>(cfg.seed));
      std::ofstream out(roles_out, std::ios::trunc);
      if (!out) throw IoError("cannot write " + roles_out);
      for (const auto& r : roles)
        out << nlohmann::json{{"agent_id", r.agent_id},
                              {"description", r.description},
                              {"source", to_string(r.source)}}
                   .dump()
            << '\n';
      std::cout << "wrote " << roles.size() << " roles -> " << roles_out << std::endl;
      return kExitOk;
    }

    // ---------------- simulate ----------------
    if (sim_cmd->parsed()) {
      if (config_path.empty()) throw ConfigError("simulate needs --config");
      if (cfg.grid.models.empty() || cfg.grid.group_sizes.empty() ||
          cfg.grid.role_sources.empty() || cfg.grid.topic_sources.empty())
        throw ConfigError("config grid is incomplete (models/group_sizes/role_sources/"
                          "topic_sources)");
      auto gateway = detail::make_gateway(cfg, cfg.grid.models);
      GridOptions options;
      options.sim.temperature = cfg.temperature;
      options.sim.silence_cycles = cfg.silence_cycles;
      options.sim.checkpoint_dir = cfg.checkpoint_dir;
      options.workers = sim_workers > 0 ? sim_workers : cfg.workers;
      options.max_utterances_override = cfg.max_utterances_override;
      options.debate_file = cfg.debate_topics;
      if (cfg.keyword_pool) options.keyword_pool = load_line_pool(*cfg.keyword_pool);
      if (cfg.persona_pool) options.persona_pool = load_line_pool(*cfg.persona_pool);

      ConversationStore store(sim_store.empty() ? cfg.store
                                                : std::filesystem::path(sim_store));
      const auto summary = run_grid(cfg.grid, store, *gateway, options);

      nlohmann::json cells = nlohmann::json::object();
      for (const auto& [cell, count] : summary.per_cell) cells[cell] = count;
      nlohmann::json roles_per_model = nlohmann::json::object();
      for (const auto& [model, count] : summary.llm_roles_per_model)
        roles_per_model[model] = count;
      nlohmann::json j{{"planned", summary.planned},
                       {"completed", summary.completed},
                       {"skipped", summary.skipped},
                       {"failed", summary.failed},
                       {"per_cell", cells},
                       {"llm_roles_per_model", roles_per_model},
                       {"anomalous_replies", summary.anomalous_replies},
                       {"silent_attempts", summary.silent_attempts},
                       {"failures", summary.failures},
                       {"provenance",
                        {{"config_digest", cfg.digest},
                         {"seed", cfg.seed},
                         {"tool_version", kVersion}}}};
      const auto summary_path = store.path().string() + ".summary.json";
      std::ofstream out(summary_path, std::ios::trunc);
      out << j.dump(2) << '\n';
      std::cout << "grid: " << summary.completed << " new, " << summary.skipped
                << " already stored, " << summary.failed << " failed ("
                << summary.planned << " planned); summary -> " << summary_path << std::endl;
      return summary.failed == 0 ? kExitOk : kExitData;
    }

    // ---------------- ingest ----------------
    if (ingest_cmd->parsed()) {
      HumanCorpus corpus;
      if (ingest_kind == "personachat")
        corpus = load_personachat(ingest_path);
      else if (ingest_kind == "topicalchat")
        corpus = load_topicalchat(ingest_path);
      else
        throw ConfigError("unknown ingest kind '" + ingest_kind + "'");
      save_conversations(corpus.dialogues, ingest_out);
      if (!ingest_persona_out.empty()) detail::write_pool(corpus.persona_pool, ingest_persona_out);
      if (!ingest_keyword_out.empty()) detail::write_pool(corpus.keyword_pool, ingest_keyword_out);
      std::cout << corpus.name << ": " << corpus.dialogues.size() << " dialogues, "
                << corpus.utterance_count() << " utterances -> " << ingest_out << std::endl;
      return kExitOk;
    }

    // ---------------- analyze ----------------
    if (analyze_cmd->parsed()) {
      if (analyze_kind.empty()) throw ConfigError("analyze needs a kind");
      std::filesystem::create_directories(analyze_out);
      const auto prov = detail::provenance_for(cfg);
      EmitOptions emit;
      emit.provenance = prov;

      if (analyze_kind == "prefs") {
        if (prefs_path.empty()) throw ConfigError("analyze prefs needs --prefs-path");
        const auto scale = prefs_scale == "ultrafeedback" ? PreferenceScale::ultrafeedback_0_10
                                                          : PreferenceScale::prism_0_100;
        const auto records = load_preference_records(prefs_path, scale);
        const auto lexicon = detail::valence_lexicon_for(cfg, analyze_valence);
        std::shared_ptr<Embedder> embedder;
        if (!prefs_no_alignment)
          embedder = detail::make_embedder(cfg.embedder, cfg.cache_dir, analyze_embedder);
        const std::string dataset = !prefs_dataset.empty()
                                        ? prefs_dataset
                                        : std::filesystem::path(prefs_path).stem().string();
        const auto analysis =
            preference_samples(records, lexicon, embedder.get(), dataset);
        save_samples(analysis.samples,
                     std::filesystem::path(analyze_out) / "samples_prefs.jsonl");
        emit_tables(analysis.samples, "fig7", analyze_out, emit);
        std::cout << dataset << ": " << records.size() << " records, "
                  << analysis.preferred << " preferred, " << analysis.dispreferred
                  << " dispreferred, " << analysis.excluded << " excluded" << std::endl;
        return kExitOk;
      }

      if (analyze_store.empty()) throw ConfigError("analyze needs --store");
      const auto convs = load_conversations(analyze_store);
      if (convs.empty()) throw EmptyInput("store is empty: " + analyze_store);

      if (analyze_kind == "similarity") {
        auto embedder = detail::make_embedder(cfg.embedder, cfg.cache_dir, analyze_embedder);
        const auto analysis = similarity_samples(convs, *embedder);
        save_samples(analysis.samples,
                     std::filesystem::path(analyze_out) / "samples_similarity.jsonl");
        emit_tables(analysis.samples, "fig2", analyze_out, emit);
        std::cout << "similarity: " << analysis.samples.size() << " samples ("
                  << analysis.skipped_too_short << " conversations too short)" << std::endl;
      } else if (analyze_kind == "matrix") {
        auto embedder = detail::make_embedder(cfg.embedder, cfg.cache_dir, analyze_embedder);
        const auto samples = matrix_samples(convs, *embedder);
        save_samples(samples, std::filesystem::path(analyze_out) / "samples_matrix.jsonl");
        emit_tables(samples, "fig3", analyze_out, emit);
        // per-G and overall matrix exports
        std::set<int> sizes;
        for (const auto& c : convs) sizes.insert(c.group_size());
        auto write_matrix = [&](const SimilarityMatrix& m, const std::string& name) {
          auto out = agora::detail::open_artifact(
              std::filesystem::path(analyze_out) / name, prov);
          out << "i,j,mean,count\n";
          for (int i = 0; i < m.size; ++i)
            for (int jx = 0; jx < m.size; ++jx)
              if (m.defined(i, jx))
                out << (i + 1) << ',' << (jx + 1) << ','
                    << m.entries[static_cast<std::size_t>(i)][static_cast<std::size_t>(jx)]
                    << ','
                    << m.counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(jx)]
                    << '\n';
        };
        for (int g : sizes)
          write_matrix(turn_similarity_matrix(convs, *embedder, g),
                       "matrix_G" + std::to_string(g) + ".csv");
        write_matrix(turn_similarity_matrix(convs, *embedder), "matrix_all.csv");
        std::cout << "matrix: " << samples.size() << " pairwise samples, "
                  << sizes.size() + 1 << " matrices" << std::endl;
      } else if (analyze_kind == "keywords") {
        StubKeywordExtractor extractor(cfg.keywords_k);
        const auto samples = keyword_samples(convs, extractor);
        save_samples(samples, std::filesystem::path(analyze_out) / "samples_keywords.jsonl");
        emit_tables(samples, "fig4", analyze_out, emit);
        std::cout << "keywords: " << samples.size() << " (conversation, keyword) samples"
                  << std::endl;
      } else if (analyze_kind == "sentiment") {
        const auto lexicon = detail::valence_lexicon_for(cfg, analyze_valence);
        const auto samples = sentiment_samples(convs, lexicon);
        save_samples(samples, std::filesystem::path(analyze_out) / "samples_sentiment.jsonl");
        emit_tables(samples, "fig5", analyze_out, emit);
        std::cout << "sentiment: " << samples.size() << " utterance samples" << std::endl;
      } else if (analyze_kind == "categories") {
        std::filesystem::path dic = !analyze_catlex.empty()
                                        ? std::filesystem::path(analyze_catlex)
                                        : cfg.category_lexicon.value_or(
                                              "data/liwc_open_test.dic");
        const auto lexicon = load_category_lexicon(dic);
        const auto samples = category_samples(convs, lexicon);
        save_samples(samples, std::filesystem::path(analyze_out) / "samples_categories.jsonl");
        emit_tables(samples, "fig5", analyze_out, emit);
        std::cout << "categories: " << samples.size() << " samples" << std::endl;
      } else {
        throw ConfigError("unknown analysis kind '" + analyze_kind + "'");
      }
      return kExitOk;
    }

    // ---------------- classify-roles ----------------
    if (census_cmd->parsed()) {
      const auto convs = load_conversations(census_store);
      std::string judge = !census_judge.empty() ? census_judge : cfg.judge_model;
      if (judge.empty()) throw ConfigError("classify-roles needs --judge-model or config judge");
      auto gateway = detail::make_gateway(cfg, {judge});
      std::filesystem::create_directories(census_out);

      std::vector<IscoJudgment> judgments;
      std::map<std::string, std::string> role_models;
      for (const auto& conv : convs) {
        for (const auto& role : conv.roles) {
          if (!census_all_roles && role.source != RoleSource::llm_generated) continue;
          const std::string role_id = conv.id + "#" + std::to_string(role.agent_id);
          judgments.push_back(classify_role(role, judge, *gateway, role_id));
          role_models[role_id] = conv.model_id;
        }
      }
      if (judgments.empty()) throw EmptyInput("no roles to classify in " + census_store);

      std::ofstream jout(std::filesystem::path(census_out) / "judgments.jsonl",
                         std::ios::trunc);
      for (const auto& j : judgments) {
        nlohmann::json runs = nlohmann::json::array();
        for (const auto& r : j.runs)
          runs.push_back({{"raw_reply", r.raw_reply},
                          {"code", r.code ? nlohmann::json(*r.code) : nlohmann::json()}});
        jout << nlohmann::json{{"role_id", j.role_id},
                               {"judge_model", j.judge_model},
                               {"runs", runs},
                               {"final", j.final ? nlohmann::json(*j.final) : nlohmann::json()}}
                    .dump()
             << '\n';
      }

      const auto cens = census(judgments);
      std::optional<ReferenceShares> ref;
      if (!census_reference.empty())
        ref = load_reference_shares(census_reference);
      else if (cfg.reference_shares)
        ref = load_reference_shares(*cfg.reference_shares);

      auto out = agora::detail::open_artifact(
          std::filesystem::path(census_out) / "census.csv", detail::provenance_for(cfg));
      out << "code,count,share,reference_share,diff\n";
      const auto shares = cens.shares();
      for (const auto& [code, count] : cens.counts) {
        const double share = shares.at(code);
        double refshare = 0.0;
        if (ref) {
          auto it = ref->shares.find(code);
          if (it != ref->shares.end()) refshare = it->second;
        }
        out << code << ',' << count << ',' << share << ',' << refshare << ','
            << (share - refshare) << '\n';
      }

      const auto samples = role_code_samples(judgments, role_models);
      save_samples(samples, std::filesystem::path(census_out) / "samples_roles.jsonl");

      std::cout << "classified " << judgments.size() << " roles (" << cens.unresolved
                << " unresolved), merged 6/9 share " << cens.merged_69_share() << std::endl;
      if (ref) {
        const auto divergence = compare_distribution(cens, *ref);
        std::cout << "total variation vs " << ref->label << ": "
                  << divergence.total_variation << std::endl;
      }
      if (!census_manual.empty()) {
        const auto agreement = agreement_with_manual(census_manual, judgments);
        std::cout << "agreement with manual labels: " << agreement.percentage() << "% over "
                  << agreement.compared << " roles" << std::endl;
      }
      return kExitOk;
    }

    // ---------------- report ----------------
    if (report_cmd->parsed()) {
      std::vector<MetricSample> samples;
      for (const auto& entry : std::filesystem::directory_iterator(report_samples)) {
        const auto name = entry.path().filename().string();
        if (name.rfind("samples_", 0) == 0 && entry.path().extension() == ".jsonl") {
          auto batch = load_samples(entry.path());
          samples.insert(samples.end(), batch.begin(), batch.end());
        }
      }
      EmitOptions emit;
      emit.provenance = detail::provenance_for(cfg);
      if (!report_reference.empty()) {
        emit.reference_shares = load_reference_shares(report_reference).shares;
      } else if (cfg.reference_shares) {
        emit.reference_shares = load_reference_shares(*cfg.reference_shares).shares;
      }
      const auto written = emit_tables(samples, report_figure, report_out, emit);
      for (const auto& f : written) std::cout << "wrote " << f.string() << std::endl;
      return kExitOk;
    }

    std::cerr << "error: no subcommand" << std::endl;
    return kExitUsage;
  } catch (const CredentialsError& e) {
    std::cerr << "credentials error: " << e.what() << std::endl;
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return kExitConfig;
  } catch (const UnknownFigure& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitData;
  }
}

}  // namespace agora::cli
