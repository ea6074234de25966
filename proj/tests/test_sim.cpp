#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "agora/corpus.hpp"
#include "agora/sim.hpp"

using namespace agora;

namespace {

std::filesystem::path temp_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() /
             ("agora_sim_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

ConversationSpec spec_for(int g, int max_utterances) {
  ConversationSpec spec;
  spec.model_id = "m";
  spec.topic = {"city parks", TopicSource::llm};
  for (int i = 1; i <= g; ++i)
    spec.roles.push_back({i, "Person " + std::to_string(i) + " persona",
                          RoleSource::llm_generated});
  spec.max_utterances = max_utterances;
  spec.seed = 7;
  return spec;
}

// scripted provider that answers per speaker, keyed off "Person {i}" in
// the prompt header
class SpeakerScript : public ChatProvider {
 public:
  explicit SpeakerScript(std::map<int, std::string> replies) : replies_(std::move(replies)) {}
  std::string name() const override { return "script"; }
  std::string generate(const GenerationRequest& req) override {
    const auto pos = req.prompt.find("Person ");
    const int speaker = std::stoi(req.prompt.substr(pos + 7));
    auto it = replies_.find(speaker);
    return it != replies_.end() ? it->second : "Speak: ok";
  }

 private:
  std::map<int, std::string> replies_;
};

}  // namespace

TEST_CASE("all-speaking dyad fills the utterance cap in strict alternation") {
  Gateway gateway;
  gateway.register_model("m", std::make_shared<MockChatProvider>());
  auto [conv, log] = run_conversation(spec_for(2, max_utterances_for(2)), gateway);

  REQUIRE(conv.utterances.size() == 30);
  CHECK_FALSE(conv.truncated);
  for (std::size_t i = 0; i < conv.utterances.size(); ++i) {
    CHECK(conv.utterances[i].turn_index == static_cast<int>(i) + 1);
    CHECK(conv.utterances[i].speaker_id == static_cast<int>(i % 2) + 1);
  }
  CHECK(log.spoke_count() == 30);
  CHECK_NOTHROW(validate_conversation(conv));
}

TEST_CASE("silent speakers are skipped without recording a turn") {
  Gateway gateway;
  gateway.register_model(
      "m", std::make_shared<SpeakerScript>(std::map<int, std::string>{{2, "Stay silent"}}));
  auto [conv, log] = run_conversation(spec_for(3, 6), gateway);

  REQUIRE(conv.utterances.size() == 6);
  const std::vector<int> expected = {1, 3, 1, 3, 1, 3};
  for (std::size_t i = 0; i < expected.size(); ++i)
    CHECK(conv.utterances[i].speaker_id == expected[i]);
  for (const auto& u : conv.utterances) CHECK(u.speaker_id != 2);
  CHECK_NOTHROW(validate_conversation(conv, 6));

  // the run log still shows Person 2's silent attempts
  bool any_silent = false;
  for (const auto& a : log.attempts)
    if (a.speaker_id == 2) {
      CHECK(a.outcome == AttemptOutcome::silent);
      any_silent = true;
    }
  CHECK(any_silent);
}

TEST_CASE("a fully silent group truncates after three silent cycles") {
  // everyone silent after the opener
  Gateway gateway;
  gateway.register_model("m", std::make_shared<SpeakerScript>(std::map<int, std::string>{
                                  {1, "Stay silent"},
                                  {2, "Stay silent"},
                                  {3, "Stay silent"},
                                  {4, "Stay silent"}}));
  auto [conv, log] = run_conversation(spec_for(4, 30), gateway);

  CHECK(conv.utterances.size() == 1);  // the opening attempt always records
  CHECK(conv.truncated);
  REQUIRE(log.truncated_reason.has_value());
  CHECK(*log.truncated_reason == "silence_cap");
  CHECK(log.attempts.size() == 1 + 12);  // opener + 3 cycles x 4 agents
}

TEST_CASE("attempt log speakers follow the cycle") {
  Gateway gateway;
  gateway.register_model("m", std::make_shared<MockChatProvider>());
  auto [conv, log] = run_conversation(spec_for(5, 30), gateway);
  for (const auto& a : log.attempts)
    CHECK(a.speaker_id == speaker_for_attempt(a.index, 5));
  CHECK(log.spoke_count() == conv.utterances.size());
}

TEST_CASE("opening attempt answers the no-history prompt and always records") {
  // Person 1 scripted to reply "Stay silent" even to the opener
  Gateway gateway;
  auto mock = std::make_shared<MockChatProvider>();
  mock->push_reply("Stay silent");
  mock->push_reply("Speak: then we talk");
  mock->push_reply("Speak: and talk");
  gateway.register_model("m", mock);

  auto [conv, log] = run_conversation(spec_for(2, 3), gateway);
  REQUIRE(conv.utterances.size() == 3);
  CHECK(conv.utterances[0].speaker_id == 1);
  CHECK(conv.utterances[0].text == "Stay silent");  // kept as flagged speech
  CHECK(log.attempts[0].outcome == AttemptOutcome::anomalous_spoke);
}

TEST_CASE("conversations are deterministic for a seeded mock") {
  auto run_once = [] {
    Gateway gateway;
    gateway.register_model("m", std::make_shared<MockChatProvider>());
    return run_conversation(spec_for(3, 12), gateway).first;
  };
  const Conversation a = run_once();
  const Conversation b = run_once();
  CHECK(conversation_to_json(a).dump() == conversation_to_json(b).dump());
}

namespace {

// succeeds `budget` times, then fails every call
struct FailAfter : ChatProvider {
  std::shared_ptr<MockChatProvider> inner;
  std::atomic<int> budget;
  FailAfter(std::shared_ptr<MockChatProvider> i, int b) : inner(std::move(i)), budget(b) {}
  std::string name() const override { return "mock"; }
  std::string generate(const GenerationRequest& req) override {
    if (budget.fetch_sub(1) <= 0) throw RateLimited("down");
    return inner->generate(req);
  }
};

}  // namespace

TEST_CASE("provider failure checkpoints and a rerun resumes mid-conversation") {
  const auto ckpt = temp_dir("ckpt");
  SimOptions options;
  options.checkpoint_dir = ckpt;

  auto spec = spec_for(2, 6);
  {
    auto scripted = std::make_shared<MockChatProvider>();
    scripted->push_reply("Speak: one");
    scripted->push_reply("Speak: two");
    Gateway gateway(std::nullopt, RetryPolicy{1, std::chrono::milliseconds(1), 2.0});
    gateway.register_model("m", std::make_shared<FailAfter>(scripted, 2));
    CHECK_THROWS_AS(run_conversation(spec, gateway, options), RateLimited);
  }

  // checkpoint exists and holds the two recorded turns
  bool checkpoint_found = false;
  for (const auto& e : std::filesystem::directory_iterator(ckpt))
    if (e.path().extension() == ".json") checkpoint_found = true;
  CHECK(checkpoint_found);

  {
    Gateway gateway;
    gateway.register_model("m", std::make_shared<MockChatProvider>());
    auto [conv, log] = run_conversation(spec, gateway, options);
    REQUIRE(conv.utterances.size() == 6);
    CHECK(conv.utterances[0].text == "one");
    CHECK(conv.utterances[1].text == "two");
    CHECK_NOTHROW(validate_conversation(conv, 6));
  }
  // completed run removes its checkpoint
  std::size_t leftover = 0;
  for (const auto& e : std::filesystem::directory_iterator(ckpt)) {
    (void)e;
    ++leftover;
  }
  CHECK(leftover == 0);
  std::filesystem::remove_all(ckpt);
}

TEST_CASE("keyword topics sample three distinct pool entries") {
  TopicBuildInputs inputs;
  inputs.keyword_pool = {"Telephone", "Google", "Human", "Park"};
  const auto topics = build_topics(TopicSource::topicalchat_keywords, 1, inputs, 99);
  REQUIRE(topics.size() == 1);
  CHECK(topics[0].source == TopicSource::topicalchat_keywords);

  // exactly 3 comma-joined distinct pool keywords
  std::vector<std::string> parts;
  std::stringstream ss(topics[0].text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.rfind(' ', 0) == 0) part.erase(0, 1);
    parts.push_back(part);
  }
  REQUIRE(parts.size() == 3);
  std::set<std::string> distinct(parts.begin(), parts.end());
  CHECK(distinct.size() == 3);
  for (const auto& p : parts)
    CHECK(std::find(inputs.keyword_pool.begin(), inputs.keyword_pool.end(), p) !=
          inputs.keyword_pool.end());
}

TEST_CASE("debate topics load the whole file") {
  const auto dir = temp_dir("debate");
  const auto file = dir / "debate.txt";
  {
    std::ofstream out(file);
    for (int i = 1; i <= 30; ++i) out << "Debate topic " << i << "?\n";
  }
  TopicBuildInputs inputs;
  inputs.debate_file = file;
  const auto topics = build_topics(TopicSource::debate, 0, inputs, 1);
  CHECK(topics.size() == 30);
  CHECK(topics[0].source == TopicSource::debate);

  inputs.debate_file = dir / "missing.txt";
  CHECK_THROWS_AS(build_topics(TopicSource::debate, 0, inputs, 1), MissingDebateFile);
  std::filesystem::remove_all(dir);
}

TEST_CASE("llm topics draw through the gateway") {
  Gateway gateway;
  gateway.register_model("m", std::make_shared<MockChatProvider>());
  TopicBuildInputs inputs;
  inputs.gateway = &gateway;
  inputs.model_id = "m";
  inputs.sample_tag_prefix = "t";
  const auto topics = build_topics(TopicSource::llm, 10, inputs, 3);
  CHECK(topics.size() == 10);
  std::set<std::string> texts;
  for (const auto& t : topics) {
    CHECK(t.source == TopicSource::llm);
    texts.insert(t.text);
  }
  CHECK(texts.size() == 10);  // distinct draws despite one prompt
}

TEST_CASE("llm-generated roles are named in order") {
  Gateway gateway;
  gateway.register_model("m", std::make_shared<MockChatProvider>());
  RoleBuildInputs inputs;
  inputs.gateway = &gateway;
  inputs.model_id = "m";
  inputs.sample_tag_prefix = "r";
  const auto roles = build_roles(RoleSource::llm_generated, 3, inputs, 5);
  REQUIRE(roles.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(roles[static_cast<std::size_t>(i)].agent_id == i + 1);
    CHECK(roles[static_cast<std::size_t>(i)].description.find(
              "Person " + std::to_string(i + 1)) != std::string::npos);
    CHECK(roles[static_cast<std::size_t>(i)].source == RoleSource::llm_generated);
  }
}

TEST_CASE("personachat roles sample distinct personas") {
  RoleBuildInputs inputs;
  inputs.persona_pool = {"I like tea; I ski", "I paint; I run", "I cook; I read",
                         "I sing; I hike"};
  const auto roles = build_roles(RoleSource::personachat, 2, inputs, 11);
  REQUIRE(roles.size() == 2);
  CHECK(roles[0].description != roles[1].description);
  CHECK(roles[0].source == RoleSource::personachat);

  CHECK_THROWS_AS(build_roles(RoleSource::personachat, 5, inputs, 11), EmptyPool);
  inputs.persona_pool.clear();
  CHECK_THROWS_AS(build_roles(RoleSource::personachat, 2, inputs, 11), EmptyPool);
}

TEST_CASE("grid executes the full plan and resumes for free") {
  const auto dir = temp_dir("grid");
  ExperimentGrid grid;
  grid.models = {"m1", "m2"};
  grid.topic_sources = {{TopicSource::topicalchat_keywords, 2}};
  grid.role_sources = {RoleSource::llm_generated, RoleSource::personachat};
  grid.group_sizes = {2, 3};
  grid.seed = 42;

  GridOptions options;
  options.keyword_pool = {"a", "b", "c", "d", "e"};
  options.persona_pool = {"p1", "p2", "p3", "p4"};
  options.max_utterances_override = 4;

  const auto cache = dir / "cache";
  {
    Gateway gateway(cache);
    gateway.register_model("m1", std::make_shared<MockChatProvider>());
    gateway.register_model("m2", std::make_shared<MockChatProvider>());
    ConversationStore store(dir / "store.jsonl");
    const auto summary = run_grid(grid, store, gateway, options);
    CHECK(summary.planned == 2 * 2 * 2 * 2);  // models x topics x role sources x sizes
    CHECK(summary.completed == 16);
    CHECK(summary.failed == 0);
    // generated roles per model: topics x sum(sizes) = 2 x 5
    CHECK(summary.llm_roles_per_model.at("m1") == 10);
    CHECK(summary.llm_roles_per_model.at("m2") == 10);
    CHECK(store.size() == 16);
  }
  {
    Gateway gateway(cache);
    gateway.register_model("m1", std::make_shared<MockChatProvider>());
    gateway.register_model("m2", std::make_shared<MockChatProvider>());
    ConversationStore store(dir / "store.jsonl");
    const auto summary = run_grid(grid, store, gateway, options);
    CHECK(summary.completed == 0);
    CHECK(summary.skipped == 16);
    CHECK(gateway.stats().live_calls.load() == 0);  // warm cache, no live calls
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("grid workers parallelize safely") {
  const auto dir = temp_dir("gridpar");
  ExperimentGrid grid;
  grid.models = {"m"};
  grid.topic_sources = {{TopicSource::topicalchat_keywords, 4}};
  grid.role_sources = {RoleSource::personachat};
  grid.group_sizes = {2, 3};
  grid.seed = 1;

  GridOptions options;
  options.workers = 4;
  options.keyword_pool = {"a", "b", "c", "d"};
  options.persona_pool = {"p1", "p2", "p3"};
  options.max_utterances_override = 3;

  Gateway gateway;
  gateway.register_model("m", std::make_shared<MockChatProvider>());
  ConversationStore store(dir / "store.jsonl");
  const auto summary = run_grid(grid, store, gateway, options);
  CHECK(summary.completed == 8);
  CHECK(load_conversations(dir / "store.jsonl").size() == 8);
  std::filesystem::remove_all(dir);
}
