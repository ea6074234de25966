#include <catch2/catch_amalgamated.hpp>

#include "agora/core.hpp"

using namespace agora;

TEST_CASE("utterance cap table") {
  CHECK(max_utterances_for(2) == 30);
  CHECK(max_utterances_for(3) == 30);
  CHECK(max_utterances_for(4) == 30);
  CHECK(max_utterances_for(5) == 30);
  CHECK(max_utterances_for(8) == 50);
  CHECK(max_utterances_for(12) == 70);
  CHECK(max_utterances_for(16) == 90);
  CHECK(max_utterances_for(24) == 120);
  CHECK(max_utterances_for(32) == 150);
}

TEST_CASE("unsupported group sizes are rejected unless overridden") {
  CHECK_THROWS_AS(max_utterances_for(7), UnsupportedGroupSize);
  CHECK_THROWS_AS(max_utterances_for(1), UnsupportedGroupSize);
  CHECK_THROWS_AS(max_utterances_for(100), UnsupportedGroupSize);
  CHECK(max_utterances_for(7, 42) == 42);
  CHECK(max_utterances_for(2, 10) == 10);  // override wins over the table
}

TEST_CASE("utterance cap is monotone over supported sizes") {
  int prev = 0;
  for (int g : supported_group_sizes()) {
    const int cap = max_utterances_for(g);
    CHECK(cap >= prev);
    prev = cap;
  }
}

TEST_CASE("speaker cycle") {
  CHECK(speaker_for_attempt(0, 3) == 1);
  CHECK(speaker_for_attempt(2, 3) == 3);
  CHECK(speaker_for_attempt(3, 3) == 1);

  // periodicity over the supported sizes
  for (int g : supported_group_sizes())
    for (std::int64_t a = 0; a < 200; ++a)
      CHECK(speaker_for_attempt(a + g, g) == speaker_for_attempt(a, g));
}

namespace {

Conversation tiny_conversation() {
  Conversation conv;
  conv.id = "t";
  conv.model_id = "m";
  conv.topic = {"parks", TopicSource::llm};
  conv.roles = {{1, "a", RoleSource::llm_generated}, {2, "b", RoleSource::llm_generated}};
  conv.utterances = {{1, 1, "hi", "Speak: hi"}, {2, 2, "hello", "Speak: hello"}};
  return conv;
}

}  // namespace

TEST_CASE("conversation validation accepts cycle-consistent transcripts") {
  auto conv = tiny_conversation();
  CHECK_NOTHROW(validate_conversation(conv));

  // silence skips are fine: 1,1 means speaker 2 stayed silent in between
  conv.utterances = {{1, 1, "a", ""}, {2, 1, "b", ""}, {3, 2, "c", ""}};
  CHECK_NOTHROW(validate_conversation(conv));
}

TEST_CASE("conversation validation rejects broken transcripts") {
  auto conv = tiny_conversation();
  conv.utterances[1].turn_index = 3;
  CHECK_THROWS_AS(validate_conversation(conv), InvalidConversation);

  conv = tiny_conversation();
  conv.utterances[0].speaker_id = 5;
  CHECK_THROWS_AS(validate_conversation(conv), InvalidConversation);

  conv = tiny_conversation();
  conv.utterances[0].text = "";
  CHECK_THROWS_AS(validate_conversation(conv), InvalidConversation);

  conv = tiny_conversation();
  for (int i = 3; i <= 31; ++i) conv.utterances.push_back({i, 1, "x", ""});
  CHECK_THROWS_AS(validate_conversation(conv), InvalidConversation);  // over the cap
}

TEST_CASE("metric sample range checks") {
  MetricSample s{Dimension::inter_sim, 0.5, {}};
  CHECK(sample_in_range(s));
  s.value = 1.5;
  CHECK_FALSE(sample_in_range(s));
  s = {Dimension::sentiment, -1.0, {}};
  CHECK(sample_in_range(s));
  s = {Dimension::category_freq, -0.1, {}};
  CHECK_FALSE(sample_in_range(s));
  s = {Dimension::keyword_weight, 0.0, {}};
  CHECK(sample_in_range(s));
  s = {Dimension::role_code, 9.0, {}};
  CHECK(sample_in_range(s));
  s = {Dimension::role_code, 10.0, {}};
  CHECK_FALSE(sample_in_range(s));
}

TEST_CASE("enum round trips") {
  for (auto src : {TopicSource::llm, TopicSource::topicalchat_keywords, TopicSource::debate,
                   TopicSource::human})
    CHECK(topic_source_from_string(to_string(src)) == src);
  for (auto src : {RoleSource::llm_generated, RoleSource::personachat, RoleSource::human})
    CHECK(role_source_from_string(to_string(src)) == src);
  CHECK_THROWS_AS(topic_source_from_string("nope"), ParseError);
}
