#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "agora/census.hpp"

using namespace agora;

namespace {

IscoJudgment judgment_of(std::vector<std::optional<int>> codes) {
  IscoJudgment j;
  j.role_id = "r";
  for (const auto& c : codes) j.runs.push_back({c ? std::to_string(*c) : "unsure", c});
  j.final = majority_code(j.runs);
  return j;
}

// judge provider scripted per call index
class ScriptedJudge : public ChatProvider {
 public:
  explicit ScriptedJudge(std::vector<std::string> replies) : replies_(std::move(replies)) {}
  std::string name() const override { return "judge"; }
  std::string generate(const GenerationRequest&) override {
    const auto i = next_.fetch_add(1);
    return replies_.at(static_cast<std::size_t>(i) % replies_.size());
  }

 private:
  std::vector<std::string> replies_;
  std::atomic<int> next_{0};
};

}  // namespace

TEST_CASE("isco prompt renders the golden template") {
  std::ifstream in(std::string(AGORA_SOURCE_DIR) + "/tests/fixtures/prompts/a5.txt",
                   std::ios::binary);
  REQUIRE(in);
  std::string golden((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  const SocialRole role{1, "Person 1 is a crane operator at the port.",
                        RoleSource::llm_generated};
  std::string expected = golden;
  const std::string placeholder = "{Social Role}";
  for (std::size_t pos; (pos = expected.find(placeholder)) != std::string::npos;)
    expected.replace(pos, placeholder.size(), role.description);

  const auto prompt = render_isco_prompt(role);
  CHECK(prompt == expected);
  CHECK(prompt.find("expert in occupational classification") != std::string::npos);
  CHECK(prompt.find(role.description) != std::string::npos);
  // all ten major groups are defined in the template
  for (int code = 0; code <= 9; ++code)
    CHECK(prompt.find("Code: " + std::to_string(code)) != std::string::npos);
}

TEST_CASE("isco reply parsing finds the first standalone digit") {
  CHECK(parse_isco_reply("2") == 2);
  CHECK(parse_isco_reply("Code: 7 - Craft and Related Trades") == 7);
  CHECK(parse_isco_reply("the answer is 5.") == 5);
  CHECK(parse_isco_reply("ISCO-08 group 3") == 3);  // "08" is not standalone
  CHECK(parse_isco_reply("answer: 9 (confidence 85)") == 9);
  CHECK_THROWS_AS(parse_isco_reply("unsure"), NoCodeFound);
  CHECK_THROWS_AS(parse_isco_reply("around 2015 or 2016"), NoCodeFound);
  CHECK_THROWS_AS(parse_isco_reply(""), NoCodeFound);
}

TEST_CASE("strict majority over parsed runs") {
  CHECK(judgment_of({2, 2, 3}).final == 2);
  CHECK_FALSE(judgment_of({1, 2, 3}).final.has_value());
  CHECK(judgment_of({1, 2, 2}).final == 2);
  // parse failures never count toward any code
  CHECK(judgment_of({2, std::nullopt, 2}).final == 2);
  CHECK(judgment_of({2, std::nullopt, std::nullopt}).final == 2);  // 1 of 1 parsed
  CHECK_FALSE(judgment_of({std::nullopt, std::nullopt}).final.has_value());
}

TEST_CASE("majority is permutation invariant") {
  std::vector<std::optional<int>> runs = {2, 3, 2, std::nullopt, 2};
  std::sort(runs.begin(), runs.end());
  do {
    CHECK(judgment_of(runs).final == 2);
  } while (std::next_permutation(runs.begin(), runs.end()));
}

TEST_CASE("classification escalates ties one run at a time") {
  const SocialRole role{1, "a role", RoleSource::llm_generated};

  // [2,2,3] -> immediate majority, exactly 3 runs
  {
    Gateway gateway;
    gateway.register_model("judge", std::make_shared<ScriptedJudge>(
                                        std::vector<std::string>{"2", "2", "3"}));
    const auto j = classify_role(role, "judge", gateway, "r1");
    CHECK(j.runs.size() == 3);
    CHECK(j.final == 2);
  }
  // [1,2,3] then [2,2] -> majority after 5 runs
  {
    Gateway gateway;
    gateway.register_model("judge", std::make_shared<ScriptedJudge>(
                                        std::vector<std::string>{"1", "2", "3", "2", "2"}));
    const auto j = classify_role(role, "judge", gateway, "r2");
    CHECK(j.runs.size() == 5);
    CHECK(j.final == 2);
  }
  // [1,2,3,4,5] -> unresolved at the cap
  {
    Gateway gateway;
    gateway.register_model("judge", std::make_shared<ScriptedJudge>(
                                        std::vector<std::string>{"1", "2", "3", "4", "5"}));
    const auto j = classify_role(role, "judge", gateway, "r3");
    CHECK(j.runs.size() == 5);
    CHECK_FALSE(j.final.has_value());
  }
  // parse failures recorded, majority still possible
  {
    Gateway gateway;
    gateway.register_model("judge", std::make_shared<ScriptedJudge>(
                                        std::vector<std::string>{"no idea", "4", "4"}));
    const auto j = classify_role(role, "judge", gateway, "r4");
    CHECK(j.final == 4);
    CHECK_FALSE(j.runs[0].code.has_value());
  }
}

TEST_CASE("census counts, shares and the merged 6/9 bucket") {
  std::vector<IscoJudgment> judgments;
  for (int code : {2, 2, 1, 6, 9}) judgments.push_back(judgment_of({code, code, code}));
  const auto c = census(judgments);
  CHECK(c.total == 5);
  CHECK(c.unresolved == 0);
  const auto shares = c.shares();
  CHECK_THAT(shares.at(1), Catch::Matchers::WithinAbs(0.2, 1e-12));
  CHECK_THAT(shares.at(2), Catch::Matchers::WithinAbs(0.4, 1e-12));
  CHECK_THAT(c.merged_69_share(), Catch::Matchers::WithinAbs(0.4, 1e-12));

  double total_share = 0;
  for (const auto& [_, s] : shares) total_share += s;
  CHECK_THAT(total_share, Catch::Matchers::WithinAbs(1.0, 1e-6));

  // unresolved judgments are excluded from shares but reported
  judgments.push_back(judgment_of({1, 2, 3}));
  const auto c2 = census(judgments);
  CHECK(c2.total == 5);
  CHECK(c2.unresolved == 1);

  std::vector<IscoJudgment> unresolved_only = {judgment_of({1, 2, 3})};
  CHECK_THROWS_AS(census(unresolved_only), AllUnresolved);

  std::vector<IscoJudgment> single = {judgment_of({7, 7, 7})};
  CHECK(census(single).shares().at(7) == 1.0);
}

TEST_CASE("divergence report and total variation distance") {
  ReferenceShares ref;
  ref.label = "test";
  ref.shares = {{0, 0.005}, {1, 0.035}, {2, 0.104}, {3, 0.034}, {4, 0.049},
                {5, 0.146}, {6, 0.249}, {7, 0.122}, {8, 0.103}, {9, 0.153}};

  // census identical to the reference -> TVD 0
  std::vector<IscoJudgment> judgments;
  for (const auto& [code, share] : ref.shares) {
    const int count = static_cast<int>(std::llround(share * 1000));
    for (int i = 0; i < count; ++i) judgments.push_back(judgment_of({code, code, code}));
  }
  const auto c = census(judgments);
  const auto identical = compare_distribution(c, ref);
  CHECK_THAT(identical.total_variation, Catch::Matchers::WithinAbs(0.0, 1e-9));

  // all mass on code 2 vs reference
  std::vector<IscoJudgment> all2 = {judgment_of({2, 2, 2})};
  const auto skewed = compare_distribution(census(all2), ref);
  CHECK_THAT(skewed.total_variation, Catch::Matchers::WithinAbs(0.896, 1e-9));
  CHECK(skewed.total_variation >= 0.0);
  CHECK(skewed.total_variation <= 1.0);
  REQUIRE(skewed.rows.size() == 10);
  CHECK(skewed.rows[2].code == 2);
  CHECK_THAT(skewed.rows[2].difference, Catch::Matchers::WithinAbs(0.896, 1e-9));
}

TEST_CASE("tvd is symmetric") {
  ReferenceShares p;
  p.shares = {{1, 0.5}, {2, 0.5}};
  ReferenceShares q;
  q.shares = {{1, 0.2}, {2, 0.8}};

  auto tvd = [](const std::map<int, double>& a, const std::map<int, double>& b) {
    double t = 0;
    for (int code = 0; code <= 9; ++code) {
      const double pa = a.count(code) ? a.at(code) : 0.0;
      const double pb = b.count(code) ? b.at(code) : 0.0;
      t += std::abs(pa - pb);
    }
    return t / 2;
  };
  CHECK(tvd(p.shares, q.shares) == tvd(q.shares, p.shares));
  CHECK_THAT(tvd(p.shares, q.shares), Catch::Matchers::WithinAbs(0.3, 1e-12));
}

TEST_CASE("agreement harness compares manual labels with finals") {
  std::vector<IscoJudgment> judgments;
  for (int i = 0; i < 6; ++i) {
    auto j = judgment_of({i % 3, i % 3, i % 3});
    j.role_id = "role" + std::to_string(i);
    judgments.push_back(j);
  }
  auto unresolved = judgment_of({1, 2, 3});
  unresolved.role_id = "role6";
  judgments.push_back(unresolved);

  const auto path = std::filesystem::temp_directory_path() / "agora_manual.tsv";
  {
    std::ofstream out(path);
    out << "role0\t0\n";  // agrees (final 0)
    out << "role1\t1\n";  // agrees (final 1)
    out << "role2\t5\n";  // disagrees (final 2)
    out << "role3\t0\n";  // agrees (final 0)
    out << "role6\t4\n";  // unresolved, skipped
    out << "missing\t9\n";  // no such judgment, skipped
  }
  const auto report = agreement_with_manual(path, judgments);
  CHECK(report.compared == 4);
  CHECK(report.agreed == 3);
  CHECK_THAT(report.percentage(), Catch::Matchers::WithinAbs(75.0, 1e-12));
  std::filesystem::remove(path);
}
