#pragma once

#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "agora/core.hpp"
#include "agora/corpus.hpp"
#include "agora/errors.hpp"
#include "agora/gateway.hpp"
#include "agora/prompt_templates.hpp"
#include "agora/prompts.hpp"

namespace agora {

inline std::string render_isco_prompt(const SocialRole& role) {
  if (role.description.empty()) throw ConfigError("role description is empty");
  return detail::replace_all(std::string(kIscoPromptTemplate), "{Social Role}",
                             role.description);
}

// First standalone digit 0-9 in the reply; digit runs longer than one
// character (years, "ISCO-08") never qualify.
inline int parse_isco_reply(const std::string& raw) {
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(raw[i]))) continue;
    const bool prev_digit = i > 0 && std::isdigit(static_cast<unsigned char>(raw[i - 1]));
    const bool next_digit =
        i + 1 < raw.size() && std::isdigit(static_cast<unsigned char>(raw[i + 1]));
    if (!prev_digit && !next_digit) return raw[i] - '0';
    while (i + 1 < raw.size() && std::isdigit(static_cast<unsigned char>(raw[i + 1]))) ++i;
  }
  throw NoCodeFound("no standalone digit 0-9 in reply: " + raw.substr(0, 80));
}

struct IscoJudgment {
  struct Run {
    std::string raw_reply;
    std::optional<int> code;  // nullopt = parse failure
  };
  std::string role_id;
  std::string judge_model;
  std::vector<Run> runs;
  std::optional<int> final;  // nullopt = unresolved
};

// Strict majority among successfully parsed codes; parse failures never
// count toward any code.
inline std::optional<int> majority_code(const std::vector<IscoJudgment::Run>& runs) {
  std::map<int, int> votes;
  int parsed = 0;
  for (const auto& r : runs) {
    if (r.code) {
      ++votes[*r.code];
      ++parsed;
    }
  }
  for (const auto& [code, count] : votes)
    if (2 * count > parsed) return code;
  return std::nullopt;
}

// Judges a role base_runs times; ties escalate one run at a time up to
// max_runs, and a persistent tie stays unresolved rather than inventing a
// code.
inline IscoJudgment classify_role(const SocialRole& role, const std::string& judge_model,
                                  Gateway& gateway, const std::string& role_id,
                                  int base_runs = 3, int max_runs = 5,
                                  std::optional<double> temperature = std::nullopt) {
  IscoJudgment judgment;
  judgment.role_id = role_id;
  judgment.judge_model = judge_model;
  const std::string prompt = render_isco_prompt(role);

  auto issue_run = [&](int run_index) {
    GenerationRequest req;
    req.model_id = judge_model;
    req.prompt = prompt;
    req.temperature = temperature;
    req.sample_tag = "isco/" + role_id + "/" + std::to_string(run_index);
    IscoJudgment::Run run;
    try {
      run.raw_reply = gateway.complete(req).text;
      run.code = parse_isco_reply(run.raw_reply);
    } catch (const NoCodeFound&) {
      run.code = std::nullopt;
    }
    judgment.runs.push_back(std::move(run));
  };

  for (int i = 0; i < base_runs; ++i) issue_run(i);
  judgment.final = majority_code(judgment.runs);
  while (!judgment.final && static_cast<int>(judgment.runs.size()) < max_runs) {
    issue_run(static_cast<int>(judgment.runs.size()));
    judgment.final = majority_code(judgment.runs);
  }
  return judgment;
}

struct Census {
  std::map<int, std::size_t> counts;  // resolved codes only
  std::size_t total = 0;              // resolved roles
  std::size_t unresolved = 0;

  std::map<int, double> shares() const {
    std::map<int, double> out;
    if (total == 0) return out;
    for (const auto& [code, count] : counts)
      out[code] = static_cast<double>(count) / static_cast<double>(total);
    return out;
  }

  // codes 6 and 9 reported together, as the reference distribution does
  double merged_69_share() const {
    const auto s = shares();
    double m = 0;
    if (auto it = s.find(6); it != s.end()) m += it->second;
    if (auto it = s.find(9); it != s.end()) m += it->second;
    return m;
  }
};

inline Census census(const std::vector<IscoJudgment>& judgments) {
  Census c;
  for (const auto& j : judgments) {
    if (j.final) {
      ++c.counts[*j.final];
      ++c.total;
    } else {
      ++c.unresolved;
    }
  }
  if (c.total == 0) throw AllUnresolved("no judgment reached a majority");
  return c;
}

struct DivergenceRow {
  int code = 0;
  double share = 0.0;
  double reference_share = 0.0;
  double difference = 0.0;
};

struct DivergenceReport {
  std::vector<DivergenceRow> rows;
  double total_variation = 0.0;  // 1/2 sum |p - q|
};

inline DivergenceReport compare_distribution(const Census& cens, const ReferenceShares& ref) {
  DivergenceReport report;
  const auto shares = cens.shares();
  double tv = 0.0;
  for (int code = 0; code <= 9; ++code) {
    DivergenceRow row;
    row.code = code;
    if (auto it = shares.find(code); it != shares.end()) row.share = it->second;
    if (auto it = ref.shares.find(code); it != ref.shares.end())
      row.reference_share = it->second;
    row.difference = row.share - row.reference_share;
    tv += std::abs(row.difference);
    report.rows.push_back(row);
  }
  report.total_variation = tv / 2.0;
  return report;
}

// Percentage agreement between manual labels (TSV role_id<TAB>code) and
// automatic finals, over roles present in both.
struct AgreementReport {
  std::size_t compared = 0;
  std::size_t agreed = 0;

  double percentage() const {
    return compared == 0 ? 0.0
                         : 100.0 * static_cast<double>(agreed) / static_cast<double>(compared);
  }
};

inline AgreementReport agreement_with_manual(const std::filesystem::path& manual_tsv,
                                             const std::vector<IscoJudgment>& judgments) {
  std::ifstream in(manual_tsv);
  if (!in) throw IoError("cannot open manual labels: " + manual_tsv.string());
  std::map<std::string, int> manual;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError("manual labels line " + std::to_string(line_no) +
                       ": expected role_id<TAB>code");
    try {
      const int code = std::stoi(line.substr(tab + 1));
      if (code < 0 || code > 9)
        throw ParseError("manual labels line " + std::to_string(line_no) + ": code out of range");
      manual[line.substr(0, tab)] = code;
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception&) {
      throw ParseError("manual labels line " + std::to_string(line_no) + ": bad code");
    }
  }
  AgreementReport report;
  for (const auto& j : judgments) {
    auto it = manual.find(j.role_id);
    if (it == manual.end() || !j.final) continue;
    ++report.compared;
    if (*j.final == it->second) ++report.agreed;
  }
  return report;
}

}  // namespace agora
