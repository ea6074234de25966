#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "agora/core.hpp"
#include "agora/errors.hpp"

namespace agora {

inline constexpr int kStoreSchemaVersion = 1;

// ---------------------------------------------------------------------------
// Conversation store: append-only JSONL, one conversation per line.
// Field names are part of the on-disk contract; do not rename.
// ---------------------------------------------------------------------------

inline nlohmann::json conversation_to_json(const Conversation& conv) {
  nlohmann::json roles = nlohmann::json::array();
  for (const auto& r : conv.roles)
    roles.push_back({{"agent_id", r.agent_id},
                     {"description", r.description},
                     {"source", to_string(r.source)}});
  nlohmann::json utterances = nlohmann::json::array();
  for (const auto& u : conv.utterances)
    utterances.push_back({{"turn_index", u.turn_index},
                          {"speaker_id", u.speaker_id},
                          {"text", u.text},
                          {"raw_reply", u.raw_reply}});
  return nlohmann::json{{"id", conv.id},
                        {"model_id", conv.model_id},
                        {"topic", {{"text", conv.topic.text}, {"source", to_string(conv.topic.source)}}},
                        {"roles", roles},
                        {"utterances", utterances},
                        {"truncated", conv.truncated},
                        {"seed", conv.seed},
                        {"schema_version", kStoreSchemaVersion}};
}

inline Conversation conversation_from_json(const nlohmann::json& j) {
  const int version = j.at("schema_version").get<int>();
  if (version > kStoreSchemaVersion)
    throw SchemaVersionMismatch("store record has schema_version " + std::to_string(version) +
                                ", this build reads up to " +
                                std::to_string(kStoreSchemaVersion));
  Conversation conv;
  conv.id = j.at("id").get<std::string>();
  conv.model_id = j.at("model_id").get<std::string>();
  conv.topic.text = j.at("topic").at("text").get<std::string>();
  conv.topic.source = topic_source_from_string(j.at("topic").at("source").get<std::string>());
  for (const auto& r : j.at("roles")) {
    SocialRole role;
    role.agent_id = r.at("agent_id").get<int>();
    role.description = r.at("description").get<std::string>();
    role.source = role_source_from_string(r.at("source").get<std::string>());
    conv.roles.push_back(std::move(role));
  }
  for (const auto& u : j.at("utterances")) {
    Utterance ut;
    ut.turn_index = u.at("turn_index").get<int>();
    ut.speaker_id = u.at("speaker_id").get<int>();
    ut.text = u.at("text").get<std::string>();
    ut.raw_reply = u.at("raw_reply").get<std::string>();
    conv.utterances.push_back(std::move(ut));
  }
  conv.truncated = j.at("truncated").get<bool>();
  conv.seed = j.at("seed").get<std::int64_t>();
  return conv;
}

inline void save_conversations(const std::vector<Conversation>& conversations,
                               const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open store for writing: " + path.string());
  for (const auto& c : conversations) out << conversation_to_json(c).dump() << '\n';
}

inline std::vector<Conversation> load_conversations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open store: " + path.string());
  std::vector<Conversation> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(conversation_from_json(nlohmann::json::parse(line)));
    } catch (const SchemaVersionMismatch&) {
      throw;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("store " + path.string() + " line " + std::to_string(line_no) + ": " +
                       e.what());
    }
  }
  return out;
}

// Serialized single-writer append channel used by the grid runner.
class ConversationStore {
 public:
  explicit ConversationStore(std::filesystem::path path) : path_(std::move(path)) {
    if (std::filesystem::exists(path_)) {
      for (const auto& c : load_conversations(path_)) ids_.insert(c.id);
    }
    out_.open(path_, std::ios::app);
    if (!out_) throw IoError("cannot open store for append: " + path_.string());
  }

  bool contains(const std::string& id) const {
    std::lock_guard lk(mu_);
    return ids_.count(id) > 0;
  }

  void append(const Conversation& conv) {
    std::lock_guard lk(mu_);
    out_ << conversation_to_json(conv).dump() << '\n';
    out_.flush();
    ids_.insert(conv.id);
  }

  std::size_t size() const {
    std::lock_guard lk(mu_);
    return ids_.size();
  }

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::unordered_set<std::string> ids_;
  mutable std::mutex mu_;
};

// ---------------------------------------------------------------------------
// Human dialogue corpora
// ---------------------------------------------------------------------------

struct HumanCorpus {
  std::string name;  // "personachat" | "topicalchat"
  std::vector<Conversation> dialogues;
  std::vector<std::string> persona_pool;  // personachat only
  std::vector<std::string> keyword_pool;  // topicalchat only

  std::size_t utterance_count() const {
    std::size_t n = 0;
    for (const auto& d : dialogues) n += d.utterances.size();
    return n;
  }
};

namespace detail {

inline Conversation make_human_dialogue(const std::string& corpus, std::size_t index) {
  Conversation conv;
  conv.id = corpus + "/" + std::to_string(index);
  conv.model_id = "human:" + corpus;
  conv.topic = Topic{corpus + " dialogue", TopicSource::human};
  conv.roles = {SocialRole{1, "Person 1", RoleSource::human},
                SocialRole{2, "Person 2", RoleSource::human}};
  return conv;
}

}  // namespace detail

// Dialogue-text layout: numbered lines, "N your persona: ..." profile
// sentences, then "N <utterance>\t<reply>[\t...]" exchange lines. The line
// counter restarting marks a new dialogue.
inline HumanCorpus load_personachat(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open personachat file: " + path.string());

  HumanCorpus corpus;
  corpus.name = "personachat";
  std::string line;
  std::size_t line_no = 0;
  int prev_number = 0;
  Conversation current;
  std::vector<std::string> persona_sentences;
  bool open = false;

  auto flush_dialogue = [&]() {
    if (!open) return;
    if (current.utterances.empty())
      throw ParseError("personachat " + path.string() + ": dialogue ending at line " +
                       std::to_string(line_no) + " has no utterances");
    if (!persona_sentences.empty()) {
      std::string joined;
      for (const auto& s : persona_sentences) {
        if (!joined.empty()) joined += "; ";
        joined += s;
      }
      corpus.persona_pool.push_back(joined);
      current.roles[0].description = joined;
    }
    corpus.dialogues.push_back(std::move(current));
    persona_sentences.clear();
    open = false;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::size_t sp = line.find(' ');
    if (sp == std::string::npos || sp == 0)
      throw ParseError("personachat " + path.string() + " line " + std::to_string(line_no) +
                       ": expected '<number> <payload>'");
    int number = 0;
    try {
      number = std::stoi(line.substr(0, sp));
    } catch (const std::exception&) {
      throw ParseError("personachat " + path.string() + " line " + std::to_string(line_no) +
                       ": line does not start with a number");
    }
    if (number <= prev_number) {
      flush_dialogue();
    }
    if (!open) {
      current = detail::make_human_dialogue("personachat", corpus.dialogues.size());
      open = true;
    }
    prev_number = number;
    std::string payload = line.substr(sp + 1);

    if (payload.rfind("your persona: ", 0) == 0) {
      std::string sentence = payload.substr(std::string("your persona: ").size());
      if (!sentence.empty() && sentence.back() == '.') sentence.pop_back();
      persona_sentences.push_back(sentence);
      continue;
    }
    if (payload.rfind("partner's persona: ", 0) == 0) continue;

    // exchange line: utterance TAB reply [TAB reward TAB candidates]
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      auto tab = payload.find('\t', start);
      fields.push_back(payload.substr(start, tab == std::string::npos ? tab : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() < 2 || fields[0].empty() || fields[1].empty())
      throw ParseError("personachat " + path.string() + " line " + std::to_string(line_no) +
                       ": exchange line needs utterance and reply");
    for (int side = 0; side < 2; ++side) {
      Utterance u;
      u.turn_index = static_cast<int>(current.utterances.size()) + 1;
      u.speaker_id = side + 1;
      u.text = fields[static_cast<std::size_t>(side)];
      u.raw_reply = u.text;
      current.utterances.push_back(std::move(u));
    }
  }
  ++line_no;
  flush_dialogue();
  if (corpus.dialogues.empty())
    throw ParseError("personachat " + path.string() + ": no dialogues found");
  return corpus;
}

namespace detail {

inline void collect_entities(const nlohmann::json& j, std::set<std::string>& out) {
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      if (key == "entity" && value.is_string())
        out.insert(value.get<std::string>());
      else
        collect_entities(value, out);
    }
  } else if (j.is_array()) {
    for (const auto& v : j) collect_entities(v, out);
  }
}

inline nlohmann::json parse_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open file: " + path.string());
  try {
    nlohmann::json j;
    in >> j;
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace detail

// Accepts either the conversations JSON file itself or a dataset root
// containing conversations/train.json plus reading_sets/post-build/train.json;
// the keyword pool collects the "entity" annotations wherever they appear.
inline HumanCorpus load_topicalchat(const std::filesystem::path& path) {
  std::filesystem::path conv_path = path;
  std::optional<std::filesystem::path> reading_path;
  if (std::filesystem::is_directory(path)) {
    conv_path = path / "conversations" / "train.json";
    if (!std::filesystem::exists(conv_path)) conv_path = path / "train.json";
    auto rs = path / "reading_sets" / "post-build" / "train.json";
    if (std::filesystem::exists(rs)) reading_path = rs;
  }

  nlohmann::json doc = detail::parse_json_file(conv_path);
  if (!doc.is_object() || doc.empty())
    throw ParseError("topicalchat " + conv_path.string() + ": expected an object of dialogues");

  HumanCorpus corpus;
  corpus.name = "topicalchat";
  std::set<std::string> entities;
  detail::collect_entities(doc, entities);
  if (reading_path) detail::collect_entities(detail::parse_json_file(*reading_path), entities);

  for (const auto& [conv_id, body] : doc.items()) {
    if (!body.is_object() || !body.contains("content"))
      throw ParseError("topicalchat " + conv_path.string() + ": dialogue '" + conv_id +
                       "' has no content array");
    Conversation conv = detail::make_human_dialogue("topicalchat", corpus.dialogues.size());
    conv.id = "topicalchat/" + conv_id;
    for (const auto& msg : body.at("content")) {
      Utterance u;
      u.turn_index = static_cast<int>(conv.utterances.size()) + 1;
      const std::string agent = msg.value("agent", "agent_1");
      u.speaker_id = agent == "agent_2" ? 2 : 1;
      u.text = msg.at("message").get<std::string>();
      u.raw_reply = u.text;
      if (u.text.empty())
        throw ParseError("topicalchat dialogue '" + conv_id + "': empty message");
      conv.utterances.push_back(std::move(u));
    }
    if (conv.utterances.empty())
      throw ParseError("topicalchat dialogue '" + conv_id + "': no utterances");
    corpus.dialogues.push_back(std::move(conv));
  }
  corpus.keyword_pool.assign(entities.begin(), entities.end());
  return corpus;
}

// ---------------------------------------------------------------------------
// Preference datasets
// ---------------------------------------------------------------------------

enum class PreferenceScale { prism_0_100, ultrafeedback_0_10 };
enum class PreferenceClass { preferred, dispreferred, excluded };

inline const char* to_string(PreferenceClass c) {
  switch (c) {
    case PreferenceClass::preferred: return "preferred";
    case PreferenceClass::dispreferred: return "dispreferred";
    case PreferenceClass::excluded: return "excluded";
  }
  return "?";
}

inline double scale_max(PreferenceScale s) {
  return s == PreferenceScale::prism_0_100 ? 100.0 : 10.0;
}

inline double scale_midpoint(PreferenceScale s) {
  return s == PreferenceScale::prism_0_100 ? 50.0 : 5.0;
}

struct PreferenceRecord {
  std::string prompt;
  std::string response;
  double score = 0.0;
  PreferenceScale scale = PreferenceScale::prism_0_100;
};

// Midpoint split: above -> preferred, below -> dispreferred, exactly the
// midpoint -> excluded so neither class is silently inflated.
inline PreferenceClass classify_preference(double score, PreferenceScale scale) {
  const double mid = scale_midpoint(scale);
  if (score > mid) return PreferenceClass::preferred;
  if (score < mid) return PreferenceClass::dispreferred;
  return PreferenceClass::excluded;
}

namespace detail {

inline std::optional<std::string> first_string(const nlohmann::json& j,
                                               std::initializer_list<const char*> keys) {
  for (const char* k : keys)
    if (j.contains(k) && j[k].is_string()) return j[k].get<std::string>();
  return std::nullopt;
}

inline std::optional<double> first_number(const nlohmann::json& j,
                                          std::initializer_list<const char*> keys) {
  for (const char* k : keys) {
    if (!j.contains(k)) continue;
    if (j[k].is_number()) return j[k].get<double>();
    if (j[k].is_string()) {
      try {
        return std::stod(j[k].get<std::string>());
      } catch (const std::exception&) {
      }
    }
  }
  return std::nullopt;
}

inline PreferenceRecord make_preference_record(const std::string& prompt,
                                               const std::string& response, double score,
                                               PreferenceScale scale, std::size_t line_no) {
  if (score < 0.0 || score > scale_max(scale))
    throw ScoreOutOfRange("line " + std::to_string(line_no) + ": score " +
                          std::to_string(score) + " outside [0, " +
                          std::to_string(scale_max(scale)) + "]");
  return PreferenceRecord{prompt, response, score, scale};
}

}  // namespace detail

// JSONL loader for scalar-feedback datasets. Accepts flat records
// (prompt/user_prompt/instruction, response/model_response/completion,
// score/rating/overall_score) and nested {"instruction", "completions":
// [{"response", "overall_score"}]} records.
inline std::vector<PreferenceRecord> load_preference_records(const std::filesystem::path& path,
                                                             PreferenceScale scale) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open preference file: " + path.string());
  std::vector<PreferenceRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("preference file " + path.string() + " line " + std::to_string(line_no) +
                       ": " + e.what());
    }
    if (j.contains("completions") && j["completions"].is_array()) {
      auto prompt = detail::first_string(j, {"instruction", "prompt", "user_prompt"});
      if (!prompt)
        throw ParseError("preference file line " + std::to_string(line_no) +
                         ": record with completions has no prompt");
      for (const auto& c : j["completions"]) {
        auto response = detail::first_string(c, {"response", "completion", "model_response"});
        auto score = detail::first_number(c, {"overall_score", "score", "rating"});
        if (!response || !score)
          throw ParseError("preference file line " + std::to_string(line_no) +
                           ": completion without response/score");
        out.push_back(detail::make_preference_record(*prompt, *response, *score, scale, line_no));
      }
      continue;
    }
    auto prompt = detail::first_string(j, {"prompt", "user_prompt", "instruction"});
    auto response = detail::first_string(j, {"response", "model_response", "completion"});
    auto score = detail::first_number(j, {"score", "rating", "overall_score"});
    if (!prompt || !response || !score)
      throw ParseError("preference file " + path.string() + " line " + std::to_string(line_no) +
                       ": missing prompt/response/score");
    out.push_back(detail::make_preference_record(*prompt, *response, *score, scale, line_no));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Occupation n-gram counts and reference shares
// ---------------------------------------------------------------------------

struct OccupationCountTable {
  struct Entry {
    int isco_code = 0;
    std::uint64_t count = 0;
  };
  std::map<std::string, Entry> terms;

  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (const auto& [_, e] : terms) t += e.count;
    return t;
  }

  // share of all counted mentions per major code
  std::map<int, double> shares() const {
    std::map<int, double> out;
    const auto t = total();
    if (t == 0) return out;
    for (const auto& [_, e] : terms) out[e.isco_code] += static_cast<double>(e.count);
    for (auto& [_, v] : out) v /= static_cast<double>(t);
    return out;
  }
};

// TSV rows: term<TAB>isco_code<TAB>count. Duplicate terms accumulate.
inline OccupationCountTable load_ngram_counts(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open n-gram table: " + path.string());
  OccupationCountTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string term, code_str, count_str;
    if (!std::getline(row, term, '\t') || !std::getline(row, code_str, '\t') ||
        !std::getline(row, count_str))
      throw ParseError("n-gram table line " + std::to_string(line_no) +
                       ": expected term<TAB>code<TAB>count");
    int code;
    long long count;
    try {
      code = std::stoi(code_str);
      count = std::stoll(count_str);
    } catch (const std::exception&) {
      throw ParseError("n-gram table line " + std::to_string(line_no) + ": bad number");
    }
    if (code < 0 || code > 9)
      throw ParseError("n-gram table line " + std::to_string(line_no) + ": code " + code_str +
                       " outside 0..9");
    if (count < 0)
      throw ParseError("n-gram table line " + std::to_string(line_no) + ": negative count");
    auto [it, inserted] = table.terms.try_emplace(term,
                                                  OccupationCountTable::Entry{code, 0});
    if (!inserted && it->second.isco_code != code)
      throw ParseError("n-gram table line " + std::to_string(line_no) + ": term '" + term +
                       "' re-listed under a different code");
    it->second.count += static_cast<std::uint64_t>(count);
  }
  return table;
}

struct ReferenceShares {
  std::map<int, double> shares;  // isco major code -> share
  std::string label;
};

// TSV rows: code<TAB>share, '#' comments allowed; shares must sum to 1.
inline ReferenceShares load_reference_shares(const std::filesystem::path& path,
                                             std::string label = {}) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open reference shares: " + path.string());
  ReferenceShares ref;
  ref.label = label.empty() ? path.filename().string() : std::move(label);
  std::string line;
  std::size_t line_no = 0;
  double sum = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string code_str, share_str;
    if (!std::getline(row, code_str, '\t') || !std::getline(row, share_str))
      throw ParseError("reference shares line " + std::to_string(line_no) +
                       ": expected code<TAB>share");
    try {
      const int code = std::stoi(code_str);
      const double share = std::stod(share_str);
      if (code < 0 || code > 9 || share < 0 || share > 1)
        throw ParseError("reference shares line " + std::to_string(line_no) + ": out of range");
      ref.shares[code] = share;
      sum += share;
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception&) {
      throw ParseError("reference shares line " + std::to_string(line_no) + ": bad number");
    }
  }
  if (std::abs(sum - 1.0) > 1e-6)
    throw ParseError("reference shares in " + path.string() + " sum to " + std::to_string(sum) +
                     ", expected 1");
  return ref;
}

}  // namespace agora
