#pragma once

#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "agora/errors.hpp"

namespace agora {

// Closed-vocabulary category profiling over a ".dic"-style lexicon:
// a '%'-delimited header of category id/name pairs, then pattern lines
// mapping a literal token or a trailing-'*' stem to one or more categories.

struct CategoryLexicon {
  std::map<std::string, std::string> category_names;       // id -> display name
  std::map<std::string, std::set<std::string>> literals;   // token -> category ids
  std::map<std::string, std::set<std::string>> stems;      // stem (no '*') -> ids

  bool empty() const { return literals.empty() && stems.empty(); }
};

inline CategoryLexicon load_category_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open category lexicon: " + path.string());
  CategoryLexicon lex;
  std::string line;
  std::size_t line_no = 0;
  int percent_seen = 0;
  while (std::getline(in, line)) {
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '%') {
      ++percent_seen;
      continue;
    }
    std::vector<std::string> fields;
    std::istringstream row(line);
    std::string field;
    while (std::getline(row, field, '\t'))
      if (!field.empty()) fields.push_back(field);
    if (fields.size() < 2)
      throw ParseError("category lexicon line " + std::to_string(line_no) +
                       ": expected at least two tab-separated fields");
    if (percent_seen == 1) {
      // header region: id <TAB> name
      lex.category_names[fields[0]] = fields[1];
      continue;
    }
    std::string pattern = fields[0];
    for (char& c : pattern) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    std::set<std::string> ids(fields.begin() + 1, fields.end());
    // map numeric ids to header names when a header was present
    std::set<std::string> resolved;
    for (const auto& id : ids) {
      auto it = lex.category_names.find(id);
      resolved.insert(it != lex.category_names.end() ? it->second : id);
    }
    if (!pattern.empty() && pattern.back() == '*')
      lex.stems[pattern.substr(0, pattern.size() - 1)].insert(resolved.begin(), resolved.end());
    else
      lex.literals[pattern].insert(resolved.begin(), resolved.end());
  }
  if (lex.empty()) throw EmptyLexicon("category lexicon has no patterns");
  return lex;
}

struct CategoryProfile {
  std::map<std::string, std::size_t> hits;  // category -> matched tokens
  std::size_t token_count = 0;

  double frequency(const std::string& category) const {
    if (token_count == 0) return 0.0;
    auto it = hits.find(category);
    return it == hits.end() ? 0.0
                            : static_cast<double>(it->second) / static_cast<double>(token_count);
  }
};

namespace detail {

// tokens split on non-alphanumeric boundaries; apostrophes inside a token
// are kept so contractions stay whole
inline std::vector<std::string> category_tokens(const std::string& text) {
  std::vector<std::string> tokens;
  std::string cur;
  const auto flush = [&] {
    while (!cur.empty() && cur.front() == '\'') cur.erase(cur.begin());
    while (!cur.empty() && cur.back() == '\'') cur.pop_back();
    if (!cur.empty()) tokens.push_back(cur);
    cur.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || ch == '\'') {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

}  // namespace detail

// Exact literal match first, otherwise the longest matching wildcard stem;
// every category in the winning pattern's set is incremented.
inline CategoryProfile count_categories(const std::string& text, const CategoryLexicon& lexicon) {
  if (lexicon.empty()) throw EmptyLexicon("category lexicon has no patterns");
  CategoryProfile profile;
  const auto tokens = detail::category_tokens(text);
  profile.token_count = tokens.size();
  for (const auto& token : tokens) {
    const std::set<std::string>* matched = nullptr;
    auto lit = lexicon.literals.find(token);
    if (lit != lexicon.literals.end()) {
      matched = &lit->second;
    } else {
      for (std::size_t len = token.size(); len > 0 && !matched; --len) {
        auto st = lexicon.stems.find(token.substr(0, len));
        if (st != lexicon.stems.end()) matched = &st->second;
      }
    }
    if (matched)
      for (const auto& cat : *matched) ++profile.hits[cat];
  }
  return profile;
}

}  // namespace agora
