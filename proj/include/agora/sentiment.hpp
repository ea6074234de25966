#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "agora/errors.hpp"

namespace agora {

// Rule-based valence sentiment, lexicon-driven. The rule set and constants
// follow the published reasoner implementation exactly, including its
// quirks, so compound scores are interchangeable with that tool's output.

struct SentimentScore {
  double compound = 0.0;  // in (-1, 1)
  double pos = 0.0;
  double neu = 0.0;
  double neg = 0.0;
};

struct ValenceLexicon {
  std::unordered_map<std::string, double> valence;

  // published rule constants; configurable, defaults must not drift
  double alpha = 15.0;
  double negation_scalar = -0.74;   // N_SCALAR
  double booster_increase = 0.293;  // B_INCR
  double booster_decrease = -0.293; // B_DECR
  double caps_increment = 0.733;    // C_INCR

  std::unordered_map<std::string, double> boosters;
  std::unordered_set<std::string> negators;
  std::unordered_map<std::string, double> special_idioms;

  ValenceLexicon() { install_rule_tables(); }

 private:
  void install_rule_tables() {
    const double bi = booster_increase, bd = booster_decrease;
    boosters = {
        {"absolutely", bi}, {"amazingly", bi}, {"awfully", bi},
        {"completely", bi}, {"considerable", bi}, {"considerably", bi},
        {"decidedly", bi}, {"deeply", bi}, {"effing", bi}, {"enormous", bi}, {"enormously", bi},
        {"entirely", bi}, {"especially", bi}, {"exceptional", bi}, {"exceptionally", bi},
        {"extreme", bi}, {"extremely", bi},
        {"fabulously", bi}, {"flipping", bi}, {"flippin", bi}, {"frackin", bi}, {"fracking", bi},
        {"fricking", bi}, {"frickin", bi}, {"frigging", bi}, {"friggin", bi}, {"fully", bi},
        {"fuckin", bi}, {"fucking", bi}, {"fuggin", bi}, {"fugging", bi},
        {"greatly", bi}, {"hella", bi}, {"highly", bi}, {"hugely", bi},
        {"incredible", bi}, {"incredibly", bi}, {"intensely", bi},
        {"major", bi}, {"majorly", bi}, {"more", bi}, {"most", bi}, {"particularly", bi},
        {"purely", bi}, {"quite", bi}, {"really", bi}, {"remarkably", bi},
        {"so", bi}, {"substantially", bi},
        {"thoroughly", bi}, {"total", bi}, {"totally", bi}, {"tremendous", bi},
        {"tremendously", bi},
        {"uber", bi}, {"unbelievably", bi}, {"unusually", bi}, {"utter", bi}, {"utterly", bi},
        {"very", bi},
        {"almost", bd}, {"barely", bd}, {"hardly", bd}, {"just enough", bd},
        {"kind of", bd}, {"kinda", bd}, {"kindof", bd}, {"kind-of", bd},
        {"less", bd}, {"little", bd}, {"marginal", bd}, {"marginally", bd},
        {"occasional", bd}, {"occasionally", bd}, {"partly", bd},
        {"scarce", bd}, {"scarcely", bd}, {"slight", bd}, {"slightly", bd}, {"somewhat", bd},
        {"sort of", bd}, {"sorta", bd}, {"sortof", bd}, {"sort-of", bd}};
    negators = {
        "aint", "arent", "cannot", "cant", "couldnt", "darent", "didnt", "doesnt",
        "ain't", "aren't", "can't", "couldn't", "daren't", "didn't", "doesn't",
        "dont", "hadnt", "hasnt", "havent", "isnt", "mightnt", "mustnt", "neither",
        "don't", "hadn't", "hasn't", "haven't", "isn't", "mightn't", "mustn't",
        "neednt", "needn't", "never", "none", "nope", "nor", "not", "nothing", "nowhere",
        "oughtnt", "shant", "shouldnt", "uhuh", "wasnt", "werent",
        "oughtn't", "shan't", "shouldn't", "uh-uh", "wasn't", "weren't",
        "without", "wont", "wouldnt", "won't", "wouldn't", "rarely", "seldom", "despite"};
    special_idioms = {{"the shit", 3.0},      {"the bomb", 3.0},   {"bad ass", 1.5},
                      {"badass", 1.5},        {"bus stop", 0.0},   {"yeah right", -2.0},
                      {"kiss of death", -1.5}, {"to die for", 3.0}, {"beating heart", 3.1},
                      {"broken heart", -2.9}};
  }
};

// token<TAB>valence per line; further tab-separated columns are ignored.
// Later duplicates overwrite earlier ones, as the published loader does.
inline ValenceLexicon load_valence_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open valence lexicon: " + path.string());
  ValenceLexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0)
      throw ParseError("valence lexicon line " + std::to_string(line_no) +
                       ": expected token<TAB>valence");
    const auto tab2 = line.find('\t', tab + 1);
    const std::string token = line.substr(0, tab);
    const std::string measure =
        line.substr(tab + 1, tab2 == std::string::npos ? tab2 : tab2 - tab - 1);
    try {
      lex.valence[token] = std::stod(measure);
    } catch (const std::exception&) {
      throw ParseError("valence lexicon line " + std::to_string(line_no) + ": bad valence '" +
                       measure + "'");
    }
  }
  if (lex.valence.empty()) throw EmptyLexicon("valence lexicon has no entries");
  return lex;
}

inline double normalize_compound(double raw_sum, double alpha = 15.0) {
  const double norm = raw_sum / std::sqrt(raw_sum * raw_sum + alpha);
  return std::clamp(norm, -1.0, 1.0);
}

namespace vader_detail {

inline std::string lower_ascii(const std::string& s) {
  std::string out = s;
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// matches Python str.isupper(): at least one cased character and no
// lowercase ones
inline bool is_upper(const std::string& s) {
  bool has_cased = false;
  for (char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::islower(c)) return false;
    if (std::isupper(c)) has_cased = true;
  }
  return has_cased;
}

inline bool is_punct(unsigned char c) {
  static const std::string punct = R"(!"#$%&'()*+,-./:;<=>?@[\]^_`{|}~)";
  return punct.find(static_cast<char>(c)) != std::string::npos;
}

inline std::string strip_punc_if_word(const std::string& token) {
  std::size_t b = 0, e = token.size();
  while (b < e && is_punct(static_cast<unsigned char>(token[b]))) ++b;
  while (e > b && is_punct(static_cast<unsigned char>(token[e - 1]))) --e;
  const std::string stripped = token.substr(b, e - b);
  if (stripped.size() <= 2) return token;
  return stripped;
}

inline std::vector<std::string> words_and_emoticons(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream iss(text);
  std::string token;
  while (iss >> token) out.push_back(strip_punc_if_word(token));
  return out;
}

inline bool allcap_differential(const std::vector<std::string>& words) {
  std::size_t allcap = 0;
  for (const auto& w : words)
    if (is_upper(w)) ++allcap;
  const std::size_t diff = words.size() - allcap;
  return diff > 0 && diff < words.size();
}

inline bool negated(const ValenceLexicon& lex, const std::string& word_lower) {
  if (lex.negators.count(word_lower)) return true;
  return word_lower.find("n't") != std::string::npos;
}

inline double scalar_inc_dec(const ValenceLexicon& lex, const std::string& word, double valence,
                             bool is_cap_diff) {
  double scalar = 0.0;
  const std::string word_lower = lower_ascii(word);
  auto it = lex.boosters.find(word_lower);
  if (it != lex.boosters.end()) {
    scalar = it->second;
    if (valence < 0) scalar *= -1;
    if (is_upper(word) && is_cap_diff) {
      if (valence > 0)
        scalar += lex.caps_increment;
      else
        scalar -= lex.caps_increment;
    }
  }
  return scalar;
}

inline double negation_check(const ValenceLexicon& lex, double valence,
                             const std::vector<std::string>& lower, int start_i, std::size_t i) {
  if (start_i == 0) {
    if (negated(lex, lower[i - 1])) valence *= lex.negation_scalar;
  }
  if (start_i == 1) {
    if (lower[i - 2] == "never" && (lower[i - 1] == "so" || lower[i - 1] == "this")) {
      valence *= 1.25;
    } else if (lower[i - 2] == "without" && lower[i - 1] == "doubt") {
      // treated as emphasis, valence unchanged
    } else if (negated(lex, lower[i - 2])) {
      valence *= lex.negation_scalar;
    }
  }
  if (start_i == 2) {
    // operator precedence kept from the published implementation:
    // (never and (so|this at -2)) or (so|this at -1)
    if ((lower[i - 3] == "never" && (lower[i - 2] == "so" || lower[i - 2] == "this")) ||
        (lower[i - 1] == "so" || lower[i - 1] == "this")) {
      valence *= 1.25;
    } else if (lower[i - 3] == "without" &&
               (lower[i - 2] == "doubt" || lower[i - 1] == "doubt")) {
      // unchanged
    } else if (negated(lex, lower[i - 3])) {
      valence *= lex.negation_scalar;
    }
  }
  return valence;
}

inline double special_idioms_check(const ValenceLexicon& lex, double valence,
                                   const std::vector<std::string>& lower, std::size_t i) {
  // callers guarantee i >= 3
  const std::string onezero = lower[i - 1] + " " + lower[i];
  const std::string twoonezero = lower[i - 2] + " " + lower[i - 1] + " " + lower[i];
  const std::string twoone = lower[i - 2] + " " + lower[i - 1];
  const std::string threetwoone = lower[i - 3] + " " + lower[i - 2] + " " + lower[i - 1];
  const std::string threetwo = lower[i - 3] + " " + lower[i - 2];

  for (const auto* seq : {&onezero, &twoonezero, &twoone, &threetwoone, &threetwo}) {
    auto it = lex.special_idioms.find(*seq);
    if (it != lex.special_idioms.end()) {
      valence = it->second;
      break;
    }
  }
  if (lower.size() - 1 > i) {
    const std::string zeroone = lower[i] + " " + lower[i + 1];
    auto it = lex.special_idioms.find(zeroone);
    if (it != lex.special_idioms.end()) valence = it->second;
  }
  if (lower.size() - 1 > i + 1) {
    const std::string zeroonetwo = lower[i] + " " + lower[i + 1] + " " + lower[i + 2];
    auto it = lex.special_idioms.find(zeroonetwo);
    if (it != lex.special_idioms.end()) valence = it->second;
  }
  for (const auto* seq : {&threetwoone, &threetwo, &twoone}) {
    auto it = lex.boosters.find(*seq);
    if (it != lex.boosters.end()) valence += it->second;
  }
  return valence;
}

inline double least_check(const ValenceLexicon& lex, double valence,
                          const std::vector<std::string>& lower, std::size_t i) {
  if (i > 1 && !lex.valence.count(lower[i - 1]) && lower[i - 1] == "least") {
    if (lower[i - 2] != "at" && lower[i - 2] != "very") valence *= lex.negation_scalar;
  } else if (i > 0 && !lex.valence.count(lower[i - 1]) && lower[i - 1] == "least") {
    valence *= lex.negation_scalar;
  }
  return valence;
}

inline void sentiment_valence(const ValenceLexicon& lex, const std::vector<std::string>& words,
                              const std::vector<std::string>& lower, bool is_cap_diff,
                              std::size_t i, std::vector<double>& sentiments) {
  double valence = 0.0;
  const std::string& item_lower = lower[i];
  auto it = lex.valence.find(item_lower);
  if (it != lex.valence.end()) {
    valence = it->second;

    // "no" negates an adjacent lexicon item instead of scoring itself
    if (item_lower == "no" && i + 1 < words.size() && lex.valence.count(lower[i + 1]))
      valence = 0.0;
    if ((i > 0 && lower[i - 1] == "no") || (i > 1 && lower[i - 2] == "no") ||
        (i > 2 && lower[i - 3] == "no" && (lower[i - 1] == "or" || lower[i - 1] == "nor")))
      valence = it->second * lex.negation_scalar;

    if (is_upper(words[i]) && is_cap_diff) {
      if (valence > 0)
        valence += lex.caps_increment;
      else
        valence -= lex.caps_increment;
    }

    for (int start_i = 0; start_i < 3; ++start_i) {
      if (i > static_cast<std::size_t>(start_i) &&
          !lex.valence.count(lower[i - static_cast<std::size_t>(start_i) - 1])) {
        double s = scalar_inc_dec(lex, words[i - static_cast<std::size_t>(start_i) - 1],
                                  valence, is_cap_diff);
        if (start_i == 1 && s != 0) s *= 0.95;
        if (start_i == 2 && s != 0) s *= 0.9;
        valence += s;
        valence = negation_check(lex, valence, lower, start_i, i);
        if (start_i == 2) valence = special_idioms_check(lex, valence, lower, i);
      }
    }
    valence = least_check(lex, valence, lower, i);
  }
  sentiments.push_back(valence);
}

// Contrastive-conjunction reweighting, replicated with the published
// implementation's first-occurrence index semantics (not positional).
inline void but_check(const std::vector<std::string>& lower, std::vector<double>& sentiments) {
  std::size_t bi = lower.size();
  for (std::size_t k = 0; k < lower.size(); ++k) {
    if (lower[k] == "but") {
      bi = k;
      break;
    }
  }
  if (bi == lower.size()) return;
  for (std::size_t k = 0; k < sentiments.size(); ++k) {
    const double v = sentiments[k];
    std::size_t si = 0;
    while (si < sentiments.size() && sentiments[si] != v) ++si;
    if (si >= sentiments.size()) continue;
    if (si < bi)
      sentiments[si] = v * 0.5;
    else if (si > bi)
      sentiments[si] = v * 1.5;
  }
}

inline double amplify_exclamation(const std::string& text) {
  long count = std::count(text.begin(), text.end(), '!');
  if (count > 4) count = 4;
  return static_cast<double>(count) * 0.292;
}

inline double amplify_question(const std::string& text) {
  const long count = std::count(text.begin(), text.end(), '?');
  if (count > 1) return count <= 3 ? static_cast<double>(count) * 0.18 : 0.96;
  return 0.0;
}

}  // namespace vader_detail

inline SentimentScore score_sentiment(const std::string& text, const ValenceLexicon& lexicon) {
  using namespace vader_detail;
  const std::vector<std::string> words = words_and_emoticons(text);
  SentimentScore score;
  score.neu = 0.0;
  if (words.empty()) {
    score.neu = 1.0;
    return score;
  }
  std::vector<std::string> lower;
  lower.reserve(words.size());
  for (const auto& w : words) lower.push_back(lower_ascii(w));
  const bool is_cap_diff = allcap_differential(words);

  std::vector<double> sentiments;
  sentiments.reserve(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (lexicon.boosters.count(lower[i])) {
      sentiments.push_back(0.0);
      continue;
    }
    if (i < words.size() - 1 && lower[i] == "kind" && lower[i + 1] == "of") {
      sentiments.push_back(0.0);
      continue;
    }
    sentiment_valence(lexicon, words, lower, is_cap_diff, i, sentiments);
  }
  but_check(lower, sentiments);

  double sum = 0.0;
  for (double s : sentiments) sum += s;
  const double punct = amplify_exclamation(text) + amplify_question(text);
  if (sum > 0)
    sum += punct;
  else if (sum < 0)
    sum -= punct;
  score.compound = normalize_compound(sum, lexicon.alpha);

  double pos_sum = 0.0, neg_sum = 0.0;
  int neu_count = 0;
  for (double s : sentiments) {
    if (s > 0) pos_sum += s + 1.0;
    if (s < 0) neg_sum += s - 1.0;
    if (s == 0) ++neu_count;
  }
  if (pos_sum > std::fabs(neg_sum))
    pos_sum += punct;
  else if (pos_sum < std::fabs(neg_sum))
    neg_sum -= punct;

  const double total = pos_sum + std::fabs(neg_sum) + neu_count;
  if (total > 0) {
    score.pos = std::fabs(pos_sum / total);
    score.neg = std::fabs(neg_sum / total);
    score.neu = std::fabs(static_cast<double>(neu_count) / total);
  } else {
    score.neu = 1.0;
    score.compound = 0.0;
  }
  return score;
}

}  // namespace agora
