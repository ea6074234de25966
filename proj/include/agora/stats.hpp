#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "agora/core.hpp"
#include "agora/errors.hpp"
#include "agora/version.hpp"

namespace agora {

// ---------------------------------------------------------------------------
// Descriptive statistics
// ---------------------------------------------------------------------------

inline double mean_of(const std::vector<double>& xs) {
  double s = 0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

inline double sample_variance(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double s = 0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

enum class CiMethod { normal, bootstrap };

struct CiEstimate {
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n = 0;
  CiMethod method = CiMethod::normal;
};

struct BootstrapOptions {
  int resamples = 10000;
  std::uint64_t seed = 42;
};

namespace detail {

inline std::uint64_t bounded_index(std::mt19937_64& rng, std::uint64_t n) {
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

}  // namespace detail

// 95% interval around the mean. normal: mean +- 1.96 sd/sqrt(n); bootstrap:
// percentile interval over seeded resamples, bit-reproducible for a fixed
// seed since the engine and index derivation are both pinned.
inline CiEstimate mean_ci95(const std::vector<double>& samples,
                            CiMethod method = CiMethod::normal,
                            const BootstrapOptions& bootstrap = {}) {
  if (samples.empty()) throw EmptySample("mean_ci95 over an empty sample");
  CiEstimate est;
  est.n = samples.size();
  est.mean = mean_of(samples);
  est.method = method;
  if (method == CiMethod::normal) {
    const double half =
        1.96 * std::sqrt(sample_variance(samples) / static_cast<double>(samples.size()));
    est.lo = est.mean - half;
    est.hi = est.mean + half;
    return est;
  }
  std::mt19937_64 rng(bootstrap.seed);
  std::vector<double> means(static_cast<std::size_t>(bootstrap.resamples));
  for (auto& m : means) {
    double s = 0;
    for (std::size_t i = 0; i < samples.size(); ++i)
      s += samples[detail::bounded_index(rng, samples.size())];
    m = s / static_cast<double>(samples.size());
  }
  std::sort(means.begin(), means.end());
  const auto rank = [&](double q) {
    const double pos = q * static_cast<double>(means.size() - 1);
    return means[static_cast<std::size_t>(std::llround(pos))];
  };
  est.lo = rank(0.025);
  est.hi = rank(0.975);
  return est;
}

// ---------------------------------------------------------------------------
// Two-sample tests
// ---------------------------------------------------------------------------

namespace detail {

// regularized incomplete beta via Lentz's continued fraction
inline double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kFpMin = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

inline double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double bt =
      std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
               b * std::log(1.0 - x));
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
  return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

}  // namespace detail

// two-sided p of a t statistic with the given degrees of freedom
inline double student_t_two_sided_p(double t, double df) {
  if (df <= 0) return 1.0;
  return detail::incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double df = 0.0;
  std::string method;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
};

// Welch's unequal-variance t-test with Welch-Satterthwaite degrees of
// freedom, two-sided.
inline TestResult welch_test(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2)
    throw TooFew("welch_test needs at least 2 observations per sample");
  const double va = sample_variance(a), vb = sample_variance(b);
  if (va == 0.0 && vb == 0.0)
    throw DegenerateVariance("both samples have zero variance");
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double se2 = va / na + vb / nb;
  TestResult r;
  r.method = "welch";
  r.n_a = a.size();
  r.n_b = b.size();
  r.statistic = (mean_of(a) - mean_of(b)) / std::sqrt(se2);
  r.df = se2 * se2 /
         ((va / na) * (va / na) / (na - 1.0) + (vb / nb) * (vb / nb) / (nb - 1.0));
  r.p_value = student_t_two_sided_p(r.statistic, r.df);
  return r;
}

// Mann-Whitney U with normal approximation and tie correction; offered as
// the nonparametric alternative.
inline TestResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2)
    throw TooFew("mann_whitney_u needs at least 2 observations per sample");
  struct Tagged {
    double value;
    bool from_a;
  };
  std::vector<Tagged> all;
  all.reserve(a.size() + b.size());
  for (double x : a) all.push_back({x, true});
  for (double x : b) all.push_back({x, false});
  std::sort(all.begin(), all.end(), [](const Tagged& x, const Tagged& y) {
    return x.value < y.value;
  });

  const double n = static_cast<double>(all.size());
  std::vector<double> ranks(all.size());
  double tie_term = 0.0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j].value == all[i].value) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j) + 1.0) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[k] = rank;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  double rank_sum_a = 0;
  for (std::size_t i = 0; i < all.size(); ++i)
    if (all[i].from_a) rank_sum_a += ranks[i];

  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double u_a = rank_sum_a - na * (na + 1.0) / 2.0;
  const double mu = na * nb / 2.0;
  const double sigma2 = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (sigma2 <= 0.0) throw DegenerateVariance("all observations tied");
  const double z = (u_a - mu) / std::sqrt(sigma2);

  TestResult r;
  r.method = "mann-whitney";
  r.n_a = a.size();
  r.n_b = b.size();
  r.statistic = u_a;
  r.df = 0;
  r.p_value = std::min(1.0, std::erfc(std::fabs(z) / std::sqrt(2.0)));
  return r;
}

// ---------------------------------------------------------------------------
// Metric sample interchange (JSONL)
// ---------------------------------------------------------------------------

inline void save_samples(const std::vector<MetricSample>& samples,
                         const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write samples file: " + path.string());
  for (const auto& s : samples) {
    nlohmann::json j{{"dimension", to_string(s.dimension)}, {"value", s.value},
                     {"keys", s.keys}};
    out << j.dump() << '\n';
  }
}

inline std::vector<MetricSample> load_samples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open samples file: " + path.string());
  std::vector<MetricSample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      MetricSample s;
      s.dimension = dimension_from_string(j.at("dimension").get<std::string>());
      s.value = j.at("value").get<double>();
      for (const auto& [k, v] : j.at("keys").items()) s.keys[k] = v.get<std::string>();
      if (!sample_in_range(s))
        throw ParseError("sample out of range for its dimension");
      out.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("samples file " + path.string() + " line " + std::to_string(line_no) +
                       ": " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Figure table emission
// ---------------------------------------------------------------------------

struct Provenance {
  std::string config_digest = "unconfigured";
  std::int64_t seed = 0;
};

struct EmitOptions {
  Provenance provenance;
  // key names the group/source columns are read from
  std::string group_key = "model";
  std::string source_key = "source";
  std::optional<std::map<int, double>> reference_shares;  // fig1 only
};

namespace detail {

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

inline std::ofstream open_artifact(const std::filesystem::path& path, const Provenance& prov) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write artifact: " + path.string());
  out << "# agora " << kVersion << " config=" << prov.config_digest << " seed=" << prov.seed
      << "\n";
  return out;
}

inline std::string key_or(const MetricSample& s, const std::string& key,
                          const std::string& fallback) {
  auto it = s.keys.find(key);
  return it == s.keys.end() ? fallback : it->second;
}

inline void write_ci_rows(std::ofstream& out,
                          const std::map<std::pair<std::string, std::string>,
                                         std::vector<double>>& groups) {
  for (const auto& [key, values] : groups) {
    const auto ci = mean_ci95(values);
    out << csv_escape(key.first) << ',' << csv_escape(key.second) << ',' << ci.mean << ','
        << ci.lo << ',' << ci.hi << ',' << ci.n << '\n';
  }
}

}  // namespace detail

// Writes the per-figure CSV table(s) plus a declarative plot-spec JSON
// into out_dir; returns the list of files written. Figure ids: fig1..fig7.
inline std::vector<std::filesystem::path> emit_tables(const std::vector<MetricSample>& samples,
                                                      const std::string& figure,
                                                      const std::filesystem::path& out_dir,
                                                      const EmitOptions& options = {}) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::vector<fs::path> written;
  const auto& prov = options.provenance;

  auto filter = [&](Dimension d) {
    std::vector<const MetricSample*> out;
    for (const auto& s : samples)
      if (s.dimension == d) out.push_back(&s);
    return out;
  };

  auto plotspec = [&](nlohmann::json charts) {
    const auto path = out_dir / (figure + ".plotspec.json");
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write plot spec: " + path.string());
    out << nlohmann::json{{"figure", figure},
                          {"charts", std::move(charts)},
                          {"provenance",
                           {{"config_digest", prov.config_digest},
                            {"seed", prov.seed},
                            {"tool_version", kVersion}}}}
               .dump(2)
        << '\n';
    written.push_back(path);
  };

  // writes one CI table; returns false when the subset is empty so figures
  // with several panels can emit the panels that have data
  auto ci_table = [&](const std::vector<const MetricSample*>& subset, const fs::path& path,
                      const std::string& group_header, const std::string& source_header,
                      const std::string& source_key) {
    if (subset.empty()) return false;
    std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
    for (const auto* s : subset)
      groups[{detail::key_or(*s, options.group_key, "all"),
              detail::key_or(*s, source_key, "all")}]
          .push_back(s->value);
    auto out = detail::open_artifact(path, prov);
    out << group_header << ',' << source_header << ",mean,ci_lo,ci_hi,n\n";
    detail::write_ci_rows(out, groups);
    written.push_back(path);
    return true;
  };

  if (figure == "fig1") {
    auto subset = filter(Dimension::role_code);
    if (subset.empty()) throw EmptyInput("no role_code samples for fig1");
    std::map<std::string, std::map<int, std::size_t>> counts;
    for (const auto* s : subset)
      ++counts[detail::key_or(*s, options.group_key, "all")]
              [static_cast<int>(std::llround(s->value))];
    const auto path = out_dir / "fig1.csv";
    auto out = detail::open_artifact(path, prov);
    out << "group,code,count,share,reference_share,diff\n";
    for (const auto& [group, by_code] : counts) {
      std::size_t total = 0;
      for (const auto& [_, c] : by_code) total += c;
      for (const auto& [code, count] : by_code) {
        const double share = static_cast<double>(count) / static_cast<double>(total);
        double ref = 0.0;
        if (options.reference_shares) {
          auto it = options.reference_shares->find(code);
          if (it != options.reference_shares->end()) ref = it->second;
        }
        out << detail::csv_escape(group) << ',' << code << ',' << count << ',' << share << ','
            << ref << ',' << (share - ref) << '\n';
      }
    }
    written.push_back(path);
    plotspec(nlohmann::json::array({{{"file", "fig1.csv"},
                                     {"kind", "grouped_bar"},
                                     {"x", "code"},
                                     {"y", "share"},
                                     {"series", "group"},
                                     {"baseline", "reference_share"}}}));
  } else if (figure == "fig2") {
    const bool inter = ci_table(filter(Dimension::inter_sim), out_dir / "fig2_inter.csv",
                                "group", "source", options.source_key);
    const bool intra = ci_table(filter(Dimension::intra_sim), out_dir / "fig2_intra.csv",
                                "group", "source", options.source_key);
    if (!inter && !intra) throw EmptyInput("no similarity samples for fig2");
    plotspec(nlohmann::json::array(
        {{{"file", "fig2_inter.csv"}, {"kind", "bar"}, {"x", "group"}, {"y", "mean"},
          {"series", "source"}, {"ci", {"ci_lo", "ci_hi"}}},
         {{"file", "fig2_intra.csv"}, {"kind", "bar"}, {"x", "group"}, {"y", "mean"},
          {"series", "source"}, {"ci", {"ci_lo", "ci_hi"}}}}));
  } else if (figure == "fig3") {
    auto subset = filter(Dimension::inter_sim);
    if (subset.empty()) throw EmptyInput("no pairwise samples for fig3");
    std::map<std::tuple<std::string, int, int>, std::pair<double, int>> cells;
    for (const auto* s : subset) {
      const int i = std::stoi(detail::key_or(*s, "i", "0"));
      const int j = std::stoi(detail::key_or(*s, "j", "0"));
      auto& cell = cells[{detail::key_or(*s, "group_size", "all"), i, j}];
      cell.first += s->value;
      cell.second += 1;
    }
    const auto path = out_dir / "fig3.csv";
    auto out = detail::open_artifact(path, prov);
    out << "G,i,j,mean,count\n";
    for (const auto& [key, cell] : cells) {
      out << detail::csv_escape(std::get<0>(key)) << ',' << std::get<1>(key) << ','
          << std::get<2>(key) << ',' << cell.first / cell.second << ',' << cell.second << '\n';
    }
    written.push_back(path);
    plotspec(nlohmann::json::array({{{"file", "fig3.csv"},
                                     {"kind", "heatmap"},
                                     {"x", "i"},
                                     {"y", "j"},
                                     {"value", "mean"},
                                     {"facet", "G"},
                                     {"mask_diagonal", true}}}));
  } else if (figure == "fig4") {
    auto subset = filter(Dimension::keyword_weight);
    if (subset.empty()) throw EmptyInput("no keyword samples for fig4");
    std::map<std::pair<std::string, int>, std::pair<double, std::size_t>> cells;
    for (const auto* s : subset) {
      const int turn = std::stoi(detail::key_or(*s, "first_turn", "1"));
      auto& cell = cells[{detail::key_or(*s, options.group_key, "all"), turn}];
      cell.first += s->value;
      cell.second += 1;
    }
    const auto path = out_dir / "fig4.csv";
    auto out = detail::open_artifact(path, prov);
    out << "group,first_turn,mean_weight,keyword_count\n";
    for (const auto& [key, cell] : cells)
      out << detail::csv_escape(key.first) << ',' << key.second << ','
          << cell.first / static_cast<double>(cell.second) << ',' << cell.second << '\n';
    written.push_back(path);
    plotspec(nlohmann::json::array({{{"file", "fig4.csv"},
                                     {"kind", "line"},
                                     {"x", "first_turn"},
                                     {"y", "mean_weight"},
                                     {"series", "group"}}}));
  } else if (figure == "fig5") {
    const bool senti = ci_table(filter(Dimension::sentiment), out_dir / "fig5_sentiment.csv",
                                "group", "source", options.source_key);
    const bool cats = ci_table(filter(Dimension::category_freq),
                               out_dir / "fig5_categories.csv", "group", "category", "category");
    if (!senti && !cats) throw EmptyInput("no sentiment/category samples for fig5");
    plotspec(nlohmann::json::array(
        {{{"file", "fig5_sentiment.csv"}, {"kind", "bar"}, {"x", "group"}, {"y", "mean"},
          {"series", "source"}, {"ci", {"ci_lo", "ci_hi"}}},
         {{"file", "fig5_categories.csv"}, {"kind", "grouped_bar"}, {"x", "category"},
          {"y", "mean"}, {"series", "group"}, {"ci", {"ci_lo", "ci_hi"}}}}));
  } else if (figure == "fig6") {
    std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
    bool any = false;
    for (const auto& s : samples) {
      if (s.dimension != Dimension::inter_sim && s.dimension != Dimension::intra_sim &&
          s.dimension != Dimension::sentiment)
        continue;
      any = true;
      groups[{detail::key_or(s, "group_size", "all"), to_string(s.dimension)}].push_back(
          s.value);
    }
    if (!any) throw EmptyInput("no similarity/sentiment samples for fig6");
    const auto path = out_dir / "fig6.csv";
    auto out = detail::open_artifact(path, prov);
    out << "group_size,dimension,mean,ci_lo,ci_hi,n\n";
    detail::write_ci_rows(out, groups);
    written.push_back(path);
    plotspec(nlohmann::json::array({{{"file", "fig6.csv"},
                                     {"kind", "line"},
                                     {"x", "group_size"},
                                     {"y", "mean"},
                                     {"series", "dimension"},
                                     {"ci", {"ci_lo", "ci_hi"}}}}));
  } else if (figure == "fig7") {
    std::map<std::tuple<std::string, std::string, std::string>, std::vector<double>> groups;
    bool any = false;
    for (const auto& s : samples) {
      std::string metric;
      if (s.dimension == Dimension::sentiment) metric = "sentiment";
      else if (s.dimension == Dimension::inter_sim) metric = "alignment";
      else continue;
      any = true;
      groups[{detail::key_or(s, "dataset", "all"), detail::key_or(s, "class", "all"), metric}]
          .push_back(s.value);
    }
    if (!any) throw EmptyInput("no preference samples for fig7");
    const auto path = out_dir / "fig7.csv";
    auto out = detail::open_artifact(path, prov);
    out << "dataset,class,metric,mean,ci_lo,ci_hi,n\n";
    for (const auto& [key, values] : groups) {
      const auto ci = mean_ci95(values);
      out << detail::csv_escape(std::get<0>(key)) << ',' << detail::csv_escape(std::get<1>(key))
          << ',' << std::get<2>(key) << ',' << ci.mean << ',' << ci.lo << ',' << ci.hi << ','
          << ci.n << '\n';
    }
    written.push_back(path);
    plotspec(nlohmann::json::array({{{"file", "fig7.csv"},
                                     {"kind", "grouped_bar"},
                                     {"x", "dataset"},
                                     {"y", "mean"},
                                     {"series", "class"},
                                     {"facet", "metric"},
                                     {"ci", {"ci_lo", "ci_hi"}}}}));
  } else {
    throw UnknownFigure("unknown figure id: " + figure);
  }
  return written;
}

}  // namespace agora
