// Copyright 2026 The egoview Authors
// SPDX-License-Identifier: Apache-2.0

#include "egoview/evaluate.hpp"

#include <cstdio>
#include <istream>
#include <map>
#include <set>
#include <sstream>

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include "egoview/error.hpp"
#include "egoview/util.hpp"

namespace egoview::evaluate {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

icu::UnicodeString nfkc(const icu::UnicodeString& s) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFKCInstance(status);
  if (U_FAILURE(status)) throw Error(ErrorKind::InvalidArgument, "ICU NFKC data unavailable");
  icu::UnicodeString out = norm->normalize(s, status);
  if (U_FAILURE(status)) throw Error(ErrorKind::InvalidArgument, "NFKC normalization failed");
  return out;
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

bool is_end_punct(char c) { return c == '.' || c == '?' || c == '!'; }

template <typename Fn>
void for_each_line(std::istream& in, std::string_view source, Fn&& fn) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = std::string(source) + ":" + std::to_string(number);
    json doc = json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
      throw Error(ErrorKind::Schema, where + ": not a JSON object");
    }
    if (doc.contains("_provenance")) continue;
    fn(doc, where);
  }
}

std::string string_field(const json& doc, std::initializer_list<const char*> keys,
                         const std::string& where) {
  for (const char* k : keys) {
    auto it = doc.find(k);
    if (it != doc.end() && it->is_string()) return it->get<std::string>();
  }
  throw Error(ErrorKind::Schema, where + ": missing string field '" + *keys.begin() + "'");
}

}  // namespace

std::string normalize_answer(std::string_view text) {
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  u = nfkc(u);
  u.toLower(icu::Locale::getRoot());
  u = nfkc(u);
  std::string utf8;
  u.toUTF8String(utf8);

  std::string out;
  out.reserve(utf8.size());
  bool pending_space = false;
  for (char c : utf8) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  while (!out.empty() && (is_end_punct(out.back()) || out.back() == ' ')) out.pop_back();
  return out;
}

std::vector<Prediction> read_predictions(std::istream& in, std::string_view source) {
  std::vector<Prediction> out;
  std::set<std::string> seen;
  for_each_line(in, source, [&](const json& doc, const std::string& where) {
    Prediction p{string_field(doc, {"question_id"}, where),
                 string_field(doc, {"prediction", "answer"}, where)};
    if (!seen.insert(p.question_id).second) {
      throw Error(ErrorKind::DuplicatePrediction, where + ": duplicate prediction for " + p.question_id);
    }
    out.push_back(std::move(p));
  });
  return out;
}

std::vector<GoldRecord> read_gold(std::istream& in, std::string_view source) {
  std::vector<GoldRecord> out;
  std::set<std::string> seen;
  for_each_line(in, source, [&](const json& doc, const std::string& where) {
    GoldRecord g;
    g.question_id = string_field(doc, {"question_id", "instruction_id"}, where);
    if (auto it = doc.find("answers"); it != doc.end() && it->is_array()) {
      for (const auto& a : *it) {
        if (!a.is_string()) throw Error(ErrorKind::Schema, where + ": answers must be strings");
        g.answers.push_back(a.get<std::string>());
      }
    } else {
      g.answers.push_back(string_field(doc, {"answer"}, where));
    }
    if (g.answers.empty()) throw Error(ErrorKind::Schema, where + ": no gold answer");

    if (auto it = doc.find("min_view_count"); it != doc.end() && !it->is_null()) {
      const json* n = &*it;
      if (it->is_object()) n = it->contains("n") ? &it->at("n") : nullptr;
      if (n && n->is_number_integer() && n->get<std::int64_t>() > 0) {
        g.bucket = solvability::bucket_for_count(n->get<std::size_t>());
      }
    } else if (auto b = doc.find("bucket"); b != doc.end() && b->is_string()) {
      const auto s = b->get<std::string>();
      if (s == "1") g.bucket = solvability::ViewBucket::One;
      if (s == "2") g.bucket = solvability::ViewBucket::Two;
      if (s == "3") g.bucket = solvability::ViewBucket::Three;
      if (s == "4+") g.bucket = solvability::ViewBucket::FourPlus;
    }
    if (!seen.insert(g.question_id).second) {
      throw Error(ErrorKind::DuplicateId, where + ": duplicate gold record " + g.question_id);
    }
    out.push_back(std::move(g));
  });
  return out;
}

EvalReport em_score(std::span<const Prediction> predictions, std::span<const GoldRecord> gold) {
  std::map<std::string_view, const GoldRecord*> by_id;
  for (const auto& g : gold) by_id.emplace(g.question_id, &g);

  std::map<std::string_view, const Prediction*> preds;
  for (const auto& p : predictions) {
    if (!by_id.contains(p.question_id)) {
      throw Error(ErrorKind::MissingGold, "no gold record for prediction " + p.question_id);
    }
    if (!preds.emplace(p.question_id, &p).second) {
      throw Error(ErrorKind::DuplicatePrediction, "duplicate prediction for " + p.question_id);
    }
  }

  EvalReport report;
  for (const auto& g : gold) {
    bool hit = false;
    if (auto it = preds.find(g.question_id); it != preds.end()) {
      const std::string pred = normalize_answer(it->second->prediction);
      for (const auto& a : g.answers) hit = hit || normalize_answer(a) == pred;
    } else {
      ++report.missing_predictions;
    }
    ++report.total;
    report.correct += hit ? 1 : 0;
    if (g.bucket && *g.bucket != solvability::ViewBucket::Unsolvable) {
      auto& b = report.buckets[static_cast<std::size_t>(*g.bucket)];
      ++b.count;
      b.correct += hit ? 1 : 0;
    } else {
      ++report.unbucketed;
    }
  }
  report.overall_em = percent_1dp(report.correct, report.total);
  for (auto& b : report.buckets) b.em = percent_1dp(b.correct, b.count);
  return report;
}

ordered_json to_json(const EvalReport& r) {
  static constexpr const char* names[] = {"1", "2", "3", "4+"};
  ordered_json j;
  j["report"] = "exact_match";
  j["normalization"] = kNormalizationVersion;
  j["articles_stripped"] = false;
  j["total"] = r.total;
  j["correct"] = r.correct;
  j["overall_em"] = r.overall_em;
  ordered_json buckets = ordered_json::object();
  for (std::size_t i = 0; i < r.buckets.size(); ++i) {
    buckets[names[i]] = {{"count", r.buckets[i].count},
                         {"correct", r.buckets[i].correct},
                         {"em", r.buckets[i].em}};
  }
  j["per_bucket"] = buckets;
  j["unbucketed"] = r.unbucketed;
  j["missing_predictions"] = r.missing_predictions;
  return j;
}

std::string format_table(const EvalReport& r) {
  std::ostringstream out;
  char line[128];
  std::snprintf(line, sizeof line, "%-8s %8s %8s %8s %8s %8s\n", "", "All", "N=1", "N=2", "N=3",
                "N>=4");
  out << line;
  std::snprintf(line, sizeof line, "%-8s %8.1f %8.1f %8.1f %8.1f %8.1f\n", "EM", r.overall_em,
                r.buckets[0].em, r.buckets[1].em, r.buckets[2].em, r.buckets[3].em);
  out << line;
  std::snprintf(line, sizeof line, "%-8s %8zu %8zu %8zu %8zu %8zu\n", "count", r.total,
                r.buckets[0].count, r.buckets[1].count, r.buckets[2].count, r.buckets[3].count);
  out << line;
  return out.str();
}

ordered_json solvability_report(const solvability::ViewHistogram& h,
                                const solvability::WitnessConfig& cfg, std::size_t stride) {
  using solvability::ViewBucket;
  ordered_json j;
  j["report"] = "view_requirement";
  j["total"] = h.total();
  j["empty"] = h.total() == 0;
  ordered_json hist = ordered_json::object();
  for (ViewBucket b : solvability::kAllBuckets) {
    hist[std::string(solvability::to_string(b))] = {{"count", h.count(b)},
                                                    {"percent", h.percent(b)}};
  }
  j["histogram"] = hist;
  const std::size_t solved = h.exact + h.greedy;
  j["solver_mix"] = {{"exact", h.exact},
                     {"greedy", h.greedy},
                     {"exact_percent", percent_1dp(h.exact, solved)},
                     {"greedy_percent", percent_1dp(h.greedy, solved)}};
  j["witness_config"] = {{"iosa_threshold", cfg.iosa_threshold},
                         {"min_area_ratio", cfg.min_area_ratio}};
  j["view_stride"] = stride;
  return j;
}

std::string format_table(const solvability::ViewHistogram& h) {
  using solvability::ViewBucket;
  std::ostringstream out;
  char line[128];
  std::snprintf(line, sizeof line, "%-12s %8s %8s\n", "views", "count", "percent");
  out << line;
  for (ViewBucket b : solvability::kAllBuckets) {
    std::snprintf(line, sizeof line, "%-12s %8zu %7.1f%%\n",
                  std::string(solvability::to_string(b)).c_str(), h.count(b), h.percent(b));
    out << line;
  }
  std::snprintf(line, sizeof line, "%-12s %8zu\n", "total", h.total());
  out << line;
  return out.str();
}

}  // namespace egoview::evaluate
