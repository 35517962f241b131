#include "restorebench/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "restorebench/error.hpp"

namespace restorebench {

namespace {

using nlohmann::json;

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

template <typename Fn>
void for_each_json_line(std::string_view text, const char* what, Fn&& fn) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      fn(json::parse(line));
    } catch (const json::exception& e) {
      throw ParseError(number, std::string(what) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ParseError(number, std::string(what) + ": " + e.what());
    }
  }
}

}  // namespace

void validate(const PredictionRecord& r) {
  std::set<std::string> seen;
  for (int i = 0; i < kTopK; ++i) {
    const auto& p = r.top5[i];
    if (p.synset.empty()) throw ValidationError("empty synset id");
    if (!(p.probability >= 0.0 && p.probability <= 1.0)) {
      throw ValidationError("probability outside [0,1] for " + p.synset);
    }
    if (i > 0 && p.probability > r.top5[i - 1].probability) {
      throw ValidationError("probabilities must be non-increasing");
    }
    if (!seen.insert(p.synset).second) throw ValidationError("repeated synset " + p.synset);
  }
}

std::vector<PredictionRecord> parse_predictions(std::string_view jsonl) {
  std::vector<PredictionRecord> out;
  for_each_json_line(jsonl, "predictions", [&](const json& j) {
    PredictionRecord r;
    r.crop_id = j.at("crop_id").get<std::string>();
    r.network_id = j.at("network_id").get<std::string>();
    const auto& preds = j.at("predictions");
    if (!preds.is_array() || preds.size() != kTopK) {
      throw ValidationError("expected exactly 5 predictions, got " +
                            std::to_string(preds.is_array() ? preds.size() : 0));
    }
    for (int i = 0; i < kTopK; ++i) {
      r.top5[i] = {preds[i].at("synset").get<std::string>(), preds[i].at("prob").get<double>()};
    }
    validate(r);
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path) {
  return parse_predictions(slurp(path));
}

bool m1_hit(const std::set<std::string>& label, std::span<const std::string> top5) {
  return std::any_of(top5.begin(), top5.end(), [&](const auto& s) { return label.count(s) != 0; });
}

bool m2_hit(const std::set<std::string>& label, std::span<const std::string> top5) {
  return std::all_of(label.begin(), label.end(), [&](const auto& s) {
    return std::find(top5.begin(), top5.end(), s) != top5.end();
  });
}

std::string_view metric_name(Metric m) { return m == Metric::kM1 ? "M1" : "M2"; }

std::vector<MetricReport> aggregate_rates(const std::vector<PredictionRecord>& predictions,
                                          const Manifest& manifest,
                                          const SuperClassMap& superclasses) {
  std::map<std::string, const CropRecord*> crops;
  std::map<std::string, long> crops_per_collection;
  for (const auto& c : manifest.crops) {
    if (!crops.emplace(c.crop_id, &c).second) {
      throw ValidationError("manifest repeats crop " + c.crop_id);
    }
    ++crops_per_collection[c.collection];
  }

  std::map<CellKey, MetricReport> cells;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& p : predictions) {
    auto it = crops.find(p.crop_id);
    if (it == crops.end()) throw ValidationError("prediction for unknown crop " + p.crop_id);
    if (!seen.emplace(p.crop_id, p.network_id).second) {
      throw ValidationError("duplicate prediction for crop " + p.crop_id + " from " + p.network_id);
    }
    const auto& label = superclasses.synsets(it->second->label);
    std::array<std::string, kTopK> top;
    for (int i = 0; i < kTopK; ++i) top[i] = p.top5[i].synset;

    CellKey key{it->second->collection, p.network_id};
    auto& report = cells[key];
    report.cell = key;
    ++report.evaluated;
    report.m1_hits += m1_hit(label, top);
    report.m2_hits += m2_hit(label, top);
    if (label.size() > static_cast<std::size_t>(kTopK)) ++report.m2_unachievable;
  }

  std::vector<MetricReport> out;
  for (auto& [key, report] : cells) {
    const long missing = crops_per_collection[key.collection] - report.evaluated;
    if (missing > 0) report.skipped["missing_prediction"] = missing;
    report.m1_rate = static_cast<double>(report.m1_hits) / report.evaluated;
    report.m2_rate = static_cast<double>(report.m2_hits) / report.evaluated;
    out.push_back(std::move(report));
  }
  return out;
}

ComparisonReport compare(const std::vector<MetricReport>& enhanced,
                         const std::vector<MetricReport>& baseline, double epsilon) {
  std::map<CellKey, const MetricReport*> enh, base;
  for (const auto& r : enhanced) enh[r.cell] = &r;
  for (const auto& r : baseline) base[r.cell] = &r;
  std::set<CellKey> keys;
  for (const auto& [k, r] : enh) keys.insert(k);
  for (const auto& [k, r] : base) keys.insert(k);

  ComparisonReport report;
  report.epsilon = epsilon;
  for (const auto& key : keys) {
    for (Metric m : {Metric::kM1, Metric::kM2}) {
      CellComparison c;
      c.cell = key;
      c.metric = m;
      if (auto it = enh.find(key); it != enh.end()) c.enhanced = it->second->rate(m);
      if (auto it = base.find(key); it != base.end()) c.baseline = it->second->rate(m);
      if (c.enhanced && c.baseline) {
        c.delta = *c.enhanced - *c.baseline;
        c.valid = *c.delta > epsilon;
      }
      report.cells.push_back(std::move(c));
    }
  }
  return report;
}

json to_json(const std::vector<MetricReport>& reports) {
  json list = json::array();
  for (const auto& r : reports) {
    list.push_back({{"collection", r.cell.collection},
                    {"network", r.cell.network},
                    {"evaluated", r.evaluated},
                    {"m1_hits", r.m1_hits},
                    {"m2_hits", r.m2_hits},
                    {"m1_rate", r.m1_rate},
                    {"m2_rate", r.m2_rate},
                    {"m1_rate_exact", std::to_string(r.m1_hits) + "/" + std::to_string(r.evaluated)},
                    {"m2_rate_exact", std::to_string(r.m2_hits) + "/" + std::to_string(r.evaluated)},
                    {"m2_unachievable", r.m2_unachievable},
                    {"skipped", r.skipped}});
  }
  return {{"reports", list}};
}

std::vector<MetricReport> reports_from_json(const json& doc) {
  std::vector<MetricReport> out;
  try {
    for (const auto& j : doc.at("reports")) {
      MetricReport r;
      r.cell = {j.at("collection").get<std::string>(), j.at("network").get<std::string>()};
      r.evaluated = j.value("evaluated", 0L);
      r.m1_hits = j.value("m1_hits", 0L);
      r.m2_hits = j.value("m2_hits", 0L);
      if (j.contains("m1_rate")) {
        r.m1_rate = j["m1_rate"].get<double>();
        r.m2_rate = j.at("m2_rate").get<double>();
      } else {
        if (r.evaluated <= 0) throw ValidationError("report needs rates or a positive evaluated count");
        r.m1_rate = static_cast<double>(r.m1_hits) / r.evaluated;
        r.m2_rate = static_cast<double>(r.m2_hits) / r.evaluated;
      }
      r.m2_unachievable = j.value("m2_unachievable", 0L);
      if (j.contains("skipped")) r.skipped = j["skipped"].get<std::map<std::string, long>>();
      if (!(r.m1_rate >= 0.0 && r.m1_rate <= 1.0 && r.m2_rate >= 0.0 && r.m2_rate <= 1.0)) {
        throw ValidationError("rates must lie in [0,1]");
      }
      out.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("report file: ") + e.what());
  }
  return out;
}

json to_json(const ComparisonReport& report) {
  json cells = json::array();
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  for (const auto& c : report.cells) {
    cells.push_back({{"collection", c.cell.collection},
                     {"network", c.cell.network},
                     {"metric", metric_name(c.metric)},
                     {"enhanced", opt(c.enhanced)},
                     {"baseline", opt(c.baseline)},
                     {"delta", opt(c.delta)},
                     {"comparable", c.comparable()},
                     {"valid", c.valid}});
  }
  return {{"epsilon", report.epsilon}, {"cells", cells}};
}

std::map<std::string, double> parse_external_scores(std::string_view jsonl) {
  std::map<std::string, double> scores;
  for_each_json_line(jsonl, "scores", [&](const json& j) {
    const auto id = j.at("image_id").get<std::string>();
    if (!scores.emplace(id, j.at("score").get<double>()).second) {
      throw ValidationError("duplicate score for " + id);
    }
  });
  return scores;
}

std::map<std::string, double> load_external_scores(const std::filesystem::path& path) {
  return parse_external_scores(slurp(path));
}

}  // namespace restorebench
