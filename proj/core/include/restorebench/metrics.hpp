#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "restorebench/annotation.hpp"
#include "restorebench/frames.hpp"

namespace restorebench {

inline constexpr int kTopK = 5;

struct Prediction {
  std::string synset;
  double probability = 0.0;
};

// One classifier's ranked top-5 output for one crop.
struct PredictionRecord {
  std::string crop_id;
  std::string network_id;
  std::array<Prediction, kTopK> top5;
};

// Throws ValidationError unless there are exactly five distinct synsets with
// probabilities in [0,1], non-increasing.
void validate(const PredictionRecord& record);

// {"crop_id": ..., "network_id": ..., "predictions": [{"synset": ..., "prob": ...} x5]}
std::vector<PredictionRecord> parse_predictions(std::string_view jsonl);
std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path);

// At least one label synset appears among the top five.
bool m1_hit(const std::set<std::string>& label_synsets, std::span<const std::string> top5);
// Every label synset appears among the top five (impossible when |L| > 5).
bool m2_hit(const std::set<std::string>& label_synsets, std::span<const std::string> top5);

enum class Metric { kM1, kM2 };
std::string_view metric_name(Metric m);

struct CellKey {
  std::string collection;
  std::string network;
  friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

struct MetricReport {
  CellKey cell;
  long evaluated = 0;
  long m1_hits = 0;
  long m2_hits = 0;
  double m1_rate = 0.0;
  double m2_rate = 0.0;
  long m2_unachievable = 0;  // evaluated crops whose label has > 5 synsets
  std::map<std::string, long> skipped;  // reason -> count

  double rate(Metric m) const noexcept { return m == Metric::kM1 ? m1_rate : m2_rate; }
};

// One report per (collection, network) that has at least one prediction.
// Manifest crops of that collection with no prediction from that network are
// counted as skipped ("missing_prediction"), never as misses. A prediction
// for an unknown crop, a label missing from the map, or two predictions for
// the same (crop, network) raise ValidationError.
std::vector<MetricReport> aggregate_rates(const std::vector<PredictionRecord>& predictions,
                                          const Manifest& manifest,
                                          const SuperClassMap& superclasses);

struct CellComparison {
  CellKey cell;
  Metric metric = Metric::kM1;
  std::optional<double> enhanced;
  std::optional<double> baseline;
  std::optional<double> delta;  // set iff comparable
  bool valid = false;           // delta > epsilon
  bool comparable() const noexcept { return delta.has_value(); }
};

struct ComparisonReport {
  double epsilon = 0.0;
  std::vector<CellComparison> cells;  // ordered by (collection, network, metric)
};

ComparisonReport compare(const std::vector<MetricReport>& enhanced,
                         const std::vector<MetricReport>& baseline, double epsilon = 0.0);

struct CellAward {
  CellKey cell;
  Metric metric = Metric::kM1;
  std::vector<std::string> winners;  // every tied leader among valid scores
};

struct RankTable {
  std::map<std::string, int> points;  // every algorithm, including zero scorers
  std::vector<CellAward> awards;
  int cell_count = 0;
};

// A point per cell goes to every algorithm whose score is valid (strictly
// above baseline + epsilon) and maximal among all competitors in that cell.
// All algorithms must cover the same cells as the baseline.
RankTable rank_points(const std::map<std::string, std::vector<MetricReport>>& algorithms,
                      const std::vector<MetricReport>& baseline, double epsilon = 0.0);

// Report files: {"reports": [{collection, network, evaluated, m1_hits, ...}]}.
nlohmann::json to_json(const std::vector<MetricReport>& reports);
std::vector<MetricReport> reports_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ComparisonReport& report);
nlohmann::json to_json(const RankTable& table);

// {"image_id": ..., "score": ...} per line (LPIPS or any per-image scalar).
std::map<std::string, double> parse_external_scores(std::string_view jsonl);
std::map<std::string, double> load_external_scores(const std::filesystem::path& path);

}  // namespace restorebench
