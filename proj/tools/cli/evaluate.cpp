#include <fstream>

#include <nlohmann/json.hpp>

#include "cli/commands.hpp"
#include "cli/staging.hpp"
#include "restorebench/annotation.hpp"
#include "restorebench/error.hpp"
#include "restorebench/frames.hpp"
#include "restorebench/metrics.hpp"

namespace restorebench::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<MetricReport> load_reports(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return reports_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw ParseError(0, path.string() + ": " + e.what());
  }
}

}  // namespace

int cmd_evaluate(const GlobalOptions&, const EvaluateOptions& options) {
  const Manifest manifest = load_manifest(options.manifest);
  const SuperClassMap superclasses = load_superclass_map(options.superclasses);
  const auto enhanced = aggregate_rates(load_predictions(options.predictions), manifest, superclasses);
  const auto baseline = aggregate_rates(load_predictions(options.baseline), manifest, superclasses);
  const ComparisonReport comparison = compare(enhanced, baseline, options.epsilon);

  StagedDirectory staged(options.out);
  write_text_atomic(staged.path() / "enhanced_metrics.json", to_json(enhanced).dump(2) + "\n");
  write_text_atomic(staged.path() / "baseline_metrics.json", to_json(baseline).dump(2) + "\n");
  write_text_atomic(staged.path() / "comparison.json", to_json(comparison).dump(2) + "\n");
  staged.commit();
  progress("evaluate: " + std::to_string(enhanced.size()) + " cells, " +
           std::to_string(comparison.cells.size()) + " comparisons");
  return kOk;
}

int cmd_rank(const GlobalOptions&, const RankOptions& options) {
  if (options.algorithms.empty()) throw ValidationError("no algorithms to rank");
  const auto baseline = load_reports(options.baseline);
  std::map<std::string, std::vector<MetricReport>> algorithms;
  for (const auto& [name, path] : options.algorithms) algorithms[name] = load_reports(path);
  const RankTable table = rank_points(algorithms, baseline, options.epsilon);
  write_text_atomic(options.out, to_json(table).dump(2) + "\n");
  for (const auto& [name, points] : table.points) {
    progress("rank: " + name + " " + std::to_string(points) + "/" + std::to_string(table.cell_count));
  }
  return kOk;
}

}  // namespace restorebench::cli
