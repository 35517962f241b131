#include <algorithm>

#include <nlohmann/json.hpp>

#include "restorebench/error.hpp"
#include "restorebench/metrics.hpp"

namespace restorebench {

RankTable rank_points(const std::map<std::string, std::vector<MetricReport>>& algorithms,
                      const std::vector<MetricReport>& baseline, double epsilon) {
  if (algorithms.empty()) throw ContractError("ranking needs at least one algorithm");

  std::map<CellKey, const MetricReport*> base;
  for (const auto& r : baseline) base[r.cell] = &r;

  std::map<std::string, std::map<CellKey, const MetricReport*>> scores;
  for (const auto& [name, reports] : algorithms) {
    auto& cells = scores[name];
    for (const auto& r : reports) cells[r.cell] = &r;
    if (cells.size() != base.size() ||
        !std::equal(cells.begin(), cells.end(), base.begin(),
                    [](const auto& a, const auto& b) { return a.first == b.first; })) {
      throw ValidationError("algorithm '" + name + "' does not cover the baseline's cells");
    }
  }

  RankTable table;
  for (const auto& [name, reports] : algorithms) table.points[name] = 0;
  for (const auto& [key, base_report] : base) {
    for (Metric m : {Metric::kM1, Metric::kM2}) {
      ++table.cell_count;
      const double reference = base_report->rate(m);
      CellAward award{key, m, {}};
      double best = 0.0;
      for (const auto& [name, cells] : scores) {
        const double delta = cells.at(key)->rate(m) - reference;
        if (!(delta > epsilon)) continue;
        if (award.winners.empty() || delta > best) {
          best = delta;
          award.winners = {name};
        } else if (delta == best) {
          award.winners.push_back(name);
        }
      }
      for (const auto& w : award.winners) ++table.points[w];
      table.awards.push_back(std::move(award));
    }
  }
  return table;
}

nlohmann::json to_json(const RankTable& table) {
  nlohmann::json awards = nlohmann::json::array();
  for (const auto& a : table.awards) {
    awards.push_back({{"collection", a.cell.collection},
                      {"network", a.cell.network},
                      {"metric", metric_name(a.metric)},
                      {"winners", a.winners}});
  }
  return {{"points", table.points}, {"cells", table.cell_count}, {"awards", awards}};
}

}  // namespace restorebench
