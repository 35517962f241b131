#include "restorebench/psychstudy.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "restorebench/error.hpp"
#include "restorebench/hash.hpp"

namespace restorebench {

namespace {

using nlohmann::json;

// Fisher-Yates with an explicit index rule so schedules do not depend on the
// standard library's shuffle implementation.
template <typename T>
void seeded_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = rng() % i;
    std::swap(v[i - 1], v[j]);
  }
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

json definition_inputs(const StudyDefinition& s) {
  json pairs = json::array(), sentinels = json::array();
  for (const auto& p : s.pairs) pairs.push_back({p.id, p.original, p.enhanced});
  for (const auto& p : s.sentinels) {
    sentinels.push_back({p.pair.id, p.pair.original, p.pair.enhanced, to_string(p.expected)});
  }
  return {{"study_id", s.study_id},
          {"pairs", pairs},
          {"sentinels", sentinels},
          {"ratings_per_pair", s.options.ratings_per_pair},
          {"session_pairs", s.options.session_pairs},
          {"seed", s.options.seed},
          {"swap_presentation", s.options.swap_presentation}};
}

}  // namespace

std::string_view to_string(SentinelClass c) {
  switch (c) {
    case SentinelClass::kImprovement: return "improvement";
    case SentinelClass::kNoChange: return "no-change";
    case SentinelClass::kDeterioration: return "deterioration";
  }
  return "no-change";
}

SentinelClass parse_sentinel_class(std::string_view text) {
  if (text == "improvement") return SentinelClass::kImprovement;
  if (text == "no-change") return SentinelClass::kNoChange;
  if (text == "deterioration") return SentinelClass::kDeterioration;
  throw ValidationError("unknown sentinel class '" + std::string(text) + "'");
}

const ImagePair* StudyDefinition::find_pair(const std::string& id) const {
  for (const auto& p : pairs)
    if (p.id == id) return &p;
  return nullptr;
}

const SentinelPair* StudyDefinition::find_sentinel(const std::string& id) const {
  for (const auto& s : sentinels)
    if (s.pair.id == id) return &s;
  return nullptr;
}

std::string StudyDefinition::fingerprint() const {
  return to_hex(fnv1a(definition_inputs(*this).dump()));
}

StudyDefinition build_study(std::string study_id, std::vector<ImagePair> pairs,
                            std::vector<SentinelPair> sentinels, const StudyOptions& options) {
  if (study_id.empty()) throw ValidationError("study id must not be empty");
  if (pairs.empty()) throw ValidationError("a study needs at least one image pair");
  if (sentinels.size() < static_cast<std::size_t>(kSentinelsPerSession)) {
    throw ValidationError("a study needs at least 3 sentinel pairs, got " +
                          std::to_string(sentinels.size()));
  }
  if (options.ratings_per_pair < 1 || options.session_pairs < 1) {
    throw ValidationError("ratings_per_pair and session_pairs must be >= 1");
  }
  std::set<std::string> ids;
  for (const auto& p : pairs)
    if (p.id.empty() || !ids.insert(p.id).second) throw ValidationError("pair ids must be unique and non-empty");
  for (const auto& s : sentinels)
    if (s.pair.id.empty() || !ids.insert(s.pair.id).second) throw ValidationError("sentinel ids must be unique and non-empty");

  StudyDefinition study{std::move(study_id), std::move(pairs), std::move(sentinels), options, {}};
  const long P = static_cast<long>(study.pairs.size());
  const long T = options.ratings_per_pair;
  const long S = options.session_pairs;
  // At least T sessions so a pair's T copies land in distinct sessions.
  const long n = std::max(T, (P * T + S - 1) / S);

  std::mt19937_64 rng(options.seed);
  std::vector<long> order(P);
  for (long i = 0; i < P; ++i) order[i] = i;
  seeded_shuffle(order, rng);

  std::vector<std::vector<long>> dealt(n);
  long position = 0;
  for (long pair : order)
    for (long copy = 0; copy < T; ++copy) dealt[position++ % n].push_back(pair);

  std::vector<long> sentinel_index(study.sentinels.size());
  for (std::size_t i = 0; i < sentinel_index.size(); ++i) sentinel_index[i] = static_cast<long>(i);

  for (long slot = 0; slot < n; ++slot) {
    std::vector<ScheduledItem> items;
    for (long pair : dealt[slot]) items.push_back({"", study.pairs[pair].id, false, false});
    seeded_shuffle(sentinel_index, rng);
    for (int k = 0; k < kSentinelsPerSession; ++k) {
      items.push_back({"", study.sentinels[sentinel_index[k]].pair.id, true, false});
    }
    seeded_shuffle(items, rng);
    for (std::size_t k = 0; k < items.size(); ++k) {
      items[k].item_id = "i" + std::to_string(k);
      if (options.swap_presentation) items[k].swapped = (rng() & 1u) != 0;
    }
    study.sessions.push_back({static_cast<int>(slot), std::move(items)});
  }
  return study;
}

StudyDefinition parse_study_definition(const json& doc) {
  try {
    std::vector<ImagePair> pairs;
    for (const auto& p : doc.at("pairs")) {
      pairs.push_back({p.at("id").get<std::string>(), p.at("original").get<std::string>(),
                       p.at("enhanced").get<std::string>()});
    }
    std::vector<SentinelPair> sentinels;
    for (const auto& s : doc.at("sentinels")) {
      sentinels.push_back({{s.at("id").get<std::string>(), s.at("original").get<std::string>(),
                            s.at("enhanced").get<std::string>()},
                           parse_sentinel_class(s.at("expected").get<std::string>())});
    }
    StudyOptions options;
    options.ratings_per_pair = doc.value("ratings_per_pair", options.ratings_per_pair);
    options.session_pairs = doc.value("session_pairs", options.session_pairs);
    options.seed = doc.value("seed", options.seed);
    options.swap_presentation = doc.value("swap_presentation", options.swap_presentation);
    return build_study(doc.at("study_id").get<std::string>(), std::move(pairs),
                       std::move(sentinels), options);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("study definition: ") + e.what());
  }
}

StudyDefinition load_study_definition(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(0, path.string() + ": " + e.what());
  }
  return parse_study_definition(doc);
}

int label_to_ordinal(int label_index) {
  if (label_index < 0 || label_index >= kLabelCount) {
    throw ValidationError("label index must be in [0,4], got " + std::to_string(label_index));
  }
  return label_index + 1;
}

bool sentinel_correct(SentinelClass expected, int ordinal) {
  switch (expected) {
    case SentinelClass::kNoChange: return ordinal == kImperceptibleOrdinal;
    case SentinelClass::kImprovement: return ordinal == 1 || ordinal == 2;
    case SentinelClass::kDeterioration: return ordinal == 4 || ordinal == 5;
  }
  return false;
}

bool session_complete(const StudyDefinition& study, const SessionRecord& session) {
  if (session.slot < 0 || session.slot >= static_cast<int>(study.sessions.size())) return false;
  const auto& items = study.sessions[session.slot].items;
  return std::all_of(items.begin(), items.end(),
                     [&](const ScheduledItem& i) { return session.responses.count(i.item_id) != 0; });
}

WorkerVerdict validate_worker(const StudyDefinition& study, const SessionRecord& session) {
  if (!session_complete(study, session)) {
    throw ValidationError("session " + session.session_id + " is incomplete");
  }
  int correct = 0;
  for (const auto& item : study.sessions[session.slot].items) {
    if (!item.sentinel) continue;
    const auto& response = session.responses.at(item.item_id);
    correct += sentinel_correct(study.find_sentinel(item.pair_id)->expected,
                                response.oriented_ordinal());
  }
  return correct >= 2 ? WorkerVerdict::kKeep : WorkerVerdict::kDiscard;
}

int rating_bin(long sum, long count) {
  if (count <= 0) throw ContractError("rating bin of an empty set");
  // floor(4 * (sum/count - 1)) == floor(4 * (sum - count) / count)
  const long bin = (4 * (sum - count)) / count;
  return static_cast<int>(std::clamp(bin, 0L, static_cast<long>(kRatingBins - 1)));
}

StudyReport aggregate_ratings(const StudyDefinition& study,
                              const std::vector<SessionRecord>& sessions) {
  StudyReport report;
  std::map<std::string, PairRating> by_pair;
  for (const auto& session : sessions) {
    if (!session_complete(study, session)) {
      ++report.incomplete_sessions;
      continue;
    }
    if (validate_worker(study, session) == WorkerVerdict::kDiscard) {
      report.discarded_workers.push_back(session.worker_id);
      continue;
    }
    report.kept_workers.push_back(session.worker_id);
    for (const auto& [item_id, response] : session.responses) {
      if (response.is_sentinel) continue;
      auto& rating = by_pair[response.pair_id];
      rating.pair_id = response.pair_id;
      const int ordinal = response.oriented_ordinal();
      rating.sum += ordinal;
      ++rating.count;
      ++rating.histogram[rating_bin(ordinal, 1)];
    }
  }
  if (report.kept_workers.empty()) throw ValidationError("no validated sessions");

  std::sort(report.kept_workers.begin(), report.kept_workers.end());
  std::sort(report.discarded_workers.begin(), report.discarded_workers.end());
  for (auto& [id, rating] : by_pair) {
    rating.mean = static_cast<double>(rating.sum) / rating.count;
    ++report.mean_histogram[rating_bin(rating.sum, rating.count)];
    const long centre = static_cast<long>(kImperceptibleOrdinal) * rating.count;
    if (rating.sum < centre) {
      ++report.improvement;
    } else if (rating.sum > centre) {
      ++report.deterioration;
    } else {
      ++report.imperceptible;
    }
    report.pairs.push_back(rating);
  }
  return report;
}

void attach_external_scores(StudyReport& report, const StudyDefinition& study,
                            const std::map<std::string, double>& scores) {
  for (auto& rating : report.pairs) {
    if (auto it = scores.find(rating.pair_id); it != scores.end()) {
      rating.external_score = it->second;
      continue;
    }
    if (const ImagePair* pair = study.find_pair(rating.pair_id)) {
      if (auto it = scores.find(pair->enhanced); it != scores.end()) rating.external_score = it->second;
    }
  }
}

json to_json(const StudyReport& report) {
  json pairs = json::array();
  for (const auto& p : report.pairs) {
    json entry = {{"pair_id", p.pair_id}, {"mean", p.mean}, {"count", p.count},
                  {"histogram", p.histogram}};
    if (p.external_score) entry["external_score"] = *p.external_score;
    pairs.push_back(std::move(entry));
  }
  return {{"pairs", pairs},
          {"mean_histogram", report.mean_histogram},
          {"bin_width", 0.25},
          {"improvement", report.improvement},
          {"imperceptible", report.imperceptible},
          {"deterioration", report.deterioration},
          {"kept_workers", report.kept_workers},
          {"discarded_workers", report.discarded_workers},
          {"incomplete_sessions", report.incomplete_sessions}};
}

}  // namespace restorebench
