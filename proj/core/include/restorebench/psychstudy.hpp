#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace restorebench {

// Bipolar five-point scale: ordinal 1 is the strongest improvement, 3 means
// no perceptible change, 5 the strongest deterioration.
inline constexpr int kLabelCount = 5;
inline constexpr int kImperceptibleOrdinal = 3;
inline constexpr int kSentinelsPerSession = 3;
inline constexpr int kRatingBins = 16;  // width 0.25 over [1,5]

enum class SentinelClass { kImprovement, kNoChange, kDeterioration };
std::string_view to_string(SentinelClass c);
SentinelClass parse_sentinel_class(std::string_view text);

struct ImagePair {
  std::string id;
  std::string original;
  std::string enhanced;
};

struct SentinelPair {
  ImagePair pair;
  SentinelClass expected = SentinelClass::kNoChange;
};

struct ScheduledItem {
  std::string item_id;  // opaque, unique within the session
  std::string pair_id;  // rated pair id or sentinel id
  bool sentinel = false;
  bool swapped = false;  // enhanced image shown on the left
};

struct ScheduledSession {
  int slot = 0;
  std::vector<ScheduledItem> items;
};

struct StudyOptions {
  int ratings_per_pair = 20;
  int session_pairs = 100;
  std::uint64_t seed = 20180618;
  bool swap_presentation = false;
};

struct StudyDefinition {
  std::string study_id;
  std::vector<ImagePair> pairs;
  std::vector<SentinelPair> sentinels;
  StudyOptions options;
  std::vector<ScheduledSession> sessions;

  const ImagePair* find_pair(const std::string& id) const;
  const SentinelPair* find_sentinel(const std::string& id) const;
  // Stable digest of everything that shapes the schedule.
  std::string fingerprint() const;
};

// Deterministic schedule: every pair appears in exactly `ratings_per_pair`
// sessions (never twice in one), sessions hold at most `session_pairs` rated
// pairs plus three sentinels, and item order is a seeded shuffle. Needs at
// least one pair and three sentinels.
StudyDefinition build_study(std::string study_id, std::vector<ImagePair> pairs,
                            std::vector<SentinelPair> sentinels, const StudyOptions& options = {});

// {"study_id", "pairs": [{id, original, enhanced}], "sentinels": [{id, original,
//  enhanced, expected}], "ratings_per_pair", "session_pairs", "seed", "swap_presentation"}
StudyDefinition parse_study_definition(const nlohmann::json& doc);
StudyDefinition load_study_definition(const std::filesystem::path& path);

// Label index 0..4, left to right on the scale, to ordinal 1..5.
int label_to_ordinal(int label_index);
bool sentinel_correct(SentinelClass expected, int ordinal);

struct RatingResponse {
  std::string session_id;
  std::string worker_id;
  std::string item_id;
  std::string pair_id;
  int ordinal = kImperceptibleOrdinal;  // as shown to the worker
  bool is_sentinel = false;
  bool swapped = false;
  std::int64_t timestamp_ms = 0;

  // Ordinal in original-left orientation.
  int oriented_ordinal() const noexcept { return swapped ? 6 - ordinal : ordinal; }
};

struct SessionRecord {
  std::string session_id;
  std::string worker_id;
  int slot = 0;
  std::map<std::string, RatingResponse> responses;  // by item id
};

enum class WorkerVerdict { kKeep, kDiscard };

// Keep iff at least two of the three sentinels were answered correctly.
// Throws ValidationError if the session is incomplete.
WorkerVerdict validate_worker(const StudyDefinition& study, const SessionRecord& session);
bool session_complete(const StudyDefinition& study, const SessionRecord& session);

// Bin of a mean rating sum/count: floor((mean - 1) / 0.25), with 5 in the
// last bin. Computed in integers so boundaries are exact.
int rating_bin(long sum, long count);

struct PairRating {
  std::string pair_id;
  double mean = 0.0;
  long count = 0;
  long sum = 0;
  std::array<long, kRatingBins> histogram{};  // of the individual ordinals
  std::optional<double> external_score;
};

struct StudyReport {
  std::vector<PairRating> pairs;  // rated pairs with >= 1 validated response
  std::array<long, kRatingBins> mean_histogram{};
  long improvement = 0;    // mean < 3
  long imperceptible = 0;  // mean == 3
  long deterioration = 0;  // mean > 3
  std::vector<std::string> kept_workers;
  std::vector<std::string> discarded_workers;
  long incomplete_sessions = 0;
};

// Aggregates validated complete sessions only. Throws ValidationError when no
// session validates.
StudyReport aggregate_ratings(const StudyDefinition& study,
                              const std::vector<SessionRecord>& sessions);

// Attaches per-image scalars (e.g. LPIPS) keyed by the enhanced image path or
// by the pair id.
void attach_external_scores(StudyReport& report, const StudyDefinition& study,
                            const std::map<std::string, double>& scores);

nlohmann::json to_json(const StudyReport& report);

}  // namespace restorebench
