#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "restorebench/psychstudy.hpp"

namespace restorebench {

// What the client sees. Item ids are opaque and sentinels carry no marker.
struct SessionPayloadItem {
  std::string item_id;
  std::string left_image;
  std::string right_image;
};

struct SessionPayload {
  std::string study_id;
  std::string session_id;
  std::vector<SessionPayloadItem> items;
};

struct PairAudit {
  std::string pair_id;
  long scheduled = 0;  // target ratings
  long recorded = 0;   // responses in complete, kept sessions
};

struct AuditReport {
  std::vector<PairAudit> pairs;
  std::vector<std::string> overshoot;  // pairs with recorded > scheduled
  long open_sessions = 0;
  long assigned_sessions = 0;
};

// Stateful rating service over one study. Every mutation is appended to
// `<state_dir>/<study_id>.log` (one JSON object per line) before it is
// acknowledged, and the log is replayed on construction. All public methods
// are safe to call concurrently.
class StudyService {
 public:
  using Clock = std::function<std::int64_t()>;  // milliseconds since epoch

  // Throws ParseError naming the offending line if the log is corrupt or was
  // written for a different study definition.
  StudyService(StudyDefinition study, std::filesystem::path state_dir, Clock clock = {});

  const StudyDefinition& study() const noexcept { return study_; }

  // Hands the next unassigned scheduled session to `worker_id`. Throws
  // ValidationError("study fully subscribed") when none remain and
  // ValidationError on a second open session for the same worker.
  SessionPayload assign_session(const std::string& worker_id);

  // Records one label (index 0..4). Unknown session/item, out of range label
  // and repeated submissions throw ValidationError; the first answer stands.
  RatingResponse record_response(const std::string& session_id, const std::string& item_id,
                                 int label_index);

  // Consistent snapshot of every assigned session.
  std::vector<SessionRecord> sessions() const;
  StudyReport report() const;
  AuditReport audit() const;

  std::filesystem::path log_path() const { return log_path_; }

  static std::string session_id_for(const StudyDefinition& study, int slot);

 private:
  enum class Source { kLive, kReplay };
  SessionPayload assign_locked(const std::string& worker_id, std::int64_t ts, Source source);
  RatingResponse respond_locked(const std::string& session_id, const std::string& item_id,
                                int label_index, std::int64_t ts, Source source);
  void append(const std::string& line);
  void replay();
  SessionPayload payload_for(const SessionRecord& record) const;

  StudyDefinition study_;
  std::filesystem::path log_path_;
  Clock clock_;
  mutable std::mutex mutex_;
  std::ofstream log_;
  std::map<std::string, SessionRecord> sessions_;      // by session id
  std::map<std::string, std::string> open_by_worker_;  // worker -> session
  int next_slot_ = 0;
};

}  // namespace restorebench
