#include "restorebench/study_service.hpp"

#include <algorithm>
#include <chrono>

#include <nlohmann/json.hpp>

#include "restorebench/error.hpp"

namespace restorebench {

namespace {

using nlohmann::json;

std::int64_t wall_clock_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

}  // namespace

std::string StudyService::session_id_for(const StudyDefinition& study, int slot) {
  return study.study_id + "-s" + std::to_string(slot);
}

StudyService::StudyService(StudyDefinition study, std::filesystem::path state_dir, Clock clock)
    : study_(std::move(study)), clock_(clock ? std::move(clock) : Clock(wall_clock_ms)) {
  std::filesystem::create_directories(state_dir);
  log_path_ = state_dir / (study_.study_id + ".log");
  const bool fresh = !std::filesystem::exists(log_path_) || std::filesystem::file_size(log_path_) == 0;
  if (!fresh) replay();
  log_.open(log_path_, std::ios::app);
  if (!log_) throw IoError("cannot open study log " + log_path_.string());
  if (fresh) {
    append(json{{"event", "open"}, {"study", study_.study_id},
                {"fingerprint", study_.fingerprint()}}.dump());
  }
}

void StudyService::append(const std::string& line) {
  log_ << line << '\n';
  log_.flush();
  if (!log_) throw IoError("failed to append to " + log_path_.string());
}

void StudyService::replay() {
  std::ifstream in(log_path_);
  if (!in) throw IoError("cannot read study log " + log_path_.string());
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.empty()) continue;
    try {
      const json event = json::parse(text);
      const std::string kind = event.at("event").get<std::string>();
      if (line == 1) {
        if (kind != "open" || event.at("fingerprint").get<std::string>() != study_.fingerprint()) {
          throw ValidationError("log belongs to a different study definition");
        }
      } else if (kind == "assign") {
        const auto payload = assign_locked(event.at("worker").get<std::string>(),
                                           event.at("ts").get<std::int64_t>(), Source::kReplay);
        if (payload.session_id != event.at("session").get<std::string>()) {
          throw ValidationError("assignment order does not match the schedule");
        }
      } else if (kind == "response") {
        respond_locked(event.at("session").get<std::string>(), event.at("item").get<std::string>(),
                       event.at("label").get<int>(), event.at("ts").get<std::int64_t>(),
                       Source::kReplay);
      } else {
        throw ValidationError("unknown event '" + kind + "'");
      }
    } catch (const json::exception& e) {
      throw ParseError(line, log_path_.string() + ": corrupt study log: " + e.what());
    } catch (const ValidationError& e) {
      throw ParseError(line, log_path_.string() + ": corrupt study log: " + e.what());
    }
  }
  if (line == 0) throw ParseError(1, log_path_.string() + ": empty study log header");
}

SessionPayload StudyService::payload_for(const SessionRecord& record) const {
  SessionPayload payload{study_.study_id, record.session_id, {}};
  const std::string base = "/study/" + study_.study_id + "/image/" + record.session_id + "/";
  for (const auto& item : study_.sessions[record.slot].items) {
    std::string left = base + item.item_id + "/left";
    std::string right = base + item.item_id + "/right";
    payload.items.push_back({item.item_id, std::move(left), std::move(right)});
  }
  return payload;
}

SessionPayload StudyService::assign_locked(const std::string& worker_id, std::int64_t ts,
                                           Source source) {
  if (worker_id.empty()) throw ValidationError("worker id must not be empty");
  if (open_by_worker_.count(worker_id)) {
    throw ValidationError("worker " + worker_id + " already has an open session");
  }
  if (next_slot_ >= static_cast<int>(study_.sessions.size())) {
    throw ValidationError("study fully subscribed");
  }
  const int slot = next_slot_;
  SessionRecord record{session_id_for(study_, slot), worker_id, slot, {}};
  if (source == Source::kLive) {
    append(json{{"event", "assign"}, {"session", record.session_id}, {"worker", worker_id},
                {"slot", slot}, {"ts", ts}}.dump());
  }
  ++next_slot_;
  open_by_worker_[worker_id] = record.session_id;
  auto& stored = sessions_[record.session_id] = std::move(record);
  return payload_for(stored);
}

RatingResponse StudyService::respond_locked(const std::string& session_id,
                                            const std::string& item_id, int label_index,
                                            std::int64_t ts, Source source) {
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw ValidationError("unknown session " + session_id);
  SessionRecord& record = it->second;
  const auto& items = study_.sessions[record.slot].items;
  auto item = std::find_if(items.begin(), items.end(),
                           [&](const ScheduledItem& i) { return i.item_id == item_id; });
  if (item == items.end()) throw ValidationError("item " + item_id + " is not part of " + session_id);
  if (record.responses.count(item_id)) {
    throw ValidationError("item " + item_id + " already answered in " + session_id);
  }
  const int ordinal = label_to_ordinal(label_index);

  RatingResponse response{session_id, record.worker_id, item_id, item->pair_id, ordinal,
                          item->sentinel, item->swapped, ts};
  if (source == Source::kLive) {
    append(json{{"event", "response"}, {"session", session_id}, {"item", item_id},
                {"label", label_index}, {"ts", ts}}.dump());
  }
  record.responses.emplace(item_id, response);
  if (session_complete(study_, record)) open_by_worker_.erase(record.worker_id);
  return response;
}

SessionPayload StudyService::assign_session(const std::string& worker_id) {
  std::lock_guard lock(mutex_);
  return assign_locked(worker_id, clock_(), Source::kLive);
}

RatingResponse StudyService::record_response(const std::string& session_id,
                                             const std::string& item_id, int label_index) {
  std::lock_guard lock(mutex_);
  return respond_locked(session_id, item_id, label_index, clock_(), Source::kLive);
}

std::vector<SessionRecord> StudyService::sessions() const {
  std::lock_guard lock(mutex_);
  std::vector<SessionRecord> out;
  for (const auto& [id, record] : sessions_) out.push_back(record);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.slot < b.slot; });
  return out;
}

StudyReport StudyService::report() const { return aggregate_ratings(study_, sessions()); }

AuditReport StudyService::audit() const {
  const auto snapshot = sessions();
  AuditReport audit;
  std::map<std::string, long> recorded;
  for (const auto& s : snapshot) {
    ++audit.assigned_sessions;
    if (!session_complete(study_, s)) {
      ++audit.open_sessions;
      continue;
    }
    if (validate_worker(study_, s) == WorkerVerdict::kDiscard) continue;
    for (const auto& [item, r] : s.responses)
      if (!r.is_sentinel) ++recorded[r.pair_id];
  }
  for (const auto& p : study_.pairs) {
    PairAudit a{p.id, study_.options.ratings_per_pair, recorded[p.id]};
    if (a.recorded > a.scheduled) audit.overshoot.push_back(p.id);
    audit.pairs.push_back(std::move(a));
  }
  return audit;
}

}  // namespace restorebench
