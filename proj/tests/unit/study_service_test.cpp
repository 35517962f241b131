#include <atomic>
#include <fstream>
#include <thread>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "restorebench/error.hpp"
#include "restorebench/study_service.hpp"
#include "support/corpus.hpp"
#include "support/fixtures.hpp"

namespace rb = restorebench;
using nlohmann::json;

namespace {

rb::StudyService::Clock counter() {
  auto t = std::make_shared<std::int64_t>(1000);
  return [t] { return (*t)++; };
}

// Label index that a careful worker would submit for `item_id`: sentinels
// correctly, rated pairs as "no change", mirrored for swapped items.
int honest_label(const rb::StudyDefinition& study, const std::string& session_id,
                 const std::string& item_id) {
  const int slot = std::stoi(session_id.substr(session_id.rfind('s') + 1));
  for (const auto& item : study.sessions[slot].items) {
    if (item.item_id != item_id) continue;
    const int ordinal = item.sentinel
                            ? rb::testing::correct_ordinal(study.find_sentinel(item.pair_id)->expected)
                            : rb::kImperceptibleOrdinal;
    return (item.swapped ? 6 - ordinal : ordinal) - 1;
  }
  return 0;
}

}  // namespace

TEST(StudyService, AssignsSessionsInScheduleOrder) {
  rb::testing::TempDir dir("svc");
  rb::StudyService service(rb::testing::study_fixture(10, 3), dir.path(), counter());
  const auto a = service.assign_session("alice");
  EXPECT_EQ(a.session_id, "fixture-s0");
  EXPECT_EQ(a.items.size(), service.study().sessions[0].items.size());
  EXPECT_EQ(a.items[0].left_image, "/study/fixture/image/fixture-s0/" + a.items[0].item_id + "/left");
  EXPECT_EQ(service.assign_session("bob").session_id, "fixture-s1");
  EXPECT_THROW(service.assign_session("alice"), rb::ValidationError);
  EXPECT_EQ(service.assign_session("carol").session_id, "fixture-s2");
  EXPECT_THROW(service.assign_session("dave"), rb::ValidationError);
  EXPECT_THROW(service.assign_session(""), rb::ValidationError);
}

TEST(StudyService, ResponsesAreValidated) {
  rb::testing::TempDir dir("svc");
  rb::StudyService service(rb::testing::study_fixture(4, 3), dir.path(), counter());
  const auto s = service.assign_session("alice");
  const auto& item = s.items.front().item_id;
  const auto r = service.record_response(s.session_id, item, 1);
  EXPECT_EQ(r.ordinal, 2);
  EXPECT_EQ(r.worker_id, "alice");
  EXPECT_EQ(r.timestamp_ms, 1001);
  EXPECT_THROW(service.record_response(s.session_id, item, 3), rb::ValidationError);
  EXPECT_EQ(service.sessions().front().responses.at(item).ordinal, 2);
  EXPECT_THROW(service.record_response("nope", item, 1), rb::ValidationError);
  EXPECT_THROW(service.record_response(s.session_id, "i999", 1), rb::ValidationError);
  EXPECT_THROW(service.record_response(s.session_id, s.items.back().item_id, 5), rb::ValidationError);
}

TEST(StudyService, CompletedWorkerCanTakeAnotherSession) {
  rb::testing::TempDir dir("svc");
  rb::StudyService service(rb::testing::study_fixture(4, 3), dir.path(), counter());
  const auto s = service.assign_session("alice");
  for (const auto& item : s.items) service.record_response(s.session_id, item.item_id, 2);
  EXPECT_EQ(service.assign_session("alice").session_id, "fixture-s1");
}

TEST(StudyService, PlantedWorkersAreFilteredAndCountsAudit) {
  rb::testing::TempDir dir("svc");
  rb::StudyService service(rb::testing::study_fixture(100, 20, 3, true), dir.path(), counter());
  const auto planted = rb::testing::run_planted_workers(service, 5, 20, 3, 2);
  const auto report = service.report();
  EXPECT_EQ(std::set<std::string>(report.discarded_workers.begin(), report.discarded_workers.end()),
            planted.planted_bad);
  EXPECT_EQ(report.kept_workers.size(), 17u);
  for (const auto& w : planted.one_mistake)
    EXPECT_TRUE(std::count(report.kept_workers.begin(), report.kept_workers.end(), w));

  const auto audit = service.audit();
  EXPECT_TRUE(audit.overshoot.empty());
  EXPECT_EQ(audit.open_sessions, 0);
  EXPECT_EQ(audit.assigned_sessions, 20);
  long recorded = 0;
  for (const auto& p : audit.pairs) {
    EXPECT_EQ(p.scheduled, 20);
    EXPECT_LE(p.recorded, p.scheduled);
    recorded += p.recorded;
  }
  EXPECT_EQ(recorded, 17 * 100);
}

TEST(StudyService, ConcurrentWorkersNeverOvershoot) {
  rb::testing::TempDir dir("svc");
  const auto study = rb::testing::study_fixture(60, 10, 4, true);
  rb::StudyService service(study, dir.path());
  const int threads = 8;
  std::atomic<int> subscribed_full{0}, sessions_done{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (int round = 0;; ++round) {
        const std::string worker = "t" + std::to_string(t) + "-" + std::to_string(round);
        rb::SessionPayload s;
        try {
          s = service.assign_session(worker);
        } catch (const rb::ValidationError&) {
          ++subscribed_full;
          return;
        }
        for (const auto& item : s.items) {
          service.record_response(s.session_id, item.item_id,
                                  honest_label(study, s.session_id, item.item_id));
          // A duplicate submission from a retrying client must not count twice.
          EXPECT_THROW(service.record_response(s.session_id, item.item_id, 0), rb::ValidationError);
        }
        ++sessions_done;
      }
    });
  }
  for (auto& th : pool) th.join();
  EXPECT_EQ(subscribed_full.load(), threads);
  EXPECT_EQ(sessions_done.load(), static_cast<int>(study.sessions.size()));
  const auto audit = service.audit();
  EXPECT_TRUE(audit.overshoot.empty());
  for (const auto& p : audit.pairs) EXPECT_EQ(p.recorded, p.scheduled) << p.pair_id;

  rb::StudyService replayed(study, dir.path());
  EXPECT_EQ(rb::to_json(replayed.report()), rb::to_json(service.report()));
}

TEST(StudyService, RestartReplaysLog) {
  rb::testing::TempDir dir("svc");
  const auto study = rb::testing::study_fixture(50, 8, 6, true);
  json before;
  {
    rb::StudyService service(study, dir.path(), counter());
    rb::testing::run_planted_workers(service, 9, 6, 1, 1);
    service.assign_session("late");
    before = rb::to_json(service.report());
  }
  rb::StudyService restarted(study, dir.path(), counter());
  EXPECT_EQ(rb::to_json(restarted.report()), before);
  EXPECT_THROW(restarted.assign_session("late"), rb::ValidationError);
  EXPECT_EQ(restarted.audit().open_sessions, 1);
  EXPECT_EQ(restarted.assign_session("next").session_id, "fixture-s7");
  const auto sessions = restarted.sessions();
  EXPECT_EQ(sessions.size(), 8u);
}

TEST(StudyService, CorruptLogNamesTheLine) {
  rb::testing::TempDir dir("svc");
  const auto study = rb::testing::study_fixture(5, 3);
  {
    rb::StudyService service(study, dir.path(), counter());
    const auto s = service.assign_session("alice");
    service.record_response(s.session_id, s.items[0].item_id, 0);
  }
  const auto log = dir.path() / "fixture.log";
  std::ofstream(log, std::ios::app) << "{\"event\": \"response\", \"session\"\n";
  try {
    rb::StudyService service(study, dir.path());
    FAIL() << "expected ParseError";
  } catch (const rb::ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
}

TEST(StudyService, LogFromAnotherDefinitionIsRejected) {
  rb::testing::TempDir dir("svc");
  { rb::StudyService service(rb::testing::study_fixture(5, 3, 1), dir.path()); }
  try {
    rb::StudyService service(rb::testing::study_fixture(5, 3, 2), dir.path());
    FAIL() << "expected ParseError";
  } catch (const rb::ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
}

TEST(StudyService, ReportWithoutResponsesFails) {
  rb::testing::TempDir dir("svc");
  rb::StudyService service(rb::testing::study_fixture(5, 3), dir.path());
  service.assign_session("alice");
  EXPECT_THROW(service.report(), rb::ValidationError);
}
