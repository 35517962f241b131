#include <algorithm>
#include <random>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "restorebench/error.hpp"
#include "restorebench/psychstudy.hpp"
#include "support/corpus.hpp"

namespace rb = restorebench;
using nlohmann::json;

namespace {

// Answers every item of `slot`: rated pairs get `rating(pair_id)`, sentinels
// the correct ordinal unless listed in `wrong`.
rb::SessionRecord answer(const rb::StudyDefinition& study, int slot, const std::string& worker,
                         const std::function<int(const std::string&)>& rating, int wrong_sentinels = 0) {
  rb::SessionRecord s{"sess" + std::to_string(slot), worker, slot, {}};
  int wrong = 0;
  for (const auto& item : study.sessions[slot].items) {
    rb::RatingResponse r;
    r.session_id = s.session_id;
    r.worker_id = worker;
    r.item_id = item.item_id;
    r.pair_id = item.pair_id;
    r.is_sentinel = item.sentinel;
    r.swapped = item.swapped;
    int oriented;
    if (item.sentinel) {
      const auto expected = study.find_sentinel(item.pair_id)->expected;
      oriented = wrong++ < wrong_sentinels ? rb::testing::wrong_ordinal(expected)
                                           : rb::testing::correct_ordinal(expected);
    } else {
      oriented = rating(item.pair_id);
    }
    r.ordinal = item.swapped ? 6 - oriented : oriented;
    s.responses[item.item_id] = r;
  }
  return s;
}

}  // namespace

TEST(Schedule, HundredPairsGiveTwentyFullSessions) {
  const auto study = rb::testing::study_fixture(100, 20);
  ASSERT_EQ(study.sessions.size(), 20u);
  std::map<std::string, int> copies;
  for (const auto& session : study.sessions) {
    EXPECT_EQ(session.items.size(), 103u);
    std::set<std::string> in_session;
    int sentinels = 0;
    for (const auto& item : session.items) {
      EXPECT_TRUE(in_session.insert(item.pair_id).second) << "repeat in session";
      if (item.sentinel) {
        ++sentinels;
      } else {
        ++copies[item.pair_id];
      }
    }
    EXPECT_EQ(sentinels, 3);
  }
  EXPECT_EQ(copies.size(), 100u);
  for (const auto& [id, n] : copies) EXPECT_EQ(n, 20) << id;
}

TEST(Schedule, SinglePairSingleRating) {
  const auto study = rb::testing::study_fixture(1, 1);
  ASSERT_EQ(study.sessions.size(), 1u);
  EXPECT_EQ(study.sessions[0].items.size(), 4u);
}

TEST(Schedule, PropertiesHoldForRandomShapes) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> pairs(1, 150), ratings(1, 25);
  for (int trial = 0; trial < 40; ++trial) {
    const int p = pairs(rng), t = ratings(rng);
    const auto study = rb::testing::study_fixture(p, t, trial, trial % 2 == 0);
    std::map<std::string, int> copies;
    std::set<std::string> item_ids;
    for (const auto& session : study.sessions) {
      std::set<std::string> seen, ids;
      int rated = 0;
      for (const auto& item : session.items) {
        ASSERT_TRUE(seen.insert(item.pair_id).second);
        ASSERT_TRUE(ids.insert(item.item_id).second);
        if (!item.sentinel) {
          ++copies[item.pair_id];
          ++rated;
        }
      }
      EXPECT_LE(rated, 100);
      EXPECT_EQ(session.items.size() - rated, 3u);
    }
    for (const auto& [id, n] : copies) ASSERT_EQ(n, t);
    EXPECT_EQ(copies.size(), static_cast<std::size_t>(p));
  }
}

TEST(Schedule, DeterministicAndSeedSensitive) {
  const auto a = rb::testing::study_fixture(30, 5, 1);
  const auto b = rb::testing::study_fixture(30, 5, 1);
  const auto c = rb::testing::study_fixture(30, 5, 2);
  ASSERT_EQ(a.sessions.size(), b.sessions.size());
  for (std::size_t i = 0; i < a.sessions.size(); ++i)
    for (std::size_t k = 0; k < a.sessions[i].items.size(); ++k)
      EXPECT_EQ(a.sessions[i].items[k].pair_id, b.sessions[i].items[k].pair_id);
  EXPECT_EQ(a.fingerprint(), b.fingerprint());
  EXPECT_NE(a.fingerprint(), c.fingerprint());
}

TEST(Schedule, RejectsBadDefinitions) {
  std::vector<rb::SentinelPair> two = {{{"s1", "a", "b"}, rb::SentinelClass::kNoChange},
                                       {{"s2", "a", "b"}, rb::SentinelClass::kNoChange}};
  EXPECT_THROW(rb::build_study("x", {{"p", "a", "b"}}, two), rb::ValidationError);
  auto three = two;
  three.push_back({{"s3", "a", "b"}, rb::SentinelClass::kImprovement});
  EXPECT_THROW(rb::build_study("x", {}, three), rb::ValidationError);
  EXPECT_THROW(rb::build_study("x", {{"s1", "a", "b"}}, three), rb::ValidationError);
  EXPECT_THROW(rb::build_study("", {{"p", "a", "b"}}, three), rb::ValidationError);
}

TEST(Sentinels, Classes) {
  using rb::SentinelClass;
  EXPECT_TRUE(rb::sentinel_correct(SentinelClass::kImprovement, 2));
  EXPECT_FALSE(rb::sentinel_correct(SentinelClass::kImprovement, 3));
  EXPECT_TRUE(rb::sentinel_correct(SentinelClass::kNoChange, 3));
  EXPECT_FALSE(rb::sentinel_correct(SentinelClass::kNoChange, 2));
  EXPECT_TRUE(rb::sentinel_correct(SentinelClass::kDeterioration, 4));
  EXPECT_FALSE(rb::sentinel_correct(SentinelClass::kDeterioration, 1));
  for (auto c : {SentinelClass::kImprovement, SentinelClass::kNoChange, SentinelClass::kDeterioration})
    EXPECT_EQ(rb::parse_sentinel_class(rb::to_string(c)), c);
  EXPECT_THROW(rb::parse_sentinel_class("better"), rb::ValidationError);
  EXPECT_EQ(rb::label_to_ordinal(0), 1);
  EXPECT_THROW(rb::label_to_ordinal(5), rb::ValidationError);
}

TEST(Validation, KeepIffTwoOfThreeSentinelsCorrect) {
  const auto study = rb::testing::study_fixture(10, 3, 4, true);
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> ord(1, 5);
  for (int trial = 0; trial < 1000; ++trial) {
    const int slot = trial % static_cast<int>(study.sessions.size());
    auto session = answer(study, slot, "w", [](const std::string&) { return 3; });
    int correct = 0;
    for (const auto& item : study.sessions[slot].items) {
      if (!item.sentinel) continue;
      auto& r = session.responses[item.item_id];
      r.ordinal = ord(rng);
      correct += rb::sentinel_correct(study.find_sentinel(item.pair_id)->expected, r.oriented_ordinal());
    }
    EXPECT_EQ(rb::validate_worker(study, session) == rb::WorkerVerdict::kKeep, correct >= 2);
  }
}

TEST(Validation, IncompleteSessionThrows) {
  const auto study = rb::testing::study_fixture(5, 3);
  auto session = answer(study, 0, "w", [](const std::string&) { return 2; });
  session.responses.erase(session.responses.begin());
  EXPECT_FALSE(rb::session_complete(study, session));
  EXPECT_THROW(rb::validate_worker(study, session), rb::ValidationError);
}

TEST(RatingBin, IntegerBoundaries) {
  EXPECT_EQ(rb::rating_bin(1, 1), 0);
  EXPECT_EQ(rb::rating_bin(5, 1), 15);
  EXPECT_EQ(rb::rating_bin(50, 20), 6);
  EXPECT_EQ(rb::rating_bin(5, 4), 1);       // 1.25 opens bin 1
  EXPECT_EQ(rb::rating_bin(499, 100), 15);
  EXPECT_EQ(rb::rating_bin(7, 3), 5);       // 2.333 -> floor(5.33)
  EXPECT_THROW(rb::rating_bin(0, 0), rb::ContractError);
  for (long count = 1; count <= 30; ++count)
    for (long sum = count; sum <= 5 * count; ++sum) {
      const int bin = rb::rating_bin(sum, count);
      const double mean = static_cast<double>(sum) / count;
      EXPECT_LE(1.0 + 0.25 * bin, mean + 1e-12);
      if (bin < 15) {
        EXPECT_LT(mean, 1.0 + 0.25 * (bin + 1));
      }
    }
}

TEST(Aggregate, MeansAndHistogram) {
  const auto study = rb::testing::study_fixture(1, 20);
  std::vector<rb::SessionRecord> sessions;
  for (int slot = 0; slot < 20; ++slot) {
    sessions.push_back(answer(study, slot, "w" + std::to_string(slot),
                              [&](const std::string&) { return slot % 2 ? 3 : 2; }));
  }
  const auto report = rb::aggregate_ratings(study, sessions);
  ASSERT_EQ(report.pairs.size(), 1u);
  EXPECT_EQ(report.pairs[0].mean, 2.5);
  EXPECT_EQ(report.pairs[0].count, 20);
  EXPECT_EQ(report.mean_histogram[6], 1);
  EXPECT_EQ(report.pairs[0].histogram[4], 10);
  EXPECT_EQ(report.pairs[0].histogram[8], 10);
  EXPECT_EQ(report.improvement, 1);
  EXPECT_EQ(report.kept_workers.size(), 20u);
}

TEST(Aggregate, DiscardsAndSkips) {
  const auto study = rb::testing::study_fixture(4, 3, 9, true);
  std::vector<rb::SessionRecord> sessions;
  sessions.push_back(answer(study, 0, "good", [](const std::string&) { return 1; }));
  sessions.push_back(answer(study, 1, "one", [](const std::string&) { return 1; }, 1));
  sessions.push_back(answer(study, 2, "bad", [](const std::string&) { return 5; }, 2));
  auto partial = answer(study, 0, "partial", [](const std::string&) { return 5; });
  partial.responses.erase(partial.responses.begin());
  sessions.push_back(partial);
  const auto report = rb::aggregate_ratings(study, sessions);
  EXPECT_EQ(report.kept_workers, (std::vector<std::string>{"good", "one"}));
  EXPECT_EQ(report.discarded_workers, (std::vector<std::string>{"bad"}));
  EXPECT_EQ(report.incomplete_sessions, 1);
  for (const auto& p : report.pairs) EXPECT_EQ(p.mean, 1.0);
  EXPECT_EQ(report.deterioration, 0);

  EXPECT_THROW(rb::aggregate_ratings(study, {sessions[2], sessions[3]}), rb::ValidationError);
}

TEST(Aggregate, OrderInvariant) {
  const auto study = rb::testing::study_fixture(30, 6, 2, true);
  std::mt19937_64 rng(8);
  std::vector<rb::SessionRecord> sessions;
  for (int slot = 0; slot < static_cast<int>(study.sessions.size()); ++slot) {
    std::uniform_int_distribution<int> ord(1, 5);
    std::map<std::string, int> fixed;
    sessions.push_back(answer(study, slot, "w" + std::to_string(slot), [&](const std::string& id) {
      if (!fixed.count(id)) fixed[id] = ord(rng);
      return fixed[id];
    }, slot % 4 == 3 ? 2 : 0));
  }
  const auto a = rb::to_json(rb::aggregate_ratings(study, sessions));
  std::shuffle(sessions.begin(), sessions.end(), rng);
  EXPECT_EQ(rb::to_json(rb::aggregate_ratings(study, sessions)), a);
}

TEST(ExternalScores, AttachByPairOrEnhancedPath) {
  const auto study = rb::testing::study_fixture(3, 3);
  std::vector<rb::SessionRecord> sessions;
  for (int slot = 0; slot < static_cast<int>(study.sessions.size()); ++slot)
    sessions.push_back(answer(study, slot, "w" + std::to_string(slot), [](const std::string&) { return 2; }));
  auto report = rb::aggregate_ratings(study, sessions);
  rb::attach_external_scores(report, study, {{"p0", 0.1}, {"enhanced/p1.png", 0.2}});
  std::map<std::string, std::optional<double>> got;
  for (const auto& p : report.pairs) got[p.pair_id] = p.external_score;
  EXPECT_EQ(got["p0"], 0.1);
  EXPECT_EQ(got["p1"], 0.2);
  EXPECT_FALSE(got["p2"].has_value());
  EXPECT_EQ(rb::to_json(report)["pairs"][0]["external_score"], 0.1);
}

TEST(Definition, ParsesJson) {
  const auto doc = json::parse(R"({
    "study_id": "s", "ratings_per_pair": 2, "session_pairs": 10, "seed": 5,
    "pairs": [{"id": "a", "original": "o.png", "enhanced": "e.png"}],
    "sentinels": [
      {"id": "x", "original": "1.png", "enhanced": "2.png", "expected": "improvement"},
      {"id": "y", "original": "1.png", "enhanced": "1.png", "expected": "no-change"},
      {"id": "z", "original": "2.png", "enhanced": "3.png", "expected": "deterioration"}]})");
  const auto study = rb::parse_study_definition(doc);
  EXPECT_EQ(study.sessions.size(), 2u);
  EXPECT_EQ(study.find_sentinel("y")->expected, rb::SentinelClass::kNoChange);
  EXPECT_FALSE(study.options.swap_presentation);
  auto bad = doc;
  bad["sentinels"][0]["expected"] = "sharper";
  EXPECT_THROW(rb::parse_study_definition(bad), rb::ValidationError);
  bad = doc;
  bad.erase("pairs");
  EXPECT_THROW(rb::parse_study_definition(bad), rb::ValidationError);
}
