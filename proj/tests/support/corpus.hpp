#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "restorebench/annotation.hpp"
#include "restorebench/metrics.hpp"
#include "restorebench/psychstudy.hpp"
#include "restorebench/study_service.hpp"

namespace restorebench::testing {

// Random but well-formed VATIC rows; labels may contain spaces.
std::vector<AnnotationRecord> random_vatic(std::uint64_t seed, int count);

inline const std::vector<std::string> kCollections = {"uav", "glider", "ground"};
inline const std::vector<std::string> kNetworks = {"vgg16",  "vgg19",     "inception",
                                                   "resnet", "mobilenet", "nasnetmobile"};

MetricReport report_from_hits(const std::string& collection, const std::string& network,
                              long evaluated, long m1_hits, long m2_hits);

struct Competition {
  std::vector<MetricReport> baseline;
  std::map<std::string, std::vector<MetricReport>> algorithms;
  std::map<std::string, int> expected_points;  // counted by hand, see corpus.cpp
  int expected_awarded_cells = 0;
};

// "dominant" improves every cell and leads everywhere, "partner" ties it on
// the M1 cells of the even-indexed networks, "laggard" never beats baseline.
Competition dominance_competition();
// Leaders change per network, one network has no valid score at all, and
// network 0 is a two-way tie.
Competition mixed_competition();

StudyDefinition study_fixture(int pairs = 100, int ratings_per_pair = 20,
                              std::uint64_t seed = 20180618, bool swap = false);

struct PlantedWorkers {
  std::vector<std::string> workers;    // in assignment order
  std::set<std::string> planted_bad;   // fail >= 2 sentinels
  std::set<std::string> one_mistake;   // fail exactly one sentinel, must be kept
};

// Assigns one session per worker and answers every item. Rated pairs get
// ordinals drawn from a per-pair preference; sentinels are answered
// correctly except for the planted mistakes.
PlantedWorkers run_planted_workers(StudyService& service, std::uint64_t seed, int workers,
                                   int bad_workers, int one_mistake_workers);

// Ordinal that satisfies / violates a sentinel class.
int correct_ordinal(SentinelClass expected);
int wrong_ordinal(SentinelClass expected);

}  // namespace restorebench::testing
