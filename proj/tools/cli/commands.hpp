#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace restorebench::cli {

inline constexpr std::uint64_t kDefaultSeed = 20180618;

enum ExitCode : int { kOk = 0, kUsage = 1, kDataIntegrity = 2, kRuntime = 3 };

struct GlobalOptions {
  std::uint64_t seed = kDefaultSeed;
  int jobs = 1;
};

struct ExtractOptions {
  std::filesystem::path annotations;
  std::filesystem::path frames;
  std::filesystem::path out;
  int min_side = 224;
  bool skip_generated = false;
};

struct BatchOptions {
  std::filesystem::path input;
  std::filesystem::path config;  // chain or recipe
  std::filesystem::path out;
};

struct EvaluateOptions {
  std::filesystem::path manifest;
  std::filesystem::path superclasses;
  std::filesystem::path predictions;
  std::filesystem::path baseline;
  std::filesystem::path out;
  double epsilon = 0.0;
};

struct RankOptions {
  std::filesystem::path baseline;
  std::map<std::string, std::filesystem::path> algorithms;
  std::filesystem::path out;
  double epsilon = 0.0;
};

struct StudyServeOptions {
  std::filesystem::path definition;
  std::filesystem::path state_dir;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::optional<std::filesystem::path> image_root;
  std::optional<std::filesystem::path> assets;
};

struct StudyReportOptions {
  std::filesystem::path definition;
  std::filesystem::path state_dir;
  std::filesystem::path out;
  std::optional<std::filesystem::path> scores;
};

// Each command throws restorebench errors; run() maps them to exit codes.
int cmd_extract(const GlobalOptions& global, const ExtractOptions& options);
int cmd_degrade(const GlobalOptions& global, const BatchOptions& options);
int cmd_enhance(const GlobalOptions& global, const BatchOptions& options);
int cmd_evaluate(const GlobalOptions& global, const EvaluateOptions& options);
int cmd_rank(const GlobalOptions& global, const RankOptions& options);
int cmd_study_serve(const GlobalOptions& global, const StudyServeOptions& options);
int cmd_study_report(const GlobalOptions& global, const StudyReportOptions& options);

int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);  // args[0] is the program name

}  // namespace restorebench::cli
