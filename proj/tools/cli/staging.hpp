#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace restorebench::cli {

// Output directory built under a sibling temporary name and swapped into
// place by commit(). Dropped without commit, the temporary is removed.
class StagedDirectory {
 public:
  explicit StagedDirectory(std::filesystem::path target);
  ~StagedDirectory();
  StagedDirectory(const StagedDirectory&) = delete;
  StagedDirectory& operator=(const StagedDirectory&) = delete;

  const std::filesystem::path& path() const noexcept { return staging_; }
  void commit();

 private:
  std::filesystem::path target_;
  std::filesystem::path staging_;
  bool committed_ = false;
};

void write_text_atomic(const std::filesystem::path& path, std::string_view text);

// Regular *.png files directly inside `dir`, sorted by name.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

void progress(const std::string& message);

}  // namespace restorebench::cli
