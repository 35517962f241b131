#include "cli/staging.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>

#include <unistd.h>

#include "restorebench/error.hpp"

namespace restorebench::cli {

namespace fs = std::filesystem;

namespace {

fs::path sibling(const fs::path& target, const std::string& tag) {
  fs::path name = target.filename();
  if (name.empty()) name = target.parent_path().filename();
  const fs::path parent = fs::absolute(target).lexically_normal().parent_path();
  return parent / ("." + name.string() + "." + tag + "." + std::to_string(::getpid()));
}

}  // namespace

StagedDirectory::StagedDirectory(fs::path target)
    : target_(std::move(target)), staging_(sibling(target_, "staging")) {
  fs::create_directories(staging_.parent_path());
  fs::remove_all(staging_);
  fs::create_directory(staging_);
}

StagedDirectory::~StagedDirectory() {
  if (committed_) return;
  std::error_code ignored;
  fs::remove_all(staging_, ignored);
}

void StagedDirectory::commit() {
  const fs::path previous = sibling(target_, "previous");
  fs::remove_all(previous);
  const bool existed = fs::exists(target_);
  if (existed) fs::rename(target_, previous);
  try {
    fs::rename(staging_, target_);
  } catch (...) {
    if (existed) fs::rename(previous, target_);
    throw;
  }
  committed_ = true;
  fs::remove_all(previous);
}

void write_text_atomic(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::vector<fs::path> list_images(const fs::path& dir) {
  std::vector<fs::path> images;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    auto ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png") images.push_back(entry.path());
  }
  std::sort(images.begin(), images.end());
  return images;
}

void progress(const std::string& message) { std::cerr << message << '\n'; }

}  // namespace restorebench::cli
