#include <filesystem>

#include "cli/commands.hpp"
#include "cli/staging.hpp"
#include "restorebench/frames.hpp"
#include "restorebench/image_io.hpp"

namespace restorebench::cli {

namespace fs = std::filesystem;

int cmd_extract(const GlobalOptions&, const ExtractOptions& options) {
  const auto sources = discover_annotations(options.annotations);
  progress("extract: " + std::to_string(sources.size()) + " annotation files");

  ManifestOptions manifest_options;
  manifest_options.min_side = options.min_side;
  manifest_options.include_generated = !options.skip_generated;
  const Manifest manifest = build_manifest(sources, options.frames, manifest_options);

  StagedDirectory staged(options.out);
  fs::path current_path;
  Image frame;
  ImageInfo info;
  for (const auto& crop : manifest.crops) {
    const fs::path path = frame_path(options.frames, crop.video_id, crop.frame);
    if (path != current_path) {
      frame = read_image(path);
      info = read_image_info(path);
      current_path = path;
    }
    fs::path dir = staged.path() / "crops";
    if (!crop.collection.empty()) dir /= crop.collection;
    fs::create_directories(dir);
    write_image(crop_image(frame, crop.rect), dir / (crop.crop_id + ".png"), info.depth);
  }
  write_text_atomic(staged.path() / "manifest.jsonl", serialize_manifest(manifest));
  staged.commit();
  progress("extract: " + std::to_string(manifest.crops.size()) + " crops, " +
           std::to_string(manifest.skipped.size()) + " skipped");
  return kOk;
}

}  // namespace restorebench::cli
