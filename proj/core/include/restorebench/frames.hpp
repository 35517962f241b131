#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "restorebench/annotation.hpp"
#include "restorebench/image.hpp"

namespace restorebench {

inline constexpr int kMinCropSide = 224;

struct CropRect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
  friend bool operator==(const CropRect&, const CropRect&) = default;
};

struct CropRecord {
  std::string crop_id;
  std::string collection;  // empty when annotations are not grouped
  std::string video_id;
  int frame = 0;
  int track_id = 0;
  std::string label;
  CropRect rect;
  bool square = true;  // false when the frame was too small for the square

  friend bool operator==(const CropRecord&, const CropRecord&) = default;
};

struct SkippedEntry {
  std::string collection;
  std::string video_id;
  int frame = 0;
  int track_id = 0;
  std::string reason;
  friend bool operator==(const SkippedEntry&, const SkippedEntry&) = default;
};

struct Manifest {
  std::vector<CropRecord> crops;     // ordered by (collection, video, frame, track)
  std::vector<SkippedEntry> skipped;
};

// Square of side max(min_side, box width, box height) centred on the box,
// origin floor(centre - side/2), then shifted inside the frame. A frame
// dimension smaller than the side is spanned entirely and the crop is
// flagged non-square. Throws ContractError for lost/occluded records and
// GeometryError for boxes that miss the frame.
CropRect crop_rect(int frame_width, int frame_height, const AnnotationRecord& record,
                   int min_side = kMinCropSide);

std::string crop_id(const std::string& video_id, int frame, int track_id);

std::pair<Image, CropRecord> extract_crop(const Image& frame, const AnnotationRecord& record,
                                          const std::string& video_id,
                                          int min_side = kMinCropSide);

Image crop_image(const Image& frame, const CropRect& rect);

// `<frames_dir>/<video_id>/<frame, zero-padded to 6 digits>.png`
std::filesystem::path frame_path(const std::filesystem::path& frames_dir,
                                 const std::string& video_id, int frame);

struct AnnotationSource {
  std::filesystem::path path;  // <video_id>.txt
  std::string collection;
};

// Every `*.txt` file directly under `dir` (collection "") or one level down
// (collection = subdirectory name), sorted.
std::vector<AnnotationSource> discover_annotations(const std::filesystem::path& dir);

struct ManifestOptions {
  int min_side = kMinCropSide;
  bool include_generated = true;
};

// Visible records become crops; missing frames or boxes outside the frame
// become skipped entries.
Manifest build_manifest(const std::vector<AnnotationSource>& sources,
                        const std::filesystem::path& frames_dir,
                        const ManifestOptions& options = {});

// One JSON object per line: {"status":"ok", ...} or {"status":"skipped", ...}.
std::string serialize_manifest(const Manifest& manifest);
Manifest parse_manifest(std::string_view text);
Manifest load_manifest(const std::filesystem::path& path);

nlohmann::json to_json(const CropRecord& record);

}  // namespace restorebench
