#include "restorebench/frames.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "restorebench/error.hpp"
#include "restorebench/image_io.hpp"

namespace restorebench {

namespace {

// Places a span of `side` centred at `centre` inside [0, limit).
std::pair<int, int> place(double centre, int side, int limit) {
  if (side >= limit) return {0, limit};
  int origin = static_cast<int>(std::floor(centre - side / 2.0));
  origin = std::clamp(origin, 0, limit - side);
  return {origin, side};
}

}  // namespace

CropRect crop_rect(int frame_width, int frame_height, const AnnotationRecord& r, int min_side) {
  if (!r.visible()) throw ContractError("cannot crop a lost or occluded annotation");
  if (r.xmax < 0 || r.ymax < 0 || r.xmin >= frame_width || r.ymin >= frame_height) {
    throw GeometryError("bounding box lies outside the frame");
  }
  const int side = std::max({min_side, r.box_width(), r.box_height()});
  const auto [x, w] = place(0.5 * (r.xmin + r.xmax), side, frame_width);
  const auto [y, h] = place(0.5 * (r.ymin + r.ymax), side, frame_height);
  return CropRect{x, y, w, h};
}

std::string crop_id(const std::string& video_id, int frame, int track_id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "_%06d_t%d", frame, track_id);
  return video_id + buf;
}

Image crop_image(const Image& frame, const CropRect& rect) {
  if (rect.x < 0 || rect.y < 0 || rect.width < 1 || rect.height < 1 ||
      rect.x + rect.width > frame.width() || rect.y + rect.height > frame.height()) {
    throw GeometryError("crop rectangle outside the frame");
  }
  Image out(rect.width, rect.height, frame.channels());
  for (int y = 0; y < rect.height; ++y)
    for (int x = 0; x < rect.width; ++x)
      for (int c = 0; c < frame.channels(); ++c)
        out.at(x, y, c) = frame.at(rect.x + x, rect.y + y, c);
  return out;
}

std::pair<Image, CropRecord> extract_crop(const Image& frame, const AnnotationRecord& record,
                                          const std::string& video_id, int min_side) {
  const CropRect rect = crop_rect(frame.width(), frame.height(), record, min_side);
  CropRecord meta;
  meta.crop_id = crop_id(video_id, record.frame, record.track_id);
  meta.video_id = video_id;
  meta.frame = record.frame;
  meta.track_id = record.track_id;
  meta.label = record.label;
  meta.rect = rect;
  meta.square = rect.width == rect.height;
  return {crop_image(frame, rect), std::move(meta)};
}

std::filesystem::path frame_path(const std::filesystem::path& frames_dir,
                                 const std::string& video_id, int frame) {
  char name[32];
  std::snprintf(name, sizeof(name), "%06d.png", frame);
  return frames_dir / video_id / name;
}

std::vector<AnnotationSource> discover_annotations(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw IoError("annotations directory not found: " + dir.string());
  std::vector<AnnotationSource> sources;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      sources.push_back({entry.path(), ""});
    } else if (entry.is_directory()) {
      for (const auto& inner : fs::directory_iterator(entry.path())) {
        if (inner.is_regular_file() && inner.path().extension() == ".txt") {
          sources.push_back({inner.path(), entry.path().filename().string()});
        }
      }
    }
  }
  std::sort(sources.begin(), sources.end(), [](const auto& a, const auto& b) {
    return std::tie(a.collection, a.path) < std::tie(b.collection, b.path);
  });
  return sources;
}

Manifest build_manifest(const std::vector<AnnotationSource>& sources,
                        const std::filesystem::path& frames_dir, const ManifestOptions& options) {
  struct Pending {
    std::string collection;
    std::string video;
    AnnotationRecord record;
  };
  std::vector<Pending> pending;
  for (const auto& source : sources) {
    const std::string video = source.path.stem().string();
    for (auto& r : filter_visible(load_vatic(source.path))) {
      if (!options.include_generated && r.generated) continue;
      pending.push_back({source.collection, video, std::move(r)});
    }
  }
  std::stable_sort(pending.begin(), pending.end(), [](const Pending& a, const Pending& b) {
    return std::tie(a.collection, a.video, a.record.frame, a.record.track_id) <
           std::tie(b.collection, b.video, b.record.frame, b.record.track_id);
  });

  Manifest manifest;
  for (const auto& p : pending) {
    const auto path = frame_path(frames_dir, p.video, p.record.frame);
    auto skip = [&](std::string reason) {
      manifest.skipped.push_back({p.collection, p.video, p.record.frame, p.record.track_id,
                                  std::move(reason)});
    };
    if (!std::filesystem::is_regular_file(path)) {
      skip("missing_frame");
      continue;
    }
    ImageInfo info;
    try {
      info = read_image_info(path);
    } catch (const IoError&) {
      skip("unreadable_frame");
      continue;
    }
    CropRecord row;
    try {
      row.rect = crop_rect(info.width, info.height, p.record, options.min_side);
    } catch (const GeometryError&) {
      skip("bbox_outside_frame");
      continue;
    }
    row.crop_id = crop_id(p.video, p.record.frame, p.record.track_id);
    row.collection = p.collection;
    row.video_id = p.video;
    row.frame = p.record.frame;
    row.track_id = p.record.track_id;
    row.label = p.record.label;
    row.square = row.rect.width == row.rect.height;
    manifest.crops.push_back(std::move(row));
  }
  return manifest;
}

nlohmann::json to_json(const CropRecord& r) {
  return {{"status", "ok"},
          {"crop_id", r.crop_id},
          {"collection", r.collection},
          {"video_id", r.video_id},
          {"frame", r.frame},
          {"track_id", r.track_id},
          {"label", r.label},
          {"x", r.rect.x},
          {"y", r.rect.y},
          {"width", r.rect.width},
          {"height", r.rect.height},
          {"square", r.square}};
}

std::string serialize_manifest(const Manifest& manifest) {
  std::string out;
  for (const auto& r : manifest.crops) out += to_json(r).dump() + "\n";
  for (const auto& s : manifest.skipped) {
    const nlohmann::json line = {{"status", "skipped"}, {"collection", s.collection},
                                 {"video_id", s.video_id}, {"frame", s.frame},
                                 {"track_id", s.track_id}, {"reason", s.reason}};
    out += line.dump() + "\n";
  }
  return out;
}

Manifest parse_manifest(std::string_view text) {
  Manifest manifest;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      if (j.at("status") == "ok") {
        CropRecord r;
        r.crop_id = j.at("crop_id").get<std::string>();
        r.collection = j.value("collection", "");
        r.video_id = j.at("video_id").get<std::string>();
        r.frame = j.at("frame").get<int>();
        r.track_id = j.at("track_id").get<int>();
        r.label = j.at("label").get<std::string>();
        r.rect = {j.at("x").get<int>(), j.at("y").get<int>(), j.at("width").get<int>(),
                  j.at("height").get<int>()};
        r.square = j.at("square").get<bool>();
        manifest.crops.push_back(std::move(r));
      } else {
        manifest.skipped.push_back({j.value("collection", ""), j.at("video_id").get<std::string>(),
                                    j.at("frame").get<int>(), j.at("track_id").get<int>(),
                                    j.at("reason").get<std::string>()});
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(number, std::string("manifest: ") + e.what());
    }
  }
  return manifest;
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_manifest(buffer.str());
}

}  // namespace restorebench
