#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace restorebench {

// One row of a VATIC annotation file.
struct AnnotationRecord {
  int track_id = 0;
  int xmin = 0;
  int ymin = 0;
  int xmax = 0;
  int ymax = 0;
  int frame = 0;
  bool lost = false;
  bool occluded = false;
  bool generated = false;
  std::string label;

  int box_width() const noexcept { return xmax - xmin; }
  int box_height() const noexcept { return ymax - ymin; }
  bool visible() const noexcept { return !lost && !occluded; }

  friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

struct Track {
  int track_id = 0;
  std::string label;
  std::vector<AnnotationRecord> records;  // strictly increasing frame
};

// Super-class name -> ImageNet synset ids. Names are matched exactly.
class SuperClassMap {
 public:
  SuperClassMap() = default;
  explicit SuperClassMap(std::map<std::string, std::set<std::string>> entries);

  // Throws ValidationError if `name` is not a known super-class.
  const std::set<std::string>& synsets(const std::string& name) const;
  bool contains(const std::string& name) const { return entries_.count(name) != 0; }
  std::size_t size() const noexcept { return entries_.size(); }
  const std::map<std::string, std::set<std::string>>& entries() const noexcept {
    return entries_;
  }

 private:
  std::map<std::string, std::set<std::string>> entries_;
};

// Columns: track_id xmin ymin xmax ymax frame lost occluded generated "label".
// All-or-nothing: the first malformed line raises ParseError with its number.
std::vector<AnnotationRecord> parse_vatic(std::istream& in);
std::vector<AnnotationRecord> parse_vatic(std::string_view text);
std::vector<AnnotationRecord> load_vatic(const std::filesystem::path& path);

// Canonical single-space form, one record per line.
std::string serialize_vatic(const std::vector<AnnotationRecord>& records);

// Records with lost = 0 and occluded = 0, order preserved.
std::vector<AnnotationRecord> filter_visible(const std::vector<AnnotationRecord>& records);

// One track per id in ascending id order, records sorted by frame.
// Throws ValidationError on a repeated (track, frame) or a label conflict.
std::vector<Track> group_tracks(std::vector<AnnotationRecord> records);

// JSON object mapping names to non-empty arrays of unique synset ids.
SuperClassMap parse_superclass_map(std::string_view json_text);
SuperClassMap load_superclass_map(const std::filesystem::path& path);

}  // namespace restorebench
