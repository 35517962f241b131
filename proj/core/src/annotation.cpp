#include "restorebench/annotation.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "restorebench/error.hpp"

namespace restorebench {

namespace {

bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r'; }

int parse_int(std::string_view token, std::size_t line, const char* column) {
  int value = 0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) {
    throw ParseError(line, std::string("non-integer ") + column + " '" +
                               std::string(token) + "'");
  }
  return value;
}

bool parse_flag(std::string_view token, std::size_t line, const char* column) {
  const int v = parse_int(token, line, column);
  if (v != 0 && v != 1) {
    throw ParseError(line, std::string(column) + " must be 0 or 1, got " +
                               std::string(token));
  }
  return v == 1;
}

AnnotationRecord parse_line(std::string_view text, std::size_t line) {
  static constexpr const char* kColumns[9] = {
      "track_id", "xmin", "ymin", "xmax", "ymax",
      "frame", "lost", "occluded", "generated"};

  std::string_view tokens[9];
  std::size_t pos = 0;
  for (int i = 0; i < 9; ++i) {
    while (pos < text.size() && is_blank(text[pos])) ++pos;
    const std::size_t start = pos;
    while (pos < text.size() && !is_blank(text[pos])) ++pos;
    if (start == pos) {
      throw ParseError(line, "expected 10 columns, found " + std::to_string(i));
    }
    tokens[i] = text.substr(start, pos - start);
    if (tokens[i].front() == '"') {
      throw ParseError(line, "expected 10 columns, found " + std::to_string(i + 1));
    }
  }

  while (pos < text.size() && is_blank(text[pos])) ++pos;
  if (pos == text.size()) throw ParseError(line, "expected 10 columns, found 9");
  if (text[pos] != '"') throw ParseError(line, "label must be enclosed in quotation marks");
  const std::size_t close = text.find('"', pos + 1);
  if (close == std::string_view::npos) throw ParseError(line, "unterminated label");
  std::string label(text.substr(pos + 1, close - pos - 1));
  pos = close + 1;
  while (pos < text.size() && is_blank(text[pos])) ++pos;
  if (pos != text.size()) throw ParseError(line, "unexpected text after label");
  if (label.empty()) throw ParseError(line, "empty label");

  AnnotationRecord r;
  r.track_id = parse_int(tokens[0], line, kColumns[0]);
  r.xmin = parse_int(tokens[1], line, kColumns[1]);
  r.ymin = parse_int(tokens[2], line, kColumns[2]);
  r.xmax = parse_int(tokens[3], line, kColumns[3]);
  r.ymax = parse_int(tokens[4], line, kColumns[4]);
  r.frame = parse_int(tokens[5], line, kColumns[5]);
  r.lost = parse_flag(tokens[6], line, kColumns[6]);
  r.occluded = parse_flag(tokens[7], line, kColumns[7]);
  r.generated = parse_flag(tokens[8], line, kColumns[8]);
  r.label = std::move(label);

  if (r.track_id < 0) throw ParseError(line, "negative track_id");
  if (r.frame < 0) throw ParseError(line, "negative frame");
  if (r.xmin > r.xmax) throw ParseError(line, "xmin > xmax");
  if (r.ymin > r.ymax) throw ParseError(line, "ymin > ymax");
  return r;
}

}  // namespace

SuperClassMap::SuperClassMap(std::map<std::string, std::set<std::string>> entries)
    : entries_(std::move(entries)) {
  for (const auto& [name, synsets] : entries_) {
    if (name.empty()) throw ValidationError("super-class with empty name");
    if (synsets.empty()) throw ValidationError("super-class '" + name + "' has no synsets");
  }
}

const std::set<std::string>& SuperClassMap::synsets(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw ValidationError("unknown super-class '" + name + "'");
  return it->second;
}

std::vector<AnnotationRecord> parse_vatic(std::istream& in) {
  std::vector<AnnotationRecord> records;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (std::all_of(text.begin(), text.end(), is_blank)) continue;
    records.push_back(parse_line(text, line));
  }
  return records;
}

std::vector<AnnotationRecord> parse_vatic(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_vatic(in);
}

std::vector<AnnotationRecord> load_vatic(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return parse_vatic(in);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path.string() + ": " + e.detail());
  }
}

std::string serialize_vatic(const std::vector<AnnotationRecord>& records) {
  std::ostringstream out;
  for (const auto& r : records) {
    out << r.track_id << ' ' << r.xmin << ' ' << r.ymin << ' ' << r.xmax << ' '
        << r.ymax << ' ' << r.frame << ' ' << int(r.lost) << ' ' << int(r.occluded)
        << ' ' << int(r.generated) << " \"" << r.label << "\"\n";
  }
  return out.str();
}

std::vector<AnnotationRecord> filter_visible(const std::vector<AnnotationRecord>& records) {
  std::vector<AnnotationRecord> out;
  std::copy_if(records.begin(), records.end(), std::back_inserter(out),
               [](const AnnotationRecord& r) { return r.visible(); });
  return out;
}

std::vector<Track> group_tracks(std::vector<AnnotationRecord> records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const AnnotationRecord& a, const AnnotationRecord& b) {
                     return a.track_id != b.track_id ? a.track_id < b.track_id
                                                     : a.frame < b.frame;
                   });
  std::vector<Track> tracks;
  for (auto& r : records) {
    if (tracks.empty() || tracks.back().track_id != r.track_id) {
      tracks.push_back(Track{r.track_id, r.label, {}});
    } else {
      Track& t = tracks.back();
      if (t.label != r.label) {
        throw ValidationError("track " + std::to_string(r.track_id) +
                              " has conflicting labels '" + t.label + "' and '" +
                              r.label + "'");
      }
      if (t.records.back().frame == r.frame) {
        throw ValidationError("track " + std::to_string(r.track_id) +
                              " has duplicate frame " + std::to_string(r.frame));
      }
    }
    tracks.back().records.push_back(std::move(r));
  }
  return tracks;
}

SuperClassMap parse_superclass_map(std::string_view json_text) {
  using nlohmann::json;
  std::set<std::string> seen;
  std::string duplicate;
  json::parser_callback_t detect_duplicates =
      [&](int depth, json::parse_event_t event, json& parsed) {
        if (depth == 1 && event == json::parse_event_t::key) {
          const auto& key = parsed.get_ref<const std::string&>();
          if (!seen.insert(key).second && duplicate.empty()) duplicate = key;
        }
        return true;
      };

  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end(), detect_duplicates);
  } catch (const json::parse_error& e) {
    throw ParseError(0, std::string("super-class map: ") + e.what());
  }
  if (!duplicate.empty()) {
    throw ValidationError("duplicate super-class '" + duplicate + "'");
  }
  if (!doc.is_object()) throw ValidationError("super-class map must be a JSON object");

  std::map<std::string, std::set<std::string>> entries;
  for (const auto& [name, list] : doc.items()) {
    if (!list.is_array()) {
      throw ValidationError("super-class '" + name + "' must map to an array");
    }
    std::set<std::string> synsets;
    for (const auto& s : list) {
      if (!s.is_string()) {
        throw ValidationError("super-class '" + name + "' has a non-string synset");
      }
      if (!synsets.insert(s.get<std::string>()).second) {
        throw ValidationError("super-class '" + name + "' repeats synset " +
                              s.get<std::string>());
      }
    }
    entries.emplace(name, std::move(synsets));
  }
  return SuperClassMap(std::move(entries));
}

SuperClassMap load_superclass_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_superclass_map(buffer.str());
}

}  // namespace restorebench
