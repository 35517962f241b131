#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "restorebench/error.hpp"
#include "restorebench/image.hpp"

namespace restorebench {

struct StageSpec {
  std::string name;
  nlohmann::json params = nlohmann::json::object();
};

// A resolved, runnable stage. `scale` is the integer factor the stage applies
// to both image dimensions.
struct Stage {
  std::string name;
  int scale = 1;
  std::function<Image(const Image&)> apply;
};

// Builds a stage from its name and parameter map. Unknown names, unknown
// parameter keys and out-of-range values raise ValidationError.
//
// Stages: identity, upscale{factor, method}, deinterlace{detect, threshold},
// clahe{grid, clip_limit}, smooth_prior{radius, range_sigma},
// tone_map{gamma, radius, range_sigma}, suppress_periodic{dc_exclusion_radius,
// peak_factor, median_radius, notch_sigma}, blind_deconvolve{iterations,
// psf_side}, deconvolve{iterations, psf{type, ...}}, tiled{tile, apron, stage}.
Stage make_stage(const StageSpec& spec);

class EnhancementChain {
 public:
  explicit EnhancementChain(std::vector<StageSpec> stages);

  const std::vector<StageSpec>& specs() const noexcept { return specs_; }
  const std::vector<Stage>& stages() const noexcept { return stages_; }
  // Product of every stage's scale factor.
  int scale() const noexcept;
  nlohmann::json to_json() const;

 private:
  std::vector<StageSpec> specs_;
  std::vector<Stage> stages_;
};

// {"stages": [{"name": "clahe", "params": {"grid": 8}}, ...]}
EnhancementChain parse_chain(const nlohmann::json& config);
EnhancementChain load_chain(const std::filesystem::path& path);

struct StageProvenance {
  int index = 0;
  std::string name;
  double milliseconds = 0.0;
  std::uint64_t output_hash = 0;
  int width = 0;
  int height = 0;
};

struct ChainResult {
  Image image;
  std::vector<StageProvenance> provenance;
};

// Raised by run_chain when a stage throws; carries the 0-based stage index.
class StageError : public Error {
 public:
  StageError(int index, const std::string& name, const std::string& what)
      : Error("stage " + std::to_string(index) + " (" + name + "): " + what), index_(index) {}
  int stage_index() const noexcept { return index_; }

 private:
  int index_;
};

ChainResult run_chain(const Image& image, const EnhancementChain& chain);

nlohmann::json provenance_to_json(const std::vector<StageProvenance>& provenance);

}  // namespace restorebench
