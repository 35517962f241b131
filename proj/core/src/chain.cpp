#include "restorebench/chain.hpp"

#include <chrono>
#include <fstream>
#include <set>

#include "restorebench/degrade.hpp"
#include "restorebench/enhance.hpp"
#include "restorebench/hash.hpp"

namespace restorebench {

namespace {

using nlohmann::json;

// Reads typed parameters and rejects keys nobody asked for.
class Params {
 public:
  Params(const std::string& stage, const json& params) : stage_(stage), params_(params) {
    if (!params_.is_object()) throw ValidationError(stage_ + ": params must be an object");
  }

  template <typename T>
  T get(const std::string& key, T fallback) {
    used_.insert(key);
    if (!params_.contains(key)) return fallback;
    try {
      return params_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ValidationError(stage_ + ": parameter '" + key + "' has the wrong type");
    }
  }

  const json& raw(const std::string& key) {
    used_.insert(key);
    if (!params_.contains(key)) throw ValidationError(stage_ + ": missing parameter '" + key + "'");
    return params_.at(key);
  }

  void finish() const {
    for (const auto& [key, value] : params_.items()) {
      if (!used_.count(key)) throw ValidationError(stage_ + ": unknown parameter '" + key + "'");
    }
  }

  void require(bool condition, const std::string& message) const {
    if (!condition) throw ValidationError(stage_ + ": " + message);
  }

 private:
  std::string stage_;
  const json& params_;
  std::set<std::string> used_;
};

Interpolation parse_method(const std::string& method, const Params& p) {
  if (method == "nearest") return Interpolation::kNearest;
  if (method == "bilinear") return Interpolation::kBilinear;
  if (method == "bicubic") return Interpolation::kBicubic;
  p.require(false, "method must be nearest, bilinear or bicubic");
  return Interpolation::kNearest;
}

Kernel parse_psf(const json& psf, const Params& p) {
  p.require(psf.is_object() && psf.contains("type"), "psf needs a type");
  const std::string type = psf.at("type").get<std::string>();
  if (type == "motion") {
    return motion_blur_kernel(psf.at("length").get<double>(), psf.value("theta", 0.0));
  }
  if (type == "gaussian") return gaussian_defocus_kernel(psf.at("sigma").get<double>());
  if (type == "uniform") return Kernel::uniform(psf.at("side").get<int>());
  p.require(false, "psf type must be motion, gaussian or uniform");
  return Kernel::identity();
}

StageSpec parse_spec(const json& node) {
  if (!node.is_object() || !node.contains("name") || !node["name"].is_string()) {
    throw ValidationError("each stage needs a string \"name\"");
  }
  for (const auto& [key, value] : node.items()) {
    if (key != "name" && key != "params") throw ValidationError("stage has unknown key '" + key + "'");
  }
  return StageSpec{node["name"].get<std::string>(), node.value("params", json::object())};
}

}  // namespace

Stage make_stage(const StageSpec& spec) {
  Params p(spec.name, spec.params);
  Stage stage{spec.name, 1, {}};
  const std::string& name = spec.name;

  if (name == "identity") {
    stage.apply = [](const Image& in) { return in; };
  } else if (name == "upscale") {
    const int factor = p.get("factor", 2);
    p.require(factor >= 2, "factor must be >= 2");
    const Interpolation method = parse_method(p.get<std::string>("method", "bicubic"), p);
    stage.scale = factor;
    stage.apply = [=](const Image& in) { return upscale(in, factor, method); };
  } else if (name == "deinterlace") {
    const bool detect = p.get("detect", false);
    const double threshold = p.get("threshold", kInterlaceThreshold);
    stage.apply = [=](const Image& in) {
      if (detect && !detect_interlacing(in, threshold).interlaced) return in;
      return deinterlace(in);
    };
  } else if (name == "clahe") {
    const int grid = p.get("grid", 8);
    const double clip = p.get("clip_limit", 2.0);
    p.require(grid >= 1 && clip >= 0.0, "grid must be >= 1 and clip_limit >= 0");
    stage.apply = [=](const Image& in) { return clahe(in, grid, clip); };
  } else if (name == "smooth_prior") {
    const int radius = p.get("radius", 3);
    const double range_sigma = p.get("range_sigma", 0.1);
    p.require(radius >= 1 && range_sigma > 0.0, "radius must be >= 1 and range_sigma > 0");
    stage.apply = [=](const Image& in) { return smooth_prior(in, radius, range_sigma); };
  } else if (name == "tone_map") {
    const double gamma = p.get("gamma", 1.5);
    const int radius = p.get("radius", 3);
    const double range_sigma = p.get("range_sigma", 0.1);
    p.require(gamma > 0.0 && radius >= 1 && range_sigma > 0.0,
              "gamma must be > 0, radius >= 1, range_sigma > 0");
    stage.apply = [=](const Image& in) {
      return tone_map_enhance(in, smooth_prior(in, radius, range_sigma), gamma);
    };
  } else if (name == "suppress_periodic") {
    PeriodicSuppressionOptions opt;
    opt.dc_exclusion_radius = p.get("dc_exclusion_radius", opt.dc_exclusion_radius);
    opt.peak_factor = p.get("peak_factor", opt.peak_factor);
    opt.median_radius = p.get("median_radius", opt.median_radius);
    opt.notch_sigma = p.get("notch_sigma", opt.notch_sigma);
    p.require(opt.peak_factor > 0.0 && opt.dc_exclusion_radius >= 0.0 &&
                  opt.median_radius >= 1 && opt.notch_sigma > 0.0,
              "invalid suppression parameters");
    stage.apply = [=](const Image& in) { return suppress_periodic(in, opt); };
  } else if (name == "blind_deconvolve") {
    const int iterations = p.get("iterations", kDefaultBlindIterations);
    const int psf_side = p.get("psf_side", 3);
    p.require(iterations >= 1 && psf_side >= 1 && psf_side % 2 == 1,
              "iterations must be >= 1 and psf_side odd");
    stage.apply = [=](const Image& in) { return blind_deconvolve(in, iterations, psf_side).image; };
  } else if (name == "deconvolve") {
    const int iterations = p.get("iterations", 20);
    p.require(iterations >= 1, "iterations must be >= 1");
    Kernel psf = Kernel::identity();
    try {
      psf = parse_psf(p.raw("psf"), p);
    } catch (const json::exception& e) {
      throw ValidationError(name + ": bad psf: " + e.what());
    } catch (const ContractError& e) {
      throw ValidationError(name + ": bad psf: " + e.what());
    }
    stage.apply = [=](const Image& in) { return richardson_lucy(in, psf, iterations).image; };
  } else if (name == "tiled") {
    TileOptions opt;
    opt.tile = p.get("tile", 32);
    opt.apron = p.get("apron", 2);
    opt.jobs = p.get("jobs", 1);
    p.require(opt.tile >= 1 && opt.apron >= 0 && opt.jobs >= 1, "tile >= 1, apron >= 0, jobs >= 1");
    Stage inner = make_stage(parse_spec(p.raw("stage")));
    p.require(inner.scale == 1 || inner.scale == 2, "inner stage scale must be 1 or 2");
    opt.scale = inner.scale;
    stage.scale = inner.scale;
    stage.apply = [opt, apply = inner.apply](const Image& in) { return tile_process(in, apply, opt); };
  } else {
    throw ValidationError("unknown stage '" + name + "'");
  }
  p.finish();
  return stage;
}

EnhancementChain::EnhancementChain(std::vector<StageSpec> stages) : specs_(std::move(stages)) {
  if (specs_.empty()) throw ValidationError("an enhancement chain needs at least one stage");
  for (const auto& spec : specs_) stages_.push_back(make_stage(spec));
}

int EnhancementChain::scale() const noexcept {
  int s = 1;
  for (const auto& stage : stages_) s *= stage.scale;
  return s;
}

nlohmann::json EnhancementChain::to_json() const {
  json stages = json::array();
  for (const auto& spec : specs_) stages.push_back({{"name", spec.name}, {"params", spec.params}});
  return {{"stages", stages}};
}

EnhancementChain parse_chain(const nlohmann::json& config) {
  if (!config.is_object() || !config.contains("stages") || !config["stages"].is_array()) {
    throw ValidationError("chain config needs a \"stages\" array");
  }
  std::vector<StageSpec> specs;
  for (const auto& node : config["stages"]) specs.push_back(parse_spec(node));
  return EnhancementChain(std::move(specs));
}

EnhancementChain load_chain(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json config;
  try {
    config = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(0, path.string() + ": " + e.what());
  }
  return parse_chain(config);
}

ChainResult run_chain(const Image& image, const EnhancementChain& chain) {
  ChainResult result{image, {}};
  const auto& stages = chain.stages();
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    try {
      result.image = stages[i].apply(result.image);
    } catch (const std::exception& e) {
      throw StageError(static_cast<int>(i), stages[i].name, e.what());
    }
    const auto stop = std::chrono::steady_clock::now();
    result.provenance.push_back(StageProvenance{
        static_cast<int>(i), stages[i].name,
        std::chrono::duration<double, std::milli>(stop - start).count(),
        image_hash(result.image), result.image.width(), result.image.height()});
  }
  return result;
}

nlohmann::json provenance_to_json(const std::vector<StageProvenance>& provenance) {
  json out = json::array();
  for (const auto& p : provenance) {
    out.push_back({{"index", p.index},
                   {"stage", p.name},
                   {"ms", p.milliseconds},
                   {"hash", to_hex(p.output_hash)},
                   {"width", p.width},
                   {"height", p.height}});
  }
  return out;
}

}  // namespace restorebench
