#include <atomic>
#include <chrono>
#include <fstream>
#include <functional>
#include <mutex>
#include <random>
#include <thread>

#include <nlohmann/json.hpp>

#include "cli/commands.hpp"
#include "cli/staging.hpp"
#include "restorebench/chain.hpp"
#include "restorebench/degrade.hpp"
#include "restorebench/error.hpp"
#include "restorebench/hash.hpp"
#include "restorebench/image_io.hpp"

namespace restorebench::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ItemResult {
  json provenance;
  bool failed = false;
};

std::int64_t now_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

// Runs `work` for every index on up to `jobs` threads. Results land in their
// slot, so the merged order never depends on scheduling.
std::vector<ItemResult> for_each_image(std::size_t count, int jobs,
                                       const std::function<ItemResult(std::size_t)>& work) {
  std::vector<ItemResult> results(count);
  std::atomic<std::size_t> next{0};
  std::mutex report;
  std::size_t done = 0;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      results[i] = work(i);
      std::lock_guard lock(report);
      ++done;
      progress("  [" + std::to_string(done) + "/" + std::to_string(count) + "] " +
               results[i].provenance.value("image", std::string()) +
               (results[i].failed ? " FAILED" : ""));
    }
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(count)));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return results;
}

json load_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(0, path.string() + ": " + e.what());
  }
}

std::uint64_t image_seed(std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return (std::uint64_t{words[0]} << 32) | words[1];
}

int finish(StagedDirectory& staged, const std::vector<ItemResult>& results,
           const std::string& command) {
  std::string log;
  std::size_t failures = 0;
  for (const auto& r : results) {
    log += r.provenance.dump() + "\n";
    failures += r.failed;
  }
  write_text_atomic(staged.path() / "provenance.jsonl", log);
  staged.commit();
  progress(command + ": " + std::to_string(results.size() - failures) + " written, " +
           std::to_string(failures) + " failed");
  return failures == 0 ? kOk : kRuntime;
}

}  // namespace

int cmd_degrade(const GlobalOptions& global, const BatchOptions& options) {
  const DegradationRecipe recipe = parse_degradation_recipe(load_json(options.config));
  const std::uint64_t seed = recipe.seed.value_or(global.seed);
  const auto images = list_images(options.input);
  progress("degrade: " + std::to_string(images.size()) + " images, seed " + std::to_string(seed));

  StagedDirectory staged(options.out);
  auto results = for_each_image(images.size(), global.jobs, [&](std::size_t i) {
    const fs::path& path = images[i];
    ItemResult result;
    result.provenance = {{"image", path.filename().string()}, {"seed", seed}};
    const std::uint64_t own_seed = image_seed(seed, i);
    result.provenance["image_seed"] = own_seed;
    try {
      const ImageInfo info = read_image_info(path);
      const Image out = apply_degradation(read_image(path), recipe, own_seed);
      write_image(out, staged.path() / path.filename(), info.depth);
      result.provenance["output_hash"] = to_hex(image_hash(out));
      result.provenance["status"] = "ok";
    } catch (const std::exception& e) {
      result.failed = true;
      result.provenance["status"] = "failed";
      result.provenance["error"] = e.what();
    }
    result.provenance["timestamp_ms"] = now_ms();
    return result;
  });
  return finish(staged, results, "degrade");
}

int cmd_enhance(const GlobalOptions& global, const BatchOptions& options) {
  const json config = load_json(options.config);
  const EnhancementChain chain = parse_chain(config);
  const auto images = list_images(options.input);
  progress("enhance: " + std::to_string(images.size()) + " images through " +
           std::to_string(chain.stages().size()) + " stages");

  StagedDirectory staged(options.out);
  auto results = for_each_image(images.size(), global.jobs, [&](std::size_t i) {
    const fs::path& path = images[i];
    ItemResult result;
    result.provenance = {{"image", path.filename().string()}, {"seed", global.seed},
                         {"chain", chain.to_json()}};
    try {
      const ImageInfo info = read_image_info(path);
      const Image input = read_image(path);
      ChainResult out = run_chain(input, chain);
      if (out.image.width() != input.width() * chain.scale() ||
          out.image.height() != input.height() * chain.scale()) {
        throw ContractError("chain produced an image of unexpected size");
      }
      write_image(out.image, staged.path() / path.filename(), info.depth);
      result.provenance["stages"] = provenance_to_json(out.provenance);
      result.provenance["output_hash"] = to_hex(image_hash(out.image));
      result.provenance["status"] = "ok";
    } catch (const StageError& e) {
      result.failed = true;
      result.provenance["status"] = "failed";
      result.provenance["failed_stage"] = e.stage_index();
      result.provenance["error"] = e.what();
    } catch (const std::exception& e) {
      result.failed = true;
      result.provenance["status"] = "failed";
      result.provenance["error"] = e.what();
    }
    result.provenance["timestamp_ms"] = now_ms();
    return result;
  });
  return finish(staged, results, "enhance");
}

}  // namespace restorebench::cli
