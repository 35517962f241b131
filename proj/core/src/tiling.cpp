#include <algorithm>
#include <exception>
#include <future>
#include <string>

#include "restorebench/enhance.hpp"
#include "restorebench/error.hpp"

namespace restorebench {

namespace {

Image extract_patch(const Image& image, int x0, int y0, int side) {
  Image patch(side, side, image.channels());
  for (int y = 0; y < side; ++y) {
    const int sy = mirror_index(y0 + y, image.height());
    for (int x = 0; x < side; ++x) {
      const int sx = mirror_index(x0 + x, image.width());
      for (int c = 0; c < image.channels(); ++c) patch.at(x, y, c) = image.at(sx, sy, c);
    }
  }
  return patch;
}

}  // namespace

Image tile_process(const Image& image, const PatchEnhancer& enhancer, const TileOptions& opt) {
  if (opt.tile < 1 || opt.apron < 0) throw ContractError("tile must be >= 1 and apron >= 0");
  if (opt.scale != 1 && opt.scale != 2) throw ContractError("tile scale must be 1 or 2");
  const int w = image.width(), h = image.height();
  const int patch_side = opt.tile + 2 * opt.apron;
  const int out_side = opt.scale * patch_side;
  const int tiles_x = (w + opt.tile - 1) / opt.tile;
  const int tiles_y = (h + opt.tile - 1) / opt.tile;

  Image out(w * opt.scale, h * opt.scale, image.channels());

  auto process_tile = [&](int tx, int ty) {
    const Image patch = extract_patch(image, tx * opt.tile - opt.apron,
                                      ty * opt.tile - opt.apron, patch_side);
    const Image result = enhancer(patch);
    if (result.width() != out_side || result.height() != out_side ||
        result.channels() != image.channels()) {
      throw ContractError("patch enhancer returned " + std::to_string(result.width()) + "x" +
                          std::to_string(result.height()) + ", expected " +
                          std::to_string(out_side) + "x" + std::to_string(out_side));
    }
    const int border = opt.scale * opt.apron;
    const int ox = tx * opt.tile * opt.scale, oy = ty * opt.tile * opt.scale;
    const int span = opt.scale * opt.tile;
    // Tiles write disjoint regions of `out`, so concurrent stitching is safe.
    for (int y = 0; y < span && oy + y < out.height(); ++y) {
      for (int x = 0; x < span && ox + x < out.width(); ++x) {
        for (int c = 0; c < image.channels(); ++c) {
          out.at(ox + x, oy + y, c) = result.at(border + x, border + y, c);
        }
      }
    }
  };

  const int jobs = std::max(1, opt.jobs);
  if (jobs == 1) {
    for (int ty = 0; ty < tiles_y; ++ty)
      for (int tx = 0; tx < tiles_x; ++tx) process_tile(tx, ty);
    return out;
  }

  // Workers take interleaved tile rows; the first error (by row) is rethrown.
  std::vector<std::future<void>> workers;
  for (int j = 0; j < jobs; ++j) {
    workers.push_back(std::async(std::launch::async, [&, j] {
      for (int ty = j; ty < tiles_y; ty += jobs)
        for (int tx = 0; tx < tiles_x; ++tx) process_tile(tx, ty);
    }));
  }
  std::exception_ptr failure;
  for (auto& f : workers) {
    try {
      f.get();
    } catch (...) {
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace restorebench
