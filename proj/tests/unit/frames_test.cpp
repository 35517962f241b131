#include <random>

#include <gtest/gtest.h>

#include "restorebench/error.hpp"
#include "restorebench/frames.hpp"
#include "restorebench/image_io.hpp"
#include "support/fixtures.hpp"

namespace rb = restorebench;
using rb::testing::TempDir;

namespace {

rb::AnnotationRecord box(int x0, int y0, int x1, int y1, int frame = 0, int track = 0) {
  rb::AnnotationRecord r;
  r.xmin = x0;
  r.ymin = y0;
  r.xmax = x1;
  r.ymax = y1;
  r.frame = frame;
  r.track_id = track;
  r.label = "car";
  return r;
}

void write_frame(const std::filesystem::path& frames, const std::string& video, int frame,
                 int w = 320, int h = 240) {
  const auto path = rb::frame_path(frames, video, frame);
  std::filesystem::create_directories(path.parent_path());
  rb::write_image(rb::Image(w, h, 3, frame / 100.0), path);
}

}  // namespace

TEST(CropRect, InteriorBoxIsCentred) {
  const auto rect = rb::crop_rect(1280, 720, box(600, 300, 650, 350));
  EXPECT_EQ(rect, (rb::CropRect{513, 213, 224, 224}));
  EXPECT_DOUBLE_EQ(rect.x + rect.width / 2.0, 625.0);
  EXPECT_DOUBLE_EQ(rect.y + rect.height / 2.0, 325.0);
}

TEST(CropRect, CornerBoxIsClampedToOrigin) {
  EXPECT_EQ(rb::crop_rect(1280, 720, box(0, 0, 50, 50)), (rb::CropRect{0, 0, 224, 224}));
  EXPECT_EQ(rb::crop_rect(1280, 720, box(1270, 710, 1280, 720)),
            (rb::CropRect{1056, 496, 224, 224}));
}

TEST(CropRect, LargeBoxSetsTheSide) {
  const auto rect = rb::crop_rect(1280, 900, box(100, 100, 900, 300));
  EXPECT_EQ(rect.width, 800);
  EXPECT_EQ(rect.height, 800);
}

TEST(CropRect, SmallFrameSpansFullDimension) {
  const auto rect = rb::crop_rect(1280, 720, box(100, 0, 900, 700));
  EXPECT_EQ(rect.width, 800);
  EXPECT_EQ(rect.height, 720);
  EXPECT_EQ(rect.y, 0);
}

TEST(CropRect, Errors) {
  auto lost = box(0, 0, 10, 10);
  lost.lost = true;
  EXPECT_THROW(rb::crop_rect(100, 100, lost), rb::ContractError);
  auto hidden = box(0, 0, 10, 10);
  hidden.occluded = true;
  EXPECT_THROW(rb::crop_rect(100, 100, hidden), rb::ContractError);
  EXPECT_THROW(rb::crop_rect(100, 100, box(200, 200, 300, 300)), rb::GeometryError);
}

TEST(CropRect, RandomBoxesStayInsideWithRequiredSide) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> dim(64, 1920);
  for (int i = 0; i < 5000; ++i) {
    const int w = dim(rng), h = dim(rng);
    std::uniform_int_distribution<int> xs(0, w - 1), ys(0, h - 1);
    int x0 = xs(rng), x1 = xs(rng), y0 = ys(rng), y1 = ys(rng);
    if (x0 > x1) std::swap(x0, x1);
    if (y0 > y1) std::swap(y0, y1);
    const auto r = box(x0, y0, x1, y1);
    const auto rect = rb::crop_rect(w, h, r);
    const int side = std::max({224, r.box_width(), r.box_height()});
    ASSERT_GE(rect.x, 0);
    ASSERT_GE(rect.y, 0);
    ASSERT_LE(rect.x + rect.width, w);
    ASSERT_LE(rect.y + rect.height, h);
    ASSERT_EQ(rect.width, std::min(side, w));
    ASSERT_EQ(rect.height, std::min(side, h));
  }
}

TEST(ExtractCrop, CopiesPixelsAndFillsRecord) {
  rb::Image frame(300, 260, 1);
  for (int y = 0; y < 260; ++y)
    for (int x = 0; x < 300; ++x) frame.at(x, y) = (x + 1000 * y) / 1e6;
  auto r = box(10, 20, 30, 40, 17, 3);
  const auto [crop, meta] = rb::extract_crop(frame, r, "vid");
  EXPECT_EQ(meta.crop_id, "vid_000017_t3");
  EXPECT_TRUE(meta.square);
  ASSERT_EQ(crop.width(), 224);
  EXPECT_EQ(crop.at(5, 7), frame.at(meta.rect.x + 5, meta.rect.y + 7));
}

TEST(Manifest, DiscoverFlatAndGrouped) {
  TempDir dir;
  rb::testing::write_file(dir / "b.txt", "");
  rb::testing::write_file(dir / "uav/a.txt", "");
  rb::testing::write_file(dir / "notes.md", "");
  const auto sources = rb::discover_annotations(dir.path());
  ASSERT_EQ(sources.size(), 2u);
  EXPECT_EQ(sources[0].collection, "");
  EXPECT_EQ(sources[1].collection, "uav");
}

TEST(Manifest, CountsVisibleRowsWithFramesAndSkipsMissing) {
  TempDir dir;
  rb::testing::write_file(dir / "ann/v1.txt",
                          "0 10 10 60 60 1 0 0 0 \"car\"\n"
                          "1 20 20 80 90 1 0 0 0 \"boat\"\n"
                          "0 12 10 62 60 2 0 0 1 \"car\"\n"
                          "0 12 10 62 60 3 1 0 0 \"car\"\n"
                          "2 500 500 520 520 2 0 0 0 \"boat\"\n"
                          "0 12 10 62 60 9 0 0 0 \"car\"\n");
  write_frame(dir / "frames", "v1", 1);
  write_frame(dir / "frames", "v1", 2);
  const auto manifest = rb::build_manifest(rb::discover_annotations(dir / "ann"), dir / "frames");
  ASSERT_EQ(manifest.crops.size(), 3u);
  EXPECT_EQ(manifest.crops[0].crop_id, "v1_000001_t0");
  EXPECT_EQ(manifest.crops[1].crop_id, "v1_000001_t1");
  EXPECT_EQ(manifest.crops[2].crop_id, "v1_000002_t0");
  EXPECT_TRUE(manifest.crops[0].square);
  ASSERT_EQ(manifest.skipped.size(), 2u);
  EXPECT_EQ(manifest.skipped[0].reason, "bbox_outside_frame");
  EXPECT_EQ(manifest.skipped[1].reason, "missing_frame");

  rb::ManifestOptions no_generated;
  no_generated.include_generated = false;
  const auto strict =
      rb::build_manifest(rb::discover_annotations(dir / "ann"), dir / "frames", no_generated);
  EXPECT_EQ(strict.crops.size(), 2u);
}

TEST(Manifest, BruteForceCountOverTenVideos) {
  TempDir dir;
  std::mt19937_64 rng(4);
  std::bernoulli_distribution coin(0.3);
  long expected = 0;
  for (int v = 0; v < 10; ++v) {
    const std::string video = "video" + std::to_string(v);
    std::string text;
    for (int f = 0; f < 6; ++f) {
      const bool has_frame = !coin(rng);
      if (has_frame) write_frame(dir / "frames", video, f, 256, 256);
      for (int t = 0; t < 3; ++t) {
        const bool lost = coin(rng), occluded = coin(rng);
        text += std::to_string(t) + " 5 5 40 40 " + std::to_string(f) + " " +
                std::to_string(lost) + " " + std::to_string(occluded) + " 0 \"car\"\n";
        if (has_frame && !lost && !occluded) ++expected;
      }
    }
    rb::testing::write_file(dir / ("ann/" + video + ".txt"), text);
  }
  const auto manifest = rb::build_manifest(rb::discover_annotations(dir / "ann"), dir / "frames");
  EXPECT_EQ(static_cast<long>(manifest.crops.size()), expected);
}

TEST(Manifest, SerializeParseRoundTripAndDeterminism) {
  rb::Manifest m;
  rb::CropRecord r;
  r.crop_id = "v_000001_t2";
  r.collection = "glider";
  r.video_id = "v";
  r.frame = 1;
  r.track_id = 2;
  r.label = "school bus";
  r.rect = {1, 2, 224, 200};
  r.square = false;
  m.crops.push_back(r);
  m.skipped.push_back({"glider", "v", 3, 0, "missing_frame"});
  const std::string text = rb::serialize_manifest(m);
  const auto back = rb::parse_manifest(text);
  EXPECT_EQ(back.crops, m.crops);
  EXPECT_EQ(back.skipped, m.skipped);
  EXPECT_EQ(rb::serialize_manifest(back), text);
  EXPECT_THROW(rb::parse_manifest("{\"status\": \"ok\"}\n"), rb::ParseError);
  EXPECT_THROW(rb::parse_manifest("not json\n"), rb::ParseError);
}
